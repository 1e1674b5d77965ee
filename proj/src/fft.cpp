#include "landau/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace landau {

namespace {
// FFTW plan creation is not thread safe; execution with fftw_execute_dft on
// distinct arrays is.  Plans are cached forever (a handful of sizes per run).
std::mutex g_mutex;
std::map<std::pair<int, int>, fftw_plan> g_plans;

fftw_plan plan_for(int N, int sign) {
  std::lock_guard<std::mutex> lock(g_mutex);
  auto key = std::make_pair(N, sign);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(N) * N);
  fftw_plan p = fftw_plan_dft_2d(N, N, buf, buf, sign, FFTW_ESTIMATE);
  fftw_free(buf);
  g_plans.emplace(key, p);
  return p;
}
}  // namespace

void fft2d(int N, std::complex<double>* data, int sign) {
  fftw_plan p = plan_for(N, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

}  // namespace landau
