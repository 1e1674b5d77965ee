#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "landau/quadrature.hpp"

using namespace landau;

// int_0^T e^{-t} e^{-i tau t} dt has the closed form (1 - e^{-(1+i tau)T})/(1+i tau)
static cplx decaying_exp_reference(double tau, double T) {
  const cplx z(1.0, tau);
  return (1.0 - std::exp(-z * T)) / z;
}

TEST_CASE("adaptive Simpson on a smooth integrand") {
  auto f = [](double t) { return cplx(std::exp(t), 0.0); };
  const cplx I = adaptive_simpson(f, 0.0, 1.0, 1e-12);
  CHECK(std::abs(I - cplx(std::exp(1.0) - 1.0, 0.0)) < 1e-10);
}

TEST_CASE("slow-phase branch matches closed form") {
  auto env = [](double t) { return cplx(std::exp(-t), 0.0); };
  for (double tau : {0.0, 0.7, -3.0}) {
    const cplx I = fourier_integral(env, 0.0, 30.0, tau, 1e-11);
    CHECK(std::abs(I - decaying_exp_reference(tau, 30.0)) < 1e-9);
  }
}

TEST_CASE("Filon branch handles fast phases") {
  auto env = [](double t) { return cplx(std::exp(-t), 0.0); };
  for (double tau : {40.0, 200.0, -125.0}) {
    const cplx I = fourier_integral(env, 0.0, 30.0, tau, 1e-11);
    CHECK(std::abs(I - decaying_exp_reference(tau, 30.0)) < 1e-9);
  }
}

TEST_CASE("branches agree near the dispatch threshold") {
  auto env = [](double t) { return cplx(t * std::exp(-0.5 * t * t), 0.0); };
  for (double tau : {4.9, 5.1}) {  // |tau| * 10 straddles 50
    const cplx a = adaptive_simpson(
        [&](double t) { return env(t) * std::polar(1.0, -tau * t); }, 0.0, 10.0, 1e-12);
    const cplx b = filon_integral(env, 0.0, 10.0, tau, 1e-12);
    CHECK(std::abs(a - b) < 1e-9);
  }
}

TEST_CASE("conjugate symmetry of the Fourier integral of a real envelope") {
  auto env = [](double t) { return cplx(t * std::exp(-0.3 * t * t), 0.0); };
  const cplx p = fourier_integral(env, 0.0, 12.0, 2.2, 1e-11);
  const cplx m = fourier_integral(env, 0.0, 12.0, -2.2, 1e-11);
  CHECK(std::abs(p - std::conj(m)) < 1e-10);
}

TEST_CASE("frequency sweep matches the closed form at every node") {
  const double T = 12.0, tau_max = 40.0;
  const int n = 16;
  auto rows = filon_sweep([](double t) { return std::exp(-t); }, T, tau_max, n, 1024);
  REQUIRE(rows.size() == static_cast<size_t>(n + 1));
  for (int j = 0; j <= n; ++j) {
    const double tau = tau_max * j / n;
    CHECK(std::abs(rows[j] - decaying_exp_reference(tau, T)) < 1e-9);
  }
}
