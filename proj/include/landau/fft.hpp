// Thin FFTW wrapper for square c2c 2d transforms.  Plans are cached per
// (N, sign) and created with FFTW_ESTIMATE so planning is deterministic and
// results are reproducible run to run.  Transforms are unnormalized, matching
// FFTW: ifft(fft(x)) = N^2 x.
#pragma once

#include <complex>
#include <vector>

namespace landau {

// sign: -1 forward (e^{-i...}), +1 backward.  data is row-major N*N, in place.
void fft2d(int N, std::complex<double>* data, int sign);

}  // namespace landau
