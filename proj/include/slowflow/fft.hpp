#pragma once

#include <complex>
#include <span>

#include "slowflow/grid.hpp"

namespace slowflow::detail {

// Unnormalized c2c DFT over the grid's active axes, out-of-place allowed
// (in == out allowed). sign -1 = forward (e^{-ikx}), +1 = backward.
// Plans are cached per shape with FFTW_ESTIMATE (deterministic plan choice).
void dft(const Grid& g, const std::complex<double>* in,
         std::complex<double>* out, int sign);

// Unnormalized 1D c2c DFT along axis 3 applied to every (i1,i2) row of a 3D
// array in row-major (i3 fastest) layout. Used by the vertical-plane norms.
void dft_axis3(const Grid& g, const std::complex<double>* in,
               std::complex<double>* out, int sign);

// Flush denormal floats to zero on this thread. Spectral tails decay into
// the denormal range and cripple the product/transform passes otherwise;
// call once per worker thread (library init covers the main thread).
void enable_ftz();

}  // namespace slowflow::detail
