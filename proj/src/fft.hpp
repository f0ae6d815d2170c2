#pragma once

#include <complex>

namespace microlocal::detail {

/// In-place unnormalized DFT over a dim-dimensional cube of side n.
/// sign = -1 forward (e^{-2 pi i jk/n}), +1 backward.
void fft_inplace(std::complex<double>* data, int dim, int n, int sign);

}  // namespace microlocal::detail
