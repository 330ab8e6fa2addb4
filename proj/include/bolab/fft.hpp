#pragma once

#include <complex>
#include <vector>

namespace bolab::fft {

/// Smallest 5-smooth integer (2^a 3^b 5^c) that is >= n.
int good_size(int n);

/// In-place unnormalized forward DFT: X_k = sum_j x_j e^{-2pi i jk/M}.
void forward(std::vector<std::complex<double>>& data);

/// In-place unnormalized backward DFT: x_j = sum_k X_k e^{+2pi i jk/M}.
void backward(std::vector<std::complex<double>>& data);

}  // namespace bolab::fft
