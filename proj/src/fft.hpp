#ifndef TORUSDEC_SRC_FFT_HPP_
#define TORUSDEC_SRC_FFT_HPP_

// Thin RAII layer over FFTW3. All transforms use the e^{-2 pi i jk/n}
// convention for the forward direction and are unnormalized both ways.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace torusdec::fft {

using cplx = std::complex<double>;

// Full length-n spectrum of a real sequence (Hermitian half expanded).
std::vector<cplx> forward_real(std::span<const double> data);

std::vector<cplx> forward(std::span<const cplx> data);
std::vector<cplx> inverse(std::span<const cplx> data);

// Row-major rows x cols real input, full complex output (row-major).
std::vector<cplx> forward_real_2d(std::span<const double> data,
                                  std::size_t rows, std::size_t cols);
std::vector<cplx> inverse_2d(std::span<const cplx> data, std::size_t rows,
                             std::size_t cols);

// Circular convolution of two equal-length real sequences.
std::vector<double> circular_convolve(std::span<const double> a,
                                      std::span<const double> b);

}  // namespace torusdec::fft

#endif  // TORUSDEC_SRC_FFT_HPP_
