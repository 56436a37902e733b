#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pointersim/types.hpp"

namespace psim {

// Radix-2 complex FFT with precomputed twiddles and bit-reversal table.
// Forward kernel is e^{-2*pi*i*j*k/N}; inverse is unscaled unless
// inverse_scaled() is used. Grids in this project are powers of two by
// construction (GridSpec invariant), so no other radices are needed.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("Fft: size must be a power of two >= 2");
    tw_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double ang = -2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
      tw_[k] = {std::cos(ang), std::sin(ang)};
    }
    rev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t x = i, r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        r = (r << 1) | (x & 1);
        x >>= 1;
      }
      rev_[i] = r;
    }
  }

  std::size_t size() const { return n_; }

  // sign = -1: forward; sign = +1: inverse kernel (no 1/N scaling).
  void transform(std::span<cplx> data, int sign) const {
    if (data.size() != n_) throw std::invalid_argument("Fft: wrong data size");
    for (std::size_t i = 0; i < n_; ++i)
      if (rev_[i] > i) std::swap(data[i], data[rev_[i]]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t step = n_ / len;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t j = 0; j < len / 2; ++j) {
          cplx w = tw_[j * step];
          if (sign > 0) w = std::conj(w);
          const cplx u = data[i + j];
          const cplx v = data[i + j + len / 2] * w;
          data[i + j] = u + v;
          data[i + j + len / 2] = u - v;
        }
      }
    }
  }

  void forward(std::span<cplx> data) const { transform(data, -1); }

  void inverse_scaled(std::span<cplx> data) const {
    transform(data, +1);
    const double s = 1.0 / static_cast<double>(n_);
    for (auto& x : data) x *= s;
  }

 private:
  std::size_t n_;
  std::vector<cplx> tw_;
  std::vector<std::size_t> rev_;
};

}  // namespace psim
