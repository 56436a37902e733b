#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointersim/fft.hpp"
#include "pointersim/types.hpp"

namespace psim {

// rho indexed [iR][col]; every column is one fixed value of the second variable.
using ComplexGrid2D = std::vector<std::vector<cplx>>;

namespace detail {

inline double uniform_spacing(const std::vector<double>& x, const char* what) {
  if (x.size() < 2) throw std::invalid_argument(std::string(what) + ": need >= 2 points");
  const double d = x[1] - x[0];
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (std::abs(x[i + 1] - x[i] - d) > 1e-9 * std::max(1.0, std::abs(d)))
      throw std::invalid_argument(std::string(what) + ": grid is not uniform");
  }
  if (!(d > 0.0)) throw std::invalid_argument(std::string(what) + ": grid must be increasing");
  return d;
}

}  // namespace detail

struct PartialFtResult {
  std::vector<double> Q;   // ascending
  ComplexGrid2D data;      // [iQ][col]
};

// Discrete version of the e^{+iQR} transform over the first variable, one
// 1-D transform per column. Q bins span [-pi/dR, pi/dR) in ascending order.
inline PartialFtResult partial_ft_forward(const std::vector<double>& R,
                                          const ComplexGrid2D& rho) {
  const double dR = detail::uniform_spacing(R, "partial_ft_forward");
  const std::size_t n = R.size();
  if (rho.size() != n) throw std::invalid_argument("partial_ft_forward: row count mismatch");
  const std::size_t ncols = rho.front().size();
  const double R0 = R.front();
  const double dQ = 2.0 * pi / (dR * static_cast<double>(n));

  Fft plan(n);
  PartialFtResult out;
  out.Q.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.Q[i] = (static_cast<double>(i) - static_cast<double>(n / 2)) * dQ;
  out.data.assign(n, std::vector<cplx>(ncols));

  std::vector<cplx> col(n);
  for (std::size_t c = 0; c < ncols; ++c) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rho[j].size() != ncols)
        throw std::invalid_argument("partial_ft_forward: ragged input");
      col[j] = rho[j][c];
    }
    plan.transform(col, +1);  // sum_j e^{+2 pi i n j / N} col_j
    for (std::size_t i = 0; i < n; ++i) {
      const double Qv = out.Q[i];
      // signed bin index -> FFT bin
      const long sn = static_cast<long>(i) - static_cast<long>(n / 2);
      const std::size_t bin = static_cast<std::size_t>((sn + static_cast<long>(n)) %
                                                       static_cast<long>(n));
      const cplx phase{std::cos(Qv * R0), std::sin(Qv * R0)};
      out.data[i][c] = dR * phase * col[bin];
    }
  }
  return out;
}

// Inverse of partial_ft_forward: rho(R) = (1/2pi) sum_Q e^{-iQR} rho(Q) dQ.
inline ComplexGrid2D partial_ft_inverse(const std::vector<double>& Q,
                                        const ComplexGrid2D& rhoQ,
                                        const std::vector<double>& R) {
  const double dQ = detail::uniform_spacing(Q, "partial_ft_inverse");
  const double dR = detail::uniform_spacing(R, "partial_ft_inverse");
  const std::size_t n = Q.size();
  if (rhoQ.size() != n || R.size() != n)
    throw std::invalid_argument("partial_ft_inverse: size mismatch");
  const std::size_t ncols = rhoQ.front().size();
  const double R0 = R.front();

  Fft plan(n);
  ComplexGrid2D out(n, std::vector<cplx>(ncols));
  std::vector<cplx> col(n);
  for (std::size_t c = 0; c < ncols; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const double Qv = Q[i];
      const cplx phase{std::cos(-Qv * R0), std::sin(-Qv * R0)};
      const long sn = static_cast<long>(i) - static_cast<long>(n / 2);
      const std::size_t bin = static_cast<std::size_t>((sn + static_cast<long>(n)) %
                                                       static_cast<long>(n));
      col[bin] = phase * rhoQ[i][c];
    }
    plan.transform(col, -1);  // sum_n e^{-2 pi i n j / N}
    for (std::size_t j = 0; j < n; ++j) out[j][c] = col[j] * dQ / (2.0 * pi);
  }
  (void)dR;
  return out;
}

// Trace diagnostic: integral of observable(x) * density(x) over the grid.
// The density must be normalized; the error message reports the actual norm.
inline double expectation(const std::vector<double>& density,
                          const std::vector<double>& x,
                          const std::vector<double>& observable) {
  const double dx = detail::uniform_spacing(x, "expectation");
  if (density.size() != x.size() || observable.size() != x.size())
    throw std::invalid_argument("expectation: size mismatch");
  double norm = 0.0;
  for (double d : density) norm += d;
  norm *= dx;
  if (std::abs(norm - 1.0) > 1e-8)
    throw std::invalid_argument("expectation: density not normalized, norm = " +
                                std::to_string(norm));
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += observable[i] * density[i];
  return acc * dx;
}

}  // namespace psim
