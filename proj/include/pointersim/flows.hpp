#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <variant>

#include "pointersim/kernel.hpp"
#include "pointersim/types.hpp"

namespace psim {

using namespace std::complex_literals;

// Initial density-matrix kernel over (Q, r) for the three apparatus states.
inline AnalyticKernel initial_kernel(const InitialApparatusState& state) {
  validate_state(state);
  AnalyticKernel k;
  k.rep = KernelRep::PartialFt;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianPacket>) {
          k.smooth.a_uu = -0.25 * s.sigma * s.sigma;
          k.smooth.a_vv = -0.25 / (s.sigma * s.sigma);
          k.provenance.push_back("gaussian-initial");
        } else if constexpr (std::is_same_v<T, MomentumEigenstate>) {
          k.smooth.b_v = cplx{0.0, s.k};
          k.deltas.push_back({1.0, 0.0, 0.0});
          k.provenance.push_back("plane-wave-initial");
        } else {
          k.smooth.b_u = cplx{0.0, s.z0};
          k.deltas.push_back({0.0, 1.0, 0.0});
          k.provenance.push_back("position-spike-initial");
        }
      },
      state);
  k.validate();
  return k;
}

namespace detail {

inline AnalyticKernel apply_affine(const AnalyticKernel& k, double shift_u,
                                   double slope_vu, double shift_v) {
  AnalyticKernel out = k;
  out.smooth = k.smooth.substituted(shift_u, slope_vu, shift_v);
  for (auto& d : out.deltas) d = d.substituted(shift_u, slope_vu, shift_v);
  return out;
}

inline void require_partial_ft(const AnalyticKernel& k, const char* op) {
  if (k.rep != KernelRep::PartialFt)
    throw std::invalid_argument(std::string(op) + ": kernel must be in the (Q,r) representation");
}

}  // namespace detail

// Spin-diagonal unitary flow. With the kinetic term the argument substitution is
// r -> r + hbar*Q*t/m followed by the branch phase exp(-i*s*eps*(r*t/hbar +
// Q*t^2/(2*m*hbar))); without it only the r-phase remains. s = branch_sign.
inline AnalyticKernel flow_diagonal(const AnalyticKernel& kernel, const ModelParams& p,
                                    Spin branch, double t, HamiltonianVariant variant) {
  detail::require_partial_ft(kernel, "flow_diagonal");
  p.validate();
  if (t < 0.0) throw std::invalid_argument("flow_diagonal: t must be >= 0");
  const double s = branch_sign(branch);
  AnalyticKernel out = kernel;
  if (variant == HamiltonianVariant::Full)
    out = detail::apply_affine(out, 0.0, p.hbar * t / p.mass, 0.0);
  const cplx du = (variant == HamiltonianVariant::Full)
                      ? cplx{0.0, -s * p.epsilon * t * t / (2.0 * p.mass * p.hbar)}
                      : cplx{0.0, 0.0};
  const cplx dv = cplx{0.0, -s * p.epsilon * t / p.hbar};
  out.smooth = out.smooth.with_linear_phase(du, dv, 0.0);
  out.provenance.push_back(variant == HamiltonianVariant::Full
                               ? "diagonal-flow-full"
                               : "diagonal-flow-interaction-only");
  return out;
}

// Spin-off-diagonal unitary flow; sign = +1 selects the upper-sign branch pair
// (the down-up block under this project's convention), sign = -1 the up-down
// block. Argument shifts Q -> Q + sign*2*eps*t/hbar and (with kinetic term)
// r -> r + hbar*Q*t/m + sign*eps*t^2/m, with global phase exp(+i*sign*2*lambda*t/hbar).
inline AnalyticKernel flow_offdiagonal(const AnalyticKernel& kernel, const ModelParams& p,
                                       int sign, double t, HamiltonianVariant variant) {
  detail::require_partial_ft(kernel, "flow_offdiagonal");
  p.validate();
  if (t < 0.0) throw std::invalid_argument("flow_offdiagonal: t must be >= 0");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("flow_offdiagonal: sign must be +1 or -1");
  const double u = sign;
  const double shift_u = u * 2.0 * p.epsilon * t / p.hbar;
  const double slope = (variant == HamiltonianVariant::Full) ? p.hbar * t / p.mass : 0.0;
  const double shift_v =
      (variant == HamiltonianVariant::Full) ? u * p.epsilon * t * t / p.mass : 0.0;
  AnalyticKernel out = detail::apply_affine(kernel, shift_u, slope, shift_v);
  out.smooth = out.smooth.with_linear_phase(0.0, 0.0,
                                            cplx{0.0, u * 2.0 * p.lambda * t / p.hbar});
  out.provenance.push_back(variant == HamiltonianVariant::Full
                               ? "offdiagonal-flow-full"
                               : "offdiagonal-flow-interaction-only");
  return out;
}

namespace detail {

// (1/2pi) * integral over u of kernel(u, v) e^{-i u w}; the result lives on
// (w, v). Three routes: collapse onto a delta line, a complex Gaussian
// integral, or emergence of a new delta from a pure phase.
inline AnalyticKernel integrate_first_var(const AnalyticKernel& k) {
  constexpr double tol = 1e-12;
  const auto& s = k.smooth;
  AnalyticKernel out;
  out.provenance = k.provenance;

  // Route 1: a delta involving u fixes u as an affine function of v.
  int idx = -1;
  for (std::size_t i = 0; i < k.deltas.size(); ++i)
    if (std::abs(k.deltas[i].k_u) > tol &&
        (idx < 0 || std::abs(k.deltas[i].k_u) > std::abs(k.deltas[idx].k_u)))
      idx = static_cast<int>(i);
  if (idx >= 0) {
    const DeltaFactor d = k.deltas[static_cast<std::size_t>(idx)];
    const double q0 = d.c / d.k_u;
    const double q1 = -d.k_v / d.k_u;
    QuadExpKernel ns;
    ns.a_vv = s.a_vv + s.a_uu * q1 * q1 + s.a_uv * q1;
    ns.b_v = 2.0 * s.a_uu * q0 * q1 + s.a_uv * q0 + s.b_u * q1 + s.b_v;
    ns.c = s.a_uu * q0 * q0 + s.b_u * q0 + s.c -
           std::log(2.0 * pi * std::abs(d.k_u));
    ns.b_u = cplx{0.0, -q0};
    ns.a_uv = cplx{0.0, -q1};
    out.smooth = ns;
    for (std::size_t i = 0; i < k.deltas.size(); ++i) {
      if (static_cast<int>(i) == idx) continue;
      const DeltaFactor& e = k.deltas[i];
      DeltaFactor nd{0.0, e.k_v + e.k_u * q1, e.c - e.k_u * q0};
      if (std::abs(nd.k_v) <= tol)
        throw NonIntegrableError("integrate_first_var: degenerate delta pair");
      out.deltas.push_back(nd);
    }
    out.validate();
    return out;
  }

  // Remaining deltas (if any) are pure-v and ride along unchanged.
  out.deltas = k.deltas;

  if (s.a_uu.real() < -tol) {
    // Route 2: integral of exp(a u^2 + w u) with w = b_u + a_uv v - i*W.
    const cplx a = s.a_uu;
    QuadExpKernel ns;
    ns.a_uu = 1.0 / (4.0 * a);
    ns.a_uv = 0.5i * s.a_uv / a;
    ns.b_u = 0.5i * s.b_u / a;
    ns.a_vv = s.a_vv - s.a_uv * s.a_uv / (4.0 * a);
    ns.b_v = s.b_v - s.b_u * s.a_uv / (2.0 * a);
    ns.c = s.c - s.b_u * s.b_u / (4.0 * a) - std::log(2.0 * pi) +
           0.5 * (std::log(pi) - std::log(-a));
    out.smooth = ns;
    out.validate();
    return out;
  }

  if (std::abs(s.a_uu) <= tol && std::abs(s.a_uv.real()) <= tol &&
      std::abs(s.b_u.real()) <= tol) {
    // Route 3: pure phase in u produces delta(W - Im(a_uv) v - Im(b_u)).
    QuadExpKernel ns;
    ns.a_vv = s.a_vv;
    ns.b_v = s.b_v;
    ns.c = s.c;
    out.smooth = ns;
    out.deltas.push_back({1.0, -s.a_uv.imag(), s.b_u.imag()});
    out.validate();
    return out;
  }

  throw NonIntegrableError("integrate_first_var: kernel not integrable over first variable");
}

inline AnalyticKernel transposed(const AnalyticKernel& k) {
  AnalyticKernel out = k;
  out.smooth = k.smooth.transposed();
  for (auto& d : out.deltas) d = d.transposed();
  return out;
}

}  // namespace detail

// Closed-form inverse transform over Q: rho(R, r) = (1/2pi) int e^{-iQR} rho(Q, r) dQ.
inline AnalyticKernel to_position_rep(const AnalyticKernel& kernel) {
  detail::require_partial_ft(kernel, "to_position_rep");
  AnalyticKernel out = detail::integrate_first_var(kernel);
  out.rep = KernelRep::Position;
  out.provenance.push_back("position-rep");
  return out;
}

// Companion transform over r: rho(Q, q) = (1/2pi) int e^{-iqr} rho(Q, r) dr.
inline AnalyticKernel to_momentum_rep(const AnalyticKernel& kernel) {
  detail::require_partial_ft(kernel, "to_momentum_rep");
  AnalyticKernel out =
      detail::transposed(detail::integrate_first_var(detail::transposed(kernel)));
  out.rep = KernelRep::Momentum;
  out.provenance.push_back("momentum-rep");
  return out;
}

struct Separations {
  double delta_z;
  double delta_p;
};

// Peak separations of the two pointer branches in position and momentum.
inline Separations separations(const ModelParams& p, double t) {
  p.validate();
  if (t < 0.0) throw std::invalid_argument("separations: t must be >= 0");
  return {p.epsilon * t * t / p.mass, 2.0 * p.epsilon * t / p.hbar};
}

// Magnitude of the spin off-diagonal block at (Q, r) = (0, 0) for an initial
// Gaussian of width sigma; the residual spin coherence after time t.
inline double coherence_factor(double sigma, const ModelParams& p, double t,
                               HamiltonianVariant variant) {
  if (!(sigma > 0.0)) throw std::invalid_argument("coherence_factor: sigma must be > 0");
  p.validate();
  if (t < 0.0) throw std::invalid_argument("coherence_factor: t must be >= 0");
  const auto sep = separations(p, t);
  if (variant == HamiltonianVariant::Full)
    return std::exp(-sep.delta_z * sep.delta_z / (4.0 * sigma * sigma) -
                    sigma * sigma * sep.delta_p * sep.delta_p / 4.0);
  const double x = sigma * p.epsilon * t / p.hbar;
  return std::exp(-x * x);
}

struct Diagonal {
  Spin branch = Spin::Up;
};
struct OffDiagonal {
  int sign = +1;
};
using SpinBlockElement = std::variant<Diagonal, OffDiagonal>;

// Composed closed form: initial kernel -> unitary flow -> representation
// transform. The composition, not any individually printed special case, is
// treated as authoritative.
inline AnalyticKernel catalog_closed_form(const InitialApparatusState& state,
                                          const ModelParams& p,
                                          HamiltonianVariant variant, KernelRep rep,
                                          const SpinBlockElement& element, double t) {
  AnalyticKernel k = initial_kernel(state);
  k = std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Diagonal>)
          return flow_diagonal(k, p, e.branch, t, variant);
        else
          return flow_offdiagonal(k, p, e.sign, t, variant);
      },
      element);
  switch (rep) {
    case KernelRep::PartialFt: return k;
    case KernelRep::Position: return to_position_rep(k);
    default: return to_momentum_rep(k);
  }
}

}  // namespace psim
