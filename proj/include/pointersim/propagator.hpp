#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointersim/fft.hpp"
#include "pointersim/types.hpp"

namespace psim {

// Two-component spinor wavefunction on a periodic grid. The two branches are
// the apparatus states entangled with spin up / spin down; the sigma_z-diagonal
// Hamiltonian never mixes them, so each evolves as a scalar problem.
struct SpinorField {
  GridSpec grid;
  std::vector<cplx> up, down;
  double time = 0.0;

  const std::vector<cplx>& branch(Spin s) const { return s == Spin::Up ? up : down; }
  std::vector<cplx>& branch(Spin s) { return s == Spin::Up ? up : down; }

  double branch_norm2(Spin s) const {
    double acc = 0.0;
    for (const cplx& v : branch(s)) acc += std::norm(v);
    return acc * grid.dz();
  }
};

struct PropagatorConfig {
  enum class Mode { SplitStep, ExactLinear };
  double dt = 1e-3;
  std::size_t n_steps = 0;  // 0: derived from t_final
  Mode mode = Mode::SplitStep;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::invalid_argument("PropagatorConfig: dt must be positive");
  }
};

// Initial product state: both spin components carry the same apparatus
// wavefunction. Eigenstates of position require a regularization width.
inline SpinorField init_field(const InitialApparatusState& state, const GridSpec& grid,
                              std::optional<double> regularization = std::nullopt) {
  grid.validate();
  validate_state(state);
  const std::size_t n = grid.n_points;
  const double dz = grid.dz();

  auto gaussian = [&](double z0, double sigma) {
    if (sigma < 3.0 * dz)
      throw std::invalid_argument(
          "init_field: packet too narrow for grid resolution (sigma = " +
          std::to_string(sigma) + ", dz = " + std::to_string(dz) + ")");
    const double lo = grid.center - 0.5 * grid.length;
    const double hi = grid.center + 0.5 * grid.length;
    if (z0 - 5.0 * sigma < lo || z0 + 5.0 * sigma > hi)
      throw std::invalid_argument(
          "init_field: packet support (5 sigma) does not fit the grid window");
    std::vector<cplx> psi(n);
    const double norm = 1.0 / std::sqrt(sigma * std::sqrt(pi));
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid.z(i) - z0;
      psi[i] = norm * std::exp(-x * x / (2.0 * sigma * sigma));
    }
    return psi;
  };

  std::vector<cplx> psi;
  if (const auto* g = std::get_if<GaussianPacket>(&state)) {
    psi = gaussian(0.0, g->sigma);
  } else if (const auto* m = std::get_if<MomentumEigenstate>(&state)) {
    const double cycles = m->k * grid.length / (2.0 * pi);
    if (std::abs(cycles - std::round(cycles)) > 1e-9)
      throw std::invalid_argument(
          "init_field: plane-wave k must be commensurate with the periodic grid");
    psi.resize(n);
    const double norm = 1.0 / std::sqrt(grid.length);
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = m->k * grid.z(i);
      psi[i] = norm * cplx{std::cos(ph), std::sin(ph)};
    }
  } else {
    const auto& pz = std::get<PositionEigenstate>(state);
    if (!regularization || !(*regularization > 0.0))
      throw std::invalid_argument(
          "init_field: position eigenstate requires a regularization width");
    psi = gaussian(pz.z0, *regularization);
  }

  SpinorField f;
  f.grid = grid;
  f.up = psi;
  f.down = std::move(psi);
  return f;
}

namespace detail {

inline void check_boundary(const SpinorField& f) {
  const std::size_t n = f.grid.n_points;
  const double dz = f.grid.dz();
  double edge = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    edge += std::norm(f.up[i]) + std::norm(f.down[i]) + std::norm(f.up[n - 1 - i]) +
            std::norm(f.down[n - 1 - i]);
  edge *= dz;
  if (edge > 2e-10)  // 1e-10 per branch
    throw NumericalGuardError(
        "evolve: wavepacket reached the grid boundary (edge probability " +
        std::to_string(edge) + ")");
}

inline void apply_phase(std::vector<cplx>& psi, const std::vector<cplx>& phase) {
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= phase[i];
}

}  // namespace detail

// Unitary evolution of both branches from field.time by t_span (may be
// negative). SplitStep uses symmetric potential/kinetic/potential splitting;
// ExactLinear applies the closed-form linear-potential propagator in a single
// step, including the cubic-in-time global phase. The interaction-only variant
// is an exact position-dependent phase in either mode.
inline SpinorField evolve(const SpinorField& field, const ModelParams& p,
                          HamiltonianVariant variant, const PropagatorConfig& config,
                          double t_span) {
  p.validate();
  config.validate();
  SpinorField f = field;
  const std::size_t n = f.grid.n_points;
  const double dz = f.grid.dz();
  (void)dz;

  if (variant == HamiltonianVariant::InteractionOnly) {
    for (Spin s : {Spin::Up, Spin::Down}) {
      const double sg = branch_sign(s);
      auto& psi = f.branch(s);
      for (std::size_t i = 0; i < n; ++i) {
        const double ph = -sg * (p.lambda + p.epsilon * f.grid.z(i)) * t_span / p.hbar;
        psi[i] *= cplx{std::cos(ph), std::sin(ph)};
      }
    }
    f.time += t_span;
    return f;
  }

  Fft plan(n);

  if (config.mode == PropagatorConfig::Mode::ExactLinear) {
    for (Spin s : {Spin::Up, Spin::Down}) {
      const double sg = branch_sign(s);
      const double F = sg * p.epsilon;
      auto& psi = f.branch(s);
      // momentum-argument shift and constant-energy phase in position space
      for (std::size_t i = 0; i < n; ++i) {
        const double ph =
            -(F * t_span * f.grid.z(i) + sg * p.lambda * t_span) / p.hbar;
        psi[i] *= cplx{std::cos(ph), std::sin(ph)};
      }
      plan.forward(psi);
      for (std::size_t i = 0; i < n; ++i) {
        const double mom = p.hbar * f.grid.k(i);
        // expanded (about F = 0) form of ((mom+F t)^3 - mom^3)/(6 m F)
        const double g = mom * mom * t_span / (2.0 * p.mass) +
                         mom * F * t_span * t_span / (2.0 * p.mass) +
                         F * F * t_span * t_span * t_span / (6.0 * p.mass);
        const double ph = -g / p.hbar;
        psi[i] *= cplx{std::cos(ph), std::sin(ph)};
      }
      plan.inverse_scaled(psi);
    }
    f.time += t_span;
    detail::check_boundary(f);
    return f;
  }

  // SplitStep
  const double direction = t_span >= 0.0 ? 1.0 : -1.0;
  const double dt = direction * config.dt;
  std::size_t steps = config.n_steps;
  if (steps == 0) steps = static_cast<std::size_t>(std::llround(std::abs(t_span) / config.dt));
  if (std::abs(static_cast<double>(steps) * config.dt - std::abs(t_span)) > 1e-9)
    throw std::invalid_argument("evolve: t_span must be an integer multiple of dt");

  std::vector<cplx> kin(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = -p.hbar * f.grid.k(i) * f.grid.k(i) * dt / (2.0 * p.mass);
    kin[i] = cplx{std::cos(ph), std::sin(ph)};
  }
  for (Spin s : {Spin::Up, Spin::Down}) {
    const double sg = branch_sign(s);
    std::vector<cplx> vhalf(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = -sg * (p.lambda + p.epsilon * f.grid.z(i)) * dt / (2.0 * p.hbar);
      vhalf[i] = cplx{std::cos(ph), std::sin(ph)};
    }
    auto& psi = f.branch(s);
    for (std::size_t step = 0; step < steps; ++step) {
      detail::apply_phase(psi, vhalf);
      plan.forward(psi);
      detail::apply_phase(psi, kin);
      plan.inverse_scaled(psi);
      detail::apply_phase(psi, vhalf);
    }
  }
  f.time += t_span;
  detail::check_boundary(f);
  return f;
}

// Branch inner product <psi_down(t)|psi_up(t)> by grid quadrature.
inline cplx overlap(const SpinorField& f) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.grid.n_points; ++i)
    acc += std::conj(f.down[i]) * f.up[i];
  return acc * f.grid.dz();
}

enum class SpinBlock { UpUp, DownDown, UpDown, DownUp };

inline std::string to_string(SpinBlock b) {
  switch (b) {
    case SpinBlock::UpUp: return "up_up";
    case SpinBlock::DownDown: return "down_down";
    case SpinBlock::UpDown: return "up_down";
    default: return "down_up";
  }
}

namespace detail {

// psi(z + s) on the periodic grid via a Fourier phase shift.
inline std::vector<cplx> shifted(const std::vector<cplx>& psi, double s,
                                 const GridSpec& grid, const Fft& plan) {
  std::vector<cplx> out = psi;
  plan.forward(out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double ph = grid.k(i) * s;
    out[i] *= cplx{std::cos(ph), std::sin(ph)};
  }
  plan.inverse_scaled(out);
  return out;
}

}  // namespace detail

// One sampled value of the block density matrix in the (Q, r) representation:
// integral of e^{iQR} psi_s(R + r/2) conj(psi_s'(R - r/2)) dR.
inline cplx numeric_partial_ft_sample(const SpinorField& f, SpinBlock block, double Q,
                                      double r) {
  const double dz = f.grid.dz();
  if (std::abs(Q) > pi / dz)
    throw std::invalid_argument("numeric_partial_ft_sample: Q outside resolvable band");
  if (std::abs(r) > f.grid.length)
    throw std::invalid_argument("numeric_partial_ft_sample: |r| exceeds the grid window");
  Spin sa = (block == SpinBlock::UpUp || block == SpinBlock::UpDown) ? Spin::Up : Spin::Down;
  Spin sb = (block == SpinBlock::UpUp || block == SpinBlock::DownUp) ? Spin::Up : Spin::Down;
  Fft plan(f.grid.n_points);
  const auto A = detail::shifted(f.branch(sa), +0.5 * r, f.grid, plan);
  const auto B = detail::shifted(f.branch(sb), -0.5 * r, f.grid, plan);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.grid.n_points; ++i) {
    const double ph = Q * f.grid.z(i);
    acc += cplx{std::cos(ph), std::sin(ph)} * A[i] * std::conj(B[i]);
  }
  return acc * dz;
}

// Per-branch position and momentum probability densities. Momentum arrays are
// sorted ascending in p = hbar * k.
struct Marginals {
  std::vector<double> z;
  std::vector<double> dens_z_up, dens_z_down;
  std::vector<double> p;
  std::vector<double> dens_p_up, dens_p_down;
};

inline Marginals marginals(const SpinorField& f, const ModelParams& params = {}) {
  const std::size_t n = f.grid.n_points;
  const double dz = f.grid.dz();
  Marginals m;
  m.z.resize(n);
  m.dens_z_up.resize(n);
  m.dens_z_down.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.z[i] = f.grid.z(i);
    m.dens_z_up[i] = std::norm(f.up[i]);
    m.dens_z_down[i] = std::norm(f.down[i]);
  }
  Fft plan(n);
  m.p.resize(n);
  m.dens_p_up.resize(n);
  m.dens_p_down.resize(n);
  const double dk = f.grid.dk();
  for (Spin s : {Spin::Up, Spin::Down}) {
    std::vector<cplx> psi = f.branch(s);
    // analysis convention e^{-ikz}: psi_tilde(k) = dz/sqrt(2 pi) sum e^{-ikz} psi
    plan.forward(psi);
    auto& dens = (s == Spin::Up) ? m.dens_p_up : m.dens_p_down;
    const double scale = dz / std::sqrt(2.0 * pi);
    for (std::size_t i = 0; i < n; ++i) {
      // ascending order: index i holds signed bin (i - n/2)
      const long sn = static_cast<long>(i) - static_cast<long>(n / 2);
      const std::size_t bin =
          static_cast<std::size_t>((sn + static_cast<long>(n)) % static_cast<long>(n));
      const double k = static_cast<double>(sn) * dk;
      // undo the grid-origin phase so the transform references z, not bin index
      const double ph = -k * f.grid.z(0);
      const cplx val = psi[bin] * cplx{std::cos(ph), std::sin(ph)} * scale;
      dens[i] = std::norm(val) / params.hbar;
      if (s == Spin::Up) m.p[i] = params.hbar * k;
    }
  }
  return m;
}

}  // namespace psim
