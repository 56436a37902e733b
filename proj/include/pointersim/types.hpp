#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace psim {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// Thrown when a numerical guard trips (boundary contact, convergence failure).
// Distinct from std::invalid_argument so callers can map it to its own exit code.
struct NumericalGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Physical constants of the model: level splitting, coupling strength
// (field gradient times magnetic moment), particle mass, and hbar.
struct ModelParams {
  double lambda = 0.0;
  double epsilon = 0.0;
  double mass = 1.0;
  double hbar = 1.0;

  void validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw std::invalid_argument("ModelParams: mass must be positive and finite");
    if (!(hbar > 0.0) || !std::isfinite(hbar))
      throw std::invalid_argument("ModelParams: hbar must be positive and finite");
    if (!std::isfinite(epsilon) || !std::isfinite(lambda))
      throw std::invalid_argument("ModelParams: epsilon and lambda must be finite");
  }
};

struct SpinAmplitudes {
  cplx a{std::numbers::sqrt2 / 2.0};
  cplx b{std::numbers::sqrt2 / 2.0};

  double norm2() const { return std::norm(a) + std::norm(b); }

  void validate() const {
    const double n = norm2();
    if (std::abs(n - 1.0) > 1e-12)
      throw std::invalid_argument("SpinAmplitudes: |a|^2+|b|^2 must be 1, got " +
                                  std::to_string(n));
  }
};

enum class Spin { Up, Down };

// Up carries the upper sign of the two-branch closed-form solutions; Down the lower.
constexpr int branch_sign(Spin s) { return s == Spin::Up ? +1 : -1; }

inline std::string to_string(Spin s) { return s == Spin::Up ? "up" : "down"; }

enum class HamiltonianVariant { Full, InteractionOnly };

inline std::string to_string(HamiltonianVariant v) {
  return v == HamiltonianVariant::Full ? "full" : "interaction_only";
}

// Uniform periodic position grid, z_i = center - length/2 + i*dz.
struct GridSpec {
  std::size_t n_points = 4096;
  double length = 80.0;
  double center = 0.0;

  double dz() const { return length / static_cast<double>(n_points); }
  double dk() const { return 2.0 * pi / length; }
  double z(std::size_t i) const {
    return center - 0.5 * length + static_cast<double>(i) * dz();
  }
  // FFT-ordered wavenumber for bin i.
  double k(std::size_t i) const {
    const auto n = n_points;
    const double j = (i < n / 2) ? static_cast<double>(i)
                                 : static_cast<double>(i) - static_cast<double>(n);
    return j * dk();
  }

  void validate() const {
    if (n_points < 256 || (n_points & (n_points - 1)) != 0)
      throw std::invalid_argument("GridSpec: n_points must be a power of two >= 256");
    if (!(length > 0.0) || !std::isfinite(length) || !std::isfinite(center))
      throw std::invalid_argument("GridSpec: length must be positive and finite");
  }
};

struct MomentumEigenstate {
  double k = 0.0;
};
struct PositionEigenstate {
  double z0 = 0.0;
};
struct GaussianPacket {
  double sigma = 1.0;
};

using InitialApparatusState =
    std::variant<MomentumEigenstate, PositionEigenstate, GaussianPacket>;

inline void validate_state(const InitialApparatusState& s) {
  if (const auto* g = std::get_if<GaussianPacket>(&s)) {
    if (!(g->sigma > 0.0) || !std::isfinite(g->sigma))
      throw std::invalid_argument("GaussianPacket: sigma must be positive");
  }
}

inline std::string state_label(const InitialApparatusState& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MomentumEigenstate>)
          return "momentum_eigenstate";
        else if constexpr (std::is_same_v<T, PositionEigenstate>)
          return "position_eigenstate";
        else
          return "gaussian_packet";
      },
      s);
}

// Center/difference coordinates for the two-point position variables.
struct CenterDiff {
  double R;
  double r;
};

constexpr CenterDiff to_center_diff(double z, double zp) {
  return {0.5 * (z + zp), z - zp};
}
constexpr std::pair<double, double> from_center_diff(CenterDiff cd) {
  return {cd.R + 0.5 * cd.r, cd.R - 0.5 * cd.r};
}

// Difference/center coordinates for the two-point momentum variables.
struct MomentumVars {
  double Q;
  double q;
};

constexpr MomentumVars to_momentum_vars(double p, double pp) {
  return {p - pp, 0.5 * (p + pp)};
}
constexpr std::pair<double, double> from_momentum_vars(MomentumVars mv) {
  return {mv.q + 0.5 * mv.Q, mv.q - 0.5 * mv.Q};
}

}  // namespace psim
