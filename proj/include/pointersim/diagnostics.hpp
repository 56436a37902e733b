#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pointersim/flows.hpp"
#include "pointersim/propagator.hpp"
#include "pointersim/types.hpp"

namespace psim {

namespace stats {

inline double mean(const std::vector<double>& x, const std::vector<double>& dens,
                   double dx) {
  double m = 0.0, n = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m += x[i] * dens[i];
    n += dens[i];
  }
  if (!(n * dx > 1e-14)) throw std::invalid_argument("stats::mean: degenerate density");
  return m / n;
}

inline double stddev(const std::vector<double>& x, const std::vector<double>& dens,
                     double dx) {
  const double mu = mean(x, dens, dx);
  double v = 0.0, n = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    v += (x[i] - mu) * (x[i] - mu) * dens[i];
    n += dens[i];
  }
  return std::sqrt(v / n);
}

// Total-variation distance between two densities on a common grid.
inline double tv_distance(const std::vector<double>& d1, const std::vector<double>& d2,
                          double dx) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i) acc += std::abs(d1[i] - d2[i]);
  return 0.5 * acc * dx;
}

// Total variation of two equal-width normal densities.
inline double tv_gaussians(double mu1, double mu2, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("tv_gaussians: width must be positive");
  return std::erf(std::abs(mu1 - mu2) / (2.0 * std::numbers::sqrt2 * s));
}

}  // namespace stats

// Measurement-theoretic summary of one state at one time: branch centers and
// widths per basis, separations, distinguishabilities, residual coherence, and
// the thresholded correlation verdicts.
struct CorrelationReport {
  double t = 0.0;
  std::array<double, 2> z_centers{}, p_centers{};
  std::array<double, 2> z_widths{}, p_widths{};
  double z_separation = 0.0, p_separation = 0.0;
  double z_distinguishability = 0.0, p_distinguishability = 0.0;
  double coherence_magnitude = 1.0;
  bool correlates_in_position = false, correlates_in_momentum = false;
};

inline nlohmann::json to_json(const CorrelationReport& r) {
  return {{"t", r.t},
          {"z_centers", r.z_centers},
          {"p_centers", r.p_centers},
          {"z_widths", r.z_widths},
          {"p_widths", r.p_widths},
          {"z_separation", r.z_separation},
          {"p_separation", r.p_separation},
          {"z_distinguishability", r.z_distinguishability},
          {"p_distinguishability", r.p_distinguishability},
          {"coherence_magnitude", r.coherence_magnitude},
          {"correlates_in_position", r.correlates_in_position},
          {"correlates_in_momentum", r.correlates_in_momentum}};
}

namespace detail {

inline void finish_report(CorrelationReport& r, double threshold) {
  r.z_separation = std::abs(r.z_centers[0] - r.z_centers[1]);
  r.p_separation = std::abs(r.p_centers[0] - r.p_centers[1]);
  r.correlates_in_position = r.z_distinguishability >= threshold;
  r.correlates_in_momentum = r.p_distinguishability >= threshold;
}

}  // namespace detail

// Numeric-path report from an evolved spinor field.
inline CorrelationReport correlation_report(const SpinorField& f,
                                            const SpinAmplitudes& amps,
                                            const ModelParams& params,
                                            double threshold = 0.5) {
  amps.validate();
  const Marginals m = marginals(f, params);
  const double dz = f.grid.dz();
  const double dp = params.hbar * f.grid.dk();
  CorrelationReport r;
  r.t = f.time;
  r.z_centers = {stats::mean(m.z, m.dens_z_up, dz), stats::mean(m.z, m.dens_z_down, dz)};
  r.p_centers = {stats::mean(m.p, m.dens_p_up, dp), stats::mean(m.p, m.dens_p_down, dp)};
  r.z_widths = {stats::stddev(m.z, m.dens_z_up, dz), stats::stddev(m.z, m.dens_z_down, dz)};
  r.p_widths = {stats::stddev(m.p, m.dens_p_up, dp), stats::stddev(m.p, m.dens_p_down, dp)};
  for (double w : {r.z_widths[0], r.z_widths[1], r.p_widths[0], r.p_widths[1]})
    if (!(w > 1e-12))
      throw std::invalid_argument("correlation_report: degenerate zero-width density");
  r.z_distinguishability = stats::tv_distance(m.dens_z_up, m.dens_z_down, dz);
  r.p_distinguishability = stats::tv_distance(m.dens_p_up, m.dens_p_down, dp);
  r.coherence_magnitude = std::abs(overlap(f));
  detail::finish_report(r, threshold);
  return r;
}

// Analytic-path report from the closed-form kernels (Gaussian family only;
// eigenstate kernels are delta-structured and have no normalizable marginals).
inline CorrelationReport correlation_report(const GaussianPacket& packet,
                                            const ModelParams& params,
                                            HamiltonianVariant variant, double t,
                                            double threshold = 0.5) {
  CorrelationReport r;
  r.t = t;
  const InitialApparatusState state = packet;
  int idx = 0;
  for (Spin s : {Spin::Up, Spin::Down}) {
    const auto pos =
        catalog_closed_form(state, params, variant, KernelRep::Position, Diagonal{s}, t);
    const auto mom =
        catalog_closed_form(state, params, variant, KernelRep::Momentum, Diagonal{s}, t);
    const double az = pos.smooth.a_uu.real();
    const double ap = mom.smooth.a_vv.real();
    if (!(az < 0.0) || !(ap < 0.0))
      throw std::domain_error("correlation_report: unbounded diagonal slice");
    r.z_centers[idx] = -pos.smooth.b_u.real() / (2.0 * az);
    r.z_widths[idx] = std::sqrt(-0.5 / az);
    r.p_centers[idx] = -mom.smooth.b_v.real() / (2.0 * ap);
    r.p_widths[idx] = std::sqrt(-0.5 / ap);
    ++idx;
  }
  r.z_distinguishability =
      stats::tv_gaussians(r.z_centers[0], r.z_centers[1], r.z_widths[0]);
  r.p_distinguishability =
      stats::tv_gaussians(r.p_centers[0], r.p_centers[1], r.p_widths[0]);
  r.coherence_magnitude = coherence_factor(packet.sigma, params, t, variant);
  detail::finish_report(r, threshold);
  return r;
}

// Reduced 2x2 spin state after tracing out the apparatus; the off-diagonal is
// damped by the branch overlap.
inline std::array<std::array<cplx, 2>, 2> spin_reduced_density(const SpinAmplitudes& amps,
                                                               cplx ov) {
  amps.validate();
  if (std::abs(ov) > 1.0 + 1e-9)
    throw std::invalid_argument("spin_reduced_density: |overlap| must be <= 1");
  return {{{cplx{std::norm(amps.a), 0.0}, amps.a * std::conj(amps.b) * std::conj(ov)},
           {std::conj(amps.a) * amps.b * ov, cplx{std::norm(amps.b), 0.0}}}};
}

}  // namespace psim
