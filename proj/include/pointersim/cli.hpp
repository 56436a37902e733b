#pragma once

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pointersim/classify.hpp"
#include "pointersim/diagnostics.hpp"
#include "pointersim/flows.hpp"
#include "pointersim/io.hpp"
#include "pointersim/propagator.hpp"
#include "pointersim/types.hpp"

namespace psim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kOk = 0;
inline constexpr int kAssertionFailure = 1;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kNumericalGuard = 3;

struct CompareSpec {
  std::vector<double> q_values{0.0, 0.5, -0.5};
  std::vector<double> r_values{0.0, 0.3, -0.3};
  double tolerance = 1e-5;
  bool convergence_gate = true;
};

struct SweepSpec {
  std::vector<double> epsilons{0.5, 1.0};
  std::vector<double> sigmas{0.5, 1.0, 2.0};
};

struct Scenario {
  ModelParams params{0.0, 1.0, 1.0, 1.0};
  InitialApparatusState state = GaussianPacket{1.0};
  SpinAmplitudes amplitudes;
  HamiltonianVariant variant = HamiltonianVariant::Full;
  GridSpec grid;
  PropagatorConfig propagator;
  std::vector<double> times{0.5, 1.0, 2.0};
  double threshold = 0.5;
  CompareSpec compare;
  SweepSpec sweep;
  ClassifyConfig classify;

  void validate() const {
    params.validate();
    amplitudes.validate();
    grid.validate();
    propagator.validate();
    validate_state(state);
    if (times.empty()) throw ConfigError("times must be non-empty");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < 0.0) throw ConfigError("times must be >= 0");
      if (i > 0 && times[i] <= times[i - 1])
        throw ConfigError("times must be strictly increasing");
    }
  }

  static Scenario from_json(const json& j);
};

namespace detail {

inline cplx parse_cplx(const json& j) {
  if (j.is_number()) return cplx{j.get<double>(), 0.0};
  return cplx{j.at(0).get<double>(), j.at(1).get<double>()};
}

template <typename F>
auto config_guard(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

}  // namespace detail

inline Scenario Scenario::from_json(const json& j) {
  return detail::config_guard([&] {
    Scenario s;
    if (j.contains("params")) {
      const auto& p = j.at("params");
      s.params.lambda = p.value("lambda", s.params.lambda);
      s.params.epsilon = p.value("epsilon", s.params.epsilon);
      s.params.mass = p.value("mass", s.params.mass);
      s.params.hbar = p.value("hbar", s.params.hbar);
    }
    if (j.contains("state")) {
      const auto& st = j.at("state");
      const std::string type = st.at("type").get<std::string>();
      if (type == "gaussian")
        s.state = GaussianPacket{st.value("sigma", 1.0)};
      else if (type == "momentum")
        s.state = MomentumEigenstate{st.value("k", 0.0)};
      else if (type == "position")
        s.state = PositionEigenstate{st.value("z0", 0.0)};
      else
        throw ConfigError("unknown state type: " + type);
    }
    if (j.contains("amplitudes")) {
      const auto& a = j.at("amplitudes");
      s.amplitudes.a = detail::parse_cplx(a.at("a"));
      s.amplitudes.b = detail::parse_cplx(a.at("b"));
    }
    if (j.contains("variant")) {
      const std::string v = j.at("variant").get<std::string>();
      if (v == "full")
        s.variant = HamiltonianVariant::Full;
      else if (v == "interaction_only")
        s.variant = HamiltonianVariant::InteractionOnly;
      else
        throw ConfigError("unknown variant: " + v);
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      s.grid.n_points = g.value("n_points", s.grid.n_points);
      s.grid.length = g.value("length", s.grid.length);
      s.grid.center = g.value("center", s.grid.center);
    }
    if (j.contains("propagator")) {
      const auto& p = j.at("propagator");
      s.propagator.dt = p.value("dt", s.propagator.dt);
      s.propagator.n_steps = p.value("n_steps", std::size_t{0});
      const std::string mode = p.value("mode", std::string("split_step"));
      if (mode == "split_step")
        s.propagator.mode = PropagatorConfig::Mode::SplitStep;
      else if (mode == "exact_linear")
        s.propagator.mode = PropagatorConfig::Mode::ExactLinear;
      else
        throw ConfigError("unknown propagator mode: " + mode);
    }
    if (j.contains("times")) s.times = j.at("times").get<std::vector<double>>();
    s.threshold = j.value("threshold", s.threshold);
    if (j.contains("compare")) {
      const auto& c = j.at("compare");
      if (c.contains("q_values")) s.compare.q_values = c.at("q_values").get<std::vector<double>>();
      if (c.contains("r_values")) s.compare.r_values = c.at("r_values").get<std::vector<double>>();
      s.compare.tolerance = c.value("tolerance", s.compare.tolerance);
      s.compare.convergence_gate = c.value("convergence_gate", s.compare.convergence_gate);
    }
    if (j.contains("sweep")) {
      const auto& w = j.at("sweep");
      if (w.contains("epsilons")) s.sweep.epsilons = w.at("epsilons").get<std::vector<double>>();
      if (w.contains("sigmas")) s.sweep.sigmas = w.at("sigmas").get<std::vector<double>>();
    }
    if (j.contains("classify")) {
      const auto& c = j.at("classify");
      s.classify.threshold = c.value("threshold", s.classify.threshold);
      s.classify.trend_tolerance = c.value("trend_tolerance", s.classify.trend_tolerance);
      s.classify.t_gaussian = c.value("t_gaussian", s.classify.t_gaussian);
      s.classify.t_eigenstate = c.value("t_eigenstate", s.classify.t_eigenstate);
      s.classify.gaussian_sigma = c.value("gaussian_sigma", s.classify.gaussian_sigma);
      if (c.contains("plane_wave_schedule"))
        s.classify.plane_wave_schedule = c.at("plane_wave_schedule").get<std::vector<double>>();
      if (c.contains("delta_schedule"))
        s.classify.delta_schedule = c.at("delta_schedule").get<std::vector<double>>();
    }
    s.validate();
    return s;
  });
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

inline int run_analytic(const Scenario& s, const fs::path& out_dir) {
  json records = json::array();
  for (double t : s.times) {
    const AnalyticKernel base = initial_kernel(s.state);
    json rec;
    rec["t"] = t;
    rec["diagonal_up"] = to_json(flow_diagonal(base, s.params, Spin::Up, t, s.variant));
    rec["diagonal_down"] = to_json(flow_diagonal(base, s.params, Spin::Down, t, s.variant));
    rec["offdiagonal_upper"] = to_json(flow_offdiagonal(base, s.params, +1, t, s.variant));
    rec["offdiagonal_lower"] = to_json(flow_offdiagonal(base, s.params, -1, t, s.variant));
    const auto sep = separations(s.params, t);
    rec["delta_z"] = sep.delta_z;
    rec["delta_p"] = sep.delta_p;
    if (const auto* g = std::get_if<GaussianPacket>(&s.state))
      rec["coherence_magnitude"] = coherence_factor(g->sigma, s.params, t, s.variant);
    records.push_back(std::move(rec));
  }
  io::write_text(out_dir / "analytic.json", records.dump(2) + "\n");
  return kOk;
}

namespace detail {

// evolve from time 0 through the scenario's snapshot times
inline std::vector<SpinorField> snapshots(const Scenario& s) {
  std::vector<SpinorField> out;
  std::optional<double> reg;
  if (std::holds_alternative<PositionEigenstate>(s.state)) reg = 0.1;
  SpinorField f = init_field(s.state, s.grid, reg);
  double t_prev = 0.0;
  for (double t : s.times) {
    if (t > t_prev) f = evolve(f, s.params, s.variant, s.propagator, t - t_prev);
    t_prev = t;
    out.push_back(f);
  }
  return out;
}

}  // namespace detail

inline int run_evolve(const Scenario& s, const fs::path& out_dir) {
  const auto fields = detail::snapshots(s);
  io::CsvWriter pos, mom;
  pos.row({"t", "z", "density_up", "density_down"});
  mom.row({"t", "p", "density_up", "density_down"});
  json summary = json::array();
  for (const auto& f : fields) {
    const auto m = marginals(f, s.params);
    for (std::size_t i = 0; i < m.z.size(); ++i)
      pos.row({io::fmt_sci(f.time), io::fmt_sci(m.z[i]), io::fmt_sci(m.dens_z_up[i]),
               io::fmt_sci(m.dens_z_down[i])});
    for (std::size_t i = 0; i < m.p.size(); ++i)
      mom.row({io::fmt_sci(f.time), io::fmt_sci(m.p[i]), io::fmt_sci(m.dens_p_up[i]),
               io::fmt_sci(m.dens_p_down[i])});
    summary.push_back(to_json(correlation_report(f, s.amplitudes, s.params, s.threshold)));
  }
  io::write_text(out_dir / "trajectory_position.csv", pos.buffer);
  io::write_text(out_dir / "trajectory_momentum.csv", mom.buffer);
  io::write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  return kOk;
}

inline int run_compare(const Scenario& s, const fs::path& out_dir,
                       std::optional<double> tolerance_override = {}) {
  const auto* g = std::get_if<GaussianPacket>(&s.state);
  if (!g)
    throw ConfigError("compare requires a gaussian initial state (eigenstate kernels "
                      "carry delta factors and have no pointwise values)");
  const double tolerance = tolerance_override.value_or(s.compare.tolerance);

  if (s.compare.convergence_gate &&
      s.propagator.mode == PropagatorConfig::Mode::SplitStep) {
    Scenario fine = s;
    fine.propagator.dt = 0.5 * s.propagator.dt;
    fine.propagator.n_steps = 0;
    Scenario coarse = s;
    coarse.propagator.n_steps = 0;
    const auto fa = detail::snapshots(coarse).back();
    const auto fb = detail::snapshots(fine).back();
    const auto ra = correlation_report(fa, s.amplitudes, s.params);
    const auto rb = correlation_report(fb, s.amplitudes, s.params);
    const double drift = std::max({std::abs(ra.z_centers[0] - rb.z_centers[0]),
                                   std::abs(ra.p_centers[0] - rb.p_centers[0]),
                                   std::abs(ra.coherence_magnitude - rb.coherence_magnitude)});
    if (drift > 1e-8)
      throw NumericalGuardError("compare: dt-halving convergence gate failed, drift = " +
                                std::to_string(drift));
  }

  const auto fields = detail::snapshots(s);
  const AnalyticKernel base = initial_kernel(s.state);
  io::CsvWriter csv;
  csv.row({"t", "Q", "r", "block", "analytic_re", "analytic_im", "numeric_re",
           "numeric_im", "abs_residual"});
  double max_residual = 0.0;
  for (const auto& f : fields) {
    const double t = f.time;
    const std::array<std::pair<SpinBlock, AnalyticKernel>, 4> blocks{
        {{SpinBlock::UpUp, flow_diagonal(base, s.params, Spin::Up, t, s.variant)},
         {SpinBlock::DownDown, flow_diagonal(base, s.params, Spin::Down, t, s.variant)},
         {SpinBlock::UpDown, flow_offdiagonal(base, s.params, -1, t, s.variant)},
         {SpinBlock::DownUp, flow_offdiagonal(base, s.params, +1, t, s.variant)}}};
    for (const auto& [block, kernel] : blocks) {
      for (double Q : s.compare.q_values) {
        for (double r : s.compare.r_values) {
          const cplx a = kernel.eval(Q, r);
          const cplx n = numeric_partial_ft_sample(f, block, Q, r);
          const double res = std::abs(a - n);
          max_residual = std::max(max_residual, res);
          csv.row({io::fmt_sci(t), io::fmt_sci(Q), io::fmt_sci(r), to_string(block),
                   io::fmt_sci(a.real()), io::fmt_sci(a.imag()), io::fmt_sci(n.real()),
                   io::fmt_sci(n.imag()), io::fmt_sci(res)});
        }
      }
    }
  }
  const bool pass = max_residual < tolerance;
  json summary = {{"max_abs_residual", max_residual},
                  {"tolerance", tolerance},
                  {"pass", pass}};
  io::write_text(out_dir / "residuals.csv", csv.buffer);
  io::write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  return pass ? kOk : kAssertionFailure;
}

inline int run_sweep(const Scenario& s, const fs::path& out_dir, unsigned threads = 1) {
  auto epsilons = s.sweep.epsilons;
  auto sigmas = s.sweep.sigmas;
  auto times = s.times;
  std::sort(epsilons.begin(), epsilons.end());
  std::sort(sigmas.begin(), sigmas.end());

  struct Point {
    double epsilon, sigma, t;
  };
  std::vector<Point> points;
  for (double e : epsilons)
    for (double sg : sigmas)
      for (double t : times) points.push_back({e, sg, t});

  std::vector<CorrelationReport> reports(points.size());
  auto work = [&](std::size_t i) {
    ModelParams p = s.params;
    p.epsilon = points[i].epsilon;
    PropagatorConfig exact;
    exact.mode = PropagatorConfig::Mode::ExactLinear;
    const GridSpec grid =
        psim::detail::choose_grid(points[i].sigma, 0.0, points[i].t, p);
    SpinorField f = init_field(GaussianPacket{points[i].sigma}, grid);
    if (points[i].t > 0.0) f = evolve(f, p, s.variant, exact, points[i].t);
    reports[i] = correlation_report(f, s.amplitudes, p, s.threshold);
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) work(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < threads; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < points.size(); i += threads) work(i);
      }));
    for (auto& j : jobs) j.get();
  }

  io::CsvWriter csv;
  csv.row({"epsilon", "sigma", "t", "z_center_up", "z_center_down", "p_center_up",
           "p_center_down", "z_width_up", "z_width_down", "p_width_up", "p_width_down",
           "z_separation", "p_separation", "z_distinguishability",
           "p_distinguishability", "coherence_magnitude", "correlates_in_position",
           "correlates_in_momentum"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& r = reports[i];
    csv.row({io::fmt_sci(points[i].epsilon), io::fmt_sci(points[i].sigma),
             io::fmt_sci(points[i].t), io::fmt_sci(r.z_centers[0]),
             io::fmt_sci(r.z_centers[1]), io::fmt_sci(r.p_centers[0]),
             io::fmt_sci(r.p_centers[1]), io::fmt_sci(r.z_widths[0]),
             io::fmt_sci(r.z_widths[1]), io::fmt_sci(r.p_widths[0]),
             io::fmt_sci(r.p_widths[1]), io::fmt_sci(r.z_separation),
             io::fmt_sci(r.p_separation), io::fmt_sci(r.z_distinguishability),
             io::fmt_sci(r.p_distinguishability), io::fmt_sci(r.coherence_magnitude),
             r.correlates_in_position ? "1" : "0",
             r.correlates_in_momentum ? "1" : "0"});
  }
  io::write_text(out_dir / "reports.csv", csv.buffer);
  return kOk;
}

inline int run_classify(const Scenario& s, const fs::path& out_dir,
                        std::ostream& os = std::cout) {
  const std::vector<InitialApparatusState> states{
      GaussianPacket{s.classify.gaussian_sigma}, MomentumEigenstate{0.0},
      PositionEigenstate{0.0}};
  const auto verdicts = classify_preferred_state(states, s.params, s.classify);

  json jout = json::array();
  io::CsvWriter csv;
  csv.row({"state", "variant", "correlates_in_position", "correlates_in_momentum",
           "conclusive", "coherence_magnitude"});
  os << "state                variant            z    p    conclusive\n";
  for (const auto& v : verdicts) {
    jout.push_back(to_json(v));
    csv.row({v.state, to_string(v.variant), v.correlates_in_position ? "1" : "0",
             v.correlates_in_momentum ? "1" : "0", v.conclusive ? "1" : "0",
             io::fmt_sci(v.coherence_magnitude)});
    char line[128];
    std::snprintf(line, sizeof(line), "%-20s %-18s %-4s %-4s %s\n", v.state.c_str(),
                  to_string(v.variant).c_str(),
                  v.correlates_in_position ? "yes" : "no",
                  v.correlates_in_momentum ? "yes" : "no",
                  v.conclusive ? "yes" : "inconclusive");
    os << line;
  }
  io::write_text(out_dir / "verdicts.json", jout.dump(2) + "\n");
  io::write_text(out_dir / "verdicts.csv", csv.buffer);
  return matches_reference(verdicts) ? kOk : kAssertionFailure;
}

// Dispatch with exit-code mapping. `seed` is accepted for interface stability;
// nothing here is randomized.
inline int run(const std::string& subcommand, const json& config,
               const fs::path& out_dir, std::optional<double> tolerance = {},
               unsigned threads = 1, [[maybe_unused]] unsigned seed = 0,
               std::ostream& os = std::cout) {
  try {
    const Scenario s = Scenario::from_json(config);
    if (subcommand == "analytic") return run_analytic(s, out_dir);
    if (subcommand == "evolve") return run_evolve(s, out_dir);
    if (subcommand == "compare") return run_compare(s, out_dir, tolerance);
    if (subcommand == "sweep") return run_sweep(s, out_dir, threads);
    if (subcommand == "classify") return run_classify(s, out_dir, os);
    throw ConfigError("unknown subcommand: " + subcommand);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const NumericalGuardError& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return kNumericalGuard;
  }
}

}  // namespace psim::cli
