#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pointersim/diagnostics.hpp"
#include "pointersim/flows.hpp"
#include "pointersim/propagator.hpp"

using namespace psim;

namespace {

const GridSpec grid{4096, 80.0, 0.0};
const ModelParams natural{0.0, 1.0, 1.0, 1.0};

double l2_distance(const std::vector<cplx>& a, const std::vector<cplx>& b, double dz) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc * dz);
}

}  // namespace

TEST_CASE("initial fields") {
  SUBCASE("gaussian packet is normalized and real") {
    const auto f = init_field(GaussianPacket{1.0}, grid);
    CHECK(f.branch_norm2(Spin::Up) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.branch_norm2(Spin::Down) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 100; ++i) CHECK(f.up[i].imag() == 0.0);
  }

  SUBCASE("plane wave is normalized over the window and carries the phase") {
    const double k = 2.0 * pi * 10.0 / grid.length;
    const auto f = init_field(MomentumEigenstate{k}, grid);
    CHECK(f.branch_norm2(Spin::Up) == doctest::Approx(1.0).epsilon(1e-12));
    const std::size_t i = 100, j = 900;
    const cplx ratio = f.up[j] / f.up[i];
    const cplx expect = std::exp(cplx{0.0, k * (grid.z(j) - grid.z(i))});
    CHECK(std::abs(ratio - expect) < 1e-12);
  }

  SUBCASE("incommensurate plane wave is rejected") {
    CHECK_THROWS_AS(init_field(MomentumEigenstate{0.1}, grid), std::invalid_argument);
  }

  SUBCASE("too-narrow packet is rejected") {
    CHECK_THROWS_AS(init_field(GaussianPacket{0.05}, grid), std::invalid_argument);
  }

  SUBCASE("position eigenstate needs regularization") {
    CHECK_THROWS_AS(init_field(PositionEigenstate{0.5}, grid), std::invalid_argument);
    const auto f = init_field(PositionEigenstate{0.5}, grid, 0.1);
    CHECK(f.branch_norm2(Spin::Up) == doctest::Approx(1.0).epsilon(1e-12));
    // density peaks at z0
    std::size_t imax = 0;
    for (std::size_t i = 0; i < grid.n_points; ++i)
      if (std::norm(f.up[i]) > std::norm(f.up[imax])) imax = i;
    CHECK(grid.z(imax) == doctest::Approx(0.5).epsilon(0.05));
  }
}

TEST_CASE("free spreading of a gaussian") {
  ModelParams free_p{0.0, 0.0, 1.0, 1.0};
  auto f = init_field(GaussianPacket{1.0}, grid);
  PropagatorConfig cfg;
  cfg.mode = PropagatorConfig::Mode::ExactLinear;
  const double t = 2.0;
  f = evolve(f, free_p, HamiltonianVariant::Full, cfg, t);
  const auto m = marginals(f, free_p);
  const double var = [&] {
    const double s = stats::stddev(m.z, m.dens_z_up, grid.dz());
    return s * s;
  }();
  // density variance sigma(t)^2 / 2 with sigma(t)^2 = sigma^2 + (t / sigma)^2
  CHECK(var == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(stats::mean(m.z, m.dens_z_up, grid.dz()) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("branch drift and momentum kicks") {
  auto f = init_field(GaussianPacket{1.0}, grid);
  PropagatorConfig cfg;
  cfg.mode = PropagatorConfig::Mode::ExactLinear;
  const double t = 2.0;
  f = evolve(f, natural, HamiltonianVariant::Full, cfg, t);
  const auto m = marginals(f, natural);
  const double dz = grid.dz();
  const double dp = natural.hbar * grid.dk();

  // up branch: position -eps t^2 / 2m, momentum -eps t
  CHECK(stats::mean(m.z, m.dens_z_up, dz) == doctest::Approx(-2.0).epsilon(0.01));
  CHECK(stats::mean(m.z, m.dens_z_down, dz) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(stats::mean(m.p, m.dens_p_up, dp) == doctest::Approx(-2.0).epsilon(0.01));
  CHECK(stats::mean(m.p, m.dens_p_down, dp) == doctest::Approx(2.0).epsilon(0.01));

  // momentum width is unchanged by a linear potential
  CHECK(stats::stddev(m.p, m.dens_p_up, dp) ==
        doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-6));
}

TEST_CASE("interaction-only evolution is a pure position phase") {
  auto f0 = init_field(GaussianPacket{1.0}, grid);
  PropagatorConfig cfg;
  ModelParams p{0.4, 1.0, 1.0, 1.0};
  const auto f = evolve(f0, p, HamiltonianVariant::InteractionOnly, cfg, 1.7);
  double l1 = 0.0;
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    l1 += std::abs(std::norm(f.up[i]) - std::norm(f0.up[i]));
    // phase at z: -(lambda + eps z) t for the up branch
    const double ph = -(p.lambda + p.epsilon * grid.z(i)) * 1.7;
    if (std::abs(f0.up[i]) > 1e-8)
      CHECK(std::abs(f.up[i] - f0.up[i] * std::exp(cplx{0.0, ph})) < 1e-12);
  }
  CHECK(l1 * grid.dz() < 1e-14);
}

TEST_CASE("branch overlap decay") {
  PropagatorConfig cfg;
  cfg.mode = PropagatorConfig::Mode::ExactLinear;

  SUBCASE("unit overlap at t = 0") {
    const auto f = init_field(GaussianPacket{1.0}, grid);
    CHECK(std::abs(overlap(f) - cplx{1.0, 0.0}) < 1e-12);
  }

  SUBCASE("full dynamics at t = 1") {
    auto f = init_field(GaussianPacket{1.0}, grid);
    f = evolve(f, natural, HamiltonianVariant::Full, cfg, 1.0);
    CHECK(std::abs(overlap(f)) == doctest::Approx(std::exp(-1.25)).epsilon(1e-9));
  }

  SUBCASE("interaction-only at t = 1") {
    auto f = init_field(GaussianPacket{1.0}, grid);
    f = evolve(f, natural, HamiltonianVariant::InteractionOnly, cfg, 1.0);
    CHECK(std::abs(overlap(f)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  }
}

TEST_CASE("numeric block samples match the closed-form kernels") {
  PropagatorConfig cfg;
  cfg.mode = PropagatorConfig::Mode::ExactLinear;
  const double t = 1.0;
  auto f = init_field(GaussianPacket{1.0}, grid);
  f = evolve(f, natural, HamiltonianVariant::Full, cfg, t);

  const auto state = InitialApparatusState{GaussianPacket{1.0}};
  const auto k_uu = flow_diagonal(initial_kernel(state), natural, Spin::Up, t,
                                  HamiltonianVariant::Full);
  const auto k_ud = flow_offdiagonal(initial_kernel(state), natural, -1, t,
                                     HamiltonianVariant::Full);
  const auto k_du = flow_offdiagonal(initial_kernel(state), natural, +1, t,
                                     HamiltonianVariant::Full);

  for (double Q : {0.0, 0.5, -0.5})
    for (double r : {0.0, 0.3, -0.3}) {
      CHECK(std::abs(numeric_partial_ft_sample(f, SpinBlock::UpUp, Q, r) -
                     k_uu.eval(Q, r)) < 1e-9);
      CHECK(std::abs(numeric_partial_ft_sample(f, SpinBlock::UpDown, Q, r) -
                     k_ud.eval(Q, r)) < 1e-9);
      CHECK(std::abs(numeric_partial_ft_sample(f, SpinBlock::DownUp, Q, r) -
                     k_du.eval(Q, r)) < 1e-9);
    }
}

TEST_CASE("off-diagonal momentum kick scales with hbar, not mass") {
  ModelParams p{0.0, 1.0, 2.0, 1.0};
  PropagatorConfig cfg;
  cfg.mode = PropagatorConfig::Mode::ExactLinear;
  auto f = init_field(GaussianPacket{1.0}, grid);
  f = evolve(f, p, HamiltonianVariant::Full, cfg, 1.0);
  // the Q-shift of rho_ud is 2 eps t / hbar = 2; a mass-scaled shift
  // 2 eps t / m = 1 would put the envelope maximum near Q = 1 instead
  const auto k_ud = flow_offdiagonal(initial_kernel(InitialApparatusState{GaussianPacket{1.0}}),
                                     p, -1, 1.0, HamiltonianVariant::Full);
  for (double Q : {1.0, 1.8, 2.0})
    CHECK(std::abs(numeric_partial_ft_sample(f, SpinBlock::UpDown, Q, 0.0) -
                   k_ud.eval(Q, 0.0)) < 1e-9);
  const double at_kick = std::abs(numeric_partial_ft_sample(f, SpinBlock::UpDown, 2.0, 0.0));
  const double at_mass = std::abs(numeric_partial_ft_sample(f, SpinBlock::UpDown, 1.0, 0.0));
  CHECK(at_kick > at_mass);
}

TEST_CASE("split-step agrees with the closed-form propagator") {
  PropagatorConfig exact;
  exact.mode = PropagatorConfig::Mode::ExactLinear;
  PropagatorConfig split;
  split.dt = 2.5e-4;
  ModelParams p{0.3, 1.0, 1.0, 1.0};
  const auto f0 = init_field(GaussianPacket{1.0}, grid);
  const auto fe = evolve(f0, p, HamiltonianVariant::Full, exact, 0.5);
  const auto fs = evolve(f0, p, HamiltonianVariant::Full, split, 0.5);
  CHECK(l2_distance(fe.up, fs.up, grid.dz()) < 1e-8);
  CHECK(l2_distance(fe.down, fs.down, grid.dz()) < 1e-8);
}

TEST_CASE("time reversal and unitarity") {
  ModelParams p{0.2, 1.0, 1.0, 1.0};
  const auto f0 = init_field(GaussianPacket{1.0}, grid);

  SUBCASE("split-step forward then backward returns the initial field") {
    PropagatorConfig cfg;
    auto f = evolve(f0, p, HamiltonianVariant::Full, cfg, 0.5);
    f = evolve(f, p, HamiltonianVariant::Full, cfg, -0.5);
    CHECK(l2_distance(f.up, f0.up, grid.dz()) < 1e-10);
    CHECK(l2_distance(f.down, f0.down, grid.dz()) < 1e-10);
    CHECK(f.time == doctest::Approx(0.0));
  }

  SUBCASE("closed-form mode is reversible too") {
    PropagatorConfig cfg;
    cfg.mode = PropagatorConfig::Mode::ExactLinear;
    auto f = evolve(f0, p, HamiltonianVariant::Full, cfg, 1.5);
    f = evolve(f, p, HamiltonianVariant::Full, cfg, -1.5);
    CHECK(l2_distance(f.up, f0.up, grid.dz()) < 1e-10);
  }

  SUBCASE("branch norms are conserved") {
    PropagatorConfig cfg;
    auto f = evolve(f0, p, HamiltonianVariant::Full, cfg, 1.0);
    CHECK(f.branch_norm2(Spin::Up) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.branch_norm2(Spin::Down) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("boundary guard trips when the packet reaches the window edge") {
  GridSpec small{256, 16.0, 0.0};
  PropagatorConfig cfg;
  cfg.mode = PropagatorConfig::Mode::ExactLinear;
  auto f = init_field(GaussianPacket{1.0}, small);
  CHECK_THROWS_AS(evolve(f, natural, HamiltonianVariant::Full, cfg, 2.0),
                  NumericalGuardError);
}

TEST_CASE("sampling guards") {
  const auto f = init_field(GaussianPacket{1.0}, grid);
  CHECK_THROWS_AS(numeric_partial_ft_sample(f, SpinBlock::UpUp, 1e6, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(numeric_partial_ft_sample(f, SpinBlock::UpUp, 0.0, 200.0),
                  std::invalid_argument);
  PropagatorConfig cfg;
  CHECK_THROWS_AS(evolve(f, natural, HamiltonianVariant::Full, cfg, 0.50042),
                  std::invalid_argument);
}
