#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pointersim/composite.hpp"
#include "pointersim/grid_transforms.hpp"
#include "pointersim/propagator.hpp"
#include "pointersim/types.hpp"

using namespace psim;

TEST_CASE("parameter and grid validation") {
  CHECK_THROWS_AS((ModelParams{0, 1, -1, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{0, 1, 1, 0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((ModelParams{0.3, 1, 1, 1}.validate()));

  CHECK_THROWS_AS((GridSpec{300, 80, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{128, 80, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{4096, -1, 0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((GridSpec{4096, 80, 0}.validate()));

  SpinAmplitudes amps;
  CHECK_NOTHROW(amps.validate());
  amps.a = 0.9;
  CHECK_THROWS_AS(amps.validate(), std::invalid_argument);
}

TEST_CASE("center/difference variable maps are bijections") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double z = u(rng), zp = u(rng);
    const auto cd = to_center_diff(z, zp);
    const auto [z2, zp2] = from_center_diff(cd);
    CHECK(z2 == doctest::Approx(z).epsilon(1e-14));
    CHECK(zp2 == doctest::Approx(zp).epsilon(1e-14));
    const auto mv = to_momentum_vars(z, zp);
    const auto [p2, pp2] = from_momentum_vars(mv);
    CHECK(p2 == doctest::Approx(z).epsilon(1e-15));
    CHECK(pp2 == doctest::Approx(zp).epsilon(1e-15));
  }
}

namespace {

std::vector<double> linspace_grid(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  const double d = (hi - lo) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + static_cast<double>(i) * d;
  return x;
}

}  // namespace

TEST_CASE("partial FT of a gaussian profile") {
  const std::size_t n = 512;
  const auto R = linspace_grid(-12.0, 12.0, n);
  const std::vector<double> fr{1.0, 0.5, -0.3};  // factored r-dependence
  ComplexGrid2D rho(n, std::vector<cplx>(fr.size()));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < fr.size(); ++c)
      rho[j][c] = std::exp(-R[j] * R[j]) * fr[c];

  const auto out = partial_ft_forward(R, rho);
  // locate Q = 0
  std::size_t i0 = 0;
  for (std::size_t i = 0; i < out.Q.size(); ++i)
    if (std::abs(out.Q[i]) < std::abs(out.Q[i0])) i0 = i;
  CHECK(out.Q[i0] == doctest::Approx(0.0).epsilon(1e-14));
  for (std::size_t c = 0; c < fr.size(); ++c) {
    CHECK(out.data[i0][c].real() == doctest::Approx(std::sqrt(pi) * fr[c]).epsilon(1e-10));
    CHECK(std::abs(out.data[i0][c].imag()) < 1e-10);
  }
  // at generic Q the transform is sqrt(pi) exp(-Q^2/4) f(r)
  for (std::size_t i = n / 2 - 20; i < n / 2 + 20; ++i) {
    const double expect = std::sqrt(pi) * std::exp(-out.Q[i] * out.Q[i] / 4.0);
    CHECK(std::abs(out.data[i][0] - cplx{expect, 0.0}) < 1e-10);
  }
}

TEST_CASE("partial FT of a constant concentrates in the Q=0 bin") {
  const std::size_t n = 256;
  const double L = 20.0;
  const auto R = linspace_grid(-L / 2, L / 2, n);
  ComplexGrid2D rho(n, std::vector<cplx>(1, cplx{1.0, 0.0}));
  const auto out = partial_ft_forward(R, rho);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(out.Q[i]) < 1e-12)
      CHECK(out.data[i][0].real() == doctest::Approx(L).epsilon(1e-12));
    else
      CHECK(std::abs(out.data[i][0]) < 1e-9);
  }
}

TEST_CASE("partial FT round trip and linearity") {
  const std::size_t n = 256;
  const auto R = linspace_grid(-10.0, 10.0, n);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  auto smooth_random = [&] {
    // a handful of periodic Fourier modes keeps the profile smooth
    ComplexGrid2D g(n, std::vector<cplx>(2));
    for (int m = 1; m <= 5; ++m) {
      const cplx c0{u(rng), u(rng)}, c1{u(rng), u(rng)};
      for (std::size_t j = 0; j < n; ++j) {
        const double ph = 2.0 * pi * m * static_cast<double>(j) / static_cast<double>(n);
        g[j][0] += c0 * std::exp(cplx{0.0, ph});
        g[j][1] += c1 * std::exp(cplx{0.0, -ph});
      }
    }
    return g;
  };

  const auto f = smooth_random();
  const auto g = smooth_random();

  const auto Ff = partial_ft_forward(R, f);
  const auto back = partial_ft_inverse(Ff.Q, Ff.data, R);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(back[j][c] - f[j][c]) < 1e-10);

  // linearity
  const cplx alpha{0.7, -0.2}, beta{-1.3, 0.4};
  ComplexGrid2D combo(n, std::vector<cplx>(2));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < 2; ++c) combo[j][c] = alpha * f[j][c] + beta * g[j][c];
  const auto Fg = partial_ft_forward(R, g);
  const auto Fc = partial_ft_forward(R, combo);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(std::abs(Fc.data[j][c] - (alpha * Ff.data[j][c] + beta * Fg.data[j][c])) <
            1e-12);
}

TEST_CASE("partial FT rejects a non-uniform grid") {
  auto R = linspace_grid(-5.0, 5.0, 256);
  R[100] += 0.01;
  ComplexGrid2D rho(256, std::vector<cplx>(1, 1.0));
  CHECK_THROWS_AS(partial_ft_forward(R, rho), std::invalid_argument);
}

TEST_CASE("expectation values") {
  const std::size_t n = 2048;
  const double L = 30.0;
  const auto x = linspace_grid(-L / 2, L / 2, n);
  const double dx = L / n;

  SUBCASE("unit observable on any normalized density") {
    std::vector<double> dens(n), ones(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      dens[i] = std::exp(-(x[i] - 1.2) * (x[i] - 1.2)) / std::sqrt(pi);
    CHECK(expectation(dens, x, ones) == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("first moment of a shifted gaussian") {
    std::vector<double> dens(n), obs(n);
    for (std::size_t i = 0; i < n; ++i) {
      dens[i] = std::exp(-(x[i] - 0.7) * (x[i] - 0.7)) / std::sqrt(pi);
      obs[i] = x[i];
    }
    CHECK(expectation(dens, x, obs) == doctest::Approx(0.7).epsilon(1e-6));
  }

  SUBCASE("second moment matches the doubled-resolution quadrature") {
    auto second_moment = [&](std::size_t m) {
      const auto xs = linspace_grid(-L / 2, L / 2, m);
      std::vector<double> dens(m), obs(m);
      for (std::size_t i = 0; i < m; ++i) {
        dens[i] = std::exp(-xs[i] * xs[i]) / std::sqrt(pi);  // |psi|^2 for sigma = 1
        obs[i] = xs[i] * xs[i];
      }
      return expectation(dens, xs, obs);
    };
    const double coarse = second_moment(n);
    const double fine = second_moment(2 * n);
    CHECK(coarse == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(coarse == doctest::Approx(fine).epsilon(1e-6));
  }

  SUBCASE("unnormalized density is rejected with the actual norm") {
    std::vector<double> dens(n, 0.5 / L), ones(n, 1.0);
    try {
      expectation(dens, x, ones);
      FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }
  }
}

TEST_CASE("composite density block bookkeeping") {
  GridSpec grid{256, 20.0, 0.0};
  SpinorField f = init_field(GaussianPacket{1.0}, grid);
  // desynchronize the branches so the check is non-trivial
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double z = grid.z(i);
    f.up[i] *= cplx{std::cos(0.3 * z), std::sin(0.3 * z)};
    f.down[i] *= cplx{std::cos(-0.8 * z), std::sin(-0.8 * z)};
  }
  SpinAmplitudes amps{cplx{0.6, 0.0}, cplx{0.0, 0.8}};
  const auto cd = CompositeDensity::from_spinor(f, amps);

  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, grid.n_points - 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t i = pick(rng), j = pick(rng);
    CHECK(cd.block(Spin::Down, Spin::Up, i, j) ==
          std::conj(cd.block(Spin::Up, Spin::Down, j, i)));
    CHECK(cd.weighted_block(Spin::Down, Spin::Up, i, j) ==
          std::conj(cd.weighted_block(Spin::Up, Spin::Down, j, i)));
  }
  CHECK(cd.block_trace(Spin::Up) == doctest::Approx(0.36).epsilon(1e-10));
  CHECK(cd.block_trace(Spin::Down) == doctest::Approx(0.64).epsilon(1e-10));
}
