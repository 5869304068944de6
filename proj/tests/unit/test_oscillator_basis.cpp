#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hoexp/errors.hpp"
#include "hoexp/oscillator_basis.hpp"
#include "oracles.hpp"

using namespace hoexp;

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

OscillatorModel with_alpha(double alpha) {
  // alpha = (m k / hbar^2)^(1/4) with m = hbar = 1.
  return {1.0, std::pow(alpha, 4.0), 1.0};
}

}  // namespace

TEST_CASE("model rejects non-positive constants") {
  CHECK_THROWS_AS(OscillatorModel(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(OscillatorModel(1.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(OscillatorModel(1.0, 1.0, std::nan("")), std::invalid_argument);
  const OscillatorModel m(2.0, 8.0, 0.5);
  CHECK(m.omega() == doctest::Approx(2.0));
  CHECK(m.alpha() == doctest::Approx(std::pow(16.0 / 0.25, 0.25)));
  CHECK(m.eigenenergy(3) == doctest::Approx(3.5 * 0.5 * 2.0));
}

TEST_CASE("hermite_eval examples") {
  CHECK(hermite_eval(0, 3.7) == 1.0);
  CHECK(hermite_eval(2, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(hermite_eval(3, 1.0) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(hermite_eval(3, 1.0) == doctest::Approx(8.0 - 12.0));
  CHECK_THROWS_AS(hermite_eval(400, 30.0), RangeError);
}

TEST_CASE("hermite_eval matches the explicit polynomial") {
  for (std::size_t n = 0; n <= 20; ++n) {
    for (double xi : {-2.3, -0.7, 0.0, 0.4, 1.9}) {
      const double expected = static_cast<double>(oracle::hermite_explicit(n, xi));
      CHECK(hermite_eval(n, xi) == doctest::Approx(expected).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("hermite recurrence consistency up to n = 200") {
  for (double xi : {-3.0, -1.1, -0.25, 0.3, 0.9, 2.2, 4.0}) {
    for (std::size_t n = 1; n < 200; ++n) {
      const double lhs = hermite_eval(n + 1, xi);
      const double rhs = 2.0 * xi * hermite_eval(n, xi) - 2.0 * static_cast<double>(n) * hermite_eval(n - 1, xi);
      const double scale = std::max({std::abs(lhs), std::abs(2.0 * xi * hermite_eval(n, xi)),
                                     std::abs(2.0 * static_cast<double>(n) * hermite_eval(n - 1, xi))});
      CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("normalization constants") {
  const OscillatorModel unit = OscillatorModel::unit();
  CHECK(normalization_constant(unit, 0) == doctest::Approx(kPiQuarter).epsilon(1e-14));
  CHECK(normalization_constant(unit, 0) == doctest::Approx(0.7511255).epsilon(1e-7));
  CHECK(normalization_constant(unit, 1) == doctest::Approx(std::sqrt(1.0 / (2.0 * std::sqrt(std::numbers::pi)))));
  CHECK(normalization_constant(unit, 1) == doctest::Approx(0.5311259).epsilon(1e-7));
  for (std::size_t n = 0; n < 50; ++n) {
    CHECK(normalization_constant(unit, n + 1) / normalization_constant(unit, n) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * static_cast<double>(n + 1))).epsilon(1e-13));
  }
  // n = 10^4 stays representable in log form.
  CHECK(std::isfinite(log_normalization_constant(unit, 10000)));
}

TEST_CASE("psi_1 normalization by independent quadrature") {
  const double integral = oracle::simpson(
      [](double x) {
        const double v = oracle::psi_explicit(1, 1.0, x);
        return v * v;
      },
      -12.0, 12.0, 4000);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenfunction_eval examples") {
  const OscillatorModel unit = OscillatorModel::unit();
  CHECK(eigenfunction_eval(unit, 0, 0.0) == doctest::Approx(kPiQuarter).epsilon(1e-15));
  CHECK(eigenfunction_eval(unit, 1, 0.0) == 0.0);
  CHECK(eigenfunction_eval(unit, 0, 1.0) == doctest::Approx(kPiQuarter * std::exp(-0.5)).epsilon(1e-15));
  CHECK(eigenfunction_eval(unit, 0, 1.0) == doctest::Approx(0.4556).epsilon(1e-4));
}

TEST_CASE("eigenfunctions match the explicit formula for n <= 30") {
  for (double alpha : {1.0, std::pow(2.0, 0.25), 0.6}) {
    const OscillatorModel model = with_alpha(alpha);
    std::vector<double> table(31);
    for (double x : {-4.1, -1.3, 0.2, 0.77, 2.5, 5.0}) {
      eigenfunction_table(model, x, table);
      for (std::size_t n = 0; n <= 30; ++n) {
        const double expected = oracle::psi_explicit(n, alpha, x);
        CHECK(table[n] == doctest::Approx(expected).epsilon(1e-10).scale(1e-3));
        CHECK(eigenfunction_eval(model, n, x) == table[n]);
      }
    }
  }
}

TEST_CASE("eigenfunctions stay finite far past the overflow of H_n") {
  const OscillatorModel unit = OscillatorModel::unit();
  std::vector<double> table(2001);
  eigenfunction_table(unit, 25.0, table);
  for (double v : table) CHECK(std::isfinite(v));
  // Classical turning point sqrt(2n+1) > 25 for n = 2000: oscillatory, bounded by O(1).
  CHECK(std::abs(table[2000]) < 1.0);
}

TEST_CASE("x2_half_matrix_element literal values") {
  const OscillatorModel unit = OscillatorModel::unit();
  CHECK(x2_half_matrix_element(unit, 0, 0) == 0.25);
  CHECK(x2_half_matrix_element(unit, 2, 2) == 1.25);
  CHECK(x2_half_matrix_element(unit, 0, 2) == 0.5 * std::sqrt(0.5));
  CHECK(x2_half_matrix_element(unit, 2, 0) == 0.5 * std::sqrt(0.5));
  CHECK(x2_half_matrix_element(unit, 0, 4) == 0.0);
  // Even rows n = 2j: (j + 0.25) and 0.5 sqrt((j + 0.5)(j + 1)).
  for (std::size_t j = 0; j < 40; ++j) {
    const double jd = static_cast<double>(j);
    CHECK(x2_half_matrix_element(unit, 2 * j, 2 * j) == doctest::Approx(jd + 0.25).epsilon(1e-15));
    CHECK(x2_half_matrix_element(unit, 2 * j, 2 * j + 2) ==
          doctest::Approx(0.5 * std::sqrt((jd + 0.5) * (jd + 1.0))).epsilon(1e-15));
  }
}

TEST_CASE("x2_half matrix elements agree with the ladder-operator square") {
  const double alpha = 1.3;
  const OscillatorModel model = with_alpha(alpha);
  const Eigen::MatrixXd ladder = oracle::x2_half_ladder(40, alpha);
  for (std::size_t r = 0; r < 40; ++r) {
    for (std::size_t c = 0; c < 40; ++c) {
      CHECK(x2_half_matrix_element(model, r, c) ==
            doctest::Approx(ladder(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))).epsilon(1e-13));
    }
  }
}

TEST_CASE("matrix elements agree with quadrature for indices <= 30") {
  const OscillatorModel unit = OscillatorModel::unit();
  const GridSpec grid{16.0, 8192};
  std::vector<std::vector<double>> samples(grid.points, std::vector<double>(31));
  for (std::size_t i = 0; i < grid.points; ++i) eigenfunction_table(unit, grid.x(i), samples[i]);
  for (std::size_t r = 0; r <= 30; ++r) {
    for (std::size_t c = 0; c <= 30; ++c) {
      double q = 0.0;
      for (std::size_t i = 0; i < grid.points; ++i) {
        const double x = grid.x(i);
        q += samples[i][r] * 0.5 * x * x * samples[i][c];
      }
      q *= grid.spacing();
      CHECK(std::abs(x2_half_matrix_element(unit, r, c) - q) < 1e-9);
    }
  }
}

TEST_CASE("matrix element parity and selection rule") {
  const OscillatorModel unit = OscillatorModel::unit();
  for (std::size_t r = 0; r < 60; ++r) {
    for (std::size_t c = 0; c < 60; ++c) {
      const std::size_t d = r > c ? r - c : c - r;
      if ((r + c) % 2 == 1 || d > 2) CHECK(x2_half_matrix_element(unit, r, c) == 0.0);
    }
  }
}

TEST_CASE("overlap_quadrature examples") {
  const OscillatorModel unit = OscillatorModel::unit();
  CHECK(overlap_quadrature(unit, 3, unit, 3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(overlap_quadrature(unit, 0, unit, 2)) < 1e-13);
  const OscillatorModel stiff = unit.with_spring(2.0);
  const double expected = oracle::gaussian_ground_overlap(1.0, std::pow(2.0, 0.25));
  const double q = overlap_quadrature(unit, 0, stiff, 0);
  CHECK(q == doctest::Approx(expected).epsilon(1e-12));
  CHECK(q * q == doctest::Approx(0.98517).epsilon(1e-5));
}

TEST_CASE("overlap_quadrature rejects a grid that truncates the integrand") {
  const OscillatorModel unit = OscillatorModel::unit();
  CHECK_THROWS_AS(overlap_quadrature(unit, 20, unit, 20, GridSpec{3.0, 4096}), GridTooSmallError);
}

TEST_CASE("orthonormality of psi_0..psi_30") {
  const OscillatorModel unit = OscillatorModel::unit();
  const Eigen::MatrixXd gram = overlap_matrix(unit, 30, unit, 30, default_quadrature_grid(30, unit.alpha()));
  CHECK((gram - Eigen::MatrixXd::Identity(31, 31)).cwiseAbs().maxCoeff() < 1e-9);
  for (std::size_t a : {0u, 5u, 17u, 30u}) {
    for (std::size_t b : {0u, 4u, 17u, 29u}) {
      CHECK(overlap_quadrature(unit, a, unit, b) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("default quadrature grid scales with the largest index") {
  const GridSpec small = default_quadrature_grid(4, 1.0);
  CHECK(small.half_width == 12.0);
  CHECK(small.points >= 4096);
  const GridSpec large = default_quadrature_grid(400, 1.0);
  CHECK(large.half_width == doctest::Approx(3.0 * std::sqrt(801.0)));
  CHECK(large.spacing() <= std::numbers::pi / (4.0 * std::sqrt(801.0)) + 1e-15);
}
