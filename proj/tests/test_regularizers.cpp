#include "doctest.h"

#include "oracles.hpp"
#include "pgas/errors.hpp"
#include "pgas/random.hpp"
#include "pgas/regularizers.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

using namespace pgas;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<Regularizer> sample_kinds(std::size_t n) {
  Vector lo(static_cast<Eigen::Index>(n)), hi(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    lo[static_cast<Eigen::Index>(i)] = -1.0 - 0.25 * static_cast<double>(i);
    hi[static_cast<Eigen::Index>(i)] = 0.5 + 0.5 * static_cast<double>(i);
  }
  hi[0] = kInf;
  return {Regularizer::zero(n), Regularizer::l1(n, 0.7),
          Regularizer::nonnegative(n), Regularizer::box(lo, hi)};
}

}  // namespace

TEST_CASE("prox_coord examples") {
  const auto l1 = Regularizer::l1(1, 1.0);
  CHECK(l1.prox_coord(0, 0.0, 1.0) == 0.0);
  CHECK(l1.prox_coord(0, 3.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(Regularizer::nonnegative(1).prox_coord(0, -2.0, 0.5) == 0.0);
  CHECK(Regularizer::zero(1).prox_coord(0, 7.25, 0.1) == 7.25);
}

TEST_CASE("prox_coord matches the grid oracle on the fixed examples") {
  const auto l1 = Regularizer::l1(1, 1.0);
  CHECK(std::abs(l1.prox_coord(0, 3.0, 1.0) - oracle::grid_prox(l1, 0, 3.0, 1.0)) <= 1e-6);
  CHECK(std::abs(l1.prox_coord(0, -3.0, 1.0) - oracle::grid_prox(l1, 0, -3.0, 1.0)) <= 1e-6);
  CHECK(std::abs(l1.prox_coord(0, 0.5, 1.0) - oracle::grid_prox(l1, 0, 0.5, 1.0)) <= 1e-6);
}

TEST_CASE("vector prox") {
  const auto l1 = Regularizer::l1(3, 1.0);
  const Vector p = l1.prox(vec({3, -3, 0.5}), 1.0);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(-2.0));
  CHECK(p[2] == 0.0);

  const Vector z = vec({1.5, -2.25, 1e300});
  CHECK(Regularizer::zero(3).prox(z, 12.0) == z);

  const auto box = Regularizer::box(vec({0, 0, 0}), vec({1, 1, 1}));
  CHECK(box.prox(vec({-1, 0.5, 2}), 1.0) == vec({0, 0.5, 1}));

  CHECK_THROWS_AS(l1.prox(vec({1, 2}), 1.0), DimensionError);
}

TEST_CASE("prox argument validation") {
  const auto l1 = Regularizer::l1(2, 1.0);
  CHECK_THROWS_AS(l1.prox_coord(2, 0.0, 1.0), IndexError);
  CHECK_THROWS_AS(l1.prox_coord(0, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(l1.prox_coord(0, 0.0, -1.0), ConfigError);
}

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(Regularizer::l1(2, 0.0), ConfigError);
  CHECK_THROWS_AS(Regularizer::l1(2, -1.0), ConfigError);
  CHECK_THROWS_AS(Regularizer::box(vec({0, 1}), vec({1, 1})), ConfigError);
  CHECK_THROWS_AS(Regularizer::box(vec({0}), vec({1, 2})), DimensionError);
  CHECK_THROWS_AS(Regularizer::zero(0), ConfigError);
  CHECK_NOTHROW(Regularizer::box(vec({-kInf}), vec({kInf})));
}

TEST_CASE("subdiff_interval") {
  const auto l1 = Regularizer::l1(1, 2.0);
  const SubdiffInterval at0 = l1.subdiff_interval(0, 0.0);
  CHECK_FALSE(at0.singleton);
  CHECK(at0.lower == -2.0);
  CHECK(at0.upper == 2.0);
  CHECK(l1.subdiff_interval(0, -0.3).singleton);
  CHECK(l1.subdiff_interval(0, -0.3).lower == -2.0);

  const auto nn = Regularizer::nonnegative(1);
  const SubdiffInterval s = nn.subdiff_interval(0, 0.7);
  CHECK(s.singleton);
  CHECK(s.lower == 0.0);
  const SubdiffInterval z = nn.subdiff_interval(0, 0.0);
  CHECK_FALSE(z.singleton);
  CHECK(z.lower == -kInf);
  CHECK(z.upper == 0.0);
  CHECK_THROWS_AS(nn.subdiff_interval(0, -0.1), DomainError);

  const auto box = Regularizer::box(vec({0}), vec({3}));
  CHECK(box.subdiff_interval(0, 0.0).upper == 0.0);
  CHECK(box.subdiff_interval(0, 0.0).lower == -kInf);
  CHECK(box.subdiff_interval(0, 3.0).lower == 0.0);
  CHECK(box.subdiff_interval(0, 3.0).upper == kInf);
  CHECK(box.subdiff_interval(0, 1.0).singleton);
  CHECK_THROWS_AS(box.subdiff_interval(0, 3.5), DomainError);

  CHECK(Regularizer::zero(1).subdiff_interval(0, 123.0).singleton);
}

TEST_CASE("nearest_nonsmooth_distance") {
  CHECK(Regularizer::l1(1, 1.0).nearest_nonsmooth_distance(0, 0.4) == 0.4);
  CHECK(Regularizer::l1(1, 1.0).nearest_nonsmooth_distance(0, -0.4) == 0.4);
  CHECK(Regularizer::zero(1).nearest_nonsmooth_distance(0, 5.0) == kInf);
  CHECK(Regularizer::box(vec({0}), vec({3})).nearest_nonsmooth_distance(0, 1.0) == 1.0);
  CHECK(Regularizer::box(vec({-kInf}), vec({3})).nearest_nonsmooth_distance(0, -10.0) == 13.0);
  CHECK(Regularizer::box(vec({-kInf}), vec({kInf})).nearest_nonsmooth_distance(0, 2.0) == kInf);
  CHECK_THROWS_AS(Regularizer::nonnegative(1).nearest_nonsmooth_distance(0, -1.0), DomainError);
}

TEST_CASE("eval_g") {
  CHECK(Regularizer::l1(2, 2.0).eval(vec({1, -1})) == 4.0);
  CHECK(Regularizer::nonnegative(2).eval(vec({1, -0.01})) == kInf);
  CHECK(Regularizer::nonnegative(2).eval(vec({1, 0})) == 0.0);
  CHECK(Regularizer::zero(2).eval(vec({-5, 9})) == 0.0);
  CHECK(Regularizer::box(vec({0, 0}), vec({1, 1})).eval(vec({0.5, 1.5})) == kInf);
}

TEST_CASE("property: prox is nonexpansive") {
  Xorshift64Star rng(11);
  const std::size_t n = 6;
  for (const Regularizer& reg : sample_kinds(n)) {
    int violations = 0;
    for (int t = 0; t < 1000; ++t) {
      const double alpha = rng.uniform(0.01, 3.0);
      const Vector u = 3.0 * rng.normal_vector(n);
      const Vector v = 3.0 * rng.normal_vector(n);
      const double lhs = (reg.prox(u, alpha) - reg.prox(v, alpha)).norm();
      if (lhs > (u - v).norm() + 1e-12) ++violations;
    }
    CHECK_MESSAGE(violations == 0, reg.kind_name());
  }
}

TEST_CASE("property: prox residual lies in the closed subdifferential") {
  Xorshift64Star rng(12);
  const std::size_t n = 6;
  for (const Regularizer& reg : sample_kinds(n)) {
    for (int t = 0; t < 500; ++t) {
      const std::size_t i = rng.below(n);
      const double z = rng.uniform(-4.0, 4.0);
      const double alpha = rng.uniform(0.01, 3.0);
      const double y = reg.prox_coord(i, z, alpha);
      const SubdiffInterval sd = reg.subdiff_interval(i, y);
      const double w = (z - y) / alpha;
      CHECK_MESSAGE(sd.closure_contains(w, 1e-12 * (1.0 + std::abs(w))), reg.kind_name());
    }
  }
}

TEST_CASE("property: kinks and bounds are hit bit-exactly") {
  Xorshift64Star rng(13);
  const auto l1 = Regularizer::l1(1, 1.3);
  const auto nn = Regularizer::nonnegative(1);
  for (int t = 0; t < 1000; ++t) {
    const double alpha = rng.uniform(0.01, 2.0);
    const double z = rng.uniform(-alpha * 1.3, alpha * 1.3);
    const double y = l1.prox_coord(0, z, alpha);
    CHECK(std::bit_cast<std::uint64_t>(y) == std::bit_cast<std::uint64_t>(0.0));
    const double w = nn.prox_coord(0, -std::abs(z), alpha);
    CHECK(std::bit_cast<std::uint64_t>(w) == std::bit_cast<std::uint64_t>(0.0));
  }
  // -0.0 input still lands on +0.0.
  CHECK(std::bit_cast<std::uint64_t>(nn.prox_coord(0, -0.0, 1.0)) == 0u);
  CHECK(std::bit_cast<std::uint64_t>(l1.prox_coord(0, -0.0, 1.0)) == 0u);
}

TEST_CASE("property: prox_coord agrees with the grid oracle") {
  Xorshift64Star rng(14);
  const std::size_t n = 6;
  for (const Regularizer& reg : sample_kinds(n)) {
    for (int t = 0; t < 40; ++t) {
      const std::size_t i = rng.below(n);
      const double z = rng.uniform(-4.0, 4.0);
      const double alpha = rng.uniform(0.05, 2.0);
      const double want = oracle::grid_prox(reg, i, z, alpha);
      CHECK_MESSAGE(std::abs(reg.prox_coord(i, z, alpha) - want) <= 1e-6, reg.kind_name());
    }
  }
}
