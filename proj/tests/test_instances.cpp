#include "doctest.h"

#include "pgas/activeset.hpp"
#include "pgas/errors.hpp"
#include "pgas/instances.hpp"
#include "pgas/solver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace pgas;

namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_same(const ProblemInstance& a, const ProblemInstance& b) {
  CHECK(a.seed == b.seed);
  CHECK(a.objective.form() == b.objective.form());
  CHECK(a.objective.Q() == b.objective.Q());
  CHECK(a.objective.b() == b.objective.b());
  CHECK(a.objective.c() == b.objective.c());
  CHECK(a.objective.mu0() == b.objective.mu0());
  CHECK(a.regularizer.kind() == b.regularizer.kind());
  CHECK(a.regularizer.lambda() == b.regularizer.lambda());
  CHECK(a.regularizer.lower_bounds() == b.regularizer.lower_bounds());
  CHECK(a.regularizer.upper_bounds() == b.regularizer.upper_bounds());
  CHECK(a.x0 == b.x0);
  REQUIRE(a.ground_truth.has_value() == b.ground_truth.has_value());
  if (a.ground_truth) {
    CHECK(a.ground_truth->x_star == b.ground_truth->x_star);
    CHECK(a.ground_truth->active == b.ground_truth->active);
    CHECK(a.ground_truth->delta == b.ground_truth->delta);
  }
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pgas_test_" + name);
}

}  // namespace

TEST_CASE("generate_l1: planted optimality and margin") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 10 + seed;
    const std::size_t nnz = seed % n;
    const ProblemInstance inst = generate_l1(n, nnz, 1.0, 0.01 * (1 + seed), 10.0 + seed, seed);
    REQUIRE(inst.ground_truth);
    const GroundTruth& gt = *inst.ground_truth;
    CHECK(gt.active.size() == n - nnz);
    CHECK(detect_active_set(inst.regularizer, gt.x_star) == gt.active);

    const Vector g = inst.objective.grad(gt.x_star);
    for (std::size_t i = 0; i < n; ++i) {
      const SubdiffInterval sd = inst.regularizer.subdiff_interval(i, gt.x_star[at(i)]);
      CHECK(sd.closure_contains(-g[at(i)], 1e-12));
    }
    const DeltaResult d = compute_delta(inst.objective, inst.regularizer, gt.x_star, gt.active);
    CHECK(std::abs(d.delta - gt.delta) <= 1e-10);
    CHECK(check_nondegeneracy(inst.objective, inst.regularizer, gt.x_star).nondegenerate);

    const double r = (inst.x0 - gt.x_star).norm();
    CHECK(r == doctest::Approx(10.0 * (gt.x_star.norm() > 0 ? gt.x_star.norm() : 1.0)));
  }
}

TEST_CASE("generate_l1: condition number and symmetry") {
  const ProblemInstance inst = generate_l1(30, 5, 1.0, 0.1, 100.0, 3);
  const Matrix& q = inst.objective.Q();
  CHECK(q == q.transpose());
  const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(q).eigenvalues();
  CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(eig[29] == doctest::Approx(100.0).epsilon(1e-5));
}

TEST_CASE("generate_l1: edge cases and errors") {
  const ProblemInstance full = generate_l1(8, 8, 1.0, 0.1, 5.0, 1);
  CHECK(full.ground_truth->active.empty());
  CHECK(full.ground_truth->delta == kInf);
  CHECK(compute_delta(full.objective, full.regularizer, full.ground_truth->x_star, {}).delta == kInf);

  CHECK_THROWS_AS(generate_l1(5, 6, 1.0, 0.1, 5.0, 1), ConfigError);
  CHECK_THROWS_AS(generate_l1(5, 2, 1.0, 1.0, 5.0, 1), ConfigError);
  CHECK_THROWS_AS(generate_l1(5, 2, 1.0, -0.1, 5.0, 1), ConfigError);
  CHECK_THROWS_AS(generate_l1(5, 2, 1.0, 0.1, 0.5, 1), ConfigError);
}

TEST_CASE("generate_l1: delta_target = 0 plants an exactly degenerate margin") {
  const ProblemInstance inst = generate_l1(20, 5, 1.0, 0.0, 50.0, 4);
  const auto r = check_nondegeneracy(inst.objective, inst.regularizer, inst.ground_truth->x_star);
  CHECK(r.delta == 0.0);
  CHECK_FALSE(r.nondegenerate);
}

TEST_CASE("generate_nonneg") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance inst = generate_nonneg(12, 1 + seed, 0.05, 20.0, seed);
    const GroundTruth& gt = *inst.ground_truth;
    const Vector g = inst.objective.grad(gt.x_star);
    double mn = kInf;
    for (std::size_t i : gt.active) mn = std::min(mn, g[at(i)]);
    CHECK(std::abs(mn - 0.05) <= 1e-12);
    CHECK(std::abs(compute_delta(inst.objective, inst.regularizer, gt.x_star, gt.active).delta - 0.05) <= 1e-10);
    CHECK(check_nondegeneracy(inst.objective, inst.regularizer, gt.x_star).nondegenerate);
    CHECK((gt.x_star.array() >= 0.0).all());
  }
  const ProblemInstance interior = generate_nonneg(6, 0, 0.5, 3.0, 2);
  CHECK(interior.ground_truth->active.empty());
  CHECK((interior.ground_truth->x_star.array() > 0.0).all());

  const ProblemInstance all_zero = generate_nonneg(6, 6, 1.0, 3.0, 2);
  CHECK((all_zero.objective.grad(all_zero.ground_truth->x_star).array() >= 1.0 - 1e-15).all());
  CHECK_THROWS_AS(generate_nonneg(6, 7, 1.0, 3.0, 2), ConfigError);
}

TEST_CASE("planted x* is a fixed point of the step") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance inst = seed % 2 ? generate_nonneg(25, 10, 0.01, 40.0, seed)
                                          : generate_l1(25, 8, 1.0, 0.01, 40.0, seed);
    const GroundTruth& gt = *inst.ground_truth;
    const SpectralBounds sb = spectral_bounds(inst.objective);
    for (double alpha : {1.0 / sb.L, 2.0 / (sb.L + sb.mu)}) {
      const Vector y = pg_step(inst.objective, inst.regularizer, gt.x_star, alpha);
      for (std::size_t i : gt.active) CHECK(y[at(i)] == gt.x_star[at(i)]);
      // Off Z the step is x + alpha (lambda s - lambda s) up to rounding.
      CHECK((y - gt.x_star).lpNorm<Eigen::Infinity>() <= 1e-14);
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  check_same(generate_l1(15, 4, 0.7, 0.05, 30.0, 99), generate_l1(15, 4, 0.7, 0.05, 30.0, 99));
  check_same(generate_nonneg(15, 4, 0.05, 30.0, 99), generate_nonneg(15, 4, 0.05, 30.0, 99));
  CHECK(generate_l1(15, 4, 0.7, 0.05, 30.0, 99).x0 != generate_l1(15, 4, 0.7, 0.05, 30.0, 100).x0);
}

TEST_CASE("instance JSON round-trips bit-exactly") {
  const auto path = temp_file("roundtrip.json");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ProblemInstance inst = seed == 2 ? generate_nonneg(9, 3, 0.1, 8.0, seed)
                                           : generate_l1(9, 3 * seed, 0.3, 0.1, 8.0, seed);
    save_instance(inst, path);
    check_same(inst, load_instance(path));
  }

  Vector lo(2), hi(2);
  lo << -kInf, 0.0;
  hi << 1.5, kInf;
  Matrix a(3, 2);
  a << 1, 2, 3, 4, 5, 6.125;
  Vector y(3);
  y << 0.1, 0.2, 0.3;
  ProblemInstance boxed{SmoothObjective::ridge_least_squares(a, y, 0.1),
                        Regularizer::box(lo, hi), Vector::Zero(2), 18446744073709551615ull,
                        std::nullopt};
  const ProblemInstance back = instance_from_json(instance_to_json(boxed));
  CHECK(back.seed == boxed.seed);
  CHECK(back.objective.form() == SmoothObjective::Form::RidgeLeastSquares);
  CHECK(back.objective.A() == a);
  CHECK(back.objective.y() == y);
  CHECK(back.objective.mu0() == 0.1);
  CHECK(back.regularizer.lower_bounds() == lo);
  CHECK(back.regularizer.upper_bounds() == hi);
  CHECK_FALSE(back.ground_truth.has_value());
  std::filesystem::remove(path);
}

TEST_CASE("instance JSON schema errors") {
  const std::string good = instance_to_json(generate_l1(3, 1, 1.0, 0.1, 2.0, 5));
  auto j_without = [&](const std::string& key) {
    auto s = good;
    const auto pos = s.find("\"" + key + "\"");
    REQUIRE(pos != std::string::npos);
    s.replace(pos, key.size() + 2, "\"renamed_" + key + "\"");
    return s;
  };
  CHECK_THROWS_AS(instance_from_json(j_without("regularizer")), SchemaError);
  CHECK_THROWS_AS(instance_from_json(j_without("version")), SchemaError);
  CHECK_THROWS_AS(instance_from_json(j_without("x0")), SchemaError);
  CHECK_THROWS_AS(instance_from_json("{not json"), SchemaError);
  CHECK_THROWS_AS(load_instance(temp_file("does_not_exist.json")), SchemaError);

  const std::string asym = R"({"version":1,"seed":0,
    "objective":{"form":"quadratic","Q":[[2,0.5],[0.5000001,2]],"b":[0,0],"c":0},
    "regularizer":{"kind":"l1","lambda":1},"x0":[0,0]})";
  CHECK_THROWS_AS(instance_from_json(asym), SchemaError);
  const std::string tiny_asym = R"({"version":1,"seed":0,
    "objective":{"form":"quadratic","Q":[[2,0.5],[0.5000000000000001,2]],"b":[0,0],"c":0},
    "regularizer":{"kind":"l1","lambda":1},"x0":[0,0]})";
  CHECK_NOTHROW(instance_from_json(tiny_asym));

  const std::string v2 = R"({"version":2,"seed":0,
    "objective":{"form":"quadratic","Q":[[1]],"b":[0],"c":0},
    "regularizer":{"kind":"zero"},"x0":[0]})";
  CHECK_THROWS_AS(instance_from_json(v2), SchemaError);
  const std::string bad_kind = R"({"version":1,"seed":0,
    "objective":{"form":"quadratic","Q":[[1]],"b":[0],"c":0},
    "regularizer":{"kind":"tv"},"x0":[0]})";
  CHECK_THROWS_AS(instance_from_json(bad_kind), SchemaError);
  const std::string bad_dim = R"({"version":1,"seed":0,
    "objective":{"form":"quadratic","Q":[[1]],"b":[0],"c":0},
    "regularizer":{"kind":"nonneg"},"x0":[0, 1]})";
  CHECK_THROWS_AS(instance_from_json(bad_dim), SchemaError);
}
