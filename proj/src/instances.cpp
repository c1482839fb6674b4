#include "pgas/instances.hpp"

#include "pgas/errors.hpp"
#include "pgas/format.hpp"
#include "pgas/random.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace pgas {

using nlohmann::json;

namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Grid spacing 2^(ceil(log2 m) - bits) for magnitudes up to m.
double dyadic_quantum(double max_abs, int bits) {
  const int e = static_cast<int>(std::ceil(std::log2(max_abs)));
  return std::ldexp(1.0, e - bits);
}

double round_to(double v, double quantum) {
  return std::round(v / quantum) * quantum;
}

// Q = U diag(s) U' with s log-uniform on [mu0, mu0 cond] (both ends present)
// and U Haar-distributed. Entries are rounded to a 26-bit grid so that
// products with planted solutions on a coarse grid are exact.
Matrix planted_hessian(std::size_t n, double mu0, double cond,
                       Xorshift64Star& rng) {
  const auto m = at(n);
  Vector s(m);
  const double lo = std::log(mu0);
  const double hi = std::log(mu0 * cond);
  for (Eigen::Index i = 0; i < m; ++i) s[i] = std::exp(rng.uniform(lo, hi));
  s[0] = mu0;
  if (m > 1) s[1] = mu0 * cond;

  const Matrix g = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix u = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j)
    if (r(j, j) < 0.0) u.col(j) *= -1.0;

  Matrix q = u * s.asDiagonal() * u.transpose();
  q = 0.5 * (q + q.transpose()).eval();
  const double quantum = dyadic_quantum(q.cwiseAbs().maxCoeff(), 26);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) q(i, j) = round_to(q(i, j), quantum);
  return q;
}

// Distinct indices drawn by a partial Fisher-Yates shuffle, sorted.
IndexSet sample_indices(std::size_t n, std::size_t k, Xorshift64Star& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i)
    std::swap(perm[i], perm[i + rng.below(n - i)]);
  IndexSet out(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

// Magnitude in [0.5, 2] on a 2^-10 grid.
double planted_magnitude(Xorshift64Star& rng) {
  return round_to(rng.uniform(0.5, 2.0), 0x1.0p-10);
}

Vector start_point(const Vector& x_star, const GeneratorOptions& opt,
                   Xorshift64Star& rng) {
  const double norm = x_star.norm();
  const double radius = opt.x0_radius_factor * (norm > 0.0 ? norm : 1.0);
  return x_star + radius * rng.unit_vector(static_cast<std::size_t>(x_star.size()));
}

void check_common(std::size_t n, double delta_target, double cond_target,
                  const GeneratorOptions& opt) {
  if (n == 0) throw ConfigError("n must be positive");
  if (!(delta_target >= 0.0) || !std::isfinite(delta_target))
    throw ConfigError("delta_target must be finite and >= 0");
  if (!(cond_target >= 1.0) || !std::isfinite(cond_target))
    throw ConfigError("cond_target must be >= 1");
  if (!(opt.mu0 > 0.0)) throw ConfigError("mu0 must be positive");
  if (!(opt.x0_radius_factor >= 0.0))
    throw ConfigError("x0 radius factor must be >= 0");
}

}  // namespace

ProblemInstance generate_l1(std::size_t n, std::size_t nnz, double lambda,
                            double delta_target, double cond_target,
                            std::uint64_t seed, const GeneratorOptions& opt) {
  check_common(n, delta_target, cond_target, opt);
  if (nnz > n) throw ConfigError("nnz exceeds n");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(delta_target < lambda)) throw ConfigError("delta_target must be < lambda");

  Xorshift64Star rng(seed);
  const Matrix q = planted_hessian(n, opt.mu0, cond_target, rng);
  const IndexSet support = sample_indices(n, nnz, rng);

  Vector x_star = Vector::Zero(at(n));
  Vector v = Vector::Zero(at(n));
  std::vector<char> on_support(n, 0);
  for (std::size_t i : support) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    x_star[at(i)] = sign * planted_magnitude(rng);
    v[at(i)] = sign * lambda;
    on_support[i] = 1;
  }
  IndexSet zeros;
  for (std::size_t i = 0; i < n; ++i)
    if (!on_support[i]) zeros.push_back(i);

  const double cap = lambda - delta_target;
  for (std::size_t i : zeros) v[at(i)] = rng.uniform(-cap, cap);
  if (!zeros.empty()) {
    const std::size_t tight = zeros[rng.below(zeros.size())];
    v[at(tight)] = rng.uniform() < 0.5 ? -cap : cap;
  }

  // grad f(x*) = Qx* - b = -v, and -v_i lies in the subdifferential of
  // lambda |.| at x*_i.
  const Vector b = q * x_star + v;
  ProblemInstance inst{SmoothObjective::quadratic(q, b, 0.0),
                       Regularizer::l1(n, lambda), Vector(), seed,
                       GroundTruth{x_star, zeros, zeros.empty() ? kInf : delta_target}};
  inst.x0 = start_point(x_star, opt, rng);
  return inst;
}

ProblemInstance generate_nonneg(std::size_t n, std::size_t n_active_at_zero,
                                double delta_target, double cond_target,
                                std::uint64_t seed,
                                const GeneratorOptions& opt) {
  check_common(n, delta_target, cond_target, opt);
  if (n_active_at_zero > n) throw ConfigError("n_active_at_zero exceeds n");

  Xorshift64Star rng(seed);
  const Matrix q = planted_hessian(n, opt.mu0, cond_target, rng);
  const IndexSet zeros = sample_indices(n, n_active_at_zero, rng);
  std::vector<char> at_zero(n, 0);
  for (std::size_t i : zeros) at_zero[i] = 1;

  Vector x_star = Vector::Zero(at(n));
  Vector v = Vector::Zero(at(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (at_zero[i])
      v[at(i)] = rng.uniform(delta_target, delta_target + 1.0);
    else
      x_star[at(i)] = planted_magnitude(rng);
  }
  if (!zeros.empty()) v[at(zeros[rng.below(zeros.size())])] = delta_target;

  // grad f(x*) = Qx* - b = v >= 0, zero off the active set.
  const Vector b = q * x_star - v;
  ProblemInstance inst{SmoothObjective::quadratic(q, b, 0.0),
                       Regularizer::nonnegative(n), Vector(), seed,
                       GroundTruth{x_star, zeros, zeros.empty() ? kInf : delta_target}};
  inst.x0 = start_point(x_star, opt, rng);
  return inst;
}

// ---- JSON ------------------------------------------------------------------

namespace {

json real_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double real_from_json(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_double(j.get<std::string>());
    } catch (const SchemaError&) {
    }
  }
  throw SchemaError(std::string("expected a real number for '") + what + "'");
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(real_to_json(v[i]));
  return arr;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string("'") + what + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[at(i)] = real_from_json(j[i], what);
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(std::string("'") + what + "' must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(at(rows), at(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw SchemaError(std::string("'") + what + "' rows have unequal lengths");
    for (std::size_t k = 0; k < cols; ++k)
      m(at(i), at(k)) = real_from_json(j[i][k], what);
  }
  return m;
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(std::string("missing required key '") + key + "'");
  return j.at(key);
}

json objective_to_json(const SmoothObjective& obj) {
  if (obj.form() == SmoothObjective::Form::Quadratic)
    return {{"form", "quadratic"},
            {"Q", matrix_to_json(obj.Q())},
            {"b", vector_to_json(obj.b())},
            {"c", obj.c()}};
  return {{"form", "ridge_ls"},
          {"A", matrix_to_json(obj.A())},
          {"y", vector_to_json(obj.y())},
          {"mu0", obj.mu0()}};
}

SmoothObjective objective_from_json(const json& j) {
  const std::string form = require(j, "form").get<std::string>();
  if (form == "quadratic") {
    Matrix q = matrix_from_json(require(j, "Q"), "Q");
    if (q.rows() != q.cols()) throw SchemaError("Q must be square");
    for (Eigen::Index r = 0; r < q.rows(); ++r)
      for (Eigen::Index c = r + 1; c < q.cols(); ++c)
        if (!(std::abs(q(r, c) - q(c, r)) <= 1e-12))
          throw SchemaError("Q is not symmetric at (" + std::to_string(r) +
                            "," + std::to_string(c) + ")");
    Vector b = vector_from_json(require(j, "b"), "b");
    if (b.size() != q.rows()) throw SchemaError("b length does not match Q");
    const double c = j.contains("c") ? real_from_json(j.at("c"), "c") : 0.0;
    return SmoothObjective::quadratic(std::move(q), std::move(b), c);
  }
  if (form == "ridge_ls") {
    Matrix a = matrix_from_json(require(j, "A"), "A");
    Vector y = vector_from_json(require(j, "y"), "y");
    if (y.size() != a.rows()) throw SchemaError("y length does not match A");
    const double mu0 = real_from_json(require(j, "mu0"), "mu0");
    if (!(mu0 > 0.0)) throw SchemaError("mu0 must be positive");
    return SmoothObjective::ridge_least_squares(std::move(a), std::move(y), mu0);
  }
  throw SchemaError("unknown objective form '" + form + "'");
}

json regularizer_to_json(const Regularizer& reg) {
  switch (reg.kind()) {
    case Regularizer::Kind::Zero: return {{"kind", "zero"}};
    case Regularizer::Kind::L1: return {{"kind", "l1"}, {"lambda", reg.lambda()}};
    case Regularizer::Kind::NonNegative: return {{"kind", "nonneg"}};
    case Regularizer::Kind::Box:
      return {{"kind", "box"},
              {"lo", vector_to_json(reg.lower_bounds())},
              {"hi", vector_to_json(reg.upper_bounds())}};
  }
  return {};
}

Regularizer regularizer_from_json(const json& j, std::size_t n) {
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "zero") return Regularizer::zero(n);
  if (kind == "l1") {
    const double lambda = real_from_json(require(j, "lambda"), "lambda");
    if (!(lambda > 0.0)) throw SchemaError("lambda must be positive");
    return Regularizer::l1(n, lambda);
  }
  if (kind == "nonneg") return Regularizer::nonnegative(n);
  if (kind == "box") {
    Vector lo = vector_from_json(require(j, "lo"), "lo");
    Vector hi = vector_from_json(require(j, "hi"), "hi");
    if (static_cast<std::size_t>(lo.size()) != n ||
        static_cast<std::size_t>(hi.size()) != n)
      throw SchemaError("box bounds do not match the problem dimension");
    try {
      return Regularizer::box(std::move(lo), std::move(hi));
    } catch (const ConfigError& e) {
      throw SchemaError(e.what());
    }
  }
  throw SchemaError("unknown regularizer kind '" + kind + "'");
}

}  // namespace

std::string instance_to_json(const ProblemInstance& inst) {
  json j;
  j["version"] = 1;
  j["seed"] = inst.seed;
  j["objective"] = objective_to_json(inst.objective);
  j["regularizer"] = regularizer_to_json(inst.regularizer);
  j["x0"] = vector_to_json(inst.x0);
  if (inst.ground_truth) {
    const GroundTruth& gt = *inst.ground_truth;
    j["ground_truth"] = {{"x_star", vector_to_json(gt.x_star)},
                         {"Z", gt.active},
                         {"delta", real_to_json(gt.delta)}};
  }
  return j.dump(1);
}

ProblemInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  try {
    const json& version = require(j, "version");
    if (!version.is_number_integer() || version.get<int>() != 1)
      throw SchemaError("unsupported instance schema version");
    const std::uint64_t seed = require(j, "seed").get<std::uint64_t>();
    SmoothObjective obj = objective_from_json(require(j, "objective"));
    const std::size_t n = obj.dimension();
    Regularizer reg = regularizer_from_json(require(j, "regularizer"), n);
    Vector x0 = vector_from_json(require(j, "x0"), "x0");
    if (static_cast<std::size_t>(x0.size()) != n)
      throw SchemaError("x0 length does not match the problem dimension");

    std::optional<GroundTruth> gt;
    if (j.contains("ground_truth") && !j.at("ground_truth").is_null()) {
      const json& g = j.at("ground_truth");
      GroundTruth t;
      t.x_star = vector_from_json(require(g, "x_star"), "x_star");
      if (static_cast<std::size_t>(t.x_star.size()) != n)
        throw SchemaError("x_star length does not match the problem dimension");
      t.active = require(g, "Z").get<IndexSet>();
      for (std::size_t i : t.active)
        if (i >= n) throw SchemaError("ground_truth Z index out of range");
      t.delta = real_from_json(require(g, "delta"), "delta");
      gt = std::move(t);
    }
    return ProblemInstance{std::move(obj), std::move(reg), std::move(x0), seed,
                           std::move(gt)};
  } catch (const json::exception& e) {
    throw SchemaError(std::string("instance schema violation: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("invalid instance: ") + e.what());
  }
}

void save_instance(const ProblemInstance& inst,
                   const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << instance_to_json(inst) << '\n';
  if (!os) throw ConfigError("write failed for " + path.string());
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw SchemaError("cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace pgas
