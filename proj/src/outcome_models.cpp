#include "mad/outcome_models.hpp"

#include <cmath>
#include <random>

#include "mad/error.hpp"
#include "mad/rng.hpp"

namespace mad {

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::bernoulli: return "bernoulli";
    case OutcomeKind::normal: return "normal";
    case OutcomeKind::student_t: return "student_t";
    case OutcomeKind::cauchy: return "cauchy";
  }
  return "unknown";
}

OutcomeKind outcome_kind_from_string(std::string_view name) {
  if (name == "bernoulli") return OutcomeKind::bernoulli;
  if (name == "normal") return OutcomeKind::normal;
  if (name == "student_t" || name == "t") return OutcomeKind::student_t;
  if (name == "cauchy") return OutcomeKind::cauchy;
  throw ParameterError("kind", "unknown outcome model '" + std::string(name) + "'");
}

namespace {

void validate_parameters(OutcomeKind kind, const ArmParameters& p, std::size_t n_arms,
                         const std::string& prefix) {
  if (p.location.size() != n_arms) {
    throw ParameterError(prefix + "params", "expected " + std::to_string(n_arms) + " arm parameters, got " +
                                                std::to_string(p.location.size()));
  }
  for (std::size_t w = 0; w < p.location.size(); ++w) {
    const double v = p.location[w];
    if (!std::isfinite(v)) {
      throw ParameterError(prefix + "params[" + std::to_string(w) + "]", "must be finite");
    }
    if (kind == OutcomeKind::bernoulli && (v < 0.0 || v > 1.0)) {
      throw ParameterError(prefix + "params[" + std::to_string(w) + "]",
                           "Bernoulli probability must lie in [0, 1]");
    }
  }
  if (kind != OutcomeKind::bernoulli && !(p.scale > 0.0 && std::isfinite(p.scale))) {
    throw ParameterError(prefix + "scale", "must be positive");
  }
  if (kind == OutcomeKind::student_t && !(p.df >= 1.0 && std::isfinite(p.df))) {
    throw ParameterError(prefix + "df", "degrees of freedom must be >= 1");
  }
}

}  // namespace

void OutcomeModelSpec::validate() const {
  if (n_units == 0) throw ParameterError("n_units", "must be positive");
  if (base.location.size() < 2) throw ParameterError("params", "at least two arms are required");
  validate_parameters(kind, base, n_arms(), "");
  std::size_t previous = 0;
  for (std::size_t c = 0; c < changepoints.size(); ++c) {
    const auto& cp = changepoints[c];
    const std::string prefix = "changepoints[" + std::to_string(c) + "].";
    if (cp.start_unit < 1 || cp.start_unit > n_units) {
      throw ParameterError(prefix + "start", "must lie in [1, n_units]");
    }
    if (cp.start_unit <= previous) {
      throw ParameterError(prefix + "start", "changepoint starts must be strictly increasing");
    }
    previous = cp.start_unit;
    validate_parameters(kind, cp.parameters, n_arms(), prefix);
  }
}

const ArmParameters& OutcomeModelSpec::parameters_at(std::size_t unit) const {
  const ArmParameters* current = &base;
  for (const auto& cp : changepoints) {
    if (unit >= cp.start_unit) {
      current = &cp.parameters;
    } else {
      break;
    }
  }
  return *current;
}

PotentialOutcomeTable::PotentialOutcomeTable(std::size_t n_units, std::size_t n_arms)
    : n_units_(n_units), n_arms_(n_arms), values_(n_units * n_arms, 0.0) {}

PotentialOutcomeTable::PotentialOutcomeTable(std::size_t n_units, std::size_t n_arms,
                                             std::vector<double> values)
    : n_units_(n_units), n_arms_(n_arms), values_(std::move(values)) {
  if (values_.size() != n_units_ * n_arms_) {
    throw ParameterError("values", "size does not match n_units x n_arms");
  }
}

PotentialOutcomeTable generate_table(const OutcomeModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t k = spec.n_arms();
  PotentialOutcomeTable table(spec.n_units, k);
  table.heavy_tailed = spec.heavy_tailed();
  // Arm w draws from its own stream so that a changepoint on one arm does not
  // shift the draws of another.
  std::vector<Rng> streams;
  streams.reserve(k);
  for (std::size_t w = 0; w < k; ++w) streams.push_back(make_stream(seed, "outcomes", w));

  // Per-arm distribution objects: normal_distribution caches a second draw.
  std::vector<std::normal_distribution<double>> normals(k);
  for (std::size_t i = 0; i < spec.n_units; ++i) {
    const ArmParameters& p = spec.parameters_at(i + 1);
    for (std::size_t w = 0; w < k; ++w) {
      Rng& rng = streams[w];
      double y = 0.0;
      switch (spec.kind) {
        case OutcomeKind::bernoulli:
          y = uniform01(rng) < p.location[w] ? 1.0 : 0.0;
          break;
        case OutcomeKind::normal:
          y = p.location[w] + p.scale * normals[w](rng);
          break;
        case OutcomeKind::student_t: {
          std::student_t_distribution<double> t(p.df);
          y = p.location[w] + p.scale * t(rng);
          break;
        }
        case OutcomeKind::cauchy: {
          std::cauchy_distribution<double> c(0.0, 1.0);
          y = p.location[w] + p.scale * c(rng);
          break;
        }
      }
      table(i, w) = y;
    }
  }
  return table;
}

std::vector<double> true_ate_curve(const PotentialOutcomeTable& table, std::size_t w,
                                   std::size_t w_prime) {
  if (w >= table.n_arms()) throw ParameterError("w", "arm index out of range");
  if (w_prime >= table.n_arms()) throw ParameterError("w_prime", "arm index out of range");
  if (w == w_prime) throw ParameterError("w_prime", "contrast arms must differ");
  std::vector<double> curve(table.n_units());
  double sum = 0.0;
  for (std::size_t i = 0; i < table.n_units(); ++i) {
    sum += table(i, w) - table(i, w_prime);
    curve[i] = sum / static_cast<double>(i + 1);
  }
  return curve;
}

}  // namespace mad
