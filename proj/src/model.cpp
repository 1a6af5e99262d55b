#include "qcd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace qcd {

namespace {

void error(ValidationReport& report, std::string code, std::string message) {
  report.issues.push_back({ValidationIssue::Severity::Error, std::move(code), std::move(message)});
}

void warning(ValidationReport& report, std::string code, std::string message) {
  report.issues.push_back(
      {ValidationIssue::Severity::Warning, std::move(code), std::move(message)});
}

void validate_model_into(const ModelSpec& model, ValidationReport& report) {
  if (model.alphabet.size < 2) {
    error(report, "alphabet_size", fmt::format("alphabet size {} is below 2", model.alphabet.size));
  }
  if (model.M < 1) {
    error(report, "hypotheses", "M must be at least 1");
  }
  if (!(model.p0 >= 0.0 && model.p0 <= 1.0)) {
    error(report, "p0_range", fmt::format("p0 = {:.12g} is outside [0,1]", model.p0));
  }
  if (!(model.p > 0.0 && model.p < 1.0)) {
    error(report, "p_range", fmt::format("p = {:.12g} is outside (0,1)", model.p));
  }

  if (model.nu.size() != model.M) {
    error(report, "nu_length",
          fmt::format("nu has {} entries, expected M = {}", model.nu.size(), model.M));
  } else {
    double total = 0.0;
    for (std::size_t i = 0; i < model.nu.size(); ++i) {
      const double v = model.nu[i];
      total += v;
      if (!(v >= 0.0)) {
        error(report, "nu_negative", fmt::format("nu_{} = {:.12g} is negative", i + 1, v));
      } else if (v == 0.0) {
        warning(report, "nu_zero", fmt::format("nu_{} is zero; the solver requires nu_i > 0", i + 1));
      }
    }
    if (std::abs(total - 1.0) > kStochasticTolerance) {
      error(report, "nu_sum", fmt::format("nu sums to {:.12g}", total));
    }
  }

  if (model.f.size() != model.M + 1) {
    error(report, "f_count",
          fmt::format("{} pmfs given, expected M+1 = {}", model.f.size(), model.M + 1));
    return;
  }
  for (std::size_t i = 0; i < model.f.size(); ++i) {
    const auto& row = model.f[i];
    if (row.size() != model.alphabet.size) {
      error(report, "f_length",
            fmt::format("f_{} has {} entries, expected {}", i, row.size(), model.alphabet.size));
      continue;
    }
    double total = 0.0;
    for (std::size_t x = 0; x < row.size(); ++x) {
      total += row[x];
      if (!(row[x] >= 0.0)) {
        error(report, "f_negative", fmt::format("f_{}({}) = {:.12g} is negative", i, x, row[x]));
      }
    }
    if (std::abs(total - 1.0) > kStochasticTolerance) {
      error(report, "f_sum", fmt::format("f_{} sums to {:.12g}", i, total));
    }
  }
}

}  // namespace

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& issue) {
    return issue.severity == ValidationIssue::Severity::Error;
  });
}

bool ValidationReport::has_warnings() const {
  return std::any_of(issues.begin(), issues.end(), [](const ValidationIssue& issue) {
    return issue.severity == ValidationIssue::Severity::Warning;
  });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.severity == ValidationIssue::Severity::Error ? "error " : "warning ";
    out += issue.code + ": " + issue.message;
  }
  return out;
}

ValidationReport validate(const ModelSpec& model) {
  ValidationReport report;
  validate_model_into(model, report);
  return report;
}

ValidationReport validate(const ModelSpec& model, const CostSpec& costs) {
  ValidationReport report;
  validate_model_into(model, report);

  if (!(costs.c > 0.0) || !std::isfinite(costs.c)) {
    error(report, "c_range", fmt::format("delay cost c = {:.12g} must be positive", costs.c));
  }
  if (costs.a.size() != model.M + 1) {
    error(report, "a_rows",
          fmt::format("cost matrix has {} rows, expected M+1 = {}", costs.a.size(), model.M + 1));
    return report;
  }
  for (std::size_t i = 0; i < costs.a.size(); ++i) {
    if (costs.a[i].size() != model.M) {
      error(report, "a_cols",
            fmt::format("cost row {} has {} entries, expected M = {}", i, costs.a[i].size(), model.M));
      continue;
    }
    for (std::size_t j = 1; j <= model.M; ++j) {
      const double v = costs.terminal(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        error(report, "a_negative", fmt::format("a_{}{} = {:.12g} must be nonnegative", i, j, v));
      }
      if (i == j && v != 0.0) {
        error(report, "a_diagonal",
              fmt::format("diagonal terminal cost nonzero: a_{}{} = {:.12g}", i, j, v));
      }
    }
  }
  return report;
}

Belief::Belief(std::vector<double> pi) : pi_(std::move(pi)) {
  if (pi_.size() < 2) {
    throw std::invalid_argument("belief needs at least two entries");
  }
  double total = 0.0;
  for (double v : pi_) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument(fmt::format("belief entry {:.17g} is negative or NaN", v));
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kBeliefTolerance) {
    throw std::invalid_argument(fmt::format("belief entries sum to {:.17g}", total));
  }
  if (total != 1.0) {
    for (double& v : pi_) v /= total;
  }
}

Belief Belief::vertex(std::size_t M, std::size_t j) {
  if (j > M) throw std::invalid_argument("vertex index exceeds dimension");
  std::vector<double> pi(M + 1, 0.0);
  pi[j] = 1.0;
  return Belief(std::move(pi));
}

Belief initial_belief(const ModelSpec& model) {
  std::vector<double> pi(model.M + 1);
  pi[0] = 1.0 - model.p0;
  for (std::size_t i = 1; i <= model.M; ++i) pi[i] = model.p0 * model.nu[i - 1];
  return Belief(std::move(pi));
}

double terminal_cost(std::span<const double> pi, const CostSpec& costs, std::size_t j) {
  double h = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) h += pi[i] * costs.a[i][j - 1];
  return h;
}

MinCost min_terminal_cost(std::span<const double> pi, const CostSpec& costs) {
  const std::size_t M = pi.size() - 1;
  MinCost best{terminal_cost(pi, costs, 1), 1};
  for (std::size_t j = 2; j <= M; ++j) {
    const double h = terminal_cost(pi, costs, j);
    if (h < best.value) best = {h, j};
  }
  return best;
}

TerminalCosts terminal_costs(const Belief& belief, const CostSpec& costs) {
  const std::size_t M = belief.dimension();
  if (costs.a.size() != M + 1 || costs.a.front().size() != M) {
    throw std::invalid_argument(fmt::format(
        "belief of dimension {} does not match a {}x{} cost matrix", M, costs.a.size(),
        costs.a.empty() ? 0 : costs.a.front().size()));
  }
  TerminalCosts out;
  out.per_label.resize(M);
  for (std::size_t j = 1; j <= M; ++j) out.per_label[j - 1] = terminal_cost(belief.values(), costs, j);
  const auto it = std::min_element(out.per_label.begin(), out.per_label.end());
  out.minimum = *it;
  out.label = static_cast<std::size_t>(it - out.per_label.begin()) + 1;
  return out;
}

double h_sup_bound(const CostSpec& costs) {
  if (costs.a.empty()) return 0.0;
  const std::size_t M = costs.a.front().size();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= M; ++j) {
    double column_max = 0.0;
    for (const auto& row : costs.a) column_max = std::max(column_max, row[j - 1]);
    bound = std::min(bound, column_max);
  }
  return bound;
}

}  // namespace qcd
