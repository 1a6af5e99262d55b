#include "qcd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qcd/parallel.hpp"
#include "qcd/posterior.hpp"

namespace qcd {

namespace {

class GuardedSource : public SymbolSource {
 public:
  GuardedSource(SymbolSource& inner, std::size_t limit) : inner_(&inner), limit_(limit) {}
  std::optional<std::size_t> next() override {
    if (used_ >= limit_) return std::nullopt;
    ++used_;
    return inner_->next();
  }

 private:
  SymbolSource* inner_;
  std::size_t limit_;
  std::size_t used_ = 0;
};

std::string join_ids(const std::vector<std::size_t>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 20; ++i) {
    if (i) out += ",";
    out += std::to_string(ids[i]);
  }
  if (ids.size() > 20) out += ",...";
  return out;
}

}  // namespace

HorizonGuardTripped::HorizonGuardTripped(std::string strategy, std::vector<std::size_t> episodes)
    : std::runtime_error(fmt::format("strategy {} did not stop within the horizon guard in {} "
                                     "episode(s): {}",
                                     strategy, episodes.size(), join_ids(episodes))),
      episodes_(std::move(episodes)) {}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleMoments sample_moments(std::span<const double> values) {
  SampleMoments m;
  if (values.empty()) return m;
  const double n = static_cast<double>(values.size());
  m.mean = pairwise_sum(values) / n;
  if (values.size() < 2) return m;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - m.mean;
    sq[i] = d * d;
  }
  const double variance = pairwise_sum(sq) / (n - 1.0);
  m.standard_error = std::sqrt(variance / n);
  return m;
}

std::vector<EpisodeOutcome> simulate_outcomes(const ModelSpec& model, const CostSpec& costs,
                                              const Strategy& strategy,
                                              const EvaluationOptions& options) {
  if (options.episodes < 1) throw std::invalid_argument("need at least one episode");
  std::vector<EpisodeOutcome> outcomes(options.episodes);
  std::vector<char> tripped(options.episodes, 0);
  parallel_for(options.episodes, options.threads, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      ObservationStream stream(model, episode_seed(options.seed, e));
      GuardedSource guarded(stream, options.horizon_guard);
      try {
        RunResult run = strategy.run(guarded);
        score(run, stream.theta(), stream.mu(), costs);
        outcomes[e] = {stream.theta(), stream.mu(), run.tau, run.decision, *run.loss};
      } catch (const StreamExhausted&) {
        tripped[e] = 1;
      }
    }
  });
  std::vector<std::size_t> ids;
  for (std::size_t e = 0; e < tripped.size(); ++e) {
    if (tripped[e]) ids.push_back(e);
  }
  if (!ids.empty()) throw HorizonGuardTripped(strategy.name(), std::move(ids));
  return outcomes;
}

RiskEstimate summarize(const std::string& strategy, std::span<const EpisodeOutcome> outcomes,
                       std::uint64_t seed) {
  const std::size_t n = outcomes.size();
  std::vector<double> total(n), delay(n), false_alarm(n), misid(n), fa_flag(n), misid_flag(n), tau(n);
  for (std::size_t e = 0; e < n; ++e) {
    const auto& o = outcomes[e];
    total[e] = o.loss.total;
    delay[e] = o.loss.delay_cost;
    false_alarm[e] = o.loss.false_alarm_cost;
    misid[e] = o.loss.misidentification_cost;
    fa_flag[e] = o.loss.false_alarm ? 1.0 : 0.0;
    misid_flag[e] = o.loss.misidentified ? 1.0 : 0.0;
    tau[e] = static_cast<double>(o.tau);
  }
  RiskEstimate r;
  r.strategy = strategy;
  const auto moments = sample_moments(total);
  r.mean = moments.mean;
  r.standard_error = moments.standard_error;
  const double dn = static_cast<double>(n);
  r.delay_cost_mean = pairwise_sum(delay) / dn;
  r.false_alarm_cost_mean = pairwise_sum(false_alarm) / dn;
  r.misidentification_cost_mean = pairwise_sum(misid) / dn;
  r.false_alarm_rate = pairwise_sum(fa_flag) / dn;
  r.misidentification_rate = pairwise_sum(misid_flag) / dn;
  r.mean_tau = pairwise_sum(tau) / dn;
  r.episodes = n;
  r.seed = seed;
  return r;
}

RiskEstimate estimate_risk(const ModelSpec& model, const CostSpec& costs, const Strategy& strategy,
                           const EvaluationOptions& options) {
  const auto outcomes = simulate_outcomes(model, costs, strategy, options);
  return summarize(strategy.name(), outcomes, options.seed);
}

bool DominanceReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const DominanceEntry& e) { return e.pass; });
}

DominanceReport dominance_check(const ModelSpec& model, const CostSpec& costs,
                                const Strategy& optimal,
                                std::span<const Strategy* const> alternatives,
                                const EvaluationOptions& options, double certified_gap,
                                double grid_delta) {
  DominanceReport report;
  report.certified_gap = certified_gap;
  report.grid_delta = grid_delta;
  const auto base = simulate_outcomes(model, costs, optimal, options);
  report.optimal = summarize(optimal.name(), base, options.seed);
  for (const Strategy* alt : alternatives) {
    const auto outcomes = simulate_outcomes(model, costs, *alt, options);
    std::vector<double> diff(outcomes.size());
    for (std::size_t e = 0; e < outcomes.size(); ++e) {
      diff[e] = outcomes[e].loss.total - base[e].loss.total;
    }
    const auto moments = sample_moments(diff);
    DominanceEntry entry;
    entry.risk = summarize(alt->name(), outcomes, options.seed);
    entry.difference = moments.mean;
    entry.difference_se = moments.standard_error;
    entry.slack = 3.0 * moments.standard_error + certified_gap + grid_delta;
    entry.pass = entry.difference >= -entry.slack;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

bool PosteriorDiagnostics::all_pass() const {
  for (const auto& s : stages) {
    if (!s.pi0_pass) return false;
    for (bool b : s.increment_pass) {
      if (!b) return false;
    }
  }
  return true;
}

PosteriorDiagnostics posterior_diagnostics(const ModelSpec& model, std::size_t episodes,
                                           std::uint64_t seed, std::span<const std::size_t> stages,
                                           std::size_t threads) {
  if (episodes < 1) throw std::invalid_argument("need at least one episode");
  const std::size_t M = model.M;
  const std::size_t last = stages.empty() ? 0 : *std::max_element(stages.begin(), stages.end()) + 1;
  // paths[e][n * (M+1) + i] = Pi_n^(i), n = 0..last.
  std::vector<std::vector<double>> paths(episodes);
  parallel_for(episodes, threads, 1, [&](std::size_t begin, std::size_t end) {
    std::vector<double> d(M + 1);
    for (std::size_t e = begin; e < end; ++e) {
      ObservationStream stream(model, episode_seed(seed, e));
      const Belief start = initial_belief(model);
      std::vector<double> pi(start.values().begin(), start.values().end());
      auto& path = paths[e];
      path.reserve((last + 1) * (M + 1));
      path.insert(path.end(), pi.begin(), pi.end());
      for (std::size_t n = 1; n <= last; ++n) {
        const std::size_t x = *stream.next();
        const double total = weights_into(pi, x, model, d);
        if (!(total > 0.0)) throw ImpossibleObservation(x);
        for (std::size_t i = 0; i <= M; ++i) pi[i] = d[i] / total;
        path.insert(path.end(), pi.begin(), pi.end());
      }
    }
  });

  PosteriorDiagnostics report;
  report.episodes = episodes;
  report.seed = seed;
  std::vector<double> column(episodes);
  for (std::size_t n : stages) {
    StageDiagnostics stage;
    stage.n = n;
    for (std::size_t e = 0; e < episodes; ++e) column[e] = paths[e][n * (M + 1)];
    stage.pi0 = sample_moments(column);
    stage.pi0_bound = std::pow(1.0 - model.p, static_cast<double>(n));
    stage.pi0_pass = stage.pi0.mean <= stage.pi0_bound + 3.0 * stage.pi0.standard_error;
    for (std::size_t i = 1; i <= M; ++i) {
      for (std::size_t e = 0; e < episodes; ++e) {
        column[e] = paths[e][(n + 1) * (M + 1) + i] - paths[e][n * (M + 1) + i];
      }
      const auto inc = sample_moments(column);
      stage.increments.push_back(inc);
      stage.increment_pass.push_back(inc.mean >= -3.0 * inc.standard_error);
    }
    report.stages.push_back(std::move(stage));
  }
  return report;
}

ExpectationCheck expectation_identity(const ModelSpec& model, const Belief& belief,
                                      std::span<const double> coefficients, std::size_t samples,
                                      std::uint64_t seed) {
  auto linear = [&](std::span<const double> pi) {
    double v = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) v += coefficients[i] * pi[i];
    return v;
  };
  ExpectationCheck check;
  check.exact = apply_T(linear, belief, model);

  const auto pred = predictive(belief.values(), model);
  std::mt19937_64 rng(seed);
  std::vector<double> values(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t x = categorical_quantile(uniform01(rng), pred);
    values[s] = linear(update(belief, x, model).values());
  }
  check.monte_carlo = sample_moments(values);
  check.pass = std::abs(check.monte_carlo.mean - check.exact) <= 4.0 * check.monte_carlo.standard_error +
                                                                    1e-12;
  return check;
}

double dissipation_fraction(const ModelSpec& model, std::size_t episodes, std::uint64_t seed,
                            std::size_t n, double level, std::size_t threads) {
  std::vector<char> below(episodes, 0);
  parallel_for(episodes, threads, 1, [&](std::size_t begin, std::size_t end) {
    std::vector<double> d(model.M + 1);
    for (std::size_t e = begin; e < end; ++e) {
      ObservationStream stream(model, episode_seed(seed, e));
      const Belief start = initial_belief(model);
      std::vector<double> pi(start.values().begin(), start.values().end());
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t x = *stream.next();
        const double total = weights_into(pi, x, model, d);
        if (!(total > 0.0)) throw ImpossibleObservation(x);
        for (std::size_t i = 0; i <= model.M; ++i) pi[i] = d[i] / total;
      }
      below[e] = pi[0] < level ? 1 : 0;
    }
  });
  const auto count = std::count(below.begin(), below.end(), 1);
  return static_cast<double>(count) / static_cast<double>(episodes);
}

std::string risk_csv(std::span<const RiskEstimate> estimates) {
  std::string out =
      "strategy,mean,standard_error,delay_cost_mean,false_alarm_cost_mean,"
      "misidentification_cost_mean,false_alarm_rate,misidentification_rate,mean_tau,episodes,seed\n";
  for (const auto& r : estimates) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.strategy, r.mean, r.standard_error,
                       r.delay_cost_mean, r.false_alarm_cost_mean, r.misidentification_cost_mean,
                       r.false_alarm_rate, r.misidentification_rate, r.mean_tau, r.episodes, r.seed);
  }
  return out;
}

std::string dominance_csv(const DominanceReport& report) {
  std::string out = "strategy,risk,risk_se,difference,difference_se,slack,pass\n";
  out += fmt::format("{},{},{},0,0,0,1\n", report.optimal.strategy, report.optimal.mean,
                     report.optimal.standard_error);
  for (const auto& e : report.entries) {
    out += fmt::format("{},{},{},{},{},{},{}\n", e.risk.strategy, e.risk.mean,
                       e.risk.standard_error, e.difference, e.difference_se, e.slack,
                       e.pass ? 1 : 0);
  }
  return out;
}

std::string dominance_text(const DominanceReport& report) {
  std::string out = fmt::format(
      "optimal risk {:.6f} +- {:.6f} (SE) over {} episodes, seed {}\n"
      "certified gap {:.6g}, grid delta {:.6g}\n",
      report.optimal.mean, report.optimal.standard_error, report.optimal.episodes,
      report.optimal.seed, report.certified_gap, report.grid_delta);
  for (const auto& e : report.entries) {
    out += fmt::format("  {:<24} risk {:.6f}  diff {:+.6f} +- {:.6f}  slack {:.6f}  {}\n",
                       e.risk.strategy, e.risk.mean, e.difference, e.difference_se, e.slack,
                       e.pass ? "PASS" : "FAIL");
  }
  return out;
}

std::string diagnostics_csv(const PosteriorDiagnostics& report) {
  std::string out = "n,quantity,i,mean,standard_error,bound,pass\n";
  for (const auto& s : report.stages) {
    out += fmt::format("{},pi0,0,{},{},{},{}\n", s.n, s.pi0.mean, s.pi0.standard_error, s.pi0_bound,
                       s.pi0_pass ? 1 : 0);
    for (std::size_t i = 0; i < s.increments.size(); ++i) {
      out += fmt::format("{},increment,{},{},{},0,{}\n", s.n, i + 1, s.increments[i].mean,
                         s.increments[i].standard_error, s.increment_pass[i] ? 1 : 0);
    }
  }
  return out;
}

std::string diagnostics_text(const PosteriorDiagnostics& report) {
  std::string out = fmt::format("posterior diagnostics over {} episodes, seed {}\n", report.episodes,
                                report.seed);
  for (const auto& s : report.stages) {
    out += fmt::format("  n={:<4} E[pi0]={:.6f} +- {:.6f}  bound (1-p)^n={:.6f}  {}\n", s.n,
                       s.pi0.mean, s.pi0.standard_error, s.pi0_bound, s.pi0_pass ? "PASS" : "FAIL");
    for (std::size_t i = 0; i < s.increments.size(); ++i) {
      out += fmt::format("         E[dpi{}]={:+.3e} +- {:.3e}  {}\n", i + 1, s.increments[i].mean,
                         s.increments[i].standard_error, s.increment_pass[i] ? "PASS" : "FAIL");
    }
  }
  return out;
}

}  // namespace qcd
