#include <cmath>
#include <sstream>

#include "cimtune/tuner.hpp"

namespace cimtune::tuner {
namespace {

[[noreturn]] void bad_context(const std::string& what) { throw ArgumentError("malformed policy context: " + what); }

double weight(const PolicyContext& ctx, const std::string& name) {
  auto it = ctx.current_weights.find(name);
  if (it == ctx.current_weights.end()) bad_context("current_weights lacks '" + name + "'");
  if (!std::isfinite(it->second) || it->second <= 0.0) bad_context("weight '" + name + "' must be positive");
  return it->second;
}

int count(const Json& diagnostics, const char* key) {
  if (!diagnostics.contains(key) || !diagnostics[key].is_number_integer() || diagnostics[key].get<int>() < 0) {
    bad_context(std::string("diagnostics.") + key + " must be a non-negative integer");
  }
  return diagnostics[key].get<int>();
}

double grow(double v, const FjspRuleConfig& cfg, std::optional<double> ceiling) {
  double next = std::round(std::min(v * cfg.growth, v + cfg.max_step));
  if (next <= v) next = v * cfg.growth;
  if (ceiling && v < *ceiling) next = std::min(next, *ceiling);
  return next;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

PolicyDecision rule_policy_fjsp(const PolicyContext& ctx, const FjspRuleConfig& cfg) {
  if (ctx.kind != ProblemKind::Fjsp) bad_context("rule_policy_fjsp needs an fjsp context");
  const double alpha = weight(ctx, "alpha"), beta = weight(ctx, "beta"), gamma = weight(ctx, "gamma");
  weight(ctx, "delta");
  const int conflicts = count(ctx.diagnostics, "machine_conflicts");
  const int sequence = count(ctx.diagnostics, "sequence_violations");
  const int assignment = count(ctx.diagnostics, "assignment_violations");

  std::ostringstream why;
  why << conflicts << " machine conflicts, " << sequence << " sequence violations, " << assignment
      << " assignment violations";

  PolicyDecision d;
  if (conflicts == 0 && sequence == 0 && assignment == 0) {
    d.action = Action::Stop;
    d.confidence = Confidence::High;
    why << "; schedule is clean";
    if (ctx.diagnostics.contains("makespan") && ctx.diagnostics["makespan"].is_number()) {
      why << " with makespan " << ctx.diagnostics["makespan"].get<int>();
    }
    d.rationale = why.str();
    return d;
  }

  d.action = Action::Adjust;
  d.confidence = Confidence::Medium;
  d.new_weights = ctx.current_weights;
  if (conflicts > 0) {
    d.new_weights["gamma"] = grow(gamma, cfg, cfg.gamma_ceiling);
    why << "; gamma " << fmt(gamma) << " -> " << fmt(d.new_weights["gamma"]);
  } else {
    if (sequence > 0) {
      d.new_weights["beta"] = grow(beta, cfg, std::nullopt);
      why << "; beta " << fmt(beta) << " -> " << fmt(d.new_weights["beta"]);
    }
    if (assignment > 0) {
      d.new_weights["alpha"] = grow(alpha, cfg, std::nullopt);
      why << "; alpha " << fmt(alpha) << " -> " << fmt(d.new_weights["alpha"]);
    }
  }
  why << "; delta held";
  d.rationale = why.str();
  return d;
}

PolicyDecision rule_policy_peptide(const PolicyContext& ctx, const PeptideRuleConfig& cfg) {
  if (ctx.kind != ProblemKind::Peptide) bad_context("rule_policy_peptide needs a peptide context");
  const double pos = weight(ctx, "pos"), mass = weight(ctx, "mass");
  const Json& diag = ctx.diagnostics;
  if (!diag.contains("violation_rate") || !diag["violation_rate"].is_number()) {
    bad_context("diagnostics.violation_rate must be a number");
  }
  const double rate = diag["violation_rate"].get<double>();
  if (rate < 0.0 || rate > 1.0) bad_context("diagnostics.violation_rate must be in [0, 1]");

  std::vector<double> devs;  // trailing run of recorded deviations, oldest first
  for (const auto& h : ctx.history) {
    if (h.metric) {
      devs.push_back(*h.metric);
    } else {
      devs.clear();
    }
  }

  const double ratio = pos / mass;
  PolicyDecision d;
  std::ostringstream why;
  why << "violation rate " << rate << " at pos:mass " << fmt(ratio);

  auto step = [&](double factor, const char* reason) {
    const double next = std::clamp(ratio * factor, cfg.min_ratio, cfg.max_ratio);
    if (next == ratio) {
      d.action = Action::Stop;
      d.confidence = Confidence::Low;
      why << "; " << reason << " but the ratio is already at its bound";
    } else {
      d.action = Action::Adjust;
      d.confidence = Confidence::Medium;
      d.new_weights = ctx.current_weights;
      d.new_weights["pos"] = next * mass;
      why << "; " << reason << ", ratio -> " << fmt(next);
    }
  };

  const std::size_t k = devs.size();
  if (rate > cfg.violation_threshold) {
    step(10.0, "one-hot violations above threshold");
  } else if (k == 0) {
    step(10.0, "no clean solution to measure");
  } else if (k >= 3 && devs[k - 3] < devs[k - 2] && devs[k - 2] < devs[k - 1]) {
    step(1.0 / std::sqrt(10.0), "mass deviation rising for two rounds");
  } else if (k >= 3 && std::min(devs[k - 2], devs[k - 1]) >= *std::min_element(devs.begin(), devs.end() - 2)) {
    d.action = Action::Stop;
    d.confidence = Confidence::High;
    why << "; deviation has not improved for two rounds";
  } else {
    step(1.0 / std::sqrt(10.0), "constraints hold, shifting weight to mass");
  }
  d.rationale = why.str();
  return d;
}

Policy rule_policy(ProblemKind kind) {
  if (kind == ProblemKind::Fjsp) return [](const PolicyContext& c) { return rule_policy_fjsp(c); };
  return [](const PolicyContext& c) { return rule_policy_peptide(c); };
}

}  // namespace cimtune::tuner
