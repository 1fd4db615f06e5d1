#include <algorithm>
#include <cmath>

#include "cimtune/tuner.hpp"

namespace cimtune::tuner {
namespace {

template <typename E>
E parse_enum(const Json& j, const char* field, std::initializer_list<std::pair<const char*, E>> options,
             auto&& fail) {
  if (!j.is_string()) fail(std::string(field) + " must be a string");
  const std::string s = j.get<std::string>();
  for (const auto& [name, value] : options) {
    if (s == name) return value;
  }
  fail("unknown " + std::string(field) + " '" + s + "'");
  return options.begin()->second;
}

[[noreturn]] void bad_context(const std::string& what) { throw ArgumentError("malformed policy context: " + what); }

Json weights_json(const WeightMap& w) {
  Json j = Json::object();
  for (const auto& [k, v] : w) j[k] = v;
  return j;
}

WeightMap weights_from(const Json& j, auto&& fail) {
  if (!j.is_object()) fail("weights must be an object");
  WeightMap w;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) fail("weight '" + k + "' must be a number");
    w[k] = v.template get<double>();
  }
  return w;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional_number(const Json& j, auto&& fail) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number()) fail("expected a number or null");
  return j.get<double>();
}

void check_version(const Json& j, auto&& fail) {
  if (!j.is_object()) fail("document must be a JSON object");
  if (j.contains("v") && j["v"] != kSchemaVersion) fail("unsupported schema version " + j["v"].dump());
}

}  // namespace

std::string_view to_string(ProblemKind k) { return k == ProblemKind::Fjsp ? "fjsp" : "peptide"; }
std::string_view to_string(Action a) { return a == Action::Adjust ? "adjust" : "stop"; }
std::string_view to_string(Confidence c) {
  switch (c) {
    case Confidence::High:
      return "high";
    case Confidence::Medium:
      return "medium";
    case Confidence::Low:
      return "low";
  }
  return "low";
}

Json to_json(const PolicyContext& ctx) {
  Json history = Json::array();
  for (const auto& h : ctx.history) {
    history.push_back(Json{{"weights", weights_json(h.weights)}, {"metric", optional_number(h.metric)},
                           {"feasible", h.feasible}});
  }
  Json incumbent = nullptr;
  if (ctx.incumbent) {
    incumbent = Json{{"metric", ctx.incumbent->metric},
                     {"weights", weights_json(ctx.incumbent->weights)},
                     {"iteration", ctx.incumbent->iteration}};
  }
  return Json{{"v", kSchemaVersion},
              {"iteration", ctx.iteration},
              {"problem_kind", std::string(to_string(ctx.kind))},
              {"current_weights", weights_json(ctx.current_weights)},
              {"solve_summary", ctx.solve_summary},
              {"diagnostics", ctx.diagnostics},
              {"history", std::move(history)},
              {"incumbent", std::move(incumbent)}};
}

PolicyContext context_from_json(const Json& j) {
  check_version(j, bad_context);
  for (const char* key : {"iteration", "problem_kind", "current_weights", "diagnostics"}) {
    if (!j.contains(key)) bad_context(std::string("missing ") + key);
  }
  PolicyContext ctx;
  if (!j["iteration"].is_number_integer()) bad_context("iteration must be an integer");
  ctx.iteration = j["iteration"].get<int>();
  ctx.kind = parse_enum<ProblemKind>(j["problem_kind"], "problem_kind",
                                     {{"fjsp", ProblemKind::Fjsp}, {"peptide", ProblemKind::Peptide}}, bad_context);
  ctx.current_weights = weights_from(j["current_weights"], bad_context);
  ctx.solve_summary = j.value("solve_summary", Json::object());
  ctx.diagnostics = j["diagnostics"];
  if (!ctx.diagnostics.is_object()) bad_context("diagnostics must be an object");
  if (j.contains("history")) {
    if (!j["history"].is_array()) bad_context("history must be an array");
    for (const auto& h : j["history"]) {
      if (!h.is_object() || !h.contains("weights")) bad_context("history entries need weights");
      ctx.history.push_back(HistoryEntry{weights_from(h["weights"], bad_context),
                                         read_optional_number(h.value("metric", Json(nullptr)), bad_context),
                                         h.value("feasible", false)});
    }
  }
  if (j.contains("incumbent") && !j["incumbent"].is_null()) {
    const Json& inc = j["incumbent"];
    if (!inc.is_object() || !inc.contains("metric") || !inc["metric"].is_number()) {
      bad_context("incumbent needs a numeric metric");
    }
    ctx.incumbent = Incumbent{inc["metric"].get<double>(), weights_from(inc.value("weights", Json::object()), bad_context),
                              inc.value("iteration", 0)};
  }
  return ctx;
}

Json to_json(const PolicyDecision& d) {
  Json j{{"v", kSchemaVersion}, {"action", std::string(to_string(d.action))}};
  if (d.action == Action::Adjust) j["weights"] = weights_json(d.new_weights);
  j["rationale"] = d.rationale;
  j["confidence"] = std::string(to_string(d.confidence));
  return j;
}

PolicyDecision decision_from_json(const Json& j, const std::vector<std::string>& required) {
  auto fail = [](const std::string& what) -> void { throw PolicyError("invalid policy decision: " + what); };
  check_version(j, fail);
  if (!j.contains("action")) fail("missing action");
  PolicyDecision d;
  d.action = parse_enum<Action>(j["action"], "action", {{"adjust", Action::Adjust}, {"stop", Action::Stop}}, fail);
  if (j.contains("confidence")) {
    d.confidence = parse_enum<Confidence>(
        j["confidence"], "confidence",
        {{"high", Confidence::High}, {"medium", Confidence::Medium}, {"low", Confidence::Low}}, fail);
  }
  if (j.contains("rationale")) {
    if (!j["rationale"].is_string()) fail("rationale must be a string");
    d.rationale = j["rationale"].get<std::string>();
  }
  if (d.action == Action::Adjust) {
    if (!j.contains("weights")) fail("adjust requires weights");
    d.new_weights = weights_from(j["weights"], fail);
    for (const auto& [name, value] : d.new_weights) {
      if (std::find(required.begin(), required.end(), name) == required.end()) fail("unknown weight '" + name + "'");
      if (!std::isfinite(value) || value <= 0.0) {
        throw PolicyError("non-positive weight '" + name + "' in policy decision");
      }
    }
    for (const auto& name : required) {
      if (!d.new_weights.contains(name)) fail("missing weight '" + name + "'");
    }
  }
  return d;
}

Json to_json(const IterationRecord& r) {
  return Json{{"v", kSchemaVersion},
              {"iteration", r.iteration},
              {"weights", weights_json(r.weights)},
              {"solve_meta", r.solve_meta},
              {"solve_summary", r.solve_summary},
              {"diagnostics", r.diagnostics},
              {"metric", optional_number(r.metric)},
              {"decision", to_json(r.decision)},
              {"meta", r.meta}};
}

IterationRecord record_from_json(const Json& j) {
  auto fail = [](const std::string& what) -> void { throw ArgumentError("malformed iteration record: " + what); };
  check_version(j, fail);
  for (const char* key : {"iteration", "weights", "decision"}) {
    if (!j.contains(key)) fail(std::string("missing ") + key);
  }
  IterationRecord r;
  r.iteration = j["iteration"].get<int>();
  r.weights = weights_from(j["weights"], fail);
  r.solve_meta = j.value("solve_meta", Json::object());
  r.solve_summary = j.value("solve_summary", Json::object());
  r.diagnostics = j.value("diagnostics", Json::object());
  r.metric = read_optional_number(j.value("metric", Json(nullptr)), fail);
  std::vector<std::string> names;
  const Json proposed = j["decision"].value("weights", Json::object());
  for (const auto& [k, v] : proposed.items()) names.push_back(k);
  r.decision = decision_from_json(j["decision"], names);
  r.meta = j.value("meta", Json::object());
  return r;
}

std::string to_jsonl(const std::vector<IterationRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

}  // namespace cimtune::tuner
