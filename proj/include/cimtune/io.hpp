#pragma once

// JSON documents for every value type that crosses a process boundary.
// Readers throw InputError naming the offending field.

#include <string>

#include "cimtune/fjsp.hpp"
#include "cimtune/peptide.hpp"
#include "cimtune/quantize.hpp"
#include "cimtune/qubo.hpp"
#include "cimtune/solver.hpp"
#include "json.hpp"

namespace cimtune::io {

using Json = nlohmann::ordered_json;

/// Throws InputError("path", ...) when the file is missing or not valid JSON.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
/// Two-space indented dump with a trailing newline.
std::string pretty(const Json& j);

Json to_json(const QuboMatrix<double>& q);
QuboMatrix<double> qubo_from_json(const Json& j);
Json to_json(const IsingModel<double>& m);
IsingModel<double> ising_from_json(const Json& j);
Json to_json(const QuantizationReport& r);
Json to_json(const QuantizedQubo& q);
Json to_json(const CoefficientStats& s);
/// wall_time_ms is the one nondeterministic field; leave it out for byte-stable output.
Json to_json(const SolveMeta& m, bool include_timing = true);
Json to_json(const SolveResult& r, bool include_timing = true);

Json to_json(const fjsp::Instance& inst);
fjsp::Instance instance_from_json(const Json& j);
Json to_json(const fjsp::Weights& w);
/// Accepts {"alpha":..,"beta":..,"gamma":..,"delta":..}; missing names keep `base`.
fjsp::Weights fjsp_weights_from_json(const Json& j, const fjsp::Weights& base = {});
/// Operations are listed job-major; job, op and machine are one-based.
Json to_json(const fjsp::Schedule& s);
fjsp::Schedule schedule_from_json(const Json& j, const fjsp::Instance& inst);
Json to_json(const fjsp::Diagnostics& d);

Json to_json(const peptide::Problem& p);
/// Reads {"target_mass", "positions", "mass_table", "calibration"} plus the
/// optional "half_water" flag and "sequence" (kept for reference only).
peptide::Problem problem_from_json(const Json& j);
Json to_json(const peptide::Weights& w);
Json to_json(const peptide::CompositionSolution& s, const peptide::Problem& p);
Json to_json(const peptide::PopulationMetrics& m);

}  // namespace cimtune::io
