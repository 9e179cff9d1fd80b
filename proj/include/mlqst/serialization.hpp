#pragma once

// JSON and CSV encodings shared by the library and the command-line tool.
// Complex matrices are nested row-major arrays of [re, im] pairs; plain
// numbers are read as real entries.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mlqst/confidence.hpp"
#include "mlqst/constrained.hpp"
#include "mlqst/homodyne.hpp"
#include "mlqst/optimizer.hpp"

namespace mlqst {

using Json = nlohmann::json;

Json matrix_to_json(const ComplexMatrix& m);
/// ParseError on ragged rows or malformed entries.
ComplexMatrix matrix_from_json(const Json& j);

/// { "dim": d, "elements": [ { "op": <matrix>, "weight": w }, ... ] }
Json dataset_to_json(const Dataset& data);
/// { "kind": "homodyne", "dim", "efficiency", "records": [[theta, x], ...] }
Json homodyne_to_json(const HomodyneData& data);
HomodyneData homodyne_from_json(const Json& j);
/// Accepts either dataset form; homodyne records are materialized here.
Dataset dataset_from_json(const Json& j);

/// { "alpha": [re, im], "transmissivity", "efficiency", "dim", "n_samples",
///   "phases": [...], "seed" }. Missing phases default to 8 uniform phases.
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);

Json fit_to_json(const FitResult& fit, Algorithm algo);
/// Header k,loglik,r_k,trace_dist,step,epsilon; absent values are empty cells.
void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace);

Json interval_to_json(const ConfidenceInterval& ci);
Json region_report_to_json(const RegionReport& report);

/// IoError / ParseError on failure.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mlqst
