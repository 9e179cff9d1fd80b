#include "mlqst/serialization.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace mlqst {

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, what);
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) parse_fail(std::string("field '") + key + "' must be a number");
  return v.get<T>();
}

void put_optional(std::ostream& os, const std::optional<double>& v) {
  if (v) os << *v;
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) parse_fail("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) parse_fail("matrix rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      parse_fail("matrix rows must all have the same length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& e = row[static_cast<size_t>(k)];
      if (e.is_number()) {
        m(i, k) = Complex(e.get<double>(), 0.0);
        continue;
      }
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        parse_fail("matrix entries must be numbers or [re, im] pairs");
      }
      m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json dataset_to_json(const Dataset& data) {
  Json elements = Json::array();
  for (const auto& e : data.elements()) {
    elements.push_back({{"op", matrix_to_json(e.op.matrix())}, {"weight", e.weight}});
  }
  return {{"dim", data.dim()}, {"elements", std::move(elements)}};
}

Json homodyne_to_json(const HomodyneData& data) {
  Json records = Json::array();
  for (const auto& r : data.records) records.push_back({r.theta, r.x});
  return {{"kind", "homodyne"},
          {"dim", data.dim},
          {"efficiency", data.efficiency},
          {"records", std::move(records)}};
}

HomodyneData homodyne_from_json(const Json& j) {
  HomodyneData data{number<int>(j, "dim"), number<double>(j, "efficiency"), {}};
  const Json& records = require(j, "records");
  if (!records.is_array()) parse_fail("'records' must be an array");
  data.records.reserve(records.size());
  for (const auto& r : records) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      parse_fail("homodyne records must be [theta, x] pairs");
    }
    data.records.push_back({r[0].get<double>(), r[1].get<double>()});
  }
  return data;
}

Dataset dataset_from_json(const Json& j) {
  if (j.is_object() && j.contains("kind")) {
    if (j.at("kind") != "homodyne") parse_fail("unknown dataset kind");
    return homodyne_from_json(j).materialize();
  }
  const int dim = number<int>(j, "dim");
  const Json& elements = require(j, "elements");
  if (!elements.is_array()) parse_fail("'elements' must be an array");
  std::vector<PovmElement> out;
  out.reserve(elements.size());
  for (const auto& e : elements) {
    const auto weight = number<std::int64_t>(e, "weight");
    out.push_back(make_povm_element(HermitianOperator::from_matrix(matrix_from_json(require(e, "op"))), weight));
  }
  return Dataset(dim, std::move(out));
}

Scenario scenario_from_json(const Json& j) {
  Scenario s = lossy_cat_scenario();
  const Json& alpha = require(j, "alpha");
  if (alpha.is_number()) {
    s.alpha = Complex(alpha.get<double>(), 0.0);
  } else if (alpha.is_array() && alpha.size() == 2 && alpha[0].is_number() && alpha[1].is_number()) {
    s.alpha = Complex(alpha[0].get<double>(), alpha[1].get<double>());
  } else {
    parse_fail("'alpha' must be [re, im]");
  }
  s.transmissivity = number<double>(j, "transmissivity");
  s.efficiency = number<double>(j, "efficiency");
  s.dim = number<int>(j, "dim");
  s.n_samples = number<std::int64_t>(j, "n_samples");
  if (j.contains("phases")) {
    if (!j.at("phases").is_array()) parse_fail("'phases' must be an array");
    s.phases = j.at("phases").get<std::vector<double>>();
  }
  s.seed = number<std::uint64_t>(j, "seed");
  s.validate();
  return s;
}

Json scenario_to_json(const Scenario& s) {
  return {{"alpha", {s.alpha.real(), s.alpha.imag()}},
          {"transmissivity", s.transmissivity},
          {"efficiency", s.efficiency},
          {"dim", s.dim},
          {"n_samples", s.n_samples},
          {"phases", s.phases},
          {"seed", s.seed}};
}

Json fit_to_json(const FitResult& fit, Algorithm algo) {
  return {{"algo", to_string(algo)},
          {"dim", fit.state.dim()},
          {"iterations", fit.trace.size()},
          {"stop_reason", to_string(fit.stop_reason)},
          {"final_r", fit.final_r},
          {"final_loglik", fit.final_loglik},
          {"final_trace_dist", fit.trace.empty() || !fit.trace.back().trace_dist_prev
                                   ? Json(nullptr)
                                   : Json(*fit.trace.back().trace_dist_prev)},
          {"state", matrix_to_json(fit.state.matrix())}};
}

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace) {
  const auto old_precision = os.precision(17);
  os << "k,loglik,r_k,trace_dist,step,epsilon\n";
  for (const auto& rec : trace) {
    os << rec.k << ',' << rec.loglik << ',' << rec.r_k << ',';
    put_optional(os, rec.trace_dist_prev);
    os << ',' << to_string(rec.step_kind) << ',';
    put_optional(os, rec.epsilon);
    os << '\n';
  }
  os.precision(old_precision);
}

Json interval_to_json(const ConfidenceInterval& ci) {
  auto endpoint = [](const EndpointReport& e) {
    return Json{{"lambda", e.lambda}, {"f", e.f},           {"D_lb", e.d_lb},
                {"D_ub", e.d_ub},     {"pvalue_lb", e.pvalue_lb}, {"pvalue_ub", e.pvalue_ub}};
  };
  return {{"f_lo", ci.f_lo},
          {"f_hi", ci.f_hi},
          {"s", ci.s},
          {"t", ci.t},
          {"endpoints", {endpoint(ci.lower), endpoint(ci.upper)}}};
}

Json region_report_to_json(const RegionReport& report) {
  return {{"threshold_t", report.threshold_t},
          {"nominal_pvalue", report.nominal_pvalue},
          {"worst_case_pvalue", report.worst_case_pvalue}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace mlqst
