#include "commands.hpp"

#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mlqst/serialization.hpp"

namespace mlqst::cli {

namespace fs = std::filesystem;

namespace {

struct Settings {
  std::string config;
  std::string out = ".";
  std::string algo = "rhor";
  std::optional<double> r_threshold;
  std::optional<double> r_threshold_constrained;
  std::string context;
  std::optional<double> s;
  double fraction = 0.1;
  std::int64_t max_iters = StopSpec{}.max_iters;
  std::optional<std::uint64_t> seed;
  std::string observable;
  std::string reference_loglik;
  std::optional<double> r_k;
  std::optional<int> dim;
};

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, what);
}

// A --config file is either the command's primary input or a run config
// that names the input under `primary_key` and supplies defaults for flags.
struct Loaded {
  Json primary;
  Json run = Json::object();
  fs::path base;
};

Loaded load_config(const std::string& path, const char* primary_key) {
  Loaded loaded{read_json_file(path), Json::object(), fs::path(path).parent_path()};
  if (loaded.primary.is_object() && loaded.primary.contains(primary_key) &&
      loaded.primary.at(primary_key).is_string()) {
    loaded.run = std::move(loaded.primary);
    loaded.primary = read_json_file(loaded.base / loaded.run.at(primary_key).get<std::string>());
  }
  return loaded;
}

template <typename T>
void fallback(const CLI::App& sub, const char* flag, const Json& run, const char* key, T& target) {
  if (sub.count(flag) > 0 || !run.contains(key)) return;
  try {
    target = run.at(key).get<T>();
  } catch (const Json::exception&) {
    config_error(std::string("run config field '") + key + "' has the wrong type");
  }
}

template <typename T>
void fallback(const CLI::App& sub, const char* flag, const Json& run, const char* key,
              std::optional<T>& target) {
  T value{};
  if (sub.count(flag) > 0 || !run.contains(key)) return;
  fallback(sub, flag, run, key, value);
  target = value;
}

// Input paths named in a run config are relative to the config file.
void fallback_path(const CLI::App& sub, const char* flag, const Loaded& cfg, const char* key,
                   std::string& target) {
  if (sub.count(flag) > 0 || !cfg.run.contains(key)) return;
  std::string rel;
  fallback(sub, flag, cfg.run, key, rel);
  target = (cfg.base / rel).string();
}

Algorithm parse_algo(const std::string& name) {
  if (name == "rhor") return Algorithm::rhor;
  if (name == "gradient" || name == "gradient_ascent") return Algorithm::gradient_ascent;
  config_error("unknown algorithm '" + name + "' (expected rhor or gradient)");
}

StoppingKind parse_context(const std::string& name) {
  if (name == "point") return StoppingKind::point_estimate;
  if (name == "region") return StoppingKind::state_region;
  if (name == "ci") return StoppingKind::expectation_ci;
  config_error("unknown stopping context '" + name + "' (expected point, region or ci)");
}

double default_significance(StoppingKind kind) {
  return kind == StoppingKind::point_estimate ? 0.5 : 0.32;
}

StopSpec stop_spec(double r_threshold, std::int64_t max_iters) {
  StopSpec stop;
  stop.r_threshold = r_threshold;
  stop.max_iters = max_iters;
  stop.validate();
  return stop;
}

double read_reference_loglik(const std::string& path) {
  const Json j = read_json_file(path);
  if (j.is_number()) return j.get<double>();
  for (const char* key : {"loglik", "final_loglik"}) {
    if (j.is_object() && j.contains(key) && j.at(key).is_number()) return j.at(key).get<double>();
  }
  throw Error(ErrorCode::ParseError,
              path + ": expected a number or an object with 'loglik' or 'final_loglik'");
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::ostream& row(std::ostream& os, const std::string& label) {
  return os << std::left << std::setw(16) << label << std::right;
}

int cmd_simulate(const CLI::App& sub, Settings st, std::ostream& out) {
  const Loaded cfg = load_config(st.config, "scenario");
  fallback(sub, "--seed", cfg.run, "seed", st.seed);
  fallback(sub, "--out", cfg.run, "out", st.out);

  Scenario scenario = scenario_from_json(cfg.primary);
  if (st.seed) scenario.seed = *st.seed;
  const DensityMatrix truth = scenario_truth(scenario);
  const HomodyneData data = sample_homodyne_records(scenario, truth);

  const fs::path dir = prepare_out(st.out);
  write_text_file(dir / "dataset.json", homodyne_to_json(data).dump() + "\n");
  const Json truth_json{{"scenario", scenario_to_json(scenario)},
                        {"purity", purity(truth)},
                        {"mean_photon_number", mean_photon_number(truth)},
                        {"state", matrix_to_json(truth.matrix())}};
  write_text_file(dir / "truth.json", dump(truth_json));

  out << std::setprecision(6);
  row(out, "records") << data.records.size() << "\n";
  row(out, "phases") << scenario.phases.size() << "\n";
  row(out, "purity") << purity(truth) << "\n";
  row(out, "mean photons") << mean_photon_number(truth) << "\n";
  row(out, "written") << (dir / "dataset.json").string() << ", " << (dir / "truth.json").string() << "\n";
  return 0;
}

int cmd_fit(const CLI::App& sub, Settings st, std::ostream& out) {
  const Loaded cfg = load_config(st.config, "dataset");
  fallback(sub, "--out", cfg.run, "out", st.out);
  fallback(sub, "--algo", cfg.run, "algo", st.algo);
  fallback(sub, "--r-threshold", cfg.run, "r_threshold", st.r_threshold);
  fallback(sub, "--context", cfg.run, "context", st.context);
  fallback(sub, "--s", cfg.run, "s", st.s);
  fallback(sub, "--fraction", cfg.run, "fraction", st.fraction);
  fallback(sub, "--max-iters", cfg.run, "max_iters", st.max_iters);
  fallback_path(sub, "--reference-loglik", cfg, "reference_loglik", st.reference_loglik);

  const Dataset data = dataset_from_json(cfg.primary);
  const Algorithm algo = parse_algo(st.algo);
  double threshold = StopSpec{}.r_threshold;
  if (st.r_threshold) {
    threshold = *st.r_threshold;
  } else if (!st.context.empty()) {
    const StoppingKind kind = parse_context(st.context);
    threshold = r_threshold_for({kind, data.dim(), st.s.value_or(default_significance(kind))},
                                st.fraction);
  }
  const bool has_reference = !st.reference_loglik.empty();
  const double reference = has_reference ? read_reference_loglik(st.reference_loglik) : 0.0;

  const FitResult fit = maximize(data, algo, stop_spec(threshold, st.max_iters));

  const fs::path dir = prepare_out(st.out);
  std::ostringstream csv;
  write_trace_csv(csv, fit.trace);
  write_text_file(dir / "trace.csv", csv.str());
  Json fit_json = fit_to_json(fit, algo);
  fit_json["r_threshold"] = threshold;
  write_text_file(dir / "fit.json", dump(fit_json));
  if (has_reference) {
    std::ostringstream gap;
    gap << std::setprecision(17) << "k,gap,r_k\n";
    for (const auto& rec : fit.trace) gap << rec.k << ',' << reference - rec.loglik << ',' << rec.r_k << '\n';
    write_text_file(dir / "gap.csv", gap.str());
  }

  out << std::setprecision(10);
  row(out, "algo") << to_string(algo) << "\n";
  row(out, "r_threshold") << threshold << "\n";
  row(out, "iterations") << fit.trace.size() << "\n";
  row(out, "stop_reason") << to_string(fit.stop_reason) << "\n";
  row(out, "final r_k") << fit.final_r << "\n";
  row(out, "final loglik") << fit.final_loglik << "\n";
  if (!fit.trace.empty() && fit.trace.back().trace_dist_prev) {
    row(out, "trace dist") << *fit.trace.back().trace_dist_prev << "\n";
  }
  if (has_reference) row(out, "final gap") << reference - fit.final_loglik << "\n";
  return 0;
}

int cmd_ci(const CLI::App& sub, Settings st, std::ostream& out) {
  const Loaded cfg = load_config(st.config, "dataset");
  fallback(sub, "--out", cfg.run, "out", st.out);
  fallback(sub, "--algo", cfg.run, "algo", st.algo);
  fallback(sub, "--r-threshold", cfg.run, "r_threshold", st.r_threshold);
  fallback(sub, "--r-threshold-constrained", cfg.run, "r_threshold_constrained", st.r_threshold_constrained);
  fallback(sub, "--s", cfg.run, "s", st.s);
  fallback(sub, "--fraction", cfg.run, "fraction", st.fraction);
  fallback(sub, "--max-iters", cfg.run, "max_iters", st.max_iters);
  fallback_path(sub, "--observable", cfg, "observable", st.observable);
  if (st.observable.empty()) config_error("ci needs --observable");

  const Dataset data = dataset_from_json(cfg.primary);
  const Json obs = read_json_file(st.observable);
  const HermitianOperator a = HermitianOperator::from_matrix(
      matrix_from_json(obs.is_object() && obs.contains("op") ? obs.at("op") : obs));
  const double s = st.s.value_or(default_significance(StoppingKind::expectation_ci));
  const double r_rho = st.r_threshold.value_or(
      r_threshold_for({StoppingKind::expectation_ci, data.dim(), s}, st.fraction));
  const double r_phi = st.r_threshold_constrained.value_or(r_rho);

  const Algorithm algo = parse_algo(st.algo);
  const FitResult fit = maximize(data, algo, stop_spec(r_rho, st.max_iters));
  ConfidenceInterval ci{};
  try {
    ci = expectation_ci(data, a, s, fit, stop_spec(r_phi, st.max_iters));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BracketFailure) throw;
    throw Error(ErrorCode::BracketFailure,
                std::string(e.what()) +
                    "; check that the observable is not a multiple of the identity");
  }

  Json j = interval_to_json(ci);
  j["fit"] = {{"algo", to_string(algo)}, {"final_r", fit.final_r}, {"final_loglik", fit.final_loglik},
              {"stop_reason", to_string(fit.stop_reason)}};
  j["r_threshold"] = r_rho;
  j["r_threshold_constrained"] = r_phi;
  const fs::path dir = prepare_out(st.out);
  write_text_file(dir / "ci.json", dump(j));

  out << std::setprecision(6);
  out << "t = " << ci.t << " (s = " << ci.s << "), interval [" << ci.f_lo << ", " << ci.f_hi << "]\n";
  out << std::left << std::setw(8) << "end" << std::right;
  for (const char* h : {"lambda", "f", "D_lb", "D_ub", "p_lb", "p_ub"}) out << std::setw(13) << h;
  out << "\n";
  for (const auto& [name, e] : {std::pair{"lower", ci.lower}, std::pair{"upper", ci.upper}}) {
    out << std::left << std::setw(8) << name << std::right;
    for (double v : {e.lambda, e.f, e.d_lb, e.d_ub, e.pvalue_lb, e.pvalue_ub}) out << std::setw(13) << v;
    out << "\n";
  }
  return 0;
}

int cmd_report(const CLI::App& sub, Settings st, std::ostream& out) {
  if (!st.config.empty()) {
    const Loaded cfg = load_config(st.config, "fit");
    fallback(sub, "--out", cfg.run, "out", st.out);
    fallback(sub, "--s", cfg.run, "s", st.s);
    fallback(sub, "--dim", cfg.run, "dim", st.dim);
    fallback(sub, "--r-k", cfg.run, "r_k", st.r_k);
    if (!st.dim) fallback(sub, "--dim", cfg.primary, "dim", st.dim);
    if (!st.r_k) fallback(sub, "--r-k", cfg.primary, "final_r", st.r_k);
  }
  if (!st.dim) config_error("report needs --dim or a fit output via --config");
  if (!st.r_k) config_error("report needs --r-k or a fit output via --config");
  const double s = st.s.value_or(default_significance(StoppingKind::state_region));

  const RegionReport report = state_region_report(*st.dim, s, *st.r_k);
  Json j = region_report_to_json(report);
  j["dim"] = *st.dim;
  j["dof"] = state_dof(*st.dim);
  j["r_k"] = *st.r_k;
  j["s"] = s;
  const fs::path dir = prepare_out(st.out);
  write_text_file(dir / "report.json", dump(j));

  out << std::setprecision(6);
  row(out, "dim") << *st.dim << "\n";
  row(out, "dof") << state_dof(*st.dim) << "\n";
  row(out, "r_k") << *st.r_k << "\n";
  row(out, "threshold t") << report.threshold_t << "\n";
  row(out, "nominal p") << report.nominal_pvalue << "\n";
  row(out, "worst-case p") << report.worst_case_pvalue << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum-likelihood quantum state tomography with certified stopping"};
  app.require_subcommand(1);
  Settings st;

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", st.out, "Output directory")->capture_default_str();
  };
  auto add_fit_options = [&](CLI::App* sub) {
    sub->add_option("--algo", st.algo, "Likelihood maximizer")
        ->check(CLI::IsMember({"rhor", "gradient", "gradient_ascent"}))
        ->capture_default_str();
    sub->add_option("--r-threshold", st.r_threshold, "Stop once the gradient bound r_k is below this");
    sub->add_option("--s", st.s, "Level of significance");
    sub->add_option("--fraction", st.fraction,
                    "Fraction of the natural spread used as r threshold for region/ci contexts")
        ->capture_default_str();
    sub->add_option("--max-iters", st.max_iters, "Iteration cap")->capture_default_str();
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Sample homodyne data for a lossy cat scenario");
  simulate->add_option("--config", st.config, "Scenario JSON or run config")->required();
  simulate->add_option("--seed", st.seed, "Override the scenario seed");
  add_out(simulate);

  CLI::App* fit = app.add_subcommand("fit", "Maximize the likelihood and write the iteration trace");
  fit->add_option("--config", st.config, "Dataset JSON or run config")->required();
  add_fit_options(fit);
  fit->add_option("--context", st.context, "Derive the r threshold from a stopping context")
      ->check(CLI::IsMember({"point", "region", "ci"}));
  fit->add_option("--reference-loglik", st.reference_loglik,
                  "JSON with the reference log-likelihood; adds gap.csv");
  add_out(fit);

  CLI::App* ci = app.add_subcommand("ci", "Likelihood-ratio confidence interval for Tr(rho A)");
  ci->add_option("--config", st.config, "Dataset JSON or run config")->required();
  ci->add_option("--observable", st.observable, "Observable matrix JSON");
  add_fit_options(ci);
  ci->add_option("--r-threshold-constrained", st.r_threshold_constrained,
                 "r threshold for the constrained fits (defaults to --r-threshold)");
  add_out(ci);

  CLI::App* report = app.add_subcommand("report", "Worst-case p-value for a confidence region");
  report->add_option("--config", st.config, "fit.json from the fit command, or run config");
  report->add_option("--dim", st.dim, "Hilbert-space dimension");
  report->add_option("--r-k", st.r_k, "Gradient bound at the stopping point");
  report->add_option("--s", st.s, "Level of significance");
  add_out(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: code=" << to_string(ErrorCode::ConfigError) << " " << e.what() << "\n";
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(*simulate, st, out);
    if (*fit) return cmd_fit(*fit, st, out);
    if (*ci) return cmd_ci(*ci, st, out);
    return cmd_report(*report, st, out);
  } catch (const Error& e) {
    err << "error: code=" << to_string(e.code()) << " " << e.what() << "\n";
  } catch (const Json::exception& e) {
    err << "error: code=" << to_string(ErrorCode::ParseError) << " " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "error: code=" << to_string(ErrorCode::IoError) << " " << e.what() << "\n";
  }
  return 1;
}

}  // namespace mlqst::cli
