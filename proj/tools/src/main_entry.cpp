#include "CLI11.hpp"
#include "pgap_cli/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace pgap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string write_run_dir(const RunConfig& c, const std::vector<ResultRow>& rows, const std::vector<std::string>& log,
                          const std::string& base, const std::string& exact, const json& extra) {
  fs::path dir;
  if (!exact.empty()) {
    dir = exact;
  } else {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
    const std::string stem = std::string(stamp) + "-" + c.command;
    dir = fs::path(base) / stem;
    for (int k = 1; fs::exists(dir); ++k) dir = fs::path(base) / (stem + "-" + std::to_string(k));
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create run directory '" + dir.string() + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + (dir / name).string() + "'");
    f << content;
  };
  write("config.json", config_to_json(c).dump(2) + "\n");
  write("results.csv", to_csv(rows));
  std::string text;
  for (const std::string& line : log) text += line + "\n";
  write("log.txt", text);
  if (!extra.is_null() && !extra.empty()) write("artifacts.json", extra.dump(2) + "\n");
  return dir.string();
}

namespace {

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  const GridAxis g = parse_grid("t=" + text);
  return g.values;
}

// scan argv for --config so that the loaded values become defaults for the explicit flags
RunConfig initial_config(int argc, char** argv) {
  RunConfig c;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    if (path.empty()) continue;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    c = config_from_json(j);
  }
  return c;
}

double model_file_beta(const std::string& path, double fallback) {
  std::ifstream in(path);
  if (!in) return fallback;
  try {
    json j;
    in >> j;
    return j.value("beta", fallback);
  } catch (const json::exception&) {
    return fallback;
  }
}

int run(int argc, char** argv) {
  RunConfig c = initial_config(argc, argv);
  std::string out_dir = "runs";
  std::string run_dir;
  std::string config_path;
  std::string model_file;
  std::string times_text;
  std::string export_path;
  std::uint64_t seed = c.solver.seed;
  bool json_report = false;
  bool quiet = false;

  CLI::App app{"Purified-Hamiltonian spectral gap toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pgap 0.1.0");

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "Replay a saved config.json; explicit flags override it");
    s->add_option("--out-dir", out_dir, "Parent directory for timestamped run directories");
    s->add_option("--run-dir", run_dir, "Write the run into exactly this directory");
    s->add_option("--builtin", c.model.builtin, "Builtin model: ising, random, qd")
        ->check(CLI::IsMember({"ising", "random", "qd", "file"}));
    s->add_option("--model-file", model_file, "JSON model description");
    s->add_option("--n", c.model.n, "Ring length or torus side");
    s->add_option("--r", c.model.r, "Interaction range of random rings");
    s->add_option("--j", c.model.j, "Interaction strength of random rings");
    s->add_option("--d", c.model.d, "Local dimension of random rings");
    s->add_option("--group", c.model.group, "Quantum double group: Z<k> or S3");
    s->add_option("--seed", seed, "Seed for every random choice");
    s->add_option("--beta", c.beta, "Inverse temperature");
    s->add_option("--tol", c.solver.tol, "Iterative solver tolerance");
    s->add_option("--dense-max", c.solver.dense_max, "Largest D^2 solved densely");
    s->add_flag("--force-iterative", c.solver.force_iterative, "Always use the iterative gap solver");
    s->add_flag("--quiet", quiet, "Do not print results to stdout");
  };

  auto* model = app.add_subcommand("model", "Build a model and report its basic data");
  common(model);
  model->add_option("--export", export_path, "Write the model as JSON");

  auto* delta = app.add_subcommand("delta", "Spatial mixing coefficient of a Gibbs state");
  common(delta);
  delta->add_option("--partition", c.partition, "A=..;B=..;C=..;D=..")->required();
  delta->add_option("--method", c.method, "direct, constrained, martingale, bounds or all");

  auto* gap = app.add_subcommand("gap", "Spectral gap of the purified Hamiltonian");
  common(gap);
  gap->add_option("--region", c.region, "Sites of X (default: all)");

  auto* eta = app.add_subcommand("eta", "Small-region eta bounds");
  common(eta);
  eta->add_option("--region", c.region, "Sites of X");
  eta->add_option("--method", c.method, "trivial, gibbs-boundary, closed-form, heuristic or all");
  eta->add_option("--iterations", c.eta_iterations, "Local search steps of the heuristic method");

  auto* davies = app.add_subcommand("davies", "Davies generator checks and decay");
  common(davies);
  davies->add_option("--profile", c.profile, "Rate profile: glauber or sqrt");
  davies->add_option("--times", times_text, "Evaluation times, start:stop:step or a comma list");

  auto* certify = app.add_subcommand("certify", "Closed-form gap certificates");
  common(certify);
  certify->add_option("--family", c.family, "ising, qd-abelian or qd-general");
  certify->add_option("--mu", c.mu, "Base block length");
  certify->add_option("--eta", c.eta, "Small-region eta (0 selects the closed form)");
  certify->add_option("--group-order", c.group_order, "Group order |G|");

  auto* sweep = app.add_subcommand("sweep", "Evaluate a command over a parameter grid");
  common(sweep);
  sweep->add_option("--task", c.task, "Command evaluated at each grid point")->required();
  sweep->add_option("--grid", c.grid, "name=start:stop:step or name=v1,v2,...")->required();
  sweep->add_option("--jobs", c.jobs, "Parallel jobs");
  sweep->add_flag("--record-timing", c.record_timing, "Fill runtime_ms (makes the CSV non-reproducible)");
  sweep->add_option("--partition", c.partition, "Partition for delta tasks");
  sweep->add_option("--region", c.region, "Region for gap and eta tasks");
  sweep->add_option("--method", c.method, "Method of the task");
  sweep->add_option("--family", c.family, "Certificate family");
  sweep->add_option("--mu", c.mu, "Base block length");
  sweep->add_option("--eta", c.eta, "Small-region eta");
  sweep->add_option("--group-order", c.group_order, "Group order |G|");
  sweep->add_option("--profile", c.profile, "Rate profile");
  sweep->add_option("--times", times_text, "Evaluation times for davies tasks");

  auto* verify = app.add_subcommand("verify", "Run invariant checks and acceptance criteria");
  verify->add_option("--suite", c.suite, "algebra, marginals, mixing, gap, davies, certify or all")
      ->check(CLI::IsMember(verify_suites()));
  verify->add_option("--out-dir", out_dir, "Parent directory for timestamped run directories");
  verify->add_option("--run-dir", run_dir, "Write the report into exactly this directory");
  verify->add_flag("--json", json_report, "Print the JSON report instead of text lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  auto given = [chosen](const std::string& name) {
    const CLI::Option* o = chosen->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--seed")) {
    c.solver.seed = seed;
    c.model.seed = seed;
  }
  if (!model_file.empty()) {
    c.model.builtin = "file";
    c.model.file = model_file;
    if (!given("--beta")) c.beta = model_file_beta(model_file, c.beta);
  }
  if (!times_text.empty()) c.times = parse_times(times_text);

  if (c.command == "verify") {
    if (c.suite.empty()) c.suite = "all";
    const auto checks = run_verify(c.suite);
    bool ok = true;
    json report = json::array();
    std::vector<ResultRow> rows;
    std::vector<std::string> lines;
    for (const CheckResult& r : checks) {
      ok = ok && r.passed;
      report.push_back(check_to_json(r));
      lines.push_back(check_line(r));
      ResultRow row;
      row.model = r.suite;
      row.quantity = "check";
      row.partition = r.name;
      row.value = r.measured;
      row.method = r.id > 0 ? "criterion " + std::to_string(r.id) : "invariant";
      row.runtime_ms = r.seconds * 1000.0;
      row.status = r.passed ? "pass" : "fail";
      rows.push_back(row);
    }
    if (json_report) std::cout << report.dump(2) << "\n";
    else for (const auto& l : lines) std::cout << l << "\n";
    const std::string dir = write_run_dir(c, rows, lines, out_dir, run_dir, json{{"checks", report}});
    std::cerr << "report written to " << dir << "\n";
    return ok ? kOk : kVerification;
  }

  if (c.command == "sweep") {
    const SweepOutput s = run_sweep(c);
    if (!quiet) std::cout << to_csv(s.rows);
    const std::string dir = write_run_dir(c, s.rows, s.log, out_dir, run_dir);
    std::cerr << "run written to " << dir << "\n";
    return s.any_failed ? kNumerical : kOk;
  }

  c.record_timing = true;
  CommandOutput out = run_single(c);
  if (!export_path.empty()) {
    std::ofstream f(export_path);
    if (!f) throw UsageError("cannot write '" + export_path + "'");
    json m = out.extra["model"];
    m["beta"] = c.beta;
    f << m.dump(2) << "\n";
  }
  if (!quiet) std::cout << to_csv(out.rows);
  const std::string dir = write_run_dir(c, out.rows, out.log, out_dir, run_dir, out.extra);
  std::cerr << "run written to " << dir << "\n";
  return kOk;
}

}  // namespace

int main_entry(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace pgap::cli
