#pragma once

#include "pgap/certify.hpp"
#include "pgap/mixing.hpp"
#include "pgap/models.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pgap::cli {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

// usage-class failures (bad input) map to 1, solver failures to 2
int exit_code_for(const Error& e);

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// comma separated "i" or "i-j" items, plus rect(x0,y0,x1,y1[,h|v]...) on tori
Sites parse_sites(const std::string& text, const Lattice& lat);
// A=<ranges>;B=<ranges>;C=<ranges>;D=<ranges>; missing blocks are empty
Partition parse_partition(const std::string& spec, const Lattice& lat);
// rings use i-j ranges; tori use one rect item per run of edges along x
std::string format_sites(const Sites& s, const Lattice& lat);
std::string format_partition(const Partition& p, const Lattice& lat);

struct ModelSpec {
  std::string builtin = "ising";  // ising | random | qd | file
  int n = 4;
  int r = 2;
  double j = 1.0;
  int d = 2;
  std::string group = "Z2";
  std::uint64_t seed = 1;
  std::string file;
};

GroupSpec group_from_name(const std::string& name);
Interaction build_model(const ModelSpec& spec);
nlohmann::json model_to_json(const Interaction& phi);
// model file: {"lattice":{...},"beta":b,"interaction":{"builtin":{...}} | {"terms":[...]}}
Interaction model_from_json(const nlohmann::json& j);
nlohmann::json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);
std::string model_label(const ModelSpec& spec);

struct SolverOptions {
  double tol = 1e-8;
  long long dense_max = 4096;
  bool force_iterative = false;
  std::uint64_t seed = 0x5eedULL;
};

// Everything a command needs; serializable so a run can be replayed from config.json.
struct RunConfig {
  std::string command;
  ModelSpec model;
  double beta = 1.0;
  std::string partition;
  std::string region;
  std::string method;
  std::string family;
  std::string profile = "glauber";
  long long mu = 9;
  double eta = 0.0;  // 0 selects the closed-form bound
  int group_order = 2;
  int eta_iterations = 0;
  std::vector<double> times;
  SolverOptions solver;
  std::string grid;
  std::string task;
  int jobs = 1;
  bool record_timing = false;
  std::string suite;
};

nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

struct ResultRow {
  std::string model;
  int n = 0;
  double beta = 0.0;
  std::string quantity;
  std::string partition;
  double value = 0.0;
  std::string method;
  std::optional<double> runtime_ms;
  std::uint64_t seed = 0;
  std::string status = "ok";
};

std::string format_number(double v);  // 17 significant digits
std::string csv_header();
std::string csv_line(const ResultRow& r);
std::string to_csv(const std::vector<ResultRow>& rows);

struct CommandOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> log;
  nlohmann::json extra;  // command specific artifacts (certificate traces, reports)
};

CommandOutput run_model(const RunConfig& c);
CommandOutput run_delta(const RunConfig& c);
CommandOutput run_gap(const RunConfig& c);
CommandOutput run_eta(const RunConfig& c);
CommandOutput run_davies(const RunConfig& c);
CommandOutput run_certify(const RunConfig& c);
// dispatch on c.command for the single-evaluation commands
CommandOutput run_single(const RunConfig& c);

struct GridAxis {
  std::string name;
  std::vector<double> values;
};
// "beta=0.1:2.0:0.1" (inclusive) or "n=3,4,5"; "beta=" is an empty grid
GridAxis parse_grid(const std::string& spec);
void apply_grid_value(RunConfig& c, const std::string& name, double value);

struct SweepOutput {
  std::vector<ResultRow> rows;
  bool any_failed = false;
  std::vector<std::string> log;
};
// evaluates c.task at every grid point with up to c.jobs threads; rows keep grid order
SweepOutput run_sweep(const RunConfig& c);

struct CheckResult {
  int id = 0;  // acceptance criterion number, 0 for module invariants
  std::string suite;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

nlohmann::json check_to_json(const CheckResult& r);
std::string check_line(const CheckResult& r);

// module invariant checks and acceptance criteria; suite in {algebra, marginals, mixing, gap, davies, certify, all}
std::vector<CheckResult> run_verify(const std::string& suite);
std::vector<std::string> verify_suites();

// acceptance criteria by number (1..12)
CheckResult acceptance_criterion(int id);

// Creates the run directory (timestamped under base unless exact is given) and writes
// config.json, results.csv and log.txt.
std::string write_run_dir(const RunConfig& c, const std::vector<ResultRow>& rows, const std::vector<std::string>& log,
                          const std::string& base, const std::string& exact, const nlohmann::json& extra = {});

int main_entry(int argc, char** argv);

}  // namespace pgap::cli
