#include "pgap_cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace pgap::cli {

SweepOutput run_sweep(const RunConfig& c) {
  if (c.task.empty()) throw UsageError("sweep needs --task");
  if (c.task == "sweep" || c.task == "verify") throw UsageError("sweep --task must be a single-evaluation command");
  if (c.jobs < 1) throw UsageError("--jobs must be at least 1");
  const GridAxis axis = parse_grid(c.grid);

  // validate every grid point before any work starts
  std::vector<RunConfig> points;
  for (double v : axis.values) {
    RunConfig p = c;
    p.command = c.task;
    apply_grid_value(p, axis.name, v);
    points.push_back(p);
  }

  std::vector<CommandOutput> results(points.size());
  std::vector<std::string> failures(points.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = run_single(points[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const int threads = static_cast<int>(std::min<size_t>(static_cast<size_t>(c.jobs), points.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepOutput out;
  for (size_t i = 0; i < points.size(); ++i) {
    const std::string at = axis.name + "=" + format_number(axis.values[i]);
    if (!failures[i].empty()) {
      out.any_failed = true;
      ResultRow r;
      r.model = model_label(points[i].model);
      r.n = points[i].model.n;
      r.beta = points[i].beta;
      r.quantity = c.task;
      r.value = std::nan("");
      r.method = "";
      r.seed = points[i].model.builtin == "random" ? points[i].model.seed : points[i].solver.seed;
      r.status = "failed";
      out.rows.push_back(r);
      out.log.push_back(at + ": " + failures[i]);
      continue;
    }
    for (const ResultRow& r : results[i].rows) out.rows.push_back(r);
    for (const std::string& line : results[i].log) out.log.push_back(at + ": " + line);
  }
  return out;
}

}  // namespace pgap::cli
