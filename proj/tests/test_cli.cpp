#include "doctest.h"
#include "pgap/gibbs.hpp"
#include "pgap/purified.hpp"
#include "pgap_cli/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pgap;
using namespace pgap::cli;

namespace {

int call(std::vector<std::string> args) {
  args.insert(args.begin(), "pgap");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("pgap_cli_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("partition grammar on rings") {
    const Lattice ring = Lattice::ring(8);
    const Partition p = parse_partition("A=0;B=1-3,7;C=4;D=5-6", ring);
    CHECK(p.a == Sites{0});
    CHECK(p.b == Sites{1, 2, 3, 7});
    CHECK(p.c == Sites{4});
    CHECK(p.d == Sites{5, 6});
    CHECK(format_partition(p, ring) == "A=0;B=1-3,7;C=4;D=5-6");
    CHECK(parse_partition(" D=5-6 ; C=4;A=0;B=1-3,7", ring).format() == p.format());

    try {
      parse_partition("A=0;B=1;C=0;D=", Lattice::ring(2));
      FAIL("overlap accepted");
    } catch (const Error& e) {
      CHECK(exit_code_for(e) == kUsage);
      CHECK(std::string(e.what()).find('0') != std::string::npos);
    }
    CHECK_THROWS_AS(parse_partition("A=0;B=1;C=2", Lattice::ring(4)), Error);  // site 3 uncovered
    CHECK_THROWS_AS(parse_partition("A=0;A=1;C=2;D=3", Lattice::ring(4)), UsageError);
    CHECK_THROWS_AS(parse_partition("A=0;B=3-1;C=2;D=", Lattice::ring(4)), UsageError);
    CHECK_THROWS_AS(parse_partition("A=0;B=1;C=2;D=3-9", Lattice::ring(4)), Error);
    CHECK_THROWS_AS(parse_partition("A=0;B=x;C=2;D=3", Lattice::ring(4)), UsageError);
    CHECK_THROWS_AS(parse_partition("A=0;B=1;C=2;E=3", Lattice::ring(4)), UsageError);
  }

  TEST_CASE("rect selections on the torus") {
    const Lattice t = Lattice::torus(4, 2);
    CHECK(parse_sites("rect(0,0,0,0)", t) == Sites{t.edge(0, 0, 0), t.edge(0, 0, 1)});
    CHECK(parse_sites("rect(1,2,1,2,v)", t) == Sites{t.edge(1, 2, 1)});
    CHECK(parse_sites("rect(0,0,3,3)", t).size() == 32);
    CHECK(parse_sites("rect(0,0,3,3,h)", t).size() == 16);
    // wrapping ranges
    CHECK(parse_sites("rect(3,0,0,0,h)", t) == normalize_region({t.edge(3, 0, 0), t.edge(0, 0, 0)}));
    CHECK_THROWS_AS(parse_sites("rect(0,0,4,0)", t), Error);
    CHECK_THROWS_AS(parse_sites("rect(0,0,1)", t), UsageError);
    CHECK_THROWS_AS(parse_sites("rect(0,0,1,1,x)", t), UsageError);
    CHECK_THROWS_AS(parse_sites("rect(0,0,0,0)", Lattice::ring(4)), Error);
    CHECK_THROWS_AS(parse_sites("rect(0,0,0,0),rect(0,0,0,0,h)", t), Error);
  }

  TEST_CASE("torus decompositions round-trip through format and parse") {
    const Lattice t = Lattice::torus(4, 2);
    const std::vector<std::string> specs{
        // columns
        "A=rect(0,0,0,3);B=rect(1,0,1,3);C=rect(2,0,2,3);D=rect(3,0,3,3)",
        // rows, B wrapping around
        "A=rect(0,0,3,0);C=rect(0,2,3,2);B=rect(0,1,3,1),rect(0,3,3,3);D=",
        // quadrants
        "A=rect(0,0,1,1);B=rect(2,0,3,1);C=rect(2,2,3,3);D=rect(0,2,1,3)",
    };
    for (const std::string& s : specs) {
      const Partition p = parse_partition(s, t);
      const std::string text = format_partition(p, t);
      const Partition q = parse_partition(text, t);
      CHECK(q.a == p.a);
      CHECK(q.b == p.b);
      CHECK(q.c == p.c);
      CHECK(q.d == p.d);
      CHECK(format_partition(q, t) == text);
      CHECK(parse_partition(p.format(), t).format() == p.format());
    }
  }

  TEST_CASE("grid specs") {
    const GridAxis g = parse_grid("beta=0.1:2.0:0.1");
    CHECK(g.name == "beta");
    REQUIRE(g.values.size() == 20);
    CHECK(g.values.front() == doctest::Approx(0.1));
    CHECK(g.values.back() == doctest::Approx(2.0));
    const GridAxis l = parse_grid("n=3,4,5");
    CHECK(l.values == std::vector<double>{3, 4, 5});
    CHECK(parse_grid("beta=").values.empty());
    CHECK_THROWS_AS(parse_grid("beta"), UsageError);
    CHECK_THROWS_AS(parse_grid("beta=1:0:0.1"), UsageError);
    CHECK_THROWS_AS(parse_grid("beta=0:1:0"), UsageError);
    CHECK_THROWS_AS(parse_grid("beta=0:1"), UsageError);
    RunConfig c;
    CHECK_THROWS_AS(apply_grid_value(c, "n", 3.5), UsageError);
    CHECK_THROWS_AS(apply_grid_value(c, "colour", 1), UsageError);
    apply_grid_value(c, "seed", 17);
    CHECK(c.model.seed == 17);
  }

  TEST_CASE("csv schema") {
    CHECK(csv_header() == "model,n,beta,quantity,partition,value,method,runtime_ms,seed,status");
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_number(M_PI)) == M_PI);
    ResultRow r;
    r.model = "ising";
    r.n = 8;
    r.beta = 1.0;
    r.quantity = "delta";
    r.partition = "A=0;B=1-3,7;C=4;D=5-6";
    r.value = 0.5;
    r.method = "direct";
    r.seed = 3;
    CHECK(csv_line(r) == "ising,8,1,delta,\"A=0;B=1-3,7;C=4;D=5-6\",0.5,direct,,3,ok");
    r.runtime_ms = 2.5;
    CHECK(csv_line(r).find(",2.5,3,ok") != std::string::npos);
  }

  TEST_CASE("config round trip") {
    RunConfig c;
    c.command = "davies";
    c.model.builtin = "random";
    c.model.n = 5;
    c.model.seed = 99;
    c.beta = 0.375;
    c.partition = "A=0;B=1;C=2;D=3-4";
    c.times = {0.0, 0.5, 1.25};
    c.solver.dense_max = 1024;
    c.solver.force_iterative = true;
    c.jobs = 3;
    const auto j = config_to_json(c);
    const RunConfig back = config_from_json(j);
    CHECK(config_to_json(back).dump() == j.dump());
    CHECK(back.times == c.times);
    CHECK(back.model.seed == 99);
  }

  TEST_CASE("model descriptions") {
    const Interaction phi = random_ring(3, 2, 1.0, 4);
    const Interaction back = model_from_json(model_to_json(phi));
    CHECK(back.terms.size() == phi.terms.size());
    CHECK(max_abs(back.hamiltonian() - phi.hamiltonian()) == 0.0);

    const auto builtin = nlohmann::json::parse(
        R"({"lattice":{"kind":"ring","n":5,"local_dim":2},"beta":0.5,"interaction":{"builtin":{"name":"ising"}}})");
    const Interaction ising = model_from_json(builtin);
    CHECK(ising.lattice.site_count() == 5);
    CHECK(max_abs(ising.hamiltonian() - ising_ring(5).hamiltonian()) == 0.0);

    const auto qd = nlohmann::json::parse(
        R"({"lattice":{"kind":"torus_edges","n":2,"local_dim":2},"interaction":{"builtin":{"name":"qd","group":"Z2"}}})");
    CHECK(model_from_json(qd).commuting);

    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"lattice":{"kind":"ring","n":2}})")), Error);
    const auto bad = nlohmann::json::parse(
        R"({"lattice":{"kind":"ring","n":2},"interaction":{"terms":[{"support":[0,1],"matrix":{"re":[[1,0],[0,1]]}}]}})");
    CHECK_THROWS_AS(model_from_json(bad), Error);
    CHECK(group_from_name("Z3").order == 3);
    CHECK_FALSE(group_from_name("S3").abelian);
    CHECK_THROWS_AS(group_from_name("D4"), UsageError);
  }

  TEST_CASE("single commands") {
    RunConfig c;
    c.command = "gap";
    c.model.n = 4;
    const CommandOutput g = run_single(c);
    REQUIRE(g.rows.size() == 1);
    CHECK(g.rows[0].quantity == "gap");
    const double dense = spectral_gap(purified_hamiltonian(gibbs_state(ising_ring(4), 1.0), all_sites(4))).gap;
    CHECK(g.rows[0].value == doctest::Approx(dense).epsilon(1e-12));

    RunConfig cert;
    cert.command = "certify";
    cert.family = "ising";
    cert.beta = 0.5;
    cert.model.n = 1000;
    cert.mu = 9;
    const CommandOutput out = run_single(cert);
    REQUIRE(out.rows.size() == 4);
    CHECK(out.rows[0].value == doctest::Approx(ising_gap_corollary(0.5).lower_bound));
    CHECK(out.extra["certificates"][1]["branch"] == "recursion");

    RunConfig d;
    d.command = "delta";
    d.model.n = 5;
    d.partition = "A=0;B=1;C=2;D=3-4";
    d.method = "all";
    const CommandOutput dr = run_single(d);
    std::vector<double> deltas;
    for (const ResultRow& r : dr.rows)
      if (r.quantity == "delta") deltas.push_back(r.value);
    REQUIRE(deltas.size() == 3);
    CHECK(std::abs(deltas[0] - deltas[1]) < 1e-8);
    CHECK(std::abs(deltas[0] - deltas[2]) < 1e-8);

    RunConfig e;
    e.command = "eta";
    e.model.n = 4;
    e.region = "0-1";
    const CommandOutput er = run_single(e);
    CHECK(er.rows.size() == 8);

    RunConfig dv;
    dv.command = "davies";
    dv.model.n = 3;
    dv.times = {0.0, 1.0};
    const CommandOutput dvr = run_single(dv);
    CHECK(dvr.rows.front().quantity == "db_defect");
    CHECK(dvr.rows.front().value < 1e-10);
    CHECK(dvr.rows.back().quantity == "decay_bound");

    c.command = "sweep";
    CHECK_THROWS_AS(run_single(c), UsageError);
  }

  TEST_CASE("sweeps") {
    RunConfig c;
    c.command = "sweep";
    c.task = "certify";
    c.family = "ising";
    c.model.n = 100;
    c.grid = "beta=";
    const SweepOutput empty = run_sweep(c);
    CHECK(empty.rows.empty());
    CHECK_FALSE(empty.any_failed);
    CHECK(to_csv(empty.rows) == csv_header() + "\n");

    c.grid = "beta=0.1:2.0:0.1";
    c.jobs = 1;
    const std::string one = to_csv(run_sweep(c).rows);
    c.jobs = 4;
    const SweepOutput four = run_sweep(c);
    CHECK(to_csv(four.rows) == one);
    double prev = INFINITY;
    for (const ResultRow& r : four.rows) {
      if (r.quantity != "certificate_log" || r.method != "ising_gap_corollary") continue;
      CHECK(r.value < prev);
      prev = r.value;
    }

    c.grid = "mu=5,9";
    const SweepOutput partial = run_sweep(c);
    CHECK(partial.any_failed);
    REQUIRE(!partial.rows.empty());
    CHECK(partial.rows[0].status == "failed");
    CHECK(partial.rows.back().status == "ok");

    c.task = "verify";
    CHECK_THROWS_AS(run_sweep(c), UsageError);
  }

  TEST_CASE("exit codes and run directories") {
    CHECK(exit_code_for(Error(ErrorKind::partition, "x")) == kUsage);
    CHECK(exit_code_for(Error(ErrorKind::capacity, "x")) == kNumerical);
    CHECK(exit_code_for(Error(ErrorKind::numerical, "x")) == kNumerical);

    const auto dir = scratch("gap");
    CHECK(call({"gap", "--builtin", "ising", "--n", "3", "--beta", "1", "--quiet", "--run-dir", dir.string()}) == kOk);
    CHECK(std::filesystem::exists(dir / "config.json"));
    CHECK(std::filesystem::exists(dir / "log.txt"));
    const std::string csv = slurp(dir / "results.csv");
    CHECK(csv.rfind(csv_header(), 0) == 0);
    CHECK(csv.find(",gap,") != std::string::npos);

    // replaying the stored config reproduces the value column
    const auto replay = scratch("replay");
    CHECK(call({"gap", "--config", (dir / "config.json").string(), "--quiet", "--run-dir", replay.string()}) == kOk);
    auto value_of = [](const std::string& text) {
      const auto line = text.substr(text.find('\n') + 1);
      std::vector<std::string> f;
      std::stringstream ss(line);
      std::string item;
      while (std::getline(ss, item, ',')) f.push_back(item);
      return f.at(5);
    };
    CHECK(value_of(slurp(replay / "results.csv")) == value_of(csv));

    const auto bad = scratch("bad");
    CHECK(call({"delta", "--n", "2", "--partition", "A=0;B=1;C=0;D=", "--run-dir", bad.string()}) == kUsage);
    CHECK(call({"gap", "--builtin", "nonsense"}) == kUsage);
    CHECK(call({"frobnicate"}) == kUsage);

    const auto sw = scratch("sweep");
    CHECK(call({"sweep", "--task", "certify", "--grid", "beta=", "--quiet", "--run-dir", sw.string()}) == kOk);
    CHECK(slurp(sw / "results.csv") == csv_header() + "\n");
    const auto swf = scratch("sweep_fail");
    CHECK(call({"sweep", "--task", "certify", "--grid", "mu=5,9", "--quiet", "--run-dir", swf.string()}) ==
          kNumerical);

    const auto model = scratch("model");
    const auto file = std::filesystem::temp_directory_path() / "pgap_cli_test_model.json";
    CHECK(call({"model", "--builtin", "random", "--n", "3", "--seed", "5", "--beta", "0.25", "--export",
                file.string(), "--quiet", "--run-dir", model.string()}) == kOk);
    const auto from_file = scratch("from_file");
    CHECK(call({"gap", "--model-file", file.string(), "--quiet", "--run-dir", from_file.string()}) == kOk);
    const auto cfg = nlohmann::json::parse(slurp(from_file / "config.json"));
    CHECK(cfg["beta"].get<double>() == 0.25);
  }
}
