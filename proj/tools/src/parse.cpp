#include "pgap_cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pgap::cli {

using nlohmann::json;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::numerical:
    case ErrorKind::divergence:
    case ErrorKind::capacity:
    case ErrorKind::rank:
    case ErrorKind::contract:
      return kNumerical;
    default:
      return kUsage;
  }
}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// split on `sep` outside parentheses
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth < 0) throw UsageError("unbalanced parentheses in '" + s + "'");
    if (ch == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (depth != 0) throw UsageError("unbalanced parentheses in '" + s + "'");
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& text) {
  const std::string t = trim(text);
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(t, &pos);
  } catch (const std::exception&) {
    throw UsageError("expected an integer, got '" + t + "'");
  }
  if (pos != t.size()) throw UsageError("expected an integer, got '" + t + "'");
  return v;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw UsageError("expected a number, got '" + t + "'");
  }
  if (pos != t.size()) throw UsageError("expected a number, got '" + t + "'");
  return v;
}

// inclusive cyclic range lo..hi on Z_n
std::vector<int> cyclic_range(int lo, int hi, int n) {
  if (lo < 0 || lo >= n || hi < 0 || hi >= n)
    throw Error(ErrorKind::partition, "rect coordinate out of range 0.." + std::to_string(n - 1));
  std::vector<int> out;
  for (int v = lo;; v = (v + 1) % n) {
    out.push_back(v);
    if (v == hi) break;
  }
  return out;
}

Sites parse_rect(const std::string& item, const Lattice& lat) {
  if (lat.kind != Lattice::Kind::torus_edges) throw Error(ErrorKind::partition, "rect() needs a torus lattice");
  const size_t open = item.find('(');
  if (item.back() != ')') throw UsageError("malformed rect item '" + item + "'");
  const auto args = split_top(item.substr(open + 1, item.size() - open - 2), ',');
  if (args.size() < 4) throw UsageError("rect needs x0,y0,x1,y1: '" + item + "'");
  bool want[2] = {false, false};
  for (size_t k = 4; k < args.size(); ++k) {
    const std::string o = trim(args[k]);
    if (o == "h") want[0] = true;
    else if (o == "v") want[1] = true;
    else throw UsageError("rect orientation must be h or v, got '" + o + "'");
  }
  if (args.size() == 4) want[0] = want[1] = true;
  Sites out;
  for (int x : cyclic_range(parse_int(args[0]), parse_int(args[2]), lat.n))
    for (int y : cyclic_range(parse_int(args[1]), parse_int(args[3]), lat.n))
      for (int o = 0; o < 2; ++o)
        if (want[o]) out.push_back(lat.edge(x, y, o));
  return out;
}

std::string join_ranges(const Sites& s) {
  std::string out;
  for (size_t i = 0; i < s.size();) {
    size_t j = i;
    while (j + 1 < s.size() && s[j + 1] == s[j] + 1) ++j;
    if (!out.empty()) out += ",";
    out += std::to_string(s[i]);
    if (j > i) out += "-" + std::to_string(s[j]);
    i = j + 1;
  }
  return out;
}

}  // namespace

Sites parse_sites(const std::string& text, const Lattice& lat) {
  Sites out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  const int count = lat.site_count();
  for (const std::string& raw : split_top(t, ',')) {
    const std::string item = trim(raw);
    if (item.empty()) throw UsageError("empty item in site list '" + text + "'");
    if (item.rfind("rect", 0) == 0) {
      for (int e : parse_rect(item, lat)) out.push_back(e);
      continue;
    }
    const size_t dash = item.find('-', 1);
    const int lo = parse_int(item.substr(0, dash));
    const int hi = dash == std::string::npos ? lo : parse_int(item.substr(dash + 1));
    if (hi < lo) throw UsageError("descending range '" + item + "'");
    if (lo < 0 || hi >= count)
      throw Error(ErrorKind::partition, "site range '" + item + "' outside 0.." + std::to_string(count - 1));
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  const auto dup = std::adjacent_find(out.begin(), out.end());
  if (dup != out.end()) throw Error(ErrorKind::partition, "site " + std::to_string(*dup) + " listed twice");
  return out;
}

Partition parse_partition(const std::string& spec, const Lattice& lat) {
  Partition p;
  bool seen[4] = {false, false, false, false};
  for (const std::string& raw : split_top(spec, ';')) {
    const std::string block = trim(raw);
    if (block.empty()) continue;
    const size_t eq = block.find('=');
    if (eq == std::string::npos) throw UsageError("partition block '" + block + "' has no '='");
    const std::string key = trim(block.substr(0, eq));
    const std::string val = block.substr(eq + 1);
    int idx = -1;
    if (key == "A") idx = 0;
    if (key == "B") idx = 1;
    if (key == "C") idx = 2;
    if (key == "D") idx = 3;
    if (idx < 0) throw UsageError("unknown partition block '" + key + "'");
    if (seen[idx]) throw UsageError("partition block " + key + " given twice");
    seen[idx] = true;
    Sites s = parse_sites(val, lat);
    (idx == 0 ? p.a : idx == 1 ? p.b : idx == 2 ? p.c : p.d) = std::move(s);
  }
  p.validate(lat.site_count());
  return p;
}

std::string format_sites(const Sites& s, const Lattice& lat) {
  if (lat.kind == Lattice::Kind::ring) return join_ranges(s);
  // runs of consecutive x at fixed (y, orientation), without wrapping
  std::vector<std::string> items;
  std::vector<char> in(lat.site_count(), 0);
  for (int e : s) in[e] = 1;
  for (int o = 0; o < 2; ++o)
    for (int y = 0; y < lat.n; ++y)
      for (int x = 0; x < lat.n;) {
        if (!in[lat.edge(x, y, o)]) {
          ++x;
          continue;
        }
        int x1 = x;
        while (x1 + 1 < lat.n && in[lat.edge(x1 + 1, y, o)]) ++x1;
        items.push_back("rect(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(x1) + "," +
                        std::to_string(y) + "," + (o == 0 ? "h" : "v") + ")");
        x = x1 + 1;
      }
  std::string out;
  for (const auto& it : items) out += (out.empty() ? "" : ",") + it;
  return out;
}

std::string format_partition(const Partition& p, const Lattice& lat) {
  return "A=" + format_sites(p.a, lat) + ";B=" + format_sites(p.b, lat) + ";C=" + format_sites(p.c, lat) +
         ";D=" + format_sites(p.d, lat);
}

// ---------------------------------------------------------------- models

GroupSpec group_from_name(const std::string& name) {
  if (name == "S3") return symmetric_group_s3();
  if (name.size() >= 2 && name[0] == 'Z') {
    const int k = parse_int(name.substr(1));
    if (k < 1) throw Error(ErrorKind::parameter, "cyclic group order must be positive");
    return cyclic_group(k);
  }
  throw UsageError("unknown group '" + name + "' (expected Z<k> or S3)");
}

namespace {

Lattice lattice_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  const int d = j.value("local_dim", 2);
  if (kind == "ring") return Lattice::ring(n, d);
  if (kind == "torus_edges") return Lattice::torus(n, d);
  throw Error(ErrorKind::model, "unknown lattice kind '" + kind + "'");
}

json matrix_to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (long long i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ir = json::array();
    for (long long k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ir.push_back(m(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return json{{"re", re}, {"im", im}};
}

Mat matrix_from_json(const json& j) {
  const json& re = j.at("re");
  const json* im = j.contains("im") ? &j.at("im") : nullptr;
  const long long rows = static_cast<long long>(re.size());
  if (rows == 0) throw Error(ErrorKind::model, "empty term matrix");
  const long long cols = static_cast<long long>(re.at(0).size());
  Mat m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    if (static_cast<long long>(re.at(i).size()) != cols) throw Error(ErrorKind::model, "ragged term matrix");
    for (long long k = 0; k < cols; ++k) {
      const double imv = im ? im->at(i).at(k).get<double>() : 0.0;
      m(i, k) = cplx(re.at(i).at(k).get<double>(), imv);
    }
  }
  return m;
}

}  // namespace

json model_spec_to_json(const ModelSpec& s) {
  return json{{"name", s.builtin}, {"n", s.n}, {"r", s.r}, {"j", s.j},
              {"local_dim", s.d}, {"group", s.group}, {"seed", s.seed}, {"file", s.file}};
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec s;
  s.builtin = j.value("name", s.builtin);
  s.n = j.value("n", s.n);
  s.r = j.value("r", s.r);
  s.j = j.value("j", s.j);
  s.d = j.value("local_dim", s.d);
  s.group = j.value("group", s.group);
  s.seed = j.value("seed", s.seed);
  s.file = j.value("file", s.file);
  return s;
}

Interaction build_model(const ModelSpec& spec) {
  if (spec.builtin == "ising") return ising_ring(spec.n);
  if (spec.builtin == "random") return random_ring(spec.n, spec.r, spec.j, spec.seed, spec.d);
  if (spec.builtin == "qd") return quantum_double(spec.n, group_from_name(spec.group));
  if (spec.builtin == "file") {
    std::ifstream in(spec.file);
    if (!in) throw UsageError("cannot open model file '" + spec.file + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::model, std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(j);
  }
  throw UsageError("unknown builtin model '" + spec.builtin + "'");
}

json model_to_json(const Interaction& phi) {
  json terms = json::array();
  for (const Operator& t : phi.terms) terms.push_back(json{{"support", t.support}, {"matrix", matrix_to_json(t.m)}});
  const bool ring = phi.lattice.kind == Lattice::Kind::ring;
  return json{{"lattice", {{"kind", ring ? "ring" : "torus_edges"}, {"n", phi.lattice.n}, {"local_dim", phi.lattice.d}}},
              {"name", phi.name},
              {"interaction", {{"terms", terms}}}};
}

Interaction model_from_json(const json& j) {
  try {
    const json& in = j.at("interaction");
    if (in.contains("builtin")) {
      ModelSpec s = model_spec_from_json(in.at("builtin"));
      if (j.contains("lattice")) {
        s.n = j.at("lattice").value("n", s.n);
        s.d = j.at("lattice").value("local_dim", s.d);
      }
      if (s.builtin == "file") throw Error(ErrorKind::model, "a builtin model cannot refer to another file");
      return build_model(s);
    }
    const Lattice lat = lattice_from_json(j.at("lattice"));
    std::vector<Operator> terms;
    for (const json& t : in.at("terms")) {
      Operator op;
      op.support = t.at("support").get<Sites>();
      op.m = matrix_from_json(t.at("matrix"));
      terms.push_back(std::move(op));
    }
    return custom_interaction(lat, std::move(terms), j.value("name", std::string("custom")));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::model, std::string("malformed model description: ") + e.what());
  }
}

std::string model_label(const ModelSpec& spec) {
  if (spec.builtin == "ising") return "ising";
  if (spec.builtin == "random") return "random(r=" + std::to_string(spec.r) + ",seed=" + std::to_string(spec.seed) + ")";
  if (spec.builtin == "qd") return "qd(" + spec.group + ")";
  return "file(" + spec.file + ")";
}

// ---------------------------------------------------------------- config

json config_to_json(const RunConfig& c) {
  return json{{"command", c.command},
              {"model", model_spec_to_json(c.model)},
              {"beta", c.beta},
              {"partition", c.partition},
              {"region", c.region},
              {"method", c.method},
              {"family", c.family},
              {"profile", c.profile},
              {"mu", c.mu},
              {"eta", c.eta},
              {"group_order", c.group_order},
              {"eta_iterations", c.eta_iterations},
              {"times", c.times},
              {"solver",
               {{"tol", c.solver.tol},
                {"dense_max", c.solver.dense_max},
                {"force_iterative", c.solver.force_iterative},
                {"seed", c.solver.seed}}},
              {"grid", c.grid},
              {"task", c.task},
              {"jobs", c.jobs},
              {"record_timing", c.record_timing},
              {"suite", c.suite}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    c.command = j.value("command", c.command);
    if (j.contains("model")) c.model = model_spec_from_json(j.at("model"));
    c.beta = j.value("beta", c.beta);
    c.partition = j.value("partition", c.partition);
    c.region = j.value("region", c.region);
    c.method = j.value("method", c.method);
    c.family = j.value("family", c.family);
    c.profile = j.value("profile", c.profile);
    c.mu = j.value("mu", c.mu);
    c.eta = j.value("eta", c.eta);
    c.group_order = j.value("group_order", c.group_order);
    c.eta_iterations = j.value("eta_iterations", c.eta_iterations);
    c.times = j.value("times", c.times);
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      c.solver.tol = s.value("tol", c.solver.tol);
      c.solver.dense_max = s.value("dense_max", c.solver.dense_max);
      c.solver.force_iterative = s.value("force_iterative", c.solver.force_iterative);
      c.solver.seed = s.value("seed", c.solver.seed);
    }
    c.grid = j.value("grid", c.grid);
    c.task = j.value("task", c.task);
    c.jobs = j.value("jobs", c.jobs);
    c.record_timing = j.value("record_timing", c.record_timing);
    c.suite = j.value("suite", c.suite);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------- csv

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string csv_header() { return "model,n,beta,quantity,partition,value,method,runtime_ms,seed,status"; }

std::string csv_line(const ResultRow& r) {
  std::string out;
  out += csv_field(r.model) + ",";
  out += std::to_string(r.n) + ",";
  out += format_number(r.beta) + ",";
  out += csv_field(r.quantity) + ",";
  out += csv_field(r.partition) + ",";
  out += format_number(r.value) + ",";
  out += csv_field(r.method) + ",";
  out += (r.runtime_ms ? format_number(*r.runtime_ms) : std::string()) + ",";
  out += std::to_string(r.seed) + ",";
  out += csv_field(r.status);
  return out;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const ResultRow& r : rows) out += csv_line(r) + "\n";
  return out;
}

// ---------------------------------------------------------------- grid

GridAxis parse_grid(const std::string& spec) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("grid '" + spec + "' must look like name=values");
  GridAxis g;
  g.name = trim(spec.substr(0, eq));
  if (g.name.empty()) throw UsageError("grid '" + spec + "' has no parameter name");
  const std::string rest = trim(spec.substr(eq + 1));
  if (rest.empty()) return g;
  if (rest.find(':') != std::string::npos) {
    const auto parts = split_top(rest, ':');
    if (parts.size() != 3) throw UsageError("range grid must be start:stop:step");
    const double a = parse_double(parts[0]), b = parse_double(parts[1]), h = parse_double(parts[2]);
    if (!(h > 0)) throw UsageError("grid step must be positive");
    if (b < a) throw UsageError("grid stop is below start");
    // count from the rounded number of steps so that the inclusive endpoint survives rounding
    const long long count = static_cast<long long>(std::floor((b - a) / h + 1e-9)) + 1;
    if (count > 1000000) throw UsageError("grid has too many points");
    for (long long k = 0; k < count; ++k) g.values.push_back(a + static_cast<double>(k) * h);
    return g;
  }
  for (const std::string& v : split_top(rest, ',')) g.values.push_back(parse_double(v));
  return g;
}

void apply_grid_value(RunConfig& c, const std::string& name, double value) {
  auto as_int = [&](const char* what) {
    if (value != std::floor(value)) throw UsageError(std::string("grid parameter ") + what + " needs integer values");
    return static_cast<long long>(value);
  };
  if (name == "beta") c.beta = value;
  else if (name == "n") c.model.n = static_cast<int>(as_int("n"));
  else if (name == "r") c.model.r = static_cast<int>(as_int("r"));
  else if (name == "j") c.model.j = value;
  else if (name == "seed") c.model.seed = static_cast<std::uint64_t>(as_int("seed"));
  else if (name == "mu") c.mu = as_int("mu");
  else if (name == "eta") c.eta = value;
  else if (name == "group_order") c.group_order = static_cast<int>(as_int("group_order"));
  else throw UsageError("unknown grid parameter '" + name + "'");
}

}  // namespace pgap::cli
