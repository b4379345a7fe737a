#include "fraclab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fraclab/errors.hpp"
#include "format.hpp"
#include "json.hpp"

namespace fraclab {
namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

std::string indexed(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

// Typed view of one JSON object; every key read is marked so leftovers can be rejected.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw SchemaError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_number()) throw SchemaError(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(path(key), "expected a finite number");
    return x;
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_number_integer()) throw SchemaError(path(key), "expected an integer");
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      throw SchemaError(path(key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) throw SchemaError(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_string()) throw SchemaError(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_array()) throw SchemaError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw SchemaError(indexed(path(key), i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw SchemaError(path(item.key()), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string fmt(double x) { return detail::shortest(x); }

struct GridDoc {
  int dim = 1;
  std::vector<Interval> bounds{{-1.0, 1.0}};
  int n = 256;
};

GridDoc read_grid(const json& node) {
  Section sec(node, "grid");
  GridDoc g;
  g.dim = static_cast<int>(sec.integer("dim", 1));
  if (g.dim != 1 && g.dim != 2) throw RangeError("grid.dim: must be 1 or 2, got " + std::to_string(g.dim));
  g.n = static_cast<int>(sec.integer("n", 256));
  if (g.n < 3) throw RangeError("grid.n: need at least 3 interior nodes per axis, got " + std::to_string(g.n));
  g.bounds.assign(g.dim, Interval{-1.0, 1.0});
  if (sec.has("bounds")) {
    const auto& b = sec.raw("bounds");
    const std::string path = sec.path("bounds");
    if (!b.is_array()) throw SchemaError(path, "expected [[lo, hi], ...]");
    // A bare [lo, hi] is accepted for one-dimensional grids.
    const bool flat = b.size() == 2 && b[0].is_number() && b[1].is_number();
    if (flat) {
      if (g.dim != 1) throw SchemaError(path, "expected one [lo, hi] pair per axis");
      g.bounds[0] = {b[0].get<double>(), b[1].get<double>()};
    } else {
      if (b.size() != static_cast<std::size_t>(g.dim)) {
        throw SchemaError(path, "expected " + std::to_string(g.dim) + " [lo, hi] pairs");
      }
      for (std::size_t k = 0; k < b.size(); ++k) {
        const auto& pair = b[k];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          throw SchemaError(indexed(path, k), "expected [lo, hi]");
        }
        g.bounds[k] = {pair[0].get<double>(), pair[1].get<double>()};
      }
    }
    for (std::size_t k = 0; k < g.bounds.size(); ++k) {
      if (!(g.bounds[k].hi > g.bounds[k].lo)) throw RangeError(indexed(path, k) + ": need lo < hi");
    }
  }
  sec.reject_unknown();
  return g;
}

GridSpec make_grid(const GridDoc& g) { return GridSpec(g.dim, g.bounds, g.n); }

struct PotentialDoc {
  std::string kind = "constant";
  double value = 1.0;
  double base = 1.0;
  double curvature = 0.0;
};

PotentialDoc read_potential(const json& node, const std::string& path) {
  Section sec(node, path);
  PotentialDoc v;
  v.kind = sec.string("kind", "constant");
  if (v.kind == "constant") {
    v.value = sec.number("value", 1.0);
    if (!(v.value > 0.0)) {
      throw RangeError(sec.path("value") + ": assumption (V) requires inf V > 0, got " + fmt(v.value));
    }
  } else if (v.kind == "quadratic") {
    v.base = sec.number("base", 1.0);
    v.curvature = sec.number("curvature", 0.0);
    if (!(v.base > 0.0) || v.curvature < 0.0) {
      throw RangeError(path + ": assumption (V) requires inf V > 0 (base > 0, curvature >= 0)");
    }
  } else {
    throw SchemaError(sec.path("kind"), "unknown potential kind '" + v.kind + "' (constant, quadratic)");
  }
  sec.reject_unknown();
  return v;
}

struct NonlinearityDoc {
  std::string kind = "power";
  std::vector<std::pair<double, double>> terms{{4.0, 1.0}};  // (p, lambda)
};

void check_term(double p, double lambda, const std::string& path, int dim) {
  const double upper = growth_window_upper(dim);
  if (!(p > 2.0 && p < upper)) {
    throw RangeError(path + ".p: " + fmt(p) + " outside the growth window (2, 2d/(d-1)) for d = " +
                     std::to_string(dim));
  }
  if (!(lambda > 0.0)) throw RangeError(path + ".lambda: must be positive, got " + fmt(lambda));
}

NonlinearityDoc read_nonlinearity(const json& node, const std::string& path, int dim) {
  Section sec(node, path);
  NonlinearityDoc f;
  f.kind = sec.string("kind", "power");
  f.terms.clear();
  if (f.kind == "power") {
    const double p = sec.number("p", 4.0);
    const double lambda = sec.number("lambda", 1.0);
    check_term(p, lambda, path, dim);
    f.terms.emplace_back(p, lambda);
  } else if (f.kind == "power_sum") {
    if (!sec.has("terms")) throw SchemaError(sec.path("terms"), "required for kind power_sum");
    const auto& terms = sec.raw("terms");
    if (!terms.is_array() || terms.empty()) throw SchemaError(sec.path("terms"), "expected a nonempty array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tp = indexed(sec.path("terms"), i);
      Section term(terms[i], tp);
      const double p = term.number("p", 4.0);
      const double lambda = term.number("lambda", 1.0);
      term.reject_unknown();
      check_term(p, lambda, tp, dim);
      f.terms.emplace_back(p, lambda);
    }
  } else {
    throw SchemaError(sec.path("kind"), "unknown nonlinearity kind '" + f.kind + "' (power, power_sum)");
  }
  sec.reject_unknown();
  return f;
}

InitialGuess parse_init(const std::string& text, const std::string& path) {
  if (text == "bump") return InitialGuess::bump;
  if (text == "random") return InitialGuess::random;
  throw SchemaError(path, "expected \"bump\" or \"random\"");
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("<root>", std::string("malformed JSON: ") + e.what());
  }
  Section root(doc, "");

  ExperimentConfig cfg;

  GridDoc grid_doc;
  if (root.has("grid")) grid_doc = read_grid(root.raw("grid"));
  cfg.grid = make_grid(grid_doc);

  PotentialDoc v_doc;
  NonlinearityDoc f_doc;
  if (root.has("model")) {
    Section model(root.raw("model"), "model");
    if (model.has("V")) v_doc = read_potential(model.raw("V"), "model.V");
    if (model.has("f")) f_doc = read_nonlinearity(model.raw("f"), "model.f", grid_doc.dim);
    model.reject_unknown();
  }
  cfg.V = v_doc.kind == "constant" ? Potential::constant(v_doc.value)
                                   : Potential::quadratic(v_doc.base, v_doc.curvature, cfg.grid);
  if (f_doc.kind == "power") {
    cfg.f = Nonlinearity::power(f_doc.terms[0].first, f_doc.terms[0].second);
  } else {
    std::vector<PowerTerm> terms;
    for (const auto& [p, lambda] : f_doc.terms) terms.push_back(PowerTerm{p, lambda, {}});
    cfg.f = Nonlinearity::power_sum(std::move(terms));
  }

  std::string init_text = "bump";
  if (root.has("solver")) {
    Section sec(root.raw("solver"), "solver");
    auto& s = cfg.solver;
    cfg.solve_s = sec.number("s", 1.0);
    if (!(cfg.solve_s > 0.5 && cfg.solve_s <= 1.0)) {
      throw RangeError(sec.path("s") + ": " + fmt(cfg.solve_s) + " outside the window 1/2<s<1 (or s = 1)");
    }
    s.tol_residual = sec.number("tol_residual", s.tol_residual);
    s.tol_nehari = sec.number("tol_nehari", s.tol_nehari);
    s.max_iters = static_cast<int>(sec.integer("max_iters", s.max_iters));
    s.shrink = sec.number("shrink", s.shrink);
    s.sufficient_decrease = sec.number("sufficient_decrease", s.sufficient_decrease);
    s.newton_threshold = sec.number("newton_threshold", s.newton_threshold);
    init_text = sec.string("init", init_text);
    s.init = parse_init(init_text, sec.path("init"));
    s.continuation = sec.boolean("continuation", s.continuation);
    s.seed = sec.unsigned_integer("seed", s.seed);
    sec.reject_unknown();
    if (!(s.tol_residual > 0.0)) throw RangeError(sec.path("tol_residual") + ": must be positive");
    if (!(s.tol_nehari > 0.0)) throw RangeError(sec.path("tol_nehari") + ": must be positive");
    if (s.max_iters < 1) throw RangeError(sec.path("max_iters") + ": must be >= 1");
    if (!(s.shrink > 0.0 && s.shrink < 1.0)) throw RangeError(sec.path("shrink") + ": must lie in (0, 1)");
    if (!(s.sufficient_decrease > 0.0 && s.sufficient_decrease < 1.0)) {
      throw RangeError(sec.path("sufficient_decrease") + ": must lie in (0, 1)");
    }
    if (!(s.newton_threshold > 0.0)) throw RangeError(sec.path("newton_threshold") + ": must be positive");
  }

  auto& sw = cfg.sweep;
  sw.s_grid = {0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  if (root.has("sweep")) {
    Section sec(root.raw("sweep"), "sweep");
    sw.s_grid = sec.numbers("s_grid", sw.s_grid);
    sw.include_local = sec.boolean("include_local", sw.include_local);
    sw.nu_list = sec.numbers("nu_list", sw.nu_list);
    sw.N = static_cast<int>(sec.integer("N", sw.N));
    sw.warm_start = sec.boolean("warm_start", cfg.solver.continuation);
    sw.allow_partial = sec.boolean("allow_partial", sw.allow_partial);
    sw.threads = static_cast<int>(sec.integer("threads", sw.threads));
    sec.reject_unknown();
    if (sw.s_grid.empty()) throw RangeError(sec.path("s_grid") + ": must not be empty");
    for (std::size_t i = 0; i < sw.s_grid.size(); ++i) {
      const double s = sw.s_grid[i];
      if (!(s > 0.5 && s < 1.0)) {
        throw RangeError(indexed(sec.path("s_grid"), i) + ": s = " + fmt(s) + " outside the window 1/2<s<1");
      }
      if (i > 0 && !(s > sw.s_grid[i - 1])) {
        throw RangeError(indexed(sec.path("s_grid"), i) + ": s_grid must be strictly ascending");
      }
    }
    if (sw.N < 2) throw RangeError(sec.path("N") + ": must be >= 2");
    if (sw.threads < 0) throw RangeError(sec.path("threads") + ": must be >= 0");
    const double nu_max = 2.0 * sw.N / (sw.N - 1.0);
    for (std::size_t i = 0; i < sw.nu_list.size(); ++i) {
      const double nu = sw.nu_list[i];
      if (!(nu >= 2.0 && nu < nu_max)) {
        throw RangeError(indexed(sec.path("nu_list"), i) + ": nu = " + fmt(nu) + " outside [2, 2N/(N-1)) = [2, " +
                         fmt(nu_max) + ")");
      }
    }
  } else {
    sw.warm_start = cfg.solver.continuation;
  }
  sw.grid = cfg.grid;
  sw.V = cfg.V;
  sw.f = cfg.f;
  sw.solver = cfg.solver;

  if (root.has("output")) {
    Section sec(root.raw("output"), "output");
    cfg.output.dir = sec.string("dir", cfg.output.dir);
    if (sec.has("formats")) {
      const auto& fm = sec.raw("formats");
      if (!fm.is_array()) throw SchemaError(sec.path("formats"), "expected an array of strings");
      cfg.output.formats.clear();
      for (std::size_t i = 0; i < fm.size(); ++i) {
        const std::string p = indexed(sec.path("formats"), i);
        if (!fm[i].is_string()) throw SchemaError(p, "expected a string");
        const auto name = fm[i].get<std::string>();
        if (name != "csv" && name != "json") throw SchemaError(p, "unknown format '" + name + "' (csv, json)");
        cfg.output.formats.push_back(name);
      }
    }
    sec.reject_unknown();
  }
  root.reject_unknown();

  ordered canon;
  auto& g = canon["grid"];
  g["dim"] = grid_doc.dim;
  g["bounds"] = ordered::array();
  for (const auto& b : grid_doc.bounds) g["bounds"].push_back({b.lo, b.hi});
  g["n"] = grid_doc.n;
  auto& V = canon["model"]["V"];
  V["kind"] = v_doc.kind;
  if (v_doc.kind == "constant") {
    V["value"] = v_doc.value;
  } else {
    V["base"] = v_doc.base;
    V["curvature"] = v_doc.curvature;
  }
  auto& f = canon["model"]["f"];
  f["kind"] = f_doc.kind;
  if (f_doc.kind == "power") {
    f["p"] = f_doc.terms[0].first;
    f["lambda"] = f_doc.terms[0].second;
  } else {
    f["terms"] = ordered::array();
    for (const auto& [p, lambda] : f_doc.terms) f["terms"].push_back({{"p", p}, {"lambda", lambda}});
  }
  const auto& s = cfg.solver;
  canon["solver"] = {{"s", cfg.solve_s},
                     {"tol_residual", s.tol_residual},
                     {"tol_nehari", s.tol_nehari},
                     {"max_iters", s.max_iters},
                     {"shrink", s.shrink},
                     {"sufficient_decrease", s.sufficient_decrease},
                     {"newton_threshold", s.newton_threshold},
                     {"init", init_text},
                     {"continuation", s.continuation},
                     {"seed", s.seed}};
  canon["sweep"] = {{"s_grid", sw.s_grid},       {"include_local", sw.include_local}, {"nu_list", sw.nu_list},
                    {"N", sw.N},                 {"warm_start", sw.warm_start},       {"allow_partial", sw.allow_partial},
                    {"threads", sw.threads}};
  canon["output"] = {{"dir", cfg.output.dir}, {"formats", cfg.output.formats}};
  cfg.canonical_json = canon.dump();
  cfg.hash = fnv1a_hex(cfg.canonical_json);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config file not found: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace fraclab
