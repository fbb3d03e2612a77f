#include "bergweight/lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "bergweight/toric.hpp"

namespace bergweight {

namespace {

const std::vector<std::string> kTopLevelKeys = {"experiment", "k_grid", "filtration", "metric", "metric1", "g",
                                                "symbol", "p_list", "points", "tolerances", "params", "output"};

Json ex1() { return {{"kind", "capped"}, {"mode", "scaled"}, {"d", 1}, {"scale", 1.0}}; }
Json ex2() { return {{"kind", "capped"}, {"mode", "hard"}, {"d", 2}, {"cap", 1.0}}; }
Json fs() { return {{"type", "constant"}, {"data", 0.0}}; }
Json dyadic() { return Json::array({8, 16, 32, 64}); }

Json range(int lo, int hi) {
  Json a = Json::array();
  for (int k = lo; k <= hi; ++k) a.push_back(k);
  return a;
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> c;
  auto add = [&c](std::string id, std::string tag, std::string claim, Json cfg) {
    cfg["experiment"] = id;
    c.push_back({std::move(id), std::move(tag), std::move(claim), std::move(cfg)});
  };
  add("tian", "bergman-density-limit", "B_k/k tends to 1 uniformly on P^1 for a smooth positive metric.",
      {{"k_grid", dyadic()},
       {"metric", {{"type", "moment-linear"}, {"data", {{"c0", 0.0}, {"c1", 0.3}}}}},
       {"points", {{"count", 50}, {"seed", 1}}},
       {"tolerances", {{"trend_ratio", 0.5}, {"exact", 1e-10}}}});
  add("example1", "example-non-finitely-generated",
      "Filtration whose weight is k on every monomial except y^k: closed forms for the weight operator, the "
      "weighted Bergman kernel and the Fubini-Study ratio along the ray, and the pointwise limit with one "
      "exceptional point.",
      {{"k_grid", range(2, 32)},
       {"filtration", ex1()},
       {"metric", fs()},
       {"points", {{"count", 25}, {"seed", 7}}},
       {"tolerances", {{"exact", 1e-10}, {"limit", 0.01}}},
       {"params",
        {{"t_list", {0.5, 1.0}}, {"limit_k", 256}, {"limit_s", {0.0, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}},
         {"off_exceptional_min_s", 0.05}}}});
  add("example2", "example-hard-cap",
      "Weights min(i, k) on O(2): the symbol is min(2s, 1) and the weighted Bergman kernel integrates to the "
      "trace of g(A/k).",
      {{"k_grid", range(1, 32)},
       {"filtration", ex2()},
       {"metric", fs()},
       {"g", Json::array({{{"type", "identity"}}, {{"type", "min"}, {"c", 0.7}}})},
       {"tolerances", {{"symbol", 1e-8}, {"trace", 1e-8}}},
       {"params", {{"symbol_grid", 200}, {"symbol_degree", kSymbolDegree}}}});
  add("weight-toeplitz", "weight-operator-toeplitz",
      "A(F_k, Hilb_k)/k approaches the Toeplitz operator of the filtration symbol in Schatten norms, and in "
      "operator norm for finitely generated filtrations.",
      {{"k_grid", dyadic()},
       {"filtration", ex2()},
       {"metric", fs()},
       {"p_list", Json::array({"inf"})},
       {"tolerances", {{"trend_ratio", 0.5}}},
       {"params", {{"monotone", true}}}});
  add("transfer-toeplitz", "transfer-operator-toeplitz",
      "The transfer operator between Hilb_k(h0) and Hilb_k(h1), divided by k, approaches the Toeplitz operator "
      "of the geodesic velocity.",
      {{"k_grid", dyadic()},
       {"metric", fs()},
       {"metric1", {{"type", "moment-polynomial"}, {"data", {{"coefficients", {0.0, 0.5, -0.5}}}}}},
       {"tolerances", {{"exact", 1e-9}, {"trend_ratio", 0.5}}},
       {"params", {{"shift", 0.3}, {"volume", "fixed-background"}}}});
  add("schatten-limit", "toeplitz-schatten-limit",
      "Normalised Schatten norms of T_{f,k} converge to the L^p norm of f against the normalised volume.",
      {{"k_grid", dyadic()},
       {"metric", fs()},
       {"symbol", {{"type", "moment-linear"}, {"data", {{"c0", 0.0}, {"c1", 1.0}}}}},
       {"p_list", Json::array({1, 2})},
       {"tolerances", {{"trend_ratio", 0.5}, {"zero_floor", 1e-12}}}});
  add("product-symbol", "toeplitz-product", "T_{f,k} T_{g,k} - T_{fg,k} tends to 0 in operator norm.",
      {{"k_grid", dyadic()},
       {"metric", fs()},
       {"tolerances", {{"trend_ratio", 0.5}}},
       {"params",
        {{"f", {{"type", "moment-linear"}, {"data", {{"c0", 0.0}, {"c1", 1.0}}}}},
         {"h", {{"type", "moment-linear"}, {"data", {{"c0", 1.0}, {"c1", -1.0}}}}}}}});
  add("functional-calculus", "functional-calculus",
      "min(A/k, c) is the weight operator of the capped filtration, and g(T_{f,k}) - T_{g(f),k} tends to 0.",
      {{"k_grid", dyadic()},
       {"filtration", ex2()},
       {"metric", fs()},
       {"g", {{"type", "min"}, {"c", 0.7}}},
       {"symbol", {{"type", "moment-linear"}, {"data", {{"c0", 0.0}, {"c1", 1.0}}}}},
       {"tolerances", {{"exact", 1e-12}, {"trend_ratio", 0.5}}},
       {"params", {{"trend_g", {{"type", "power"}, {"p", 2.0}}}}}});
  add("superadditivity", "kernel-superadditivity",
      "B^F_k + B^F_l - B^F_{k+l} is at most C log(k+l); C is fitted on small degrees and checked on the rest.",
      {{"k_grid", range(8, 32)},
       {"metric", fs()},
       {"points", {{"count", 50}, {"seed", 3}}},
       {"params", {{"filtrations", Json::array({ex1(), ex2()})}, {"fit_max", 16}}}});
  add("asymptotic-isometry", "multiplication-isometry",
      "The quotient of Hilb_k x Hilb_l under multiplication, scaled by (kl/(k+l))^{1/2}, is close to Hilb_{k+l} "
      "with defect C (1/k + 1/l).",
      {{"k_grid", dyadic()},
       {"metric", fs()},
       {"tolerances", {{"stability", 2.0}, {"ratio_lo", 0.8}, {"ratio_hi", 1.2}}},
       {"params", {{"range_min_k", 16}}}});
  add("jumping-measure", "jumping-measure-limit",
      "The spectral measure of A/k equals the jumping measure, which converges to the push-forward of the "
      "volume by the symbol; vol(F) is the limit of the mean jumping number.",
      {{"k_grid", Json::array({8, 16, 32, 64, 128, 256})},
       {"filtration", ex2()},
       {"metric", fs()},
       {"tolerances", {{"exact", 1e-12}, {"kolmogorov", 0.05}, {"vol_factor", 2.0}}},
       {"params", {{"vol_k_max", 128}}}});
  add("cholesky-stability", "cholesky-adapted-stability",
      "Under the smallness hypothesis the weight operators of two nearby norms differ by at most "
      "16 C (1 + 2 ceil(log2 dim)) ||F||.",
      {{"k_grid", range(2, 16)},
       {"points", {{"count", 1000}, {"seed", 11}}},
       {"params", {{"max_weight", 3}}}});
  add("diagonal-sharpness", "diagonal-kernel-sharpness",
      "Operators with unit Toeplitz-scale norms but degenerate diagonal kernels: a rank-one spike and an "
      "alternating sign operator.",
      {{"k_grid", dyadic()},
       {"metric", fs()},
       {"p_list", Json::array({1})},
       {"points", {{"count", 25}, {"seed", 5}}},
       {"tolerances", {{"exact", 1e-10}, {"trend_ratio", 0.25}}},
       {"params", {{"sup_grid", 2001}}}});
  return c;
}

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::ConfigInvalid, where + ": " + what);
}

void merge_objects(Json& dst, const Json& src) {
  for (auto it = src.begin(); it != src.end(); ++it) dst[it.key()] = it.value();
}

std::string csv_cell(const Cell& c) {
  if (const double* v = std::get_if<double>(&c)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
  }
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

// Heuristic source location of a JSON pointer: the line of the last key's
// first occurrence after its parents.
int pointer_line(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  std::size_t start = 1;
  int found = 0;
  while (start <= pointer.size()) {
    const std::size_t end = pointer.find('/', start);
    const std::string token = pointer.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!token.empty() && !std::all_of(token.begin(), token.end(), ::isdigit)) {
      const std::size_t p = text.find("\"" + token + "\"", pos);
      if (p == std::string::npos) break;
      pos = p;
      found = 1;
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (!found) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigInvalid, path.string() + ": cannot open");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json parse_text(const std::string& text, const std::string& name) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto upto = text.begin() + static_cast<std::ptrdiff_t>(byte == 0 ? 0 : byte - 1);
    const int line = 1 + static_cast<int>(std::count(text.begin(), upto, '\n'));
    const std::size_t nl = text.rfind('\n', byte == 0 ? 0 : byte - 1);
    const std::size_t col = nl == std::string::npos ? byte : byte - nl - 1;
    fail(ErrorCode::ConfigInvalid,
         name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) fail(ErrorCode::InvalidParams, "table '" + name + "' row has wrong width");
  rows.push_back(std::move(row));
}

bool ExperimentResult::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const Verdict* ExperimentResult::verdict(const std::string& id) const {
  for (const Verdict& v : verdicts)
    if (v.id == id) return &v;
  return nullptr;
}

const Table* ExperimentResult::table(const std::string& name) const {
  for (const Table& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

const std::vector<CatalogEntry>& list_experiments() {
  static const std::vector<CatalogEntry> catalog = build_catalog();
  return catalog;
}

const CatalogEntry* find_experiment(const std::string& id) {
  for (const CatalogEntry& e : list_experiments())
    if (e.id == id) return &e;
  return nullptr;
}

Json read_json_file(const std::filesystem::path& path) { return parse_text(read_text(path), path.string()); }

ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) bad("/", "config must be a JSON object");
  if (!doc.contains("experiment") || !doc.at("experiment").is_string()) bad("/experiment", "missing experiment id");
  const std::string id = doc.at("experiment").get<std::string>();
  const CatalogEntry* entry = find_experiment(id);
  if (!entry) fail(ErrorCode::ExperimentUnknown, "unknown experiment '" + id + "'");
  if (!doc.contains("k_grid")) bad("/k_grid", "missing k_grid");

  Json eff = entry->default_config;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const bool mergeable = it.key() == "tolerances" || it.key() == "params" || it.key() == "points";
    if (mergeable && it.value().is_object() && eff.contains(it.key()) && eff.at(it.key()).is_object())
      merge_objects(eff[it.key()], it.value());
    else
      eff[it.key()] = it.value();
  }

  ExperimentConfig c;
  c.experiment = id;
  c.document = eff;

  const Json& kg = eff.at("k_grid");
  if (!kg.is_array() || kg.empty()) bad("/k_grid", "k_grid must be a nonempty array");
  for (std::size_t i = 0; i < kg.size(); ++i) {
    const std::string w = "/k_grid/" + std::to_string(i);
    if (!kg[i].is_number_integer() || kg[i].get<long long>() < 1 || kg[i].get<long long>() > 100000)
      bad(w, "degrees must be integers in [1, 100000]");
    const int k = kg[i].get<int>();
    if (!c.k_grid.empty() && k <= c.k_grid.back()) bad(w, "k_grid must be strictly ascending");
    c.k_grid.push_back(k);
  }

  auto opt = [&eff](const char* key) { return eff.contains(key) ? eff.at(key) : Json(); };
  c.filtration = opt("filtration");
  c.metric = opt("metric");
  c.metric1 = opt("metric1");
  c.g = opt("g");
  c.symbol = opt("symbol");
  if (!c.filtration.is_null()) parse_filtration(c.filtration, "/filtration");
  if (!c.metric.is_null()) parse_metric(c.metric, "/metric");
  if (!c.metric1.is_null()) parse_metric(c.metric1, "/metric1");
  if (!c.symbol.is_null()) parse_symbol(c.symbol, "/symbol");
  if (c.g.is_array()) {
    if (c.g.empty()) bad("/g", "g list must be nonempty");
    for (std::size_t i = 0; i < c.g.size(); ++i) parse_g(c.g[i], "/g/" + std::to_string(i));
  } else if (!c.g.is_null()) {
    parse_g(c.g, "/g");
  }

  if (eff.contains("p_list")) {
    const Json& pl = eff.at("p_list");
    if (!pl.is_array() || pl.empty()) bad("/p_list", "p_list must be a nonempty array");
    for (std::size_t i = 0; i < pl.size(); ++i) c.p_list.push_back(parse_schatten_p(pl[i], "/p_list/" + std::to_string(i)));
  }

  if (eff.contains("points")) {
    const Json& pts = eff.at("points");
    if (!pts.is_object()) bad("/points", "expected {\"count\", \"seed\"}");
    if (pts.contains("count")) {
      if (!pts.at("count").is_number_integer() || pts.at("count").get<long long>() < 1)
        bad("/points/count", "count must be a positive integer");
      c.points.count = pts.at("count").get<int>();
    }
    if (pts.contains("seed")) {
      const Json& seed = pts.at("seed");
      if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
        bad("/points/seed", "seed must be a nonnegative integer");
      c.points.seed = seed.get<std::uint64_t>();
    }
  }

  if (eff.contains("tolerances")) {
    const Json& tol = eff.at("tolerances");
    if (!tol.is_object()) bad("/tolerances", "expected an object of numbers");
    for (auto it = tol.begin(); it != tol.end(); ++it) {
      if (!it.value().is_number() || !(it.value().get<double>() >= 0.0))
        bad("/tolerances/" + it.key(), "tolerances must be nonnegative numbers");
      c.tolerances[it.key()] = it.value().get<double>();
    }
  }
  if (eff.contains("params")) {
    if (!eff.at("params").is_object()) bad("/params", "expected an object");
    c.params = eff.at("params");
  }
  if (eff.contains("output")) {
    if (!eff.at("output").is_string()) bad("/output", "expected a path string");
    c.output = eff.at("output").get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const Json doc = parse_text(text, path.string());
  try {
    return parse_config(doc);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigInvalid) throw;
    std::string msg = e.message();
    const int line = pointer_line(text, msg.substr(0, msg.find(':')));
    const std::string prefix = line > 0 ? path.string() + ":" + std::to_string(line) + ": " : path.string() + ": ";
    fail(ErrorCode::ConfigInvalid, prefix + msg);
  }
}

namespace {

void audit_filtrations(const Json& doc, const std::string& where, Diagnostics& d) {
  if (doc.is_null()) return;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) audit_filtrations(doc[i], where + "/" + std::to_string(i), d);
    return;
  }
  try {
    const RingFiltration f = parse_filtration(doc, where);
    const int depth = f.max_degree() ? std::min(8, *f.max_degree()) : 8;
    const SubmultiplicativityAudit a = audit_submultiplicativity(f, depth);
    if (!a.ok)
      d.warnings.push_back(where + ": filtration is not submultiplicative; audit of " +
                           std::to_string(a.pairs_checked) + " products up to degree " + std::to_string(depth) +
                           " found " + a.first_violation);
  } catch (const Error& e) {
    d.errors.push_back(e.message());
  }
}

void diagnose(const Json& doc, Diagnostics& d, const std::string& text, const std::string& name) {
  auto located = [&](const std::string& msg) {
    if (text.empty()) return msg;
    const std::size_t sep = msg.find(": ");
    const std::string body = msg.rfind('/', 0) == 0 || sep == std::string::npos ? msg : msg.substr(sep + 2);
    const int line = pointer_line(text, body.substr(0, body.find(':')));
    return line > 0 ? name + ":" + std::to_string(line) + ": " + msg : name + ": " + msg;
  };
  if (doc.is_object())
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (std::find(kTopLevelKeys.begin(), kTopLevelKeys.end(), it.key()) == kTopLevelKeys.end())
        d.warnings.push_back(located("/" + it.key() + ": unknown key ignored"));
  try {
    const ExperimentConfig c = parse_config(doc);
    Diagnostics sub;
    audit_filtrations(c.filtration, "/filtration", sub);
    if (c.params.contains("filtrations")) audit_filtrations(c.params.at("filtrations"), "/params/filtrations", sub);
    for (const std::string& w : sub.warnings) d.warnings.push_back(located(w));
    for (const std::string& e : sub.errors) d.errors.push_back(located(e));
  } catch (const Error& e) {
    d.errors.push_back(located(e.message()));
  }
}

}  // namespace

Diagnostics validate_document(const Json& doc) {
  Diagnostics d;
  diagnose(doc, d, "", "");
  return d;
}

Diagnostics validate_config(const std::filesystem::path& path) {
  Diagnostics d;
  std::string text;
  try {
    text = read_text(path);
    diagnose(parse_text(text, path.string()), d, text, path.string());
  } catch (const Error& e) {
    d.errors.push_back(e.message());
  }
  return d;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const CatalogEntry* entry = find_experiment(config.experiment);
  if (!entry) fail(ErrorCode::ExperimentUnknown, "unknown experiment '" + config.experiment + "'");
  ExperimentConfig cfg = config;
  if (options.seed) {
    cfg.points.seed = *options.seed;
    cfg.document["points"]["seed"] = *options.seed;
  }
  ExperimentResult r;
  r.experiment = cfg.experiment;
  r.tag = entry->tag;
  r.config = cfg.document;
  r.seed = cfg.points.seed;
  r.threads = std::max(1, options.threads);
  const auto t0 = std::chrono::steady_clock::now();
  lab::Context ctx{cfg, r.threads, r};
  try {
    lab::experiment_registry().at(cfg.experiment)(ctx);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    fail(e.code(), cfg.experiment + ": " + e.message());
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t j = 0; j < t.columns.size(); ++j) out += (j ? "," : "") + csv_cell(t.columns[j]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + csv_cell(row[j]);
    out += "\n";
  }
  return out;
}

Json result_json(const ExperimentResult& r) {
  Json j;
  j["experiment"] = r.experiment;
  j["tag"] = r.tag;
  j["seed"] = r.seed;
  j["config"] = r.config;
  j["passed"] = r.passed();
  Json v = Json::array();
  for (const Verdict& x : r.verdicts)
    v.push_back({{"id", x.id},
                 {"tag", r.tag},
                 {"pass", x.pass},
                 {"measured", number_json(x.measured)},
                 {"threshold", number_json(x.threshold)},
                 {"relation", x.relation}});
  j["verdicts"] = v;
  Json t = Json::array();
  for (const Table& x : r.tables)
    t.push_back({{"name", x.name}, {"file", x.name + ".csv"}, {"columns", x.columns}, {"rows", x.rows.size()}});
  j["tables"] = t;
  j["warnings"] = r.warnings;
  j["runtime"] = {{"wall_seconds", r.wall_seconds}, {"threads", r.threads}};
  return j;
}

void write_result(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "result.json");
    out << result_json(r).dump(2) << "\n";
    if (!out) fail(ErrorCode::Numerical, "cannot write " + (dir / "result.json").string());
  }
  for (const Table& t : r.tables) {
    std::ofstream out(dir / (t.name + ".csv"));
    out << table_csv(t);
    if (!out) fail(ErrorCode::Numerical, "cannot write " + (dir / (t.name + ".csv")).string());
  }
}

int default_threads() {
  if (const char* env = std::getenv("BERGWEIGHT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1 && n <= 1024) return static_cast<int>(n);
  }
  return 1;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace lab {

Verdict trend_verdict(const std::string& id, const std::vector<double>& values, double ratio, bool monotone,
                      double floor) {
  Verdict v;
  v.id = id;
  if (values.size() < 2) fail(ErrorCode::InvalidParams, id + ": a trend needs at least two degrees");
  const double first = std::abs(values.front()), last = std::abs(values.back());
  bool mono = true;
  for (std::size_t i = 1; i < values.size(); ++i)
    mono &= std::abs(values[i]) <= std::abs(values[i - 1]) * (1.0 + 1e-12) + floor;
  if (first <= floor) {
    v.measured = last;
    v.threshold = floor;
    v.relation = "|last| <= zero floor";
    v.pass = last <= floor;
  } else {
    v.measured = last / first;
    v.threshold = ratio;
    v.relation = monotone ? "last/first <= threshold, decreasing" : "last/first <= threshold";
    v.pass = v.measured <= ratio && (!monotone || mono);
  }
  return v;
}

Verdict at_most(const std::string& id, double measured, double threshold) {
  return {id, measured <= threshold, measured, threshold, "<="};
}

Verdict at_least(const std::string& id, double measured, double threshold) {
  return {id, measured >= threshold, measured, threshold, ">="};
}

std::vector<PointP1> sample_points(const PointSampling& sampling) {
  std::mt19937_64 rng(sampling.seed);
  std::vector<PointP1> out;
  out.reserve(static_cast<std::size_t>(sampling.count));
  for (int i = 0; i < sampling.count; ++i) {
    // 53-bit uniforms straight from the engine, independent of library distributions.
    const double s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double th = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
    out.push_back(PointP1::from_moment(s, th));
  }
  return out;
}

double Context::tolerance(const std::string& key) const {
  auto it = config.tolerances.find(key);
  if (it == config.tolerances.end())
    fail(ErrorCode::ConfigInvalid, "/tolerances/" + key + ": missing tolerance for " + config.experiment);
  return it->second;
}

double Context::param(const std::string& key, double fallback) const {
  if (!config.params.contains(key)) return fallback;
  const Json& v = config.params.at(key);
  if (!v.is_number()) fail(ErrorCode::ConfigInvalid, "/params/" + key + ": expected a number");
  return v.get<double>();
}

int Context::param_int(const std::string& key, int fallback) const {
  if (!config.params.contains(key)) return fallback;
  const Json& v = config.params.at(key);
  if (!v.is_number_integer()) fail(ErrorCode::ConfigInvalid, "/params/" + key + ": expected an integer");
  return v.get<int>();
}

bool Context::param_bool(const std::string& key, bool fallback) const {
  if (!config.params.contains(key)) return fallback;
  const Json& v = config.params.at(key);
  if (!v.is_boolean()) fail(ErrorCode::ConfigInvalid, "/params/" + key + ": expected true or false");
  return v.get<bool>();
}

std::vector<int> Context::param_ints(const std::string& key, std::vector<int> fallback) const {
  if (!config.params.contains(key)) return fallback;
  const Json& v = config.params.at(key);
  std::vector<int> out;
  if (!v.is_array()) fail(ErrorCode::ConfigInvalid, "/params/" + key + ": expected an array of integers");
  for (const Json& x : v) {
    if (!x.is_number_integer()) fail(ErrorCode::ConfigInvalid, "/params/" + key + ": expected integers");
    out.push_back(x.get<int>());
  }
  return out;
}

std::vector<double> Context::param_numbers(const std::string& key, std::vector<double> fallback) const {
  if (!config.params.contains(key)) return fallback;
  const Json& v = config.params.at(key);
  std::vector<double> out;
  if (!v.is_array()) fail(ErrorCode::ConfigInvalid, "/params/" + key + ": expected an array of numbers");
  for (const Json& x : v) {
    if (!x.is_number()) fail(ErrorCode::ConfigInvalid, "/params/" + key + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string Context::param_string(const std::string& key, const std::string& fallback) const {
  if (!config.params.contains(key)) return fallback;
  const Json& v = config.params.at(key);
  if (!v.is_string()) fail(ErrorCode::ConfigInvalid, "/params/" + key + ": expected a string");
  return v.get<std::string>();
}

const Json* Context::param_json(const std::string& key) const {
  return config.params.contains(key) ? &config.params.at(key) : nullptr;
}

}  // namespace lab

}  // namespace bergweight
