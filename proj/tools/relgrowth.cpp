// relgrowth: command-line driver.
//
//   relgrowth <validate|analyze|count|scan|fourier|fit|rationality|oracle|report>
//             (--input FILE | --group f2|f3) [--hom "a:1,0;b:0,1"] [options]
//
// Exit codes: 0 ok (skips print a warning), 1 invalid input or config,
// 2 budget exceeded (partial output written), 3 a check failed.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <relgrowth/relgrowth.hpp>

namespace fs = std::filesystem;
using json   = nlohmann::ordered_json;
using namespace relgrowth;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kBudget = 2, kFail = 3 };

struct RunConfig {
  std::string   input;
  std::string   group;
  std::string   hom;
  std::string   window;
  std::string   target;
  std::string   out_dir = "out";
  std::size_t   n_max     = 40;
  std::size_t   grid      = 16;
  std::size_t   max_order = 20;
  std::uint64_t seed      = 1;
  std::size_t   samples   = 1000;
  std::uint64_t word_budget  = kDefaultWordBudget;
  std::uint64_t table_budget = CountOptions{}.max_table_entries;
  std::uint64_t cycle_budget = kDefaultCycleBudget;
  bool          table        = false;
  bool          grid_given   = false;
};

////////////////////////////////////////////////////////////////////////
// Input
////////////////////////////////////////////////////////////////////////

std::string trim(std::string s) {
  auto const ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

Weight parse_weight(std::string const& text) {
  Weight            w;
  std::stringstream ss(text);
  std::string       cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    std::size_t used = 0;
    std::int64_t x   = 0;
    try {
      x = std::stoll(cell, &used);
    } catch (std::exception const&) {
      used = 0;
    }
    if (cell.empty() || used != cell.size()) {
      throw ValidationError("bad weight '" + text + "'");
    }
    w.push_back(x);
  }
  if (w.empty()) {
    throw ValidationError("empty weight");
  }
  return w;
}

// "a:1,0;b:0,1" -> {a: (1,0), b: (0,1)}
std::map<std::string, Weight> parse_hom(std::string const& text) {
  std::map<std::string, Weight> out;
  std::stringstream             ss(text);
  std::string                   item;
  while (std::getline(ss, item, ';')) {
    if (trim(item).empty()) {
      continue;
    }
    auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("bad --hom entry '" + item + "' (want name:x,y,...)");
    }
    out[trim(item.substr(0, colon))] = parse_weight(item.substr(colon + 1));
  }
  return out;
}

struct Problem {
  Automaton                    automaton;
  std::optional<FreeGroupSpec> spec;  // set for built-in groups
  std::map<std::string, Weight> hom;  // --hom overrides

  EdgeWeighting weighting() const {
    if (hom.empty()) {
      return EdgeWeighting::from_homomorphism(automaton);
    }
    auto const&         a = automaton;
    std::vector<Weight> images;
    for (auto const& [name, w] : hom) {
      if (!a.find_generator(name)) {
        throw ValidationError("--hom names unknown generator '" + name + "'");
      }
    }
    for (std::size_t g = 0; g < a.num_generators(); ++g) {
      auto const& gen = a.generators()[g];
      if (auto it = hom.find(gen.name); it != hom.end()) {
        images.push_back(it->second);
      } else if (auto inv = hom.find(gen.inverse); inv != hom.end()) {
        images.push_back(-inv->second);
      } else if (a.homomorphism()[g]) {
        images.push_back(*a.homomorphism()[g]);
      } else {
        throw ValidationError("homomorphism incomplete: no image for generator '"
                              + gen.name + "'");
      }
    }
    return EdgeWeighting(a, images);
  }
};

std::string read_file(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot read '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem load_problem(RunConfig const& cfg) {
  if (cfg.input.empty() == cfg.group.empty()) {
    throw ValidationError("give exactly one of --input and --group");
  }
  auto hom = parse_hom(cfg.hom);
  if (!cfg.input.empty()) {
    return Problem{parse_automaton(read_file(cfg.input)), std::nullopt, hom};
  }
  std::size_t k = cfg.group == "f2" ? 2 : cfg.group == "f3" ? 3 : 0;
  if (k == 0) {
    throw ValidationError("unknown --group '" + cfg.group + "' (f2 or f3)");
  }
  std::vector<Weight> images;
  if (!hom.empty()) {
    for (auto const& name : FreeGroupSpec::standard(k).names) {
      auto it = hom.find(name);
      if (it == hom.end()) {
        throw ValidationError("homomorphism incomplete: no image for generator '"
                              + name + "'");
      }
      images.push_back(it->second);
    }
    if (hom.size() != k) {
      throw ValidationError("--hom lists generators outside " + cfg.group);
    }
  }
  auto spec = FreeGroupSpec::standard(k, images);
  return Problem{build_free_group_automaton(spec), spec, {}};
}

////////////////////////////////////////////////////////////////////////
// Output
////////////////////////////////////////////////////////////////////////

// Writes through a temporary file in the same directory, then renames.
void write_atomic(fs::path const& path, std::string const& content) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << content;
    if (!os) {
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path);
}

template <class F>
fs::path emit(RunConfig const& cfg, std::string const& name, F&& body) {
  std::ostringstream os;
  body(os);
  auto path = fs::path(cfg.out_dir) / name;
  write_atomic(path, os.str());
  return path;
}

fs::path emit_json(RunConfig const& cfg, std::string const& name, json const& j) {
  return emit(cfg, name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

// Rounded to 12 significant digits so the JSON text is stable.
json num(double x) {
  if (!std::isfinite(x)) {
    return nullptr;
  }
  return std::stod(format_double(x));
}

json point_json(RationalPoint const& p) {
  json j = json::array();
  for (auto const& q : p) {
    j.push_back(to_string(q));
  }
  return j;
}

std::string point_string(RationalPoint const& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += (i ? "," : "") + to_string(p[i]);
  }
  return s + ")";
}

void warn(std::string const& msg) {
  std::cerr << "warning: " << msg << '\n';
}

////////////////////////////////////////////////////////////////////////
// Shared steps
////////////////////////////////////////////////////////////////////////

struct Counts {
  CountTable table;
  bool       truncated = false;
};

// Counts up to n_max, or up to the largest affordable length when the weight
// table would exceed the budget.
Counts count_within_budget(Problem const& p, EdgeWeighting const& w,
                           RunConfig const& cfg) {
  CountOptions opts;
  opts.max_table_entries = cfg.table_budget;
  try {
    return {count_by_weight(p.automaton, w, cfg.n_max, opts), false};
  } catch (BudgetExceeded const& e) {
    auto n = max_affordable_length(w, opts);
    warn(std::string(e.what()) + "; writing partial output up to n = "
         + std::to_string(n));
    return {count_by_weight(p.automaton, w, n, opts), true};
  }
}

std::pair<std::size_t, std::size_t> fit_window(RunConfig const& cfg) {
  if (cfg.window.empty()) {
    return {40, cfg.n_max};
  }
  auto colon = cfg.window.find(':');
  try {
    if (colon != std::string::npos) {
      return {std::stoul(cfg.window.substr(0, colon)),
              std::stoul(cfg.window.substr(colon + 1))};
    }
  } catch (std::exception const&) {
  }
  throw ValidationError("bad --window '" + cfg.window + "' (want a:b)");
}

enum class Verdict { pass, fail, skipped };

char const* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    default: return "SKIPPED";
  }
}

struct FitOutcome {
  Verdict                  verdict = Verdict::skipped;
  std::optional<FitResult> fit;
  double                   expected = 0.0, tolerance = 0.0;
  std::string              note;
};

// Slope target -nu/2 with tolerance 5% of nu; constant must be positive.
FitOutcome run_fit(GrowthSequences const& g, double lambda, std::size_t D,
                   std::size_t nu, RunConfig const& cfg) {
  FitOutcome o;
  o.expected  = -static_cast<double>(nu) / 2.0;
  o.tolerance = 0.05 * static_cast<double>(nu);
  auto [n0, n1] = fit_window(cfg);
  if (n0 >= n1 || n1 >= g.relative.size()) {
    o.note = "window " + std::to_string(n0) + ":" + std::to_string(n1)
             + " unmet with n_max = " + std::to_string(g.relative.size() - 1);
    return o;
  }
  try {
    o.fit = asymptotic_fit(g.relative, lambda, D, n0, n1);
  } catch (std::invalid_argument const& e) {
    o.note = e.what();
    return o;
  }
  bool ok   = std::abs(o.fit->slope - o.expected) <= o.tolerance
              && o.fit->constant > 0.0;
  o.verdict = ok ? Verdict::pass : Verdict::fail;
  return o;
}

json fit_json(FitOutcome const& o, std::size_t D) {
  json j;
  j["verdict"]        = verdict_name(o.verdict);
  j["step"]           = D;
  j["expected_slope"] = num(o.expected);
  j["tolerance"]      = num(o.tolerance);
  if (o.fit) {
    j["window"]    = {o.fit->n0, o.fit->n1};
    j["points"]    = o.fit->log_n.size();
    j["slope"]     = num(o.fit->slope);
    j["intercept"] = num(o.fit->intercept);
    j["constant"]  = num(o.fit->constant);
    j["residual"]  = num(o.fit->residual);
  } else {
    j["note"] = o.note;
  }
  return j;
}

struct RationalityOutcome {
  Verdict          control = Verdict::skipped, relative = Verdict::skipped;
  RecurrenceResult totals_rec, relative_rec;
  std::string      control_note, relative_note;
};

// Totals must satisfy a recurrence of order <= |V|; the relative sequence
// must have none of order <= max_order.
RationalityOutcome run_rationality(GrowthSequences const& g, std::size_t nv,
                                   std::size_t max_order) {
  RationalityOutcome o;
  try {
    o.totals_rec = min_recurrence(g.totals, nv);
    o.control = o.totals_rec.found && o.totals_rec.order <= nv ? Verdict::pass
                                                               : Verdict::fail;
  } catch (std::invalid_argument const& e) {
    o.control_note = e.what();
  }
  try {
    o.relative_rec = min_recurrence(g.relative, max_order);
    o.relative     = o.relative_rec.found ? Verdict::fail : Verdict::pass;
  } catch (std::invalid_argument const& e) {
    o.relative_note = e.what();
  }
  return o;
}

json recurrence_json(RecurrenceResult const& r, Verdict v, std::string const& note) {
  json j;
  j["verdict"] = verdict_name(v);
  if (v == Verdict::skipped) {
    j["note"] = note;
    return j;
  }
  j["found"] = r.found;
  j["order"] = r.order;
  if (r.found) {
    json c = json::array();
    for (auto const& x : r.coefficients) {
      std::ostringstream os;
      os << x;
      c.push_back(os.str());
    }
    j["coefficients"]     = c;
    j["verified_horizon"] = r.verified_horizon;
  }
  return j;
}

struct FourierOutcome {
  Verdict verdict = Verdict::pass;
  std::vector<std::pair<FourierResult, BigInt>> rows;  // (fourier, dp)
};

FourierOutcome run_fourier(Problem const& p, EdgeWeighting const& w,
                           CountTable const& t, std::size_t n_max,
                           RunConfig const& cfg) {
  FourierOutcome o;
  for (std::size_t n = 0; n <= std::min(n_max, t.n_max()); ++n) {
    auto M = cfg.grid_given ? cfg.grid : minimal_fourier_grid(w, n);
    auto f = fourier_count(p.automaton, w, n, M);
    if (f.count != t.zero_count(n) || f.residual >= 0.5) {
      o.verdict = Verdict::fail;
    }
    o.rows.emplace_back(f, t.zero_count(n));
  }
  return o;
}

void write_fourier_csv(std::ostream& os, FourierOutcome const& o) {
  os << "n,grid,value,imag,residual,fourier_count,dp_count\n";
  for (std::size_t n = 0; n < o.rows.size(); ++n) {
    auto const& [f, dp] = o.rows[n];
    os << n << ',' << f.grid << ',' << format_double(f.value) << ','
       << format_double(f.imag) << ',' << format_double(f.residual) << ','
       << f.count << ',' << dp << '\n';
  }
}

////////////////////////////////////////////////////////////////////////
// Subcommands
////////////////////////////////////////////////////////////////////////

int cmd_validate(RunConfig const& cfg) {
  auto        p   = load_problem(cfg);
  auto const& a   = p.automaton;
  auto        rep = validate(a);
  std::string text = rep.to_string();
  bool        ok   = rep.valid();
  if (ok) {
    try {
      auto w = p.weighting();
      text += "homomorphism: nu = " + std::to_string(w.rank()) + "\n";
    } catch (ValidationError const& e) {
      text += std::string("invalid: ") + e.what() + "\n";
      ok = false;
    }
  }
  text = "vertices: " + std::to_string(a.num_vertices())
         + "\nedges: " + std::to_string(a.num_edges()) + "\n" + text;
  emit(cfg, "validation.txt", [&](std::ostream& os) { os << text; });
  std::cout << text;
  return ok ? kOk : kInvalid;
}

json components_json(Automaton const& a, ComponentAnalysis const& ca) {
  json comps = json::array();
  for (std::size_t i = 0; i < ca.components().size(); ++i) {
    auto const& c = ca.components()[i];
    json        j;
    j["index"] = i;
    json names = json::array();
    for (auto v : c.vertices) {
      names.push_back(a.vertex_name(v));
    }
    j["vertices"] = names;
    j["radius"]   = num(c.radius);
    j["maximal"]  = c.maximal;
    if (c.cyclic) {
      j["period"] = c.cyclic->period;
    }
    comps.push_back(j);
  }
  return comps;
}

int cmd_analyze(RunConfig const& cfg) {
  auto p = load_problem(cfg);
  auto w = p.weighting();
  StructureOptions opts;
  opts.min_grid     = cfg.grid;
  opts.cycle_budget = cfg.cycle_budget;
  auto r = analyze_structure(p.automaton, w, opts);

  json j;
  j["vertices"]   = p.automaton.num_vertices();
  j["edges"]      = p.automaton.num_edges();
  j["nu"]         = w.rank();
  j["lambda"]     = num(r.components.lambda());
  j["components"] = components_json(p.automaton, r.components);
  json maximal    = json::array();
  std::cout << "lambda = " << format_double(r.components.lambda()) << '\n';
  for (std::size_t k = 0; k < r.maximal.size(); ++k) {
    auto const& m = r.maximal[k];
    json        mj;
    mj["component"]  = m.component;
    mj["period"]     = m.period;
    mj["gamma"]      = m.indices.gamma.to_string();
    mj["delta"]      = m.indices.delta.to_string();
    mj["c"]          = to_string(m.indices.c);
    mj["c_length"]   = m.indices.c_length;
    mj["max_length"] = m.indices.max_length;
    mj["D"]          = m.indices.order ? json(*m.indices.order) : json(nullptr);
    json dual        = json::array();
    std::string dual_text;
    for (auto const& q : m.dual) {
      dual.push_back(point_json(q));
      dual_text += (dual_text.empty() ? "" : " ") + point_string(q);
    }
    mj["dual_points"] = dual;
    if (m.scan) {
      json sj;
      sj["grid"]       = m.scan->grid;
      sj["max_radius"] = num(m.scan->max_radius);
      sj["epsilon"] = m.scan->epsilon ? num(*m.scan->epsilon) : json(nullptr);
      sj["near_maximal"] = m.scan->near_maximal;
      mj["scan"]         = sj;
    }
    mj["cross_check"] = m.scan_matches_dual ? "PASS" : "FAIL";
    maximal.push_back(mj);
    std::cout << "component " << m.component << ": p = " << m.period
              << ", Gamma = " << m.indices.gamma.to_string()
              << ", Delta = " << m.indices.delta.to_string()
              << ", c = " << to_string(m.indices.c) << ", D = "
              << (m.indices.order ? std::to_string(*m.indices.order) : "inf")
              << "\n  dual points: " << dual_text << '\n';
    if (m.scan) {
      std::cout << "  scan M = " << m.scan->grid << ": near-maximal set "
                << (m.scan_matches_dual ? "equals" : "differs from")
                << " dual points";
      if (m.scan->epsilon) {
        std::cout << ", delta = " << format_double(*m.scan->epsilon);
      }
      std::cout << '\n';
    }
  }
  j["maximal"]       = maximal;
  j["global_period"] = {{"lcm", r.period.lcm}, {"product", r.period.product}};
  j["cross_check"]   = r.cross_check_pass() ? "PASS" : "FAIL";
  emit_json(cfg, "analysis.json", j);
  std::cout << "D = " << r.period.lcm << " (product " << r.period.product
            << ")\ncross-check " << (r.cross_check_pass() ? "PASS" : "FAIL")
            << '\n';
  return r.cross_check_pass() ? kOk : kFail;
}

int cmd_count(RunConfig const& cfg) {
  auto p = load_problem(cfg);
  auto w = p.weighting();
  auto c = count_within_budget(p, w, cfg);
  auto g = relative_growth(c.table);
  emit(cfg, "count.csv", [&](std::ostream& os) {
    if (cfg.target.empty()) {
      write_growth_csv(os, g);
    } else {
      auto target = parse_weight(cfg.target);
      if (target.size() != w.rank()) {
        throw ValidationError("--target has rank " + std::to_string(target.size())
                              + ", expected " + std::to_string(w.rank()));
      }
      write_growth_csv(os, g, relative_growth(c.table, target).relative);
    }
  });
  if (cfg.table) {
    emit(cfg, "count_table.csv",
         [&](std::ostream& os) { write_count_table_csv(os, c.table); });
  }
  auto n = c.table.n_max();
  std::cout << "counted n <= " << n << ": #W_n = " << g.totals[n]
            << ", #(W_n and N) = " << g.relative[n] << '\n';
  return c.truncated ? kBudget : kOk;
}

int cmd_scan(RunConfig const& cfg) {
  auto p  = load_problem(cfg);
  auto w  = p.weighting();
  auto ca = decompose(p.automaton);
  ScanOptions opts;
  std::vector<SpectralScan> scans;
  std::mt19937_64                        rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  json comps = json::array();
  bool ok    = true;
  for (std::size_t j = 0; j < ca.num_maximal(); ++j) {
    auto cj = build_cj(p.automaton, ca, j);
    scans.push_back(torus_scan(cj, w, cfg.grid, opts));
    double sampled = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      TorusPoint t(w.rank());
      for (auto& x : t) {
        x = unit(rng);
      }
      sampled = std::max(sampled, spectral_radius(weighted_matrix(cj, w, t)));
    }
    ok = ok && sampled <= ca.lambda() + 1e-9;
    auto const& s = scans.back();
    json        cj_json;
    cj_json["component"]       = ca.maximal()[j];
    cj_json["max_radius"]      = num(s.max_radius);
    cj_json["near_maximal"]    = s.near_maximal;
    cj_json["epsilon"]         = s.epsilon ? num(*s.epsilon) : json(nullptr);
    cj_json["samples"]         = cfg.samples;
    cj_json["max_sampled_radius"] = num(sampled);
    comps.push_back(cj_json);
    std::cout << "component " << ca.maximal()[j] << ": " << s.near_maximal.size()
              << " near-maximal grid points, max sampled radius "
              << format_double(sampled) << '\n';
  }
  emit(cfg, "scan.csv", [&](std::ostream& os) { write_scan_csv(os, scans); });
  json j;
  j["grid"]       = cfg.grid;
  j["seed"]       = cfg.seed;
  j["lambda"]     = num(ca.lambda());
  j["components"] = comps;
  j["bounded_by_lambda"] = ok;
  emit_json(cfg, "scan.json", j);
  return ok ? kOk : kFail;
}

int cmd_fourier(RunConfig const& cfg) {
  auto p = load_problem(cfg);
  auto w = p.weighting();
  auto c = count_within_budget(p, w, cfg);
  auto o = run_fourier(p, w, c.table, c.table.n_max(), cfg);
  emit(cfg, "fourier.csv", [&](std::ostream& os) { write_fourier_csv(os, o); });
  std::cout << "Fourier inversion vs exact counts, n <= " << c.table.n_max()
            << ": " << verdict_name(o.verdict) << '\n';
  if (o.verdict == Verdict::fail) {
    return kFail;
  }
  return c.truncated ? kBudget : kOk;
}

int cmd_fit(RunConfig const& cfg) {
  auto p  = load_problem(cfg);
  auto w  = p.weighting();
  StructureOptions so;
  so.scan         = false;
  so.cycle_budget = cfg.cycle_budget;
  auto r  = analyze_structure(p.automaton, w, so);
  auto c  = count_within_budget(p, w, cfg);
  auto g  = relative_growth(c.table);
  auto D  = static_cast<std::size_t>(r.period.lcm);
  auto o  = run_fit(g, r.components.lambda(), D, w.rank(), cfg);
  if (o.fit) {
    emit(cfg, "fit.dat", [&](std::ostream& os) { write_fit_data(os, *o.fit); });
  }
  emit_json(cfg, "fit.json", fit_json(o, D));
  if (o.verdict == Verdict::skipped) {
    warn("fit SKIPPED: " + o.note);
  } else {
    std::cout << "slope " << format_double(o.fit->slope) << " (target "
              << format_double(o.expected) << " +- " << format_double(o.tolerance)
              << "), constant " << format_double(o.fit->constant) << ": "
              << verdict_name(o.verdict) << '\n';
  }
  if (o.verdict == Verdict::fail) {
    return kFail;
  }
  return c.truncated ? kBudget : kOk;
}

int cmd_rationality(RunConfig const& cfg) {
  auto p = load_problem(cfg);
  auto w = p.weighting();
  auto c = count_within_budget(p, w, cfg);
  auto g = relative_growth(c.table);
  auto o = run_rationality(g, p.automaton.num_vertices(), cfg.max_order);
  json j;
  j["terms"]    = g.totals.size();
  j["totals"]   = recurrence_json(o.totals_rec, o.control, o.control_note);
  j["relative"] = recurrence_json(o.relative_rec, o.relative, o.relative_note);
  emit_json(cfg, "rationality.json", j);
  std::cout << "totals recurrence (order <= " << p.automaton.num_vertices()
            << "): " << verdict_name(o.control) << "\nrelative sequence, no "
            << "recurrence of order <= " << cfg.max_order << ": "
            << verdict_name(o.relative) << '\n';
  for (auto const& note : {o.control_note, o.relative_note}) {
    if (!note.empty()) {
      warn(note);
    }
  }
  if (o.control == Verdict::fail || o.relative == Verdict::fail) {
    return kFail;
  }
  return c.truncated ? kBudget : kOk;
}

int cmd_oracle(RunConfig const& cfg) {
  auto p = load_problem(cfg);
  if (!p.spec) {
    throw ValidationError("oracle needs a built-in group (--group f2|f3)");
  }
  auto ball = oracle_counts(*p.spec, cfg.n_max, cfg.word_budget);
  emit(cfg, "oracle.csv", [&](std::ostream& os) { write_oracle_csv(os, ball); });
  auto w  = p.weighting();
  auto c  = count_within_budget(p, w, cfg);
  bool ok = true;
  for (std::size_t n = 0; n <= c.table.n_max(); ++n) {
    ok = ok && c.table.layer(n) == ball.layers[n];
  }
  std::cout << "oracle vs DP, n <= " << c.table.n_max() << ": "
            << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kOk : kFail;
}

int cmd_report(RunConfig const& cfg) {
  auto p = load_problem(cfg);
  auto w = p.weighting();
  StructureOptions so;
  so.min_grid     = cfg.grid;
  so.cycle_budget = cfg.cycle_budget;
  auto r = analyze_structure(p.automaton, w, so);
  auto c = count_within_budget(p, w, cfg);
  auto g = relative_growth(c.table);
  auto D = static_cast<std::size_t>(r.period.lcm);
  auto const lambda = r.components.lambda();

  std::vector<std::pair<std::string, Verdict>> lines;
  std::vector<std::string>                     notes;
  auto add = [&](std::string label, Verdict v, std::string const& detail) {
    lines.emplace_back(label + (detail.empty() ? "" : " (" + detail + ")"), v);
  };

  add("structure cross-check: dual points = near-maximal torus set",
      r.cross_check_pass() ? Verdict::pass : Verdict::fail,
      "D = " + std::to_string(r.period.lcm));

  auto fit = run_fit(g, lambda, D, w.rank(), cfg);
  add("asymptotic fit", fit.verdict,
      fit.fit ? "slope " + format_double(fit.fit->slope) + ", target "
                    + format_double(fit.expected) + " +- "
                    + format_double(fit.tolerance) + ", constant "
                    + format_double(fit.fit->constant)
              : "window unmet: " + fit.note);
  if (fit.fit) {
    emit(cfg, "fit.dat", [&](std::ostream& os) { write_fit_data(os, *fit.fit); });
  }

  auto rat = run_rationality(g, p.automaton.num_vertices(), cfg.max_order);
  add("totals rational control", rat.control,
      rat.control == Verdict::skipped
          ? rat.control_note
          : "recurrence found: " + std::string(rat.totals_rec.found ? "yes" : "no")
                + ", order " + std::to_string(rat.totals_rec.order) + " <= "
                + std::to_string(p.automaton.num_vertices()));
  add("relative growth non-rational", rat.relative,
      rat.relative == Verdict::skipped
          ? rat.relative_note
          : "linear complexity " + std::to_string(rat.relative_rec.order)
                + " > " + std::to_string(cfg.max_order) + " required");

  // Short runs are dominated by the first few lengths.
  constexpr std::size_t kDensityMinLength = 80;
  if (g.totals.size() <= kDensityMinLength) {
    add("density decay", Verdict::skipped,
        "needs n_max >= " + std::to_string(kDensityMinLength));
  } else {
    auto d = density_ratio(g.relative, g.totals);
    add("density decay", d.decays ? Verdict::pass : Verdict::fail,
        "window means " + format_double(d.earlier_window_mean) + " -> "
            + format_double(d.last_window_mean));
    notes.push_back("r(80)/r(40) = " + format_double(d.ratios[80] / d.ratios[40]));
  }

  auto four = run_fourier(p, w, c.table, std::min<std::size_t>(16, c.table.n_max()),
                          cfg);
  add("Fourier inversion matches exact counts", four.verdict,
      "n <= " + std::to_string(four.rows.size() - 1));

  std::size_t period = 1;
  for (auto const& m : r.maximal) {
    period = std::lcm(period, m.period);
  }
  auto tot = sphere_sizes(p.automaton, std::max<std::size_t>(c.table.n_max(), 40));
  try {
    auto cb = coornaert_check(tot, lambda, period, period);
    add("growth bracket c1 <= #W_n / lambda^n <= c2", cb.stable ? Verdict::pass
                                                               : Verdict::fail,
        "c1 = " + format_double(cb.lower) + ", c2 = " + format_double(cb.upper));
  } catch (std::invalid_argument const& e) {
    add("growth bracket c1 <= #W_n / lambda^n <= c2", Verdict::skipped, e.what());
  }

  auto count_path   = emit(cfg, "count.csv",
                           [&](std::ostream& os) { write_growth_csv(os, g); });
  auto fourier_path = emit(cfg, "fourier.csv",
                           [&](std::ostream& os) { write_fourier_csv(os, four); });

  std::ostringstream text;
  bool               failed = false;
  for (auto const& [label, v] : lines) {
    text << verdict_name(v) << "  " << label << '\n';
    failed = failed || v == Verdict::fail;
    if (v == Verdict::skipped) {
      warn(label + " SKIPPED");
    }
  }
  for (auto const& n : notes) {
    text << "note: " << n << '\n';
  }
  text << "data: " << count_path.string() << ", " << fourier_path.string();
  if (fit.fit) {
    text << ", " << (fs::path(cfg.out_dir) / "fit.dat").string();
  }
  text << '\n';
  if (c.truncated) {
    text << "counts truncated at n = " << c.table.n_max() << " by the table budget\n";
  }
  emit(cfg, "report.txt", [&](std::ostream& os) { os << text.str(); });
  std::cout << text.str();
  if (failed) {
    return kFail;
  }
  return c.truncated ? kBudget : kOk;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (BudgetExceeded const& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (ParseError const& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kInvalid;
  } catch (ValidationError const& e) {
    std::string msg = e.what();
    if (msg.rfind("invalid: ", 0) != 0) {
      msg = "invalid: " + msg;
    }
    if (msg.back() != '\n') {
      msg += '\n';
    }
    std::cerr << msg;
    return kInvalid;
  } catch (NumericalError const& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kFail;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative growth of Z^nu-kernels in groups given by strongly "
               "Markov automata"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Config file (key = value); flags win");

  RunConfig cfg;
  app.add_option("--input", cfg.input, "Automaton file (.aut)");
  app.add_option("--group", cfg.group, "Built-in free group: f2 or f3");
  app.add_option("--hom", cfg.hom, "Homomorphism, e.g. \"a:1,0;b:0,1\"");
  app.add_option("--n-max", cfg.n_max, "Largest word length")
      ->check(CLI::Range(std::size_t{4}, std::size_t{100000}));
  auto* grid = app.add_option("--grid", cfg.grid, "Torus grid size M")
                   ->check(CLI::Range(std::size_t{8}, std::size_t{100000}));
  app.add_option("--max-order", cfg.max_order, "Largest recurrence order K")
      ->check(CLI::PositiveNumber);
  app.add_option("--window", cfg.window, "Fit window a:b (default 40:n_max)");
  app.add_option("--target", cfg.target, "Extra target weight, e.g. 1,0");
  app.add_option("--out-dir", cfg.out_dir, "Output directory");
  app.add_option("--seed", cfg.seed, "Seed for sampled torus points");
  app.add_option("--samples", cfg.samples, "Random torus points per component");
  app.add_option("--word-budget", cfg.word_budget, "Oracle word cap")
      ->check(CLI::PositiveNumber);
  app.add_option("--table-budget", cfg.table_budget, "Weight-table entry cap")
      ->check(CLI::PositiveNumber);
  app.add_option("--cycle-budget", cfg.cycle_budget, "Cycle enumeration cap")
      ->check(CLI::PositiveNumber);
  app.add_flag("--table", cfg.table, "count: also write the full weight table");

  std::map<std::string, int (*)(RunConfig const&)> commands{
      {"validate", cmd_validate},
      {"analyze", cmd_analyze},
      {"count", cmd_count},
      {"scan", cmd_scan},
      {"fourier", cmd_fourier},
      {"fit", cmd_fit},
      {"rationality", cmd_rationality},
      {"oracle", cmd_oracle},
      {"report", cmd_report},
  };
  std::map<std::string, std::string> help{
      {"validate", "Check the automaton and homomorphism"},
      {"analyze", "Components, periods, cycle lattices, dual points"},
      {"count", "Exact counts #W_n and #(W_n and N)"},
      {"scan", "Spectral radius of C_j(t) over the torus grid"},
      {"fourier", "Fourier inversion against exact counts"},
      {"fit", "Polynomial exponent of N(Dn, 0) lambda^-Dn"},
      {"rationality", "Recurrence mining on totals and relative counts"},
      {"oracle", "Brute-force Cayley enumeration vs DP"},
      {"report", "Consolidated verdicts"},
  };
  for (auto const& [name, text] : help) {
    app.add_subcommand(name, text);
  }

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  cfg.grid_given = grid->count() > 0;
  auto name      = app.get_subcommands().front()->get_name();
  return guarded([&] { return commands.at(name)(cfg); });
}
