#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <random>
#include <variant>

#include "geolab/counting.hpp"
#include "geolab/geodesics.hpp"
#include "geolab/kloosterman.hpp"
#include "geolab/multipliers.hpp"
#include "geolab/psi3.hpp"
#include "geolab/spectral.hpp"
#include "geolab/zeta.hpp"

using namespace geolab;

namespace {

constexpr int kOk = 0, kValidation = 2, kInvariant = 3;

struct InvariantFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- output

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  void add(std::vector<Cell> r) {
    if (r.size() != columns.size()) throw std::logic_error("table row width");
    rows.push_back(std::move(r));
  }
};

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_cell(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string q = "\"";
    for (char ch : *s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (auto d = std::get_if<double>(&c)) return fmt_double(*d);
  if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<bool>(c) ? "true" : "false";
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return *s;
  if (auto d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return fmt_double(*d);
    return *d;
  }
  if (auto i = std::get_if<long long>(&c)) return *i;
  return std::get<bool>(c);
}

struct Global {
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
  unsigned long long seed = 1;
  bool quiet = false;
  unsigned nthreads() const { return threads ? threads : default_threads(); }
};

Global G;

void progress(const std::string& msg) {
  if (!G.quiet) std::cerr << "[geolab] " << msg << std::endl;
}

void emit(const Table& t, const std::string& path = "") {
  std::string target = path.empty() ? G.out : path;
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!target.empty() && target != "-") {
    file.open(target);
    if (!file) throw std::invalid_argument("cannot open output file " + target);
    os = &file;
  }
  if (G.format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json o = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < r.size(); ++i) o[t.columns[i]] = json_cell(r[i]);
      arr.push_back(o);
    }
    *os << arr.dump(1) << "\n";
  } else {
    for (std::size_t i = 0; i < t.columns.size(); ++i) *os << (i ? "," : "") << t.columns[i];
    *os << "\n";
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) *os << (i ? "," : "") << csv_cell(r[i]);
      *os << "\n";
    }
  }
  if (target.size() && target != "-") progress("wrote " + std::to_string(t.rows.size()) + " rows to " + target);
}

// ---------------------------------------------------------------- parsing helpers

double parse_num(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    throw std::invalid_argument(std::string(what) + ": not a number '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument(std::string(what) + ": trailing characters in '" + s + "'");
  return v;
}

// "2", "2+0i", "1.3-7.5i", "3i"
std::complex<double> parse_complex(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) throw std::invalid_argument("--s: empty");
  if (s.back() != 'i') return parse_num(s, "--s");
  std::string body = s.substr(0, s.size() - 1);
  std::size_t cut = std::string::npos;
  for (std::size_t i = 1; i < body.size(); ++i)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') cut = i;
  if (cut == std::string::npos) {
    double im = body.empty() || body == "+" ? 1 : body == "-" ? -1 : parse_num(body, "--s");
    return {0, im};
  }
  std::string im = body.substr(cut);
  double imv = im == "+" ? 1 : im == "-" ? -1 : parse_num(im, "--s");
  return {parse_num(body.substr(0, cut), "--s"), imv};
}

Mat2i parse_gamma(const std::string& s) {
  std::vector<long long> v;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, ',')) {
    try {
      std::size_t pos;
      v.push_back(std::stoll(f, &pos));
      if (pos != f.size()) throw std::invalid_argument("");
    } catch (...) {
      throw std::invalid_argument("--gamma: bad entry '" + f + "'");
    }
  }
  if (v.size() != 4) throw std::invalid_argument("--gamma: expected a,b,c,d");
  Mat2i g{v[0], v[1], v[2], v[3]};
  if (g.det() != 1) throw std::invalid_argument("--gamma: determinant must be 1");
  return g;
}

MultiplierTag parse_system(const std::string& s) {
  try {
    return parse_multiplier_tag(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("--system: unknown system '" + s + "' (trivial|theta|nu2|nu3|nu4|kubota)");
  }
}

// ---------------------------------------------------------------- selftests

struct Checks {
  Table t{{"check", "ok", "detail"}, {}};
  bool all = true;
  void add(const std::string& name, bool ok, const std::string& detail = "") {
    t.add({name, ok, detail});
    all = all && ok;
  }
};

int finish(const Checks& c) {
  emit(c.t);
  if (!c.all) {
    std::cerr << "geolab: selftest failed" << std::endl;
    return kInvariant;
  }
  return kOk;
}

Mat2i random_sl2z(std::mt19937_64& rng, long long bound) {
  std::uniform_int_distribution<long long> U(-bound, bound), K(-3, 3);
  for (;;) {
    long long c = U(rng), d = U(rng);
    long long x, y;
    if ((c == 0 && d == 0) || ext_gcd<long long>(c, d, x, y) != 1) continue;
    long long k = K(rng);
    return {y + k * c, -x + k * d, c, d};
  }
}

int selftest_geodesics() {
  Checks c;
  auto fast = enumerate_classes(120, true, G.nthreads());
  auto brute = brute_force_classes(120);
  std::multiset<std::pair<long long, int>> a, b;
  for (const auto& g : fast) a.insert({g.trace, g.power_index});
  for (const auto& g : brute) b.insert({g.trace, g.power_index});
  c.add("classes_match_bruteforce_x120", a == b, std::to_string(fast.size()) + " classes");
  bool reps = true;
  for (const auto& g : fast) reps = reps && g.rep.det() == 1 && g.rep.trace() == g.trace;
  c.add("representatives_have_trace", reps);
  auto p = pell_fundamental(5);
  c.add("pell_5", p.t == 3 && p.u == 1);
  return finish(c);
}

int selftest_multiplier() {
  Checks c;
  std::mt19937_64 rng(G.seed);
  bool cons = true, unit = true;
  for (int i = 0; i < 2000; ++i) {
    Mat2i x = random_sl2z(rng, 40), y = random_sl2z(rng, 40);
    cons = cons && evaluate_theta_multiplier(x * y) ==
                       factor_system(x, y, kThetaWeight) * (evaluate_theta_multiplier(x) * evaluate_theta_multiplier(y));
    unit = unit && evaluate_theta_multiplier(x).is_unitary();
  }
  c.add("theta_consistency", cons);
  c.add("theta_unitary", unit);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    Mat2i g = random_sl2z(rng, 200);
    auto m = evaluate_theta_multiplier(g);
    auto o = theta_oracle_matrix(g);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        worst = std::max(worst, std::abs(m.value(r, s) - std::complex<double>(o[r][s].real(), o[r][s].imag())));
  }
  c.add("theta_matches_series_oracle", worst < 1e-8, "max deviation " + fmt_double(worst));
  c.add("theta_minus_identity",
        evaluate_theta_multiplier(Mat2i{-1, 0, 0, -1}) ==
            RootOfUnity::from_rational(-1, 4) * MultiplierMatrix::identity(3));
  return finish(c);
}

int selftest_kloosterman() {
  Checks c;
  bool exact = true;
  for (long long cc = 1; cc <= 30; ++cc)
    for (long long m = -3; m <= 3; ++m)
      for (long long n = -3; n <= 3; ++n) {
        std::complex<double> direct = 0;
        for (long long d = 0; d < cc; ++d) {
          if (std::gcd(d, cc) != 1) continue;
          long long dbar = inverse_mod(d, cc);
          direct += std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(mod_pos(m * dbar + n * d, cc)) / cc);
        }
        exact = exact && std::abs(kloosterman_sum(m, n, cc) - direct) < 1e-9;
      }
  c.add("trivial_matches_direct_sum", exact);
  double wr = 0;
  for (long long cc = 1; cc <= 200; ++cc) wr = std::max(wr, weil_ratio(1, 1, cc));
  c.add("weil_bound", wr <= 1 + 1e-9, "max ratio " + fmt_double(wr));
  c.add("S(1,1;1)=1", std::abs(kloosterman_sum(1, 1, 1) - 1.0) < 1e-12);
  return finish(c);
}

int selftest_psi() {
  Checks c;
  auto s = build_psi(10, MultiplierTag::Trivial, G.nthreads());
  c.add("psi10_one_event", s.size() == 1 && std::abs(s.psi(10).real() - 1.9248473002384139) < 1e-12,
        fmt_double(s.psi(10).real()));
  auto t = build_psi(400, MultiplierTag::Theta, G.nthreads());
  auto u = build_psi(400, MultiplierTag::Trivial, G.nthreads());
  c.add("theta_dominated_by_trivial", std::abs(t.psi(400)) <= 3 * u.psi(400).real() + 1e-9);
  double brute = 0;
  for (const auto& b : brute_force_classes(400)) brute += b.lambda;
  c.add("matches_bruteforce_x400", std::abs(brute - u.psi(400).real()) < 1e-9);
  auto b3 = psi3_bruteforce(20, MultiplierTag::Trivial, 0, G.nthreads());
  c.add("psi3_radius_doubling_x20", b3.stable);
  return finish(c);
}

int selftest_zeta() {
  Checks c;
  auto a = ratio_identity_check(2.0, 50, MultiplierTag::Trivial, G.nthreads());
  c.add("ratio_trivial_2_50", a.ok(), fmt_double(a.residual) + " <= " + fmt_double(a.bound));
  auto b = ratio_identity_check(1.6, 50, MultiplierTag::Theta, G.nthreads());
  c.add("ratio_theta_1.6_50", b.ok(), fmt_double(b.residual) + " <= " + fmt_double(b.bound));
  auto z = selberg_zeta_trunc({1.8, 2.0}, 100, MultiplierTag::Trivial, G.nthreads());
  auto zc = selberg_zeta_trunc({1.8, -2.0}, 100, MultiplierTag::Trivial, G.nthreads());
  c.add("conjugate_symmetry", std::abs(zc.value - std::conj(z.value)) < 1e-12 * std::abs(z.value));
  return finish(c);
}

int selftest_spectral() {
  Checks c;
  Rational h(1, 2);
  c.add("mean_to_max_3/4", mean_to_max(Rational(2, 3), Rational(1, 3), Rational(0)) == Rational(3, 4));
  c.add("mean_to_max_3/5", mean_to_max(Rational(9, 16), Rational(1, 4), h) == Rational(3, 5));
  c.add("table_invariant_2d", table_invariant(Rational(35, 48), Rational(59, 96), 2) == h);
  c.add("table_invariant_3d", table_invariant(Rational(11, 7), Rational(25, 21), 3) == Rational(1));
  c.add("shimura_2d", shimura_map_2d_s(Rational(1)) == Rational(3, 4));
  c.add("shimura_3d", shimura_map_3d(Rational(2)).first == Rational(4, 3));
  auto ds = ingest_string("t,multiplicity,tag\n9.5,1,weight0-2D\n");
  c.add("ingest", ds.data.size() == 1 && ds.count_upto(10) == 1);
  return finish(c);
}

// ---------------------------------------------------------------- commands

int cmd_geodesics_enumerate(double xmax, bool powers) {
  if (!(xmax >= 1)) throw std::invalid_argument("--xmax must be >= 1");
  progress("enumerating classes up to N = " + fmt_double(xmax));
  auto cls = enumerate_classes(xmax, powers, G.nthreads());
  Table t{{"trace", "D", "m", "norm_float", "lambda", "rep_a", "rep_b", "rep_c", "rep_d"}, {}};
  for (const auto& g : cls)
    t.add({g.trace, g.D, static_cast<long long>(g.power_index), g.norm_float, g.lambda, g.rep.a, g.rep.b, g.rep.c, g.rep.d});
  emit(t);
  return kOk;
}

int cmd_multiplier_eval(const std::string& gamma, const std::string& system) {
  Mat2i g = parse_gamma(gamma);
  MultiplierTag tag = parse_system(system);
  MultiplierMatrix m = evaluate_multiplier(g, tag);
  auto tr = m.trace().value();
  Table t{{"system", "dim", "matrix", "trace_re", "trace_im"}, {}};
  t.add({to_string(tag), static_cast<long long>(m.dim()), m.str(), tr.real(), tr.imag()});
  emit(t);
  return kOk;
}

int cmd_kloosterman(long long m, long long n, long long cmax, const std::string& system) {
  KSystem s;
  try {
    s = parse_ksystem(system);
  } catch (const std::exception&) {
    throw std::invalid_argument("--system must be trivial or theta");
  }
  if (cmax < 1) throw std::invalid_argument("--cmax must be >= 1");
  Table t{{"c", "re", "im"}, {}};
  for (long long c = 1; c <= cmax; ++c) {
    if (!modulus_allowed(c, s)) continue;
    auto v = kloosterman_sum(m, n, c, s);
    t.add({c, v.real(), v.imag()});
  }
  emit(t);
  return kOk;
}

PsiSeries series_for(double xmax, MultiplierTag tag) {
  if (!(xmax >= 1)) throw std::invalid_argument("--xmax must be >= 1");
  if (tag == MultiplierTag::Kubota) throw std::invalid_argument("kubota is 3D; use --dim 3");
  main_term_shape(tag);
  progress("building Psi up to " + fmt_double(xmax) + " for " + to_string(tag));
  auto s = build_psi(xmax, tag, G.nthreads());
  progress(std::to_string(s.size()) + " distinct norms");
  return s;
}

int cmd_psi_series(double xmax, MultiplierTag tag, const std::string& emit_path) {
  auto s = series_for(xmax, tag);
  Table t{{"norm", "weight_re", "weight_im", "psi_re", "psi_im", "main"}, {}};
  for (std::size_t i = 0; i < s.size(); ++i)
    t.add({s.norms[i], s.weights[i].real(), s.weights[i].imag(), s.prefix[i].real(), s.prefix[i].imag(),
           s.norms[i] >= 1 ? s.main(s.norms[i]) : 0.0});
  emit(t, emit_path);
  return kOk;
}

int cmd_psi3(double xmax, MultiplierTag tag, long long radius) {
  if (tag != MultiplierTag::Trivial && tag != MultiplierTag::Kubota)
    throw std::invalid_argument("3D counting supports trivial and kubota");
  if (!(xmax >= 1) || xmax > 1e3) throw std::invalid_argument("--xmax must lie in [1, 1000] in 3D");
  progress("3D box enumeration up to N = " + fmt_double(xmax) + " with radius doubling");
  auto r = psi3_bruteforce(xmax, tag, radius, G.nthreads());
  Table t{{"x", "system", "R", "classes", "psi_re", "psi_im", "psi_2R_re", "classes_2R", "stable", "main"}, {}};
  t.add({xmax, to_string(tag), r.R, static_cast<long long>(r.classes), r.value.real(), r.value.imag(), r.value_2R.real(),
         static_cast<long long>(r.classes_2R), r.stable, main_term(xmax, tag, 3)});
  emit(t);
  if (!r.stable) throw InvariantFailure("3D count changed under radius doubling; raise --radius");
  return kOk;
}

int cmd_psi_error(double xmax, MultiplierTag tag, double at) {
  double top = xmax > 0 ? xmax : at;
  auto s = series_for(top, tag);
  auto e = error_at(s, at);
  auto p = s.psi(at);
  Table t{{"x", "psi_re", "psi_im", "main", "err_re", "err_im"}, {}};
  t.add({at, p.real(), p.imag(), s.main(at), e.real(), e.imag()});
  emit(t);
  return kOk;
}

int cmd_psi_fit(double xmax, MultiplierTag tag, double lo, double hi, int n) {
  auto s = series_for(xmax > 0 ? xmax : hi, tag);
  auto f = fit_error_exponent(s, lo, hi, n);
  double envelope = tag == MultiplierTag::Trivial ? 0.85 : 0.75;
  Table t{{"system", "lo", "hi", "n", "slope", "stderr", "used", "envelope", "within"}, {}};
  t.add({to_string(tag), lo, hi, static_cast<long long>(n), f.slope, f.stderr_, static_cast<long long>(f.used), envelope,
         f.slope <= envelope});
  emit(t);
  return kOk;
}

int cmd_psi_moment(double xmax, MultiplierTag tag, double X, double Y, unsigned nodes) {
  auto s = series_for(xmax > 0 ? xmax : X + Y, tag);
  double rms = second_moment(s, X, Y, nodes);
  Table t{{"X", "Y", "nodes", "rms", "log_ratio"}, {}};
  t.add({X, Y, static_cast<long long>(nodes), rms, rms > 0 ? std::log(rms) / std::log(X) : -INFINITY});
  emit(t);
  return kOk;
}

int cmd_psi_short(double xmax, MultiplierTag tag, double x, double y) {
  auto s = series_for(xmax > 0 ? xmax : x + y, tag);
  auto r = short_interval_diff(s, x, y);
  if (!r.hypothesis_ok) std::cerr << "geolab: warning: y outside [x^{(1+|k|)/2}, x]" << std::endl;
  Table t{{"x", "y", "lhs_re", "lhs_im", "main", "hypothesis_ok", "terms"}, {}};
  t.add({x, y, r.lhs.real(), r.lhs.imag(), r.rhs_main, r.hypothesis_ok, static_cast<long long>(r.terms)});
  emit(t);
  return kOk;
}

int cmd_zeta(const std::string& which, const std::string& s_str, double T, const std::string& system) {
  auto s = parse_complex(s_str);
  MultiplierTag tag = parse_system(system);
  try {
    check_zeta_system(tag);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("--system must be trivial or theta for zeta");
  }
  double edge = zeta_region_edge(tag);
  if (s.real() > edge && s.real() <= 1)
    std::cerr << "geolab: warning: Re(s) = " << fmt_double(s.real()) << " lies in (" << fmt_double(edge)
              << ", 1]; the tail bound is not available there" << std::endl;
  progress("zeta " + which + " at T = " + fmt_double(T));
  if (which == "ratio") {
    auto r = ratio_identity_check(s, T, tag, G.nthreads());
    Table t{{"s_re", "s_im", "T", "system", "residual", "bound", "ok"}, {}};
    t.add({s.real(), s.imag(), T, to_string(tag), r.residual, r.bound, r.ok()});
    emit(t);
    if (!r.ok()) throw InvariantFailure("ratio residual exceeds the combined tail bound");
    return kOk;
  }
  ZetaTruncation z;
  if (which == "selberg")
    z = selberg_zeta_trunc(s, T, tag, G.nthreads());
  else if (which == "ruelle")
    z = ruelle_zeta_trunc(s, T, tag, G.nthreads());
  else
    throw std::invalid_argument("--which must be selberg, ruelle or ratio");
  Table t{{"which", "s_re", "s_im", "T", "system", "value_re", "value_im", "log_re", "log_im", "tail_bound", "classes", "ell_max"}, {}};
  t.add({which, s.real(), s.imag(), T, to_string(tag), z.value.real(), z.value.imag(), z.log_value.real(),
         z.log_value.imag(), z.tail_bound, static_cast<long long>(z.classes), static_cast<long long>(z.ell_max)});
  emit(t);
  return kOk;
}

EigenDataset load_dataset(const std::string& path, bool shimura) {
  if (path.empty()) throw std::invalid_argument("--input is required");
  EigenDataset ds;
  try {
    ds = ingest(path);
  } catch (const IngestError& e) {
    throw std::invalid_argument(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  return shimura ? shimura_dataset(ds) : ds;
}

int dataset_dimension(const EigenDataset& ds, int requested) {
  if (requested) return requested;
  return ds.data.empty() ? 2 : spectral_dimension(ds.data[0].tag);
}

Rational parse_rat_opt(const std::string& s, const char* what) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": expected a rational like 9/16, got '" + s + "'");
  }
}

std::string rat_str(const Rational& q) {
  return q.denominator() == 1 ? std::to_string(q.numerator())
                              : std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

int cmd_spectral_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<TableRow> rows;
  try {
    rows = read_table_rows(in);
  } catch (const IngestError& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  Table t{{"dimension", "plain", "twisted", "invariant"}, {}};
  std::map<int, std::set<Rational>> seen;
  for (const auto& r : rows) {
    Rational inv = table_invariant(r.plain, r.twisted, r.dimension);
    seen[r.dimension].insert(inv);
    t.add({static_cast<long long>(r.dimension), rat_str(r.plain), rat_str(r.twisted), rat_str(inv)});
  }
  emit(t);
  for (const auto& [d, s] : seen)
    if (s.size() != 1) throw InvariantFailure("invariant not constant in dimension " + std::to_string(d));
  return kOk;
}

int cmd_recipe_barner(double xmax, int per_decade) {
  if (!(xmax >= 10)) throw std::invalid_argument("--xmax must be >= 10");
  if (per_decade < 1) throw std::invalid_argument("--per-decade must be >= 1");
  auto s = series_for(xmax, MultiplierTag::Theta);
  Table t{{"x", "psi_re", "psi_im", "main", "ratio", "deviation"}, {}};
  std::vector<double> xs;
  for (int k = per_decade;; ++k) {
    double x = std::pow(10.0, static_cast<double>(k) / per_decade);
    if (x > xmax * (1 + 1e-12)) break;
    xs.push_back(std::min(x, xmax));
  }
  if (xs.empty() || xs.back() < xmax * (1 - 1e-12)) xs.push_back(xmax);
  for (double x : xs) {
    auto p = s.psi(x);
    double m = s.main(x);
    t.add({x, p.real(), p.imag(), m, p.real() / m, std::abs(p.real() / m - 1)});
  }
  emit(t);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geolab: twisted prime geodesic computations"};
  app.set_help_all_flag("--help-all");
  app.fallthrough();
  app.add_option("--format", G.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", G.out, "output file (default stdout)");
  app.add_option("--threads", G.threads, "worker count (default GEOLAB_THREADS or hardware)");
  app.add_option("--seed", G.seed, "seed for randomized selftests");
  app.add_flag("--quiet", G.quiet, "no progress on stderr");
  std::string recipe;
  double recipe_xmax = 1e6;
  int per_decade = 4;
  app.add_option("--recipe", recipe, "run an end-to-end recipe (barner)")->check(CLI::IsMember({"barner"}));
  app.add_option("--xmax", recipe_xmax, "x_max for --recipe");
  app.add_option("--per-decade", per_decade, "ratio table points per decade for --recipe");

  std::function<int()> action;
  auto set = [&](CLI::App* sub, std::function<int()> fn) { sub->callback([&action, fn] { action = fn; }); };

  // geodesics
  auto* geo = app.add_subcommand("geodesics", "primitive hyperbolic classes of PSL2(Z)");
  bool geo_self = false;
  geo->add_flag("--selftest", geo_self);
  auto* geo_enum = geo->add_subcommand("enumerate", "list classes with N <= xmax");
  double geo_x = 0;
  bool geo_pow = false;
  geo_enum->add_option("--xmax", geo_x)->required();
  geo_enum->add_flag("--powers", geo_pow, "include non-primitive classes");
  set(geo_enum, [&] { return cmd_geodesics_enumerate(geo_x, geo_pow); });
  geo->callback([&] {
    if (geo_self) action = selftest_geodesics;
    else if (!action) throw CLI::ValidationError("geodesics", "expected 'enumerate' or --selftest");
  });

  // multiplier
  auto* mul = app.add_subcommand("multiplier", "evaluate multiplier systems");
  bool mul_self = false;
  mul->add_flag("--selftest", mul_self);
  auto* mul_eval = mul->add_subcommand("eval", "exact matrix of nu(gamma)");
  std::string gamma, mul_sys = "theta";
  mul_eval->add_option("--gamma", gamma, "a,b,c,d")->required();
  mul_eval->add_option("--system", mul_sys, "trivial|theta|nu2|nu3|nu4|kubota");
  set(mul_eval, [&] { return cmd_multiplier_eval(gamma, mul_sys); });
  mul->callback([&] {
    if (mul_self) action = selftest_multiplier;
    else if (!action) throw CLI::ValidationError("multiplier", "expected 'eval' or --selftest");
  });

  // kloosterman
  auto* klo = app.add_subcommand("kloosterman", "Kloosterman sums S(m,n;c)");
  long long km = 1, kn = 1, kc = 100;
  std::string ksys = "trivial";
  bool klo_self = false;
  klo->add_option("--m", km);
  klo->add_option("--n", kn);
  klo->add_option("--cmax", kc);
  klo->add_option("--system", ksys, "trivial|theta");
  klo->add_flag("--selftest", klo_self);
  klo->callback([&] { action = klo_self ? std::function<int()>(selftest_kloosterman) : [&] { return cmd_kloosterman(km, kn, kc, ksys); }; });

  // psi
  auto* psi = app.add_subcommand("psi", "twisted prime geodesic counting");
  double pxmax = 0;
  std::string psys = "trivial", pemit;
  int pdim = 2;
  long long pradius = 0;
  bool psi_self = false;
  psi->add_option("--xmax", pxmax);
  psi->add_option("--system", psys, "trivial|theta|nu2|nu3|nu4|kubota");
  psi->add_option("--emit", pemit, "series CSV/JSON path");
  psi->add_option("--dim", pdim, "2 or 3")->check(CLI::IsMember({2, 3}));
  psi->add_option("--radius", pradius, "3D box radius (default from x)");
  psi->add_flag("--selftest", psi_self);
  auto* perr = psi->add_subcommand("error", "E(x) = Psi(x) - M(x)");
  double pat = 0;
  perr->add_option("--at", pat)->required();
  set(perr, [&] { return cmd_psi_error(pxmax, parse_system(psys), pat); });
  auto* pfit = psi->add_subcommand("fit", "log-log slope of |E|");
  double plo = 1e3, phi = 1e6;
  int pn = 64;
  pfit->add_option("--lo", plo);
  pfit->add_option("--hi", phi);
  pfit->add_option("--n", pn);
  set(pfit, [&] { return cmd_psi_fit(pxmax, parse_system(psys), plo, phi, pn); });
  auto* pmom = psi->add_subcommand("moment", "windowed second moment of E");
  double pX = 1e5, pY = 1e3;
  unsigned pnodes = 20;
  pmom->add_option("--X", pX);
  pmom->add_option("--Y", pY);
  pmom->add_option("--nodes", pnodes, "10, 20 or 40");
  set(pmom, [&] { return cmd_psi_moment(pxmax, parse_system(psys), pX, pY, pnodes); });
  auto* pshort = psi->add_subcommand("short", "Psi(x+y) - Psi(x) against the main term");
  double psx = 1e5, psy = 1e4;
  pshort->add_option("--x", psx);
  pshort->add_option("--y", psy);
  set(pshort, [&] { return cmd_psi_short(pxmax, parse_system(psys), psx, psy); });
  psi->callback([&] {
    if (psi_self) {
      action = selftest_psi;
      return;
    }
    if (action) return;
    action = [&] {
      MultiplierTag tag = parse_system(psys);
      if (pdim == 3 || tag == MultiplierTag::Kubota) return cmd_psi3(pxmax, tag, pradius);
      return cmd_psi_series(pxmax, tag, pemit);
    };
  });

  // zeta
  auto* zet = app.add_subcommand("zeta", "truncated Selberg and Ruelle zeta functions");
  std::string zwhich = "selberg", zs = "2", zsys = "trivial";
  double zT = 100;
  bool zet_self = false;
  zet->add_option("--which", zwhich, "selberg|ruelle|ratio");
  zet->add_option("--s", zs, "complex point, e.g. 2+0i");
  zet->add_option("--T", zT);
  zet->add_option("--system", zsys, "trivial|theta");
  zet->add_flag("--selftest", zet_self);
  zet->callback([&] { action = zet_self ? std::function<int()>(selftest_zeta) : [&] { return cmd_zeta(zwhich, zs, zT, zsys); }; });

  // spectral
  auto* spe = app.add_subcommand("spectral", "spectral-side sums and exponent calculus");
  bool spe_self = false;
  spe->add_flag("--selftest", spe_self);
  std::string sin_path;
  bool sshim = false;
  double sT = 100, sx = 1e4;
  int sdim = 0;
  auto eig_opts = [&](CLI::App* c) {
    c->add_option("--input", sin_path, "eigenvalue CSV")->required();
    c->add_flag("--shimura", sshim, "map weight-0 data to weight 1/2 first");
    c->add_option("--T", sT);
  };
  auto* sweyl = spe->add_subcommand("weyl", "Weyl law check");
  eig_opts(sweyl);
  bool swin = false;
  sweyl->add_flag("--windows", swin, "emit unit-window counts instead of the summary");
  set(sweyl, [&] {
    auto ds = load_dataset(sin_path, sshim);
    auto w = weyl_check(ds, sT, 1);
    if (swin) {
      Table t{{"lo", "hi", "count"}, {}};
      for (std::size_t i = 0; i < w.windows.size(); ++i)
        t.add({static_cast<double>(i), static_cast<double>(i + 1), w.windows[i]});
      emit(t);
      return kOk;
    }
    Table t{{"T", "observed", "predicted", "ratio", "window_constant", "volume", "cusps"}, {}};
    t.add({sT, w.observed, w.predicted, w.ratio, w.window_constant, ds.volume, static_cast<long long>(ds.cusps)});
    emit(t);
    return kOk;
  });
  auto* sef = spe->add_subcommand("efsum", "explicit-formula spectral sum");
  eig_opts(sef);
  sef->add_option("--x", sx);
  sef->add_option("--dim", sdim, "2 or 3 (default from tag)");
  set(sef, [&] {
    auto ds = load_dataset(sin_path, sshim);
    int d = dataset_dimension(ds, sdim);
    auto v = explicit_formula_sum(sx, sT, ds, d);
    Table t{{"x", "T", "dim", "re", "im"}, {}};
    t.add({sx, sT, static_cast<long long>(d), v.real(), v.imag()});
    emit(t);
    return kOk;
  });
  auto* sexp = spe->add_subcommand("expsum", "spectral exponential sum of X^{it}");
  eig_opts(sexp);
  double sX = 1e4;
  sexp->add_option("--X", sX);
  sexp->add_option("--dim", sdim, "2 or 3 (default from tag)");
  set(sexp, [&] {
    auto ds = load_dataset(sin_path, sshim);
    int d = dataset_dimension(ds, sdim);
    auto e = spectral_exp_sum(sX, sT, ds, d);
    Table t{{"X", "T", "dim", "re", "im", "abs", "trivial_bound", "shape"}, {}};
    t.add({sX, sT, static_cast<long long>(d), e.value.real(), e.value.imag(), std::abs(e.value), e.trivial_bound, e.shape});
    emit(t);
    return kOk;
  });
  auto* smm = spe->add_subcommand("mean2max", "pointwise exponent from a mean-square exponent");
  std::string sd2, se2, sk = "0";
  smm->add_option("--delta2", sd2)->required();
  smm->add_option("--eta2", se2)->required();
  smm->add_option("--k", sk);
  set(smm, [&] {
    Rational v = mean_to_max(parse_rat_opt(sd2, "--delta2"), parse_rat_opt(se2, "--eta2"), parse_rat_opt(sk, "--k"));
    Table t{{"delta2", "eta2", "k", "delta1", "delta1_float"}, {}};
    t.add({sd2, se2, sk, rat_str(v), boost::rational_cast<double>(v)});
    emit(t);
    return kOk;
  });
  auto* stab = spe->add_subcommand("table", "check the plain/twisted exponent invariant");
  std::string stab_in;
  stab->add_option("--input", stab_in, "CSV dimension,plain,twisted")->required();
  set(stab, [&] { return cmd_spectral_table(stab_in); });
  spe->callback([&] {
    if (spe_self) action = selftest_spectral;
    else if (!action) throw CLI::ValidationError("spectral", "expected weyl|efsum|expsum|mean2max|table or --selftest");
  });

  // recipe
  auto* rec = app.add_subcommand("recipe", "end-to-end experiments");
  auto* rbar = rec->add_subcommand("barner", "Psi(x, theta) against (4/3) x^{3/4}");
  double rxmax = 1e6;
  int rpd = 4;
  bool rec_self = false;
  rbar->add_option("--xmax", rxmax);
  rbar->add_option("--per-decade", rpd);
  rec->add_flag("--selftest", rec_self);
  set(rbar, [&] { return cmd_recipe_barner(rxmax, rpd); });
  rec->callback([&] {
    if (rec_self) action = [] {
      Checks c;
      auto s = build_psi(1e4, MultiplierTag::Theta, G.nthreads());
      double r = s.psi(1e4).real() / s.main(1e4);
      c.add("theta_ratio_1e4", std::abs(r - 1) < 0.15, fmt_double(r));
      return finish(c);
    };
    else if (!action) throw CLI::ValidationError("recipe", "expected 'barner' or --selftest");
  });

  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
    if (!action) {
      if (recipe == "barner") action = [&] { return cmd_recipe_barner(recipe_xmax, per_decade); };
      else throw CLI::ValidationError("geolab", "a subcommand or --recipe is required (see --help)");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }
  try {
    return action();
  } catch (const InvariantFailure& e) {
    std::cerr << "geolab: invariant violation: " << e.what() << std::endl;
    return kInvariant;
  } catch (const std::logic_error& e) {
    // invalid_argument, domain_error, out_of_range
    std::cerr << "geolab: error: " << e.what() << std::endl;
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "geolab: error: " << e.what() << std::endl;
    return kValidation;
  }
}
