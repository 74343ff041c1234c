#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"

namespace geolab {

enum class SpectralTag { Weight0_2D, WeightHalf_2D, Trivial_3D, Kubota_3D };

inline SpectralTag parse_spectral_tag(const std::string& s) {
  if (s == "weight0-2D") return SpectralTag::Weight0_2D;
  if (s == "weight1/2-2D") return SpectralTag::WeightHalf_2D;
  if (s == "trivial-3D") return SpectralTag::Trivial_3D;
  if (s == "kubota-3D") return SpectralTag::Kubota_3D;
  throw std::invalid_argument("unknown spectral tag: " + s);
}

inline std::string to_string(SpectralTag t) {
  switch (t) {
    case SpectralTag::Weight0_2D: return "weight0-2D";
    case SpectralTag::WeightHalf_2D: return "weight1/2-2D";
    case SpectralTag::Trivial_3D: return "trivial-3D";
    case SpectralTag::Kubota_3D: return "kubota-3D";
  }
  return "?";
}

inline int spectral_dimension(SpectralTag t) {
  return t == SpectralTag::Weight0_2D || t == SpectralTag::WeightHalf_2D ? 2 : 3;
}

// 2D: lambda = 1/4 + t^2;  3D: s = 1 + it
struct SpectralDatum {
  double t = 0;
  int multiplicity = 1;
  SpectralTag tag = SpectralTag::Weight0_2D;
};

struct EigenDataset {
  std::vector<SpectralDatum> data;
  std::string provenance;
  double volume = std::numbers::pi / 3;  // PSL2(Z)\H
  int cusps = 1;

  long long count_upto(double T) const {
    long long n = 0;
    for (const auto& d : data)
      if (d.t > 0 && d.t <= T) n += d.multiplicity;
    return n;
  }
};

struct IngestError : std::runtime_error {
  int line;
  IngestError(int l, const std::string& msg) : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(trim(f));
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double_strict(const std::string& s, int line, const char* what) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    throw IngestError(line, std::string("bad ") + what + " '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) throw IngestError(line, std::string("bad ") + what + " '" + s + "'");
  return v;
}

}  // namespace detail

// CSV `t,multiplicity,tag`; `# vol=`, `# cusps=` set surface constants, other comments are provenance
inline EigenDataset ingest_stream(std::istream& in) {
  EigenDataset ds;
  std::string raw;
  int line = 0;
  bool header = false;
  double last_t = -1;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::trim(raw);
    if (s.empty()) continue;
    if (s[0] == '#') {
      std::string c = detail::trim(s.substr(1));
      if (c.rfind("vol=", 0) == 0) {
        ds.volume = detail::parse_double_strict(detail::trim(c.substr(4)), line, "volume");
        if (!(ds.volume > 0)) throw IngestError(line, "volume must be positive");
      } else if (c.rfind("cusps=", 0) == 0) {
        double h = detail::parse_double_strict(detail::trim(c.substr(6)), line, "cusp count");
        if (h < 0 || h != std::floor(h)) throw IngestError(line, "cusp count must be a nonnegative integer");
        ds.cusps = static_cast<int>(h);
      } else {
        if (!ds.provenance.empty()) ds.provenance += "\n";
        ds.provenance += c;
      }
      continue;
    }
    auto f = detail::split_csv(s);
    if (!header) {
      if (f != std::vector<std::string>{"t", "multiplicity", "tag"})
        throw IngestError(line, "expected header 't,multiplicity,tag'");
      header = true;
      continue;
    }
    if (f.size() != 3) throw IngestError(line, "expected 3 fields, got " + std::to_string(f.size()));
    SpectralDatum d;
    d.t = detail::parse_double_strict(f[0], line, "t");
    double m = detail::parse_double_strict(f[1], line, "multiplicity");
    if (d.t < 0) throw IngestError(line, "negative spectral parameter");
    if (m != std::floor(m) || m < 0) throw IngestError(line, "multiplicity must be a nonnegative integer");
    if (m == 0) throw IngestError(line, "zero multiplicity");
    d.multiplicity = static_cast<int>(m);
    try {
      d.tag = parse_spectral_tag(f[2]);
    } catch (const std::invalid_argument& e) {
      throw IngestError(line, e.what());
    }
    if (d.t < last_t) throw IngestError(line, "t not ascending");
    last_t = d.t;
    ds.data.push_back(d);
  }
  return ds;
}

inline EigenDataset ingest_string(const std::string& s) {
  std::istringstream in(s);
  return ingest_stream(in);
}

inline EigenDataset ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest: cannot open " + path);
  return ingest_stream(in);
}

// ---------------------------------------------------------------- Shimura maps

// 2D: s_f - 1/2 = 2 (s~ - 1/2), so t~ = t/2 on the tempered line
inline double shimura_map_2d(double t) { return t / 2; }
inline double shimura_unmap_2d(double t_tilde) { return 2 * t_tilde; }
inline Rational shimura_map_2d(const Rational& t) { return t / Rational(2); }
inline Rational shimura_unmap_2d(const Rational& t) { return t * Rational(2); }
inline Rational shimura_map_2d_s(const Rational& s) { return Rational(1, 2) + (s - Rational(1, 2)) / Rational(2); }

// 3D: s_f - 1 = +-3 (s~ - 1); both branches
inline std::pair<Rational, Rational> shimura_map_3d(const Rational& s) {
  Rational d = (s - Rational(1)) / Rational(3);
  return {Rational(1) + d, Rational(1) - d};
}
inline std::pair<std::complex<double>, std::complex<double>> shimura_map_3d(std::complex<double> s) {
  auto d = (s - 1.0) / 3.0;
  return {1.0 + d, 1.0 - d};
}

// weight-1/2 data from weight-0 data
inline EigenDataset shimura_dataset(const EigenDataset& w0) {
  EigenDataset out;
  out.volume = w0.volume;
  out.cusps = w0.cusps;
  out.provenance = (w0.provenance.empty() ? std::string() : w0.provenance + "\n") + "mapped t -> t/2 to weight 1/2";
  for (auto d : w0.data) {
    if (d.tag != SpectralTag::Weight0_2D) throw std::invalid_argument("shimura_dataset: expects weight0-2D rows");
    d.t = shimura_map_2d(d.t);
    d.tag = SpectralTag::WeightHalf_2D;
    out.data.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------- spectral sums

// sum_{0<t<=T} mult sum_+- x^{b +- it}/(b +- it), b = 1/2 (2D) or 1 (3D)
inline std::complex<double> explicit_formula_sum(double x, double T, const EigenDataset& ds, int dimension) {
  if (dimension != 2 && dimension != 3) throw std::invalid_argument("explicit_formula_sum: dimension must be 2 or 3");
  double b = dimension == 2 ? 0.5 : 1.0;
  std::complex<long double> acc = 0;
  double lx = std::log(x);
  for (const auto& d : ds.data) {
    if (!(d.t > 0 && d.t <= T)) continue;
    for (double sg : {1.0, -1.0}) {
      std::complex<double> rho(b, sg * d.t);
      std::complex<double> v = std::exp(rho * lx) / rho * static_cast<double>(d.multiplicity);
      acc += std::complex<long double>(v.real(), v.imag());
    }
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

struct ExpSum {
  std::complex<double> value;
  double trivial_bound = 0;  // sum of multiplicities
  double shape = 0;          // T^{5/4} X^{1/16} (2D) or T^{7/4} X^{1/12} + T^2 (3D), report only
};

inline ExpSum spectral_exp_sum(double X, double T, const EigenDataset& ds, int dimension = 2) {
  ExpSum r;
  std::complex<long double> acc = 0;
  double lX = std::log(X);
  for (const auto& d : ds.data) {
    if (!(d.t > 0 && d.t <= T)) continue;
    std::complex<double> v = std::polar(static_cast<double>(d.multiplicity), d.t * lX);
    acc += std::complex<long double>(v.real(), v.imag());
    r.trivial_bound += d.multiplicity;
  }
  r.value = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  r.shape = dimension == 2 ? std::pow(T, 1.25) * std::pow(X, 1.0 / 16) : std::pow(T, 1.75) * std::pow(X, 1.0 / 12) + T * T;
  return r;
}

struct WeylCheck {
  long long observed = 0;
  double predicted = 0;
  double ratio = 0;
  std::vector<long long> windows;  // counts in [n, n+1), n = 0 .. ceil(T)-1
  double window_constant = 0;      // max window count / T
};

// vol dim/(4 pi) T^2 - (h dim / pi) T log T
inline WeylCheck weyl_check(const EigenDataset& ds, double T, int dim = 1) {
  if (!(T > 1)) throw std::domain_error("weyl_check: T must exceed 1");
  WeylCheck w;
  w.observed = ds.count_upto(T) * dim;
  w.predicted = ds.volume * dim / (4 * std::numbers::pi) * T * T - ds.cusps * dim / std::numbers::pi * T * std::log(T);
  w.ratio = static_cast<double>(w.observed) / w.predicted;
  w.windows.assign(static_cast<std::size_t>(std::ceil(T)), 0);
  for (const auto& d : ds.data)
    if (d.t > 0 && d.t <= T) w.windows[std::min(w.windows.size() - 1, static_cast<std::size_t>(d.t))] += d.multiplicity;
  for (auto c : w.windows) w.window_constant = std::max(w.window_constant, static_cast<double>(c) / T);
  return w;
}

// ---------------------------------------------------------------- exponent calculus

struct ExponentRecord {
  Rational delta1{1, 2}, delta2{1, 2}, eta2{0}, k{0};
  int dimension = 2;

  // 2D: delta1 in [1/2, 3/4], delta2 in [1/2, 2/3];  3D: delta1 in [1, 5/3], delta2 in [1, 8/5]
  void validate() const {
    auto in = [](const Rational& v, Rational lo, Rational hi) { return v >= lo && v <= hi; };
    bool ok = dimension == 2 ? in(delta1, Rational(1, 2), Rational(3, 4)) && in(delta2, Rational(1, 2), Rational(2, 3))
              : dimension == 3 ? in(delta1, Rational(1), Rational(5, 3)) && in(delta2, Rational(1), Rational(8, 5))
                               : false;
    if (!ok || eta2 < 0) throw std::domain_error("ExponentRecord: exponent outside its admissible range");
  }
};

// delta_1 <= (delta_2 + (1 - |k|/2) eta_2) / (1 + eta_2)
inline Rational mean_to_max(const Rational& delta2, const Rational& eta2, const Rational& k) {
  Rational ak = k < 0 ? -k : k;
  if (delta2 < Rational(1, 2) || delta2 > Rational(2, 3))
    throw std::domain_error("mean_to_max: delta_2 outside [1/2, 2/3]");
  if (eta2 < 0) throw std::domain_error("mean_to_max: eta_2 must be >= 0");
  if (ak > Rational(1)) throw std::domain_error("mean_to_max: |k| must be <= 1");
  return (delta2 + (Rational(1) - ak / Rational(2)) * eta2) / (Rational(1) + eta2);
}

// delta(1) - 2 (delta(nu) - 1/2) in 2D, delta(1) - 3 (delta(chi) - 1) in 3D
inline Rational table_invariant(const Rational& plain, const Rational& twisted, int dimension) {
  if (dimension == 2) return plain - Rational(2) * (twisted - Rational(1, 2));
  if (dimension == 3) return plain - Rational(3) * (twisted - Rational(1));
  throw std::invalid_argument("table_invariant: dimension must be 2 or 3");
}

struct TableRow {
  int dimension;
  Rational plain, twisted;
};

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad rational '" + s + "'");
  }
}

// CSV `dimension,plain,twisted` with rational entries like 35/48
inline std::vector<TableRow> read_table_rows(std::istream& in) {
  std::vector<TableRow> rows;
  std::string raw;
  int line = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    auto f = detail::split_csv(s);
    if (!header) {
      if (f != std::vector<std::string>{"dimension", "plain", "twisted"})
        throw IngestError(line, "expected header 'dimension,plain,twisted'");
      header = true;
      continue;
    }
    if (f.size() != 3) throw IngestError(line, "expected 3 fields");
    try {
      rows.push_back({static_cast<int>(std::stol(f[0])), parse_rational(f[1]), parse_rational(f[2])});
    } catch (const std::exception& e) {
      throw IngestError(line, e.what());
    }
  }
  return rows;
}

}  // namespace geolab
