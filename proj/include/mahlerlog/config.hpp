#pragma once

#include "mahlerlog/heights.hpp"
#include "mahlerlog/interp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mahlerlog {

/// Local field element u^ord (d_0 + d_1 u + ...), digits given as field-element codes.
struct ElemSpec {
  long ord = 0;
  std::vector<long long> digits;
};

/// Rational function num/den in vartheta, coefficient lists from the constant term up.
struct RatFuncSpec {
  std::vector<long long> num{1};
  std::vector<long long> den{1};
};

struct RunConfig {
  unsigned p = 3, m = 1, d = 1, h = 0;
  long e = 2;
  std::vector<unsigned> modulus;  // of F_{q^d} over F_p; empty selects the default
  ElemSpec vartheta{-2, {2}};
  ElemSpec tilde_theta{-1, {1}};
  std::vector<ElemSpec> targets{{2, {2}}};  // 1/theta = -u^2
  RatFuncSpec beta;
  unsigned s = 1;
  long prec_z = 200;
  long prec_u = 400;
  std::string suite = "all";
  std::optional<std::string> negative_control;
  std::uint64_t seed = 1;
  // relation detector
  unsigned relation_degree = 3;
  long relation_precision = 300;
  // auxiliary polynomials: (s, N) cases and the scan horizon beyond c0
  std::vector<std::pair<unsigned, unsigned>> aux_cases{{1, 2}, {1, 3}, {2, 3}};
  unsigned aux_extra_steps = 3;
  // heights sampling
  unsigned height_fractions = 500, height_families = 100, house_pairs = 200;
  // Philippon parameters (exact rationals as "num/den" strings)
  std::optional<PhilipponInput> philippon;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"carlitz", "interp", "mahler", "heights", "auxpoly"};
  return names;
}

namespace detail {

inline std::string rational_string(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rational parse_rational(const json& j, const std::string& what) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  require(j.is_string(), ErrorKind::ConfigError, what + ": expected an integer or a \"num/den\" string");
  const std::string s = j.get<std::string>();
  try {
    std::size_t pos = 0;
    const long long num = std::stoll(s, &pos);
    if (pos == s.size()) return Rational(num);
    require(s[pos] == '/', ErrorKind::ConfigError, what + ": malformed rational \"" + s + "\"");
    std::size_t pos2 = 0;
    const long long den = std::stoll(s.substr(pos + 1), &pos2);
    require(pos + 1 + pos2 == s.size() && den != 0, ErrorKind::ConfigError, what + ": malformed rational \"" + s + "\"");
    return Rational(num, den);
  } catch (const std::logic_error&) {
    fail(ErrorKind::ConfigError, what + ": malformed rational \"" + s + "\"");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::ConfigError, where + "." + key + ": wrong type");
  }
}

inline ElemSpec parse_elem(const json& j, const std::string& where) {
  require(j.is_object() && j.contains("ord") && j.contains("digits"), ErrorKind::ConfigError,
          where + ": expected {\"ord\": int, \"digits\": [codes]}");
  ElemSpec e;
  e.ord = get_or<long>(j, "ord", 0, where);
  e.digits = get_or<std::vector<long long>>(j, "digits", {}, where);
  require(!e.digits.empty(), ErrorKind::ConfigError, where + ": digits must be nonempty");
  return e;
}

inline json elem_json(const ElemSpec& e) { return {{"ord", e.ord}, {"digits", e.digits}}; }

}  // namespace detail

/// Reduces an integer or "num/den" coefficient into F_p.
inline long long reduce_mod_p(const json& c, unsigned p, const std::string& where) {
  const Rational r = detail::parse_rational(c, where);
  auto md = [p](long long x) { return ((x % static_cast<long long>(p)) + p) % p; };
  const long long num = md(r.numerator()), den = md(r.denominator());
  require(den != 0, ErrorKind::ConfigError, where + ": denominator divisible by p");
  long long inv = 1;
  for (unsigned i = 0; i + 2 < p; ++i) inv = inv * den % p;  // den^{p-2}
  return num * inv % p;
}

inline RunConfig parse_config(const json& j) {
  require(j.is_object(), ErrorKind::ConfigError, "config must be a JSON object");
  static const std::set<std::string> known{"p",        "m",         "d",        "h",          "e",
                                           "modulus",  "vartheta",  "tilde_theta", "targets", "beta",
                                           "s",        "prec_z",    "prec_u",   "suite",      "negative_control",
                                           "seed",     "relations", "auxpoly",  "heights",    "philippon"};
  for (const auto& [k, v] : j.items()) require(known.count(k), ErrorKind::ConfigError, "unknown config key \"" + k + "\"");
  RunConfig c;
  const std::string w = "config";
  c.p = detail::get_or<unsigned>(j, "p", c.p, w);
  c.m = detail::get_or<unsigned>(j, "m", c.m, w);
  c.d = detail::get_or<unsigned>(j, "d", c.d, w);
  c.h = detail::get_or<unsigned>(j, "h", c.h, w);
  c.e = detail::get_or<long>(j, "e", c.e, w);
  require(c.p >= 2 && c.m >= 1 && c.d >= 1 && c.e >= 1, ErrorKind::ConfigError, "p, m, d, e out of range");
  c.modulus = detail::get_or<std::vector<unsigned>>(j, "modulus", {}, w);
  if (j.contains("vartheta")) c.vartheta = detail::parse_elem(j["vartheta"], "vartheta");
  if (j.contains("tilde_theta")) c.tilde_theta = detail::parse_elem(j["tilde_theta"], "tilde_theta");
  if (j.contains("targets")) {
    require(j["targets"].is_array() && !j["targets"].empty(), ErrorKind::ConfigError, "targets must be a nonempty list");
    c.targets.clear();
    for (std::size_t i = 0; i < j["targets"].size(); ++i)
      c.targets.push_back(detail::parse_elem(j["targets"][i], "targets[" + std::to_string(i) + "]"));
  }
  if (j.contains("beta")) {
    const json& b = j["beta"];
    require(b.is_object() && b.contains("num"), ErrorKind::ConfigError, "beta: expected {\"num\": [...], \"den\": [...]}");
    auto coeffs = [&](const char* key) {
      std::vector<long long> out;
      if (!b.contains(key)) return std::vector<long long>{1};
      require(b[key].is_array() && !b[key].empty(), ErrorKind::ConfigError, std::string("beta.") + key + ": nonempty list");
      for (const auto& x : b[key]) out.push_back(reduce_mod_p(x, c.p, std::string("beta.") + key));
      return out;
    };
    c.beta.num = coeffs("num");
    c.beta.den = coeffs("den");
  }
  c.s = detail::get_or<unsigned>(j, "s", c.s, w);
  c.prec_z = detail::get_or<long>(j, "prec_z", c.prec_z, w);
  c.prec_u = detail::get_or<long>(j, "prec_u", c.prec_u, w);
  require(c.s >= 1 && c.prec_z >= 2 && c.prec_u >= 2, ErrorKind::ConfigError, "s, prec_z, prec_u out of range");
  c.suite = detail::get_or<std::string>(j, "suite", c.suite, w);
  if (j.contains("negative_control")) c.negative_control = detail::get_or<std::string>(j, "negative_control", "", w);
  c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed, w);
  auto check_suite = [](const std::string& s, bool allow_all) {
    const auto& ns = suite_names();
    require((allow_all && s == "all") || std::find(ns.begin(), ns.end(), s) != ns.end(), ErrorKind::ConfigError,
            "unknown suite \"" + s + "\"");
  };
  check_suite(c.suite, true);
  if (c.negative_control) check_suite(*c.negative_control, false);

  if (j.contains("relations")) {
    const json& r = j["relations"];
    require(r.is_object(), ErrorKind::ConfigError, "relations must be an object");
    c.relation_degree = detail::get_or<unsigned>(r, "degree", c.relation_degree, "relations");
    c.relation_precision = detail::get_or<long>(r, "precision", c.relation_precision, "relations");
  }
  if (j.contains("auxpoly")) {
    const json& a = j["auxpoly"];
    require(a.is_object(), ErrorKind::ConfigError, "auxpoly must be an object");
    if (a.contains("cases")) {
      c.aux_cases.clear();
      require(a["cases"].is_array(), ErrorKind::ConfigError, "auxpoly.cases must be a list of [s, N]");
      for (const auto& x : a["cases"]) {
        require(x.is_array() && x.size() == 2 && x[0].is_number_unsigned() && x[1].is_number_unsigned(),
                ErrorKind::ConfigError, "auxpoly.cases entries must be [s, N]");
        c.aux_cases.emplace_back(x[0].get<unsigned>(), x[1].get<unsigned>());
      }
    }
    c.aux_extra_steps = detail::get_or<unsigned>(a, "extra_steps", c.aux_extra_steps, "auxpoly");
  }
  if (j.contains("heights")) {
    const json& h = j["heights"];
    require(h.is_object(), ErrorKind::ConfigError, "heights must be an object");
    c.height_fractions = detail::get_or<unsigned>(h, "fractions", c.height_fractions, "heights");
    c.height_families = detail::get_or<unsigned>(h, "families", c.height_families, "heights");
    c.house_pairs = detail::get_or<unsigned>(h, "pairs", c.house_pairs, "heights");
  }
  if (j.contains("philippon")) {
    const json& ph = j["philippon"];
    require(ph.is_object(), ErrorKind::ConfigError, "philippon must be an object");
    PhilipponInput in;
    auto rat = [&](const char* key, Rational& dst) {
      if (ph.contains(key)) dst = detail::parse_rational(ph[key], std::string("philippon.") + key);
    };
    rat("c1", in.c1);
    rat("c2", in.c2);
    rat("c3", in.c3);
    rat("c4", in.c4);
    rat("c5", in.c5);
    rat("c6", in.c6);
    rat("c", in.c);
    in.c0 = detail::get_or<long>(ph, "c0", in.c0, "philippon");
    in.d = detail::get_or<unsigned>(ph, "d", in.d, "philippon");
    in.s = detail::get_or<unsigned>(ph, "s", in.s, "philippon");
    in.N = detail::get_or<long>(ph, "N", in.N, "philippon");
    in.T = detail::get_or<long>(ph, "T", in.T, "philippon");
    if (ph.contains("n_N")) in.n_N = detail::get_or<long long>(ph, "n_N", 0, "philippon");
    c.philippon = in;
  }
  return c;
}

/// Canonical form: every field written, keys sorted, digits as reduced codes.
inline json config_to_json(const RunConfig& c) {
  json j;
  j["p"] = c.p;
  j["m"] = c.m;
  j["d"] = c.d;
  j["h"] = c.h;
  j["e"] = c.e;
  j["modulus"] = c.modulus;
  j["vartheta"] = detail::elem_json(c.vartheta);
  j["tilde_theta"] = detail::elem_json(c.tilde_theta);
  json ts = json::array();
  for (const auto& t : c.targets) ts.push_back(detail::elem_json(t));
  j["targets"] = ts;
  j["beta"] = {{"num", c.beta.num}, {"den", c.beta.den}};
  j["s"] = c.s;
  j["prec_z"] = c.prec_z;
  j["prec_u"] = c.prec_u;
  j["suite"] = c.suite;
  if (c.negative_control) j["negative_control"] = *c.negative_control;
  j["seed"] = c.seed;
  j["relations"] = {{"degree", c.relation_degree}, {"precision", c.relation_precision}};
  json cases = json::array();
  for (const auto& [s, N] : c.aux_cases) cases.push_back({s, N});
  j["auxpoly"] = {{"cases", cases}, {"extra_steps", c.aux_extra_steps}};
  j["heights"] = {{"fractions", c.height_fractions}, {"families", c.height_families}, {"pairs", c.house_pairs}};
  if (c.philippon) {
    const PhilipponInput& in = *c.philippon;
    json ph{{"c1", detail::rational_string(in.c1)}, {"c2", detail::rational_string(in.c2)},
            {"c3", detail::rational_string(in.c3)}, {"c4", detail::rational_string(in.c4)},
            {"c5", detail::rational_string(in.c5)}, {"c6", detail::rational_string(in.c6)},
            {"c", detail::rational_string(in.c)},   {"c0", in.c0},
            {"d", in.d},                            {"s", in.s},
            {"N", in.N},                            {"T", in.T}};
    if (in.n_N) ph["n_N"] = *in.n_N;
    j["philippon"] = ph;
  }
  return j;
}

inline std::string canonical_config_text(const RunConfig& c) { return config_to_json(c).dump(2) + "\n"; }

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// The instance described by a config; presentation errors surface as ConfigError.
inline Instance build_instance(const RunConfig& c, std::optional<long> prec_z = std::nullopt,
                               std::optional<long> prec_u = std::nullopt) {
  try {
    const GaloisField* F = GaloisField::make(c.p, c.m, c.d, c.modulus).get();
    const long e = c.e;
    auto elem = [&](const ElemSpec& s, const std::string& what) {
      std::vector<FieldElem> ds;
      for (long long x : s.digits) {
        require(x >= 0 && static_cast<unsigned long>(x) < F->order(), ErrorKind::ConfigError,
                what + ": digit code out of range");
        ds.push_back(FieldElem(F, static_cast<GaloisField::Code>(x)));
      }
      return LocalFieldElem::from_coeffs(F, e, s.ord, ds);
    };
    LocalEmbedding emb;
    emb.field = F;
    emb.e = e;
    emb.h = c.h;
    emb.vartheta = elem(c.vartheta, "vartheta");
    emb.cap = prec_u.value_or(c.prec_u);
    CarlitzContext ctx = make_carlitz_context(emb, elem(c.tilde_theta, "tilde_theta"));
    std::vector<LocalFieldElem> ts;
    for (std::size_t i = 0; i < c.targets.size(); ++i) ts.push_back(elem(c.targets[i], "targets"));
    auto poly = [&](const std::vector<long long>& cs) {
      std::vector<GaloisField::Code> codes;
      for (long long x : cs) {
        require(x >= 0 && static_cast<unsigned long>(x) < c.p, ErrorKind::ConfigError, "beta coefficient out of F_p");
        codes.push_back(static_cast<GaloisField::Code>(x));
      }
      return Poly(F, codes);
    };
    const Poly den = poly(c.beta.den);
    require(!den.is_zero(), ErrorKind::ConfigError, "beta denominator is zero");
    RatFunc beta(poly(c.beta.num), den, c.h);
    return make_instance(ctx, ts, beta, c.s, prec_z.value_or(c.prec_z));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    fail(ErrorKind::ConfigError, std::string("instance presentation rejected: ") + e.what());
  }
}

}  // namespace mahlerlog
