// Acceptance run on the canonical q = 3 instance (Z-precision 200, u-precision 400).
// Prints one PASS/FAIL line per criterion; exits 1 if any criterion fails.
#include "mahlerlog/suites.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <iostream>
#include <sstream>
#include <string>

using namespace mahlerlog;

namespace {

constexpr double kTimeLimit = 10.0;  // seconds per criterion

struct Outcome {
  bool ok = true;
  std::string note;
  void need(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note += (note.empty() ? "" : "; ") + what;
    }
  }
};

std::vector<CheckRecord> with_prefix(const Report& rep, const std::string& prefix) {
  std::vector<CheckRecord> out;
  for (const auto& r : rep.checks)
    if (r.id.rfind(prefix, 0) == 0) out.push_back(r);
  return out;
}

long window_of(const CheckRecord& r) { return r.window >= kExact ? std::numeric_limits<long>::max() : r.window; }

void need_verified(Outcome& o, const std::vector<CheckRecord>& rs, const std::string& what, long min_window = 0,
                   std::size_t min_count = 1) {
  o.need(rs.size() >= min_count, what + ": expected >= " + std::to_string(min_count) + " records, got " +
                                     std::to_string(rs.size()));
  for (const auto& r : rs) {
    o.need(r.status == Status::Verified, r.id + " is " + to_string(r.status));
    o.need(window_of(r) >= min_window, r.id + " window " + std::to_string(r.window) + " < " + std::to_string(min_window));
  }
}

int cli_exit(const std::string& args) {
  const std::string cmd = std::string(MAHLERLOG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const RunConfig& canonical() {
  static const RunConfig cfg = load_config(std::string(MAHLERLOG_CONFIG_DIR) + "/canonical_q3.json");
  return cfg;
}

Outcome carlitz_identities() {
  Outcome o;
  const Report rep = carlitz_suite(canonical(), false);
  need_verified(o, with_prefix(rep, "carlitz.exp_functional"), "exp functional equation");
  need_verified(o, with_prefix(rep, "carlitz.exp_of_log"), "exp o log");
  need_verified(o, with_prefix(rep, "carlitz.log_of_exp"), "log o exp");
  const auto lv = with_prefix(rep, "carlitz.L_valuation");
  need_verified(o, lv, "v(L_k)");
  if (!lv.empty() && lv[0].details.contains("rows")) {
    const json& rows = lv[0].details["rows"];
    o.need(rows.size() == 7, "v(L_k) rows do not cover k <= 6");
    for (const auto& row : rows) {
      // v(L_k) = -(q^{k+1} - q)/(q - 1)
      const long k = row["k"].get<long>();
      const Rational want(-(static_cast<long>(ipow(3, k + 1)) - 3), 2);
      o.need(row["v_inf"] == to_string(want), "v(L_" + std::to_string(k) + ") = " + row["v_inf"].dump());
    }
  }
  const auto pi = with_prefix(rep, "carlitz.pi_identity");
  need_verified(o, pi, "pi_k identity", 0, 2);
  if (!pi.empty()) o.need(pi[0].details.value("k_max", 0) == 5, "pi_k identity not checked up to k = 5");
  o.note = o.ok ? "functional equation, exp/log inverses, v(L_k) k<=6, pi_k k<=5" : o.note;
  return o;
}

Outcome interpolation_values() {
  Outcome o;
  const Report rep = interp_suite(canonical(), false);
  const auto g0 = with_prefix(rep, "interp.G0_value"), g1 = with_prefix(rep, "interp.G1_value");
  need_verified(o, g0, "theta tilde_theta G0(u) = tilde_pi", 300);
  need_verified(o, g1, "theta tilde_theta G1(u) = Log_C(u1)", 300);
  if (o.ok)
    o.note = "agreement to " + std::to_string(std::min(g0[0].window, g1[0].window)) + " u-digits (Z-precision " +
             g0[0].details["prec_z"].dump() + ")";
  return o;
}

Outcome functional_equations() {
  Outcome o;
  const Report rep = mahler_suite(canonical(), false);
  need_verified(o, with_prefix(rep, "mahler.pi_shift_k"), "pi_k shift", 100, 3);
  need_verified(o, with_prefix(rep, "mahler.functional_G"), "G functional equations", 100, 2);
  std::vector<CheckRecord> rec, gaps;
  for (const auto& r : with_prefix(rep, "mahler.recurrence_"))
    (r.id.find("gap") == std::string::npos ? rec : gaps).push_back(r);
  need_verified(o, rec, "recurrence", 100, 3);
  o.need(gaps.size() == 3, "expected three gap records");
  for (const auto& r : gaps) {
    o.need(r.status != Status::Failed, r.id + " failed");
    // v_Z(G_i - partial sum) >= q^{kd}
    const long k = std::stol(r.id.substr(r.id.rfind('k') + 1));
    const long v = r.details["v_Z"].get<long>();
    o.need(v >= static_cast<long>(ipow(3, k)), r.id + ": v_Z " + std::to_string(v) + " < 3^" + std::to_string(k));
  }
  if (o.ok) o.note = "equations (1)-(4) and recurrence k<=3 on >= 100 Z-coefficients";
  return o;
}

Outcome mahler_system() {
  Outcome o;
  const Report rep = mahler_suite(canonical(), false);
  need_verified(o, with_prefix(rep, "mahler.system_inverse"), "A A^-1 = I");
  need_verified(o, with_prefix(rep, "mahler.system_action"), "system action");
  for (int j = 0; j <= 4; ++j)
    need_verified(o, with_prefix(rep, "mahler.orbit_j" + std::to_string(j) + "_"), "orbit j=" + std::to_string(j), 0, 5);
  if (o.ok) o.note = "inverse exact; orbit j<=4 pole-free, invertible, closed forms match series";
  return o;
}

Outcome sigma_action() {
  Outcome o;
  const Report rep = interp_suite(canonical(), false);
  need_verified(o, with_prefix(rep, "interp.sigma_"), "sigma action", 60, 2);
  if (o.ok) o.note = "sigma(G0), sigma(G1) on " + std::to_string(with_prefix(rep, "interp.sigma_")[0].window) +
                     " Z-coefficients";
  return o;
}

Outcome heights() {
  Outcome o;
  const Report rep = heights_suite(canonical(), false);
  const auto w = with_prefix(rep, "heights.weil_vs_degree"), f = with_prefix(rep, "heights.height_inequality"),
             h = with_prefix(rep, "heights.house_laws");
  need_verified(o, w, "Weil height");
  need_verified(o, f, "height inequality");
  need_verified(o, h, "house laws");
  if (!o.ok) return o;
  o.need(w[0].details["checked"] == 500, "fractions checked != 500");
  o.need(f[0].details["checked"] == 100, "families checked != 100");
  o.need(h[0].details["checked"] == 200, "pairs checked != 200");
  if (o.ok) o.note = "500 fractions, 100 families, 200 pairs";
  return o;
}

Outcome auxiliary_polynomial() {
  Outcome o;
  const Report rep = auxpoly_suite(canonical(), false);
  std::ostringstream counts;
  for (const auto& [s, N] : std::vector<std::pair<unsigned, unsigned>>{{1, 2}, {1, 3}, {2, 3}}) {
    const std::string tag = "_s" + std::to_string(s) + "_N" + std::to_string(N);
    const auto c = with_prefix(rep, "auxpoly.construct" + tag);
    need_verified(o, c, "construct" + tag);
    const auto sc = with_prefix(rep, "auxpoly.valuation_scan" + tag);
    o.need(sc.size() == 1 && sc[0].status == Status::Evidence, "valuation scan" + tag + " missing or not EVIDENCE");
    if (c.empty() || sc.empty() || !o.ok) continue;
    const json& d = c[0].details;
    const long required = static_cast<long>(ceil(Rational(static_cast<long>(ipow(N, s + 1)), detail::factorial(s))));
    o.need(d["required_order"].get<long>() == required, "required order" + tag);
    o.need(d["n_N"].get<long>() >= required, "n_N below bound" + tag);
    const unsigned t0 = sc[0].details["c0"].get<unsigned>();
    unsigned run = 0;
    for (const auto& row : sc[0].details["rows"])
      if (row["t"].get<unsigned>() >= t0 && row["certified"].get<bool>() && row["equal"].get<bool>()) ++run;
    o.need(run >= 4, "equality on t0..t0+3 not observed" + tag);
    counts << "(" << s << "," << N << "): n_N=" << d["n_N"] << ">=" << required << " unknowns=" << d["unknowns"]
           << " equations=" << d["equations"] << " t0=" << t0 << "; ";
  }
  if (o.ok) o.note = counts.str();
  return o;
}

Outcome relation_detector() {
  Outcome o;
  const Report rep = mahler_suite(canonical(), false);
  need_verified(o, with_prefix(rep, "mahler.relations_planted"), "planted relation (theta, -1)", 300);
  const auto pl = with_prefix(rep, "mahler.relations_pi_log");
  o.need(pl.size() == 1 && pl[0].status == Status::Evidence, "pi/log search not EVIDENCE");
  if (o.ok) {
    o.need(pl[0].details["relations"].empty(), "a relation was reported");
    o.need(pl[0].details["degree"] == 3 && pl[0].window == 300, "search not at degree 3, precision 300");
  }
  if (o.ok) o.note = "planted relation recovered; none of degree <= 3 at precision 300";
  return o;
}

Outcome negative_controls() {
  Outcome o;
  for (const auto& s : suite_names()) {
    const int code = cli_exit("verify --config " + std::string(MAHLERLOG_CONFIG_DIR) + "/neg_" + s + ".json");
    o.need(code == 1, s + " exit " + std::to_string(code));
    RunConfig cfg = canonical();
    cfg.suite = s;
    cfg.negative_control = s;
    o.need(run_suite(s, cfg).failed(), s + " report not FAILED");
  }
  if (o.ok) o.note = "every suite fixture FAILED with exit 1";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Carlitz identities", carlitz_identities},
      {"Interpolation evaluation", interpolation_values},
      {"Functional equations and recurrence", functional_equations},
      {"Mahler system", mahler_system},
      {"sigma-action", sigma_action},
      {"Heights", heights},
      {"Auxiliary polynomial", auxiliary_polynomial},
      {"Relation detector", relation_detector},
      {"Negative controls", negative_controls},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > kTimeLimit) o.need(false, "exceeded the time limit");
    if (!o.ok) ++failed;
    char t[32];
    std::snprintf(t, sizeof t, "%.2fs", secs);
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << " [" << t << "] "
              << o.note << "\n";
  }
  std::cout << (failed ? "FAILED " + std::to_string(failed) + " of 9" : std::string("ALL 9 PASSED")) << "\n";
  return failed ? 1 : 0;
}
