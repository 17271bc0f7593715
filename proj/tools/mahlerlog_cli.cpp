#include "mahlerlog/suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace mahlerlog;

namespace {

struct Options {
  std::string config;
  std::string suite;
  std::optional<long> prec_z, prec_u;
  std::string out;
  std::string format = "json";
  // subcommand arguments
  std::string point;
  unsigned aux_s = 1, aux_N = 2;
  std::optional<unsigned> degree;
  std::optional<long> precision;
};

json meta(const RunConfig& cfg) {
  return {{"toolchain", std::string("c++ ") + __VERSION__},
          {"seed", cfg.seed},
          {"config", config_to_json(cfg)}};
}

void emit(const Options& o, const json& j, const std::string& text) {
  const std::string body = o.format == "text" ? text : j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  require(f.good(), ErrorKind::ConfigError, "cannot write " + o.out);
  f << body;
}

std::string records_text(const std::vector<CheckRecord>& rs) {
  Report rep{"result", rs};
  return rep.to_text();
}

json records_json(const std::vector<CheckRecord>& rs) {
  json arr = json::array();
  for (const auto& r : rs) arr.push_back(r.to_json());
  return arr;
}

bool any_failed(const std::vector<CheckRecord>& rs) {
  for (const auto& r : rs)
    if (!r.ok()) return true;
  return false;
}

RunConfig load(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.suite.empty()) {
    json j = config_to_json(cfg);
    j["suite"] = o.suite;
    cfg = parse_config(j);  // validates the name
  }
  if (o.prec_z) cfg.prec_z = *o.prec_z;
  if (o.prec_u) cfg.prec_u = *o.prec_u;
  require(cfg.prec_z >= 2 && cfg.prec_u >= 2, ErrorKind::ConfigError, "precision out of range");
  return cfg;
}

std::vector<LocalFieldElem> points(const Options& o, const Instance& inst) {
  if (o.point.empty()) return inst.targets;
  json j;
  try {
    j = json::parse(o.point);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("--point: ") + e.what());
  }
  RunConfig c;
  json cj = config_to_json(c);
  cj["targets"] = json::array({j});
  ElemSpec spec = parse_config(cj).targets[0];
  std::vector<FieldElem> ds;
  for (long long x : spec.digits) {
    require(x >= 0 && static_cast<unsigned long>(x) < inst.field()->order(), ErrorKind::ConfigError,
            "--point: digit code out of range");
    ds.push_back(FieldElem(inst.field(), static_cast<GaloisField::Code>(x)));
  }
  return {LocalFieldElem::from_coeffs(inst.field(), inst.e(), spec.ord, ds)};
}

int cmd_verify(const Options& o) {
  RunConfig cfg = load(o);
  std::vector<Report> reps = run_suites(cfg);
  json arr = json::array();
  std::string text;
  bool failed = false;
  for (const auto& r : reps) {
    arr.push_back(r.to_json());
    text += r.to_text();
    failed = failed || r.failed();
  }
  emit(o, {{"meta", meta(cfg)}, {"reports", arr}, {"passed", !failed}}, text + (failed ? "FAILED\n" : "PASS\n"));
  return failed ? 1 : 0;
}

int cmd_pi(const Options& o) {
  RunConfig cfg = load(o);
  Instance inst = build_instance(cfg, 2);
  TildePi p = tilde_pi(inst.ctx, inst.ctx.cap());
  json j{{"meta", meta(cfg)}, {"tilde_pi", local_json(p.value)}, {"cutoff", p.cutoff}};
  emit(o, j, "tilde_pi = " + p.value.to_string(16) + "\n");
  return 0;
}

int cmd_log_exp(const Options& o, bool is_log) {
  RunConfig cfg = load(o);
  Instance inst = build_instance(cfg, 2);
  json rows = json::array();
  std::string text;
  for (const auto& x : points(o, inst)) {
    LocalFieldElem y = is_log ? carlitz_log_at(inst.ctx, x) : carlitz_exp_at(inst.ctx, x);
    rows.push_back({{"x", local_json(x)}, {"value", local_json(y)}});
    text += (is_log ? "Log_C(" : "exp_C(") + x.to_string(4) + ") = " + y.to_string(12) + "\n";
  }
  emit(o, {{"meta", meta(cfg)}, {is_log ? "log" : "exp", rows}}, text);
  return 0;
}

int cmd_system(const Options& o) {
  RunConfig cfg = load(o);
  Instance inst = build_instance(cfg);
  MahlerSystem sys = build_system(inst, cfg.prec_z);
  auto dump = [&](const Matrix<ZSeries>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).to_string(6));
      rows.push_back(row);
    }
    return rows;
  };
  std::vector<CheckRecord> rs{system_inverse_check(sys, cfg.prec_z), system_action_check(sys, cfg.prec_z)};
  json j{{"meta", meta(cfg)}, {"A", dump(sys.A)}, {"A_inv", dump(sys.A_inv)}, {"checks", records_json(rs)}};
  std::string text;
  for (const auto& row : j["A"]) text += "A   " + row.dump() + "\n";
  for (const auto& row : j["A_inv"]) text += "A^-1 " + row.dump() + "\n";
  emit(o, j, text + records_text(rs));
  return any_failed(rs) ? 1 : 0;
}

int cmd_auxpoly(const Options& o) {
  RunConfig cfg = load(o);
  Instance inst = build_instance(cfg);
  std::vector<CSeries> fs;
  for (unsigned k = 0; k < o.aux_s; ++k) fs.push_back(aux_series(inst.field(), inst.h(), k, cfg.prec_z));
  AuxPoly R = construct_RN(fs, o.aux_N);
  std::vector<CheckRecord> rs{aux_valuation_scan(inst, R, fs, cfg.aux_extra_steps)};
  json j{{"meta", meta(cfg)}, {"auxpoly", R.summary()}, {"checks", records_json(rs)}};
  std::string text = "N=" + std::to_string(R.N) + " s=" + std::to_string(R.s) + " unknowns=" +
                     std::to_string(R.unknowns) + " equations=" + std::to_string(R.equations) +
                     " n_N=" + std::to_string(R.n_N) + "\n";
  emit(o, j, text + records_text(rs));
  return any_failed(rs) ? 1 : 0;
}

int cmd_relations(const Options& o) {
  RunConfig cfg = load(o);
  Instance inst = build_instance(cfg, 2);
  const unsigned B = o.degree.value_or(cfg.relation_degree);
  const long M = o.precision.value_or(cfg.relation_precision);
  std::vector<LocalFieldElem> vals{tilde_pi(inst.ctx, inst.ctx.cap()).value};
  json names = json::array({"tilde_pi"});
  for (std::size_t i = 0; i < inst.targets.size(); ++i) {
    vals.push_back(carlitz_log_at(inst.ctx, inst.targets[i]));
    names.push_back("Log_C(u_" + std::to_string(i + 1) + ")");
  }
  auto rels = detect_linear_relations(inst.ctx, vals, B, M);
  json found = json::array();
  std::string text;
  for (const auto& r : rels) {
    found.push_back(r.to_json());
    text += r.to_json().dump() + "\n";
  }
  if (rels.empty()) text = "no relation of degree <= " + std::to_string(B) + " at precision " + std::to_string(M) + "\n";
  emit(o, {{"meta", meta(cfg)}, {"values", names}, {"degree", B}, {"precision", M}, {"relations", found}}, text);
  return 0;
}

int cmd_philippon(const Options& o) {
  RunConfig cfg = load(o);
  require(cfg.philippon.has_value(), ErrorKind::ConfigError, "config has no \"philippon\" section");
  auto rs = philippon_condition_check(*cfg.philippon);
  emit(o, {{"meta", meta(cfg)}, {"checks", records_json(rs)}}, records_text(rs));
  return any_failed(rs) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mahlerlog: verification driver for Carlitz/Mahler interpolation identities"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "instance configuration (JSON)");
  app.add_option("--suite", o.suite, "suite name or all");
  app.add_option("--prec-z", o.prec_z, "Z-adic precision override");
  app.add_option("--prec-u", o.prec_u, "u-adic precision override");
  app.add_option("--out", o.out, "write the report to this path");
  app.add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));

  auto* verify = app.add_subcommand("verify", "run verification suites");
  auto* pi = app.add_subcommand("pi", "print the digits of tilde pi");
  auto* lg = app.add_subcommand("log", "evaluate Log_C at the targets or --point");
  auto* ex = app.add_subcommand("exp", "evaluate exp_C at the targets or --point");
  for (auto* sc : {lg, ex}) sc->add_option("--point", o.point, "element as {\"ord\": n, \"digits\": [...]}");
  auto* sys = app.add_subcommand("system", "dump the Mahler system and its inverse");
  auto* aux = app.add_subcommand("auxpoly", "construct R_N and scan E_N valuations");
  aux->add_option("--s", o.aux_s, "number of series")->check(CLI::Range(1u, 3u));
  aux->add_option("--N", o.aux_N, "degree bound");
  auto* rel = app.add_subcommand("relations", "search linear relations among tilde pi and the logarithms");
  rel->add_option("--degree", o.degree, "theta-degree bound of the coefficients");
  rel->add_option("--precision", o.precision, "u-precision used");
  auto* ph = app.add_subcommand("philippon-check", "check the Philippon conditions of the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return cmd_verify(o);
    if (pi->parsed()) return cmd_pi(o);
    if (lg->parsed()) return cmd_log_exp(o, true);
    if (ex->parsed()) return cmd_log_exp(o, false);
    if (sys->parsed()) return cmd_system(o);
    if (aux->parsed()) return cmd_auxpoly(o);
    if (rel->parsed()) return cmd_relations(o);
    if (ph->parsed()) return cmd_philippon(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::InvalidArgument) return 2;
    return 1;
  }
  return 2;
}
