#include "mahlerlog/config.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace mahlerlog;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(MAHLERLOG_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) throw std::runtime_error("popen failed");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string cfg(const std::string& name) { return std::string(MAHLERLOG_CONFIG_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string tmp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("mahlerlog_test_" + name);
  std::ofstream(path, std::ios::binary) << body;
  return path.string();
}

}  // namespace

TEST(Cli, CanonicalVerifyPasses) {
  CliRun r = run("verify --config " + cfg("canonical_q3.json"));
  EXPECT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  ASSERT_EQ(j["reports"].size(), 5u);
  for (const auto& rep : j["reports"])
    for (const auto& c : rep["checks"]) EXPECT_NE(c["status"], "FAILED") << c.dump();
  // fixed key order: meta, reports, passed
  EXPECT_LT(r.out.find("\"meta\""), r.out.find("\"reports\""));
  EXPECT_LT(r.out.find("\"reports\""), r.out.find("\"passed\""));
}

TEST(Cli, UsageAndConfigErrorsExit2) {
  EXPECT_EQ(run("verify --config " + cfg("malformed.json")).code, 2);
  EXPECT_EQ(run("verify --config /nonexistent/mahlerlog.json").code, 2);
  EXPECT_EQ(run("verify --config " + tmp_file("unknown_key.json", "{\"p\": 3, \"colour\": 1}\n")).code, 2);
  EXPECT_EQ(run("verify --config " + tmp_file("bad_p.json", "{\"p\": 4}\n")).code, 2);
  EXPECT_EQ(run("verify --suite nosuch").code, 2);
  EXPECT_EQ(run("verify --format xml").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("philippon-check --config " + cfg("canonical_q3.json")).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, NegativeControlsFail) {
  for (const std::string s : {"carlitz", "interp", "mahler", "heights", "auxpoly"}) {
    CliRun r = run("verify --config " + cfg("neg_" + s + ".json"));
    EXPECT_EQ(r.code, 1) << s;
    json j = json::parse(r.out);
    EXPECT_FALSE(j["passed"].get<bool>()) << s;
    ASSERT_EQ(j["reports"].size(), 1u);
    EXPECT_EQ(j["reports"][0]["suite"], s);
    bool any = false;
    for (const auto& c : j["reports"][0]["checks"]) any = any || c["status"] == "FAILED";
    EXPECT_TRUE(any) << s;
  }
}

TEST(Cli, DeterministicReports) {
  const std::string args = "verify --config " + cfg("canonical_q3.json") + " --suite carlitz";
  CliRun a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto path = std::filesystem::temp_directory_path() / "mahlerlog_test_out.json";
  std::filesystem::remove(path);
  CliRun c = run(args + " --out " + path.string());
  EXPECT_EQ(c.code, 0);
  EXPECT_TRUE(c.out.empty());
  EXPECT_EQ(slurp(path.string()), a.out);
  CliRun t1 = run(args + " --format text"), t2 = run(args + " --format text");
  EXPECT_EQ(t1.out, t2.out);
  EXPECT_NE(t1.out.find("PASS"), std::string::npos);
}

TEST(Cli, ConfigEchoIsIdempotent) {
  for (const auto& entry : std::filesystem::directory_iterator(MAHLERLOG_CONFIG_DIR)) {
    const std::string path = entry.path().string();
    if (entry.path().filename() == "malformed.json") continue;
    const std::string text = slurp(path);
    const RunConfig c = parse_config_text(text);
    const std::string echo = canonical_config_text(c);
    EXPECT_EQ(echo, text) << path << " is not in canonical form";
    EXPECT_EQ(canonical_config_text(parse_config_text(echo)), echo) << path;
  }
  // the CLI echo reproduces the file
  json j = json::parse(run("pi --config " + cfg("canonical_q3.json")).out);
  EXPECT_EQ(j["meta"]["config"].dump(2) + "\n", slurp(cfg("canonical_q3.json")));
  // omitted keys take the canonical defaults
  EXPECT_EQ(canonical_config_text(parse_config_text("{}")), slurp(cfg("canonical_q3.json")));
}

TEST(Cli, Subcommands) {
  const std::string c = " --config " + cfg("canonical_q3.json");
  CliRun pi = run("pi" + c);
  ASSERT_EQ(pi.code, 0);
  json jp = json::parse(pi.out);
  // tilde_pi has u-order -3 in the canonical embedding
  EXPECT_EQ(jp["tilde_pi"]["ord"], -3);

  CliRun lg = run("log" + c), ex = run("exp" + c);
  ASSERT_EQ(lg.code, 0);
  ASSERT_EQ(ex.code, 0);
  EXPECT_EQ(json::parse(lg.out)["log"].size(), 1u);
  // exp(log(x)) = x: feed the log value back through --point
  json lv = json::parse(lg.out)["log"][0];
  json back = json::parse(run("exp" + c + " --point '" + lv["value"].dump() + "'").out)["exp"][0]["value"];
  const auto& x = lv["x"];
  EXPECT_EQ(back["ord"], x["ord"]);
  for (std::size_t i = 0; i < x["digits"].size() && i < back["digits"].size(); ++i)
    EXPECT_EQ(back["digits"][i], x["digits"][i]) << i;
  EXPECT_EQ(run("log" + c + " --point '{\"ord\": 1'").code, 2);

  CliRun sys = run("system" + c);
  ASSERT_EQ(sys.code, 0);
  json js = json::parse(sys.out);
  EXPECT_EQ(js["A"].size(), 3u);
  EXPECT_EQ(js["A_inv"].size(), 3u);

  CliRun aux = run("auxpoly" + c + " --s 1 --N 2");
  ASSERT_EQ(aux.code, 0);
  EXPECT_EQ(json::parse(aux.out)["auxpoly"]["required_order"], 4);
  EXPECT_EQ(run("auxpoly" + c + " --s 1 --N 1").code, 2);

  CliRun rel = run("relations" + c + " --degree 2 --precision 200");
  ASSERT_EQ(rel.code, 0);
  EXPECT_TRUE(json::parse(rel.out)["relations"].empty());

  CliRun ph = run("philippon-check --config " + cfg("philippon_q3.json"));
  EXPECT_EQ(ph.code, 0);
  EXPECT_FALSE(json::parse(ph.out)["checks"].empty());
}

TEST(Cli, OtherInstancesPass) {
  for (const std::string f : {"d2_q3.json", "sextic_q3.json"}) {
    CliRun r = run("verify --config " + cfg(f) + " --format text");
    EXPECT_EQ(r.code, 0) << f << "\n" << r.out;
  }
}
