#pragma once

#include "mahlerlog/core/error.hpp"
#include "mahlerlog/core/rational.hpp"

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace mahlerlog {

using json = nlohmann::ordered_json;

/// VERIFIED: a residual vanishes identically on its guaranteed window.
/// EVIDENCE: a valuation or search bound holds at the working precision.
/// FAILED: a residual is visibly nonzero, or a computation raised an error.
enum class Status { Verified, Evidence, Failed };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Verified: return "VERIFIED";
    case Status::Evidence: return "EVIDENCE";
    case Status::Failed: return "FAILED";
  }
  return "?";
}

inline json window_json(long w) { return w >= kExact ? json("exact") : json(w); }

struct CheckRecord {
  std::string id;
  Status status = Status::Failed;
  long window = 0;
  json details = json::object();

  bool ok() const { return status != Status::Failed; }

  json to_json() const {
    json j;
    j["id"] = id;
    j["status"] = to_string(status);
    j["window"] = window_json(window);
    j["details"] = details;
    return j;
  }
};

/// Identity check on a window: VERIFIED when the residual vanishes there.
inline CheckRecord identity_record(std::string id, bool zero, long window, long first_diff = 0, json details = json::object()) {
  CheckRecord r{std::move(id), zero ? Status::Verified : Status::Failed, window, std::move(details)};
  if (!zero) r.details["first_nonzero"] = first_diff;
  return r;
}

template <class Agreement>
CheckRecord agreement_record(std::string id, const Agreement& a, long min_window, json details = json::object()) {
  const bool ok = a.equal && a.window >= min_window;
  CheckRecord r = identity_record(std::move(id), ok, a.window, a.first_diff, std::move(details));
  if (a.equal && a.window < min_window) r.details["reason"] = "window below required " + std::to_string(min_window);
  return r;
}

inline CheckRecord error_record(std::string id, const Error& e) {
  CheckRecord r{std::move(id), Status::Failed, 0, json::object()};
  r.details["error"] = std::string(to_string(e.kind()));
  r.details["message"] = e.what();
  return r;
}

struct Report {
  std::string suite;
  std::vector<CheckRecord> checks;

  void add(CheckRecord r) {
    std::set<std::string> seen;
    for (const auto& c : checks) seen.insert(c.id);
    require(!seen.count(r.id), ErrorKind::InvalidArgument, "duplicate check id " + r.id);
    checks.push_back(std::move(r));
  }
  void append(const Report& other) {
    for (const auto& c : other.checks) add(c);
  }
  bool failed() const {
    for (const auto& c : checks)
      if (!c.ok()) return true;
    return false;
  }

  /// Runs fn, turning a library error into a FAILED record.
  template <class Fn>
  void run(const std::string& id, Fn&& fn) {
    try {
      add(fn());
    } catch (const Error& e) {
      add(error_record(id, e));
    }
  }

  json to_json() const {
    json j;
    j["suite"] = suite;
    j["passed"] = !failed();
    json arr = json::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    j["checks"] = arr;
    return j;
  }

  std::string to_text() const {
    std::string s = "suite " + suite + "\n";
    for (const auto& c : checks) {
      s += "  " + std::string(to_string(c.status)) + "  " + c.id;
      s += "  window=" + (c.window >= kExact ? std::string("exact") : std::to_string(c.window)) + "\n";
    }
    s += failed() ? "result FAILED\n" : "result PASS\n";
    return s;
  }
};

}  // namespace mahlerlog
