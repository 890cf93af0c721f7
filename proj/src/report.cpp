#include "oyldp/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace oyldp {

CheckResult& VerificationReport::add(std::string name, double value, double tolerance,
                                     bool pass, std::string note) {
  checks.push_back(CheckResult{std::move(name), value, tolerance, pass, std::move(note)});
  return checks.back();
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["title"] = title;
  j["pass"] = all_pass();
  j["provenance"] = provenance;
  auto& arr = j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass},
                   {"note", c.note}});
  }
  return j;
}

void VerificationReport::write_text(std::ostream& os) const {
  os << title << '\n';
  size_t width = 4;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-*s  %-4s  value=%-12.5g tol=%-10.4g %s\n",
                  static_cast<int>(width), c.name.c_str(), c.pass ? "ok" : "FAIL",
                  c.value, c.tolerance, c.note.c_str());
    os << buf;
  }
}

}  // namespace oyldp
