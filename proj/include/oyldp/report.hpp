#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace oyldp {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured residual or statistic
  double tolerance = 0.0;  // threshold the value was compared against
  bool pass = false;
  std::string note;
};

// Outcome of a verification battery plus the provenance needed to rerun it
// (seeds, grid steps, configuration digest). Serializes to JSON and to an
// aligned text table; no timestamps, so identical runs give identical bytes.
struct VerificationReport {
  std::string title;
  std::vector<CheckResult> checks;
  nlohmann::json provenance = nlohmann::json::object();

  CheckResult& add(std::string name, double value, double tolerance, bool pass,
                   std::string note = "");
  bool all_pass() const;

  nlohmann::json to_json() const;
  void write_text(std::ostream& os) const;
};

}  // namespace oyldp
