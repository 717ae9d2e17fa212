#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hahn/group.hpp"

namespace hahn {

struct Violation {
  nlohmann::ordered_json ball;
  std::string x;
  std::string y;
};

/// Result of a randomized check. Extra op-specific fields go in `details`
/// and are appended after the standard ones.
struct VerificationReport {
  std::string op;
  GroupElement lambda;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<Violation> violations;
  std::uint64_t skipped = 0;  // trials abandoned after repeated domain errors
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  bool passed() const { return violations.empty(); }
  nlohmann::ordered_json to_json() const;
};

}  // namespace hahn
