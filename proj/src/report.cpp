#include "hahn/report.hpp"

namespace hahn {

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["op"] = op;
  j["lambda"] = lambda.to_string();
  j["trials"] = trials;
  j["seed"] = seed;
  auto& vs = j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : violations) vs.push_back({{"ball", v.ball}, {"x", v.x}, {"y", v.y}});
  j["verdict"] = passed() ? "pass" : "fail";
  if (skipped > 0) j["skipped"] = skipped;
  for (const auto& [k, val] : details.items()) j[k] = val;
  return j;
}

}  // namespace hahn
