#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace cascada::testing {

// One recorded exchange. "request" is either a JSON value or, for
// deliberately broken bodies, a raw string under "request_raw".
struct ProtocolFixture {
  std::string name;
  std::string method;
  std::string path;
  nlohmann::json request;
  std::optional<std::string> request_raw;
  int status = 200;
  nlohmann::json response;
  std::vector<std::string> volatile_fields;  // JSON pointers excluded from comparison

  std::string request_body() const {
    if (request_raw) return *request_raw;
    return request.is_null() ? std::string() : request.dump();
  }
};

inline nlohmann::json fixture_to_json(const ProtocolFixture& f) {
  nlohmann::json j = {{"name", f.name},   {"method", f.method},     {"path", f.path},
                      {"status", f.status}, {"response", f.response}, {"volatile", f.volatile_fields}};
  if (f.request_raw) {
    j["request_raw"] = *f.request_raw;
  } else {
    j["request"] = f.request;
  }
  return j;
}

inline ProtocolFixture fixture_from_json(const nlohmann::json& j) {
  ProtocolFixture f;
  f.name = j.at("name").get<std::string>();
  f.method = j.at("method").get<std::string>();
  f.path = j.at("path").get<std::string>();
  if (j.contains("request_raw")) {
    f.request_raw = j.at("request_raw").get<std::string>();
  } else {
    f.request = j.value("request", nlohmann::json());
  }
  f.status = j.at("status").get<int>();
  f.response = j.at("response");
  f.volatile_fields = j.value("volatile", std::vector<std::string>{});
  return f;
}

inline std::vector<ProtocolFixture> load_fixtures(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ProtocolFixture> out;
  for (const auto& p : files) {
    std::ifstream in(p);
    out.push_back(fixture_from_json(nlohmann::json::parse(in)));
  }
  return out;
}

/// Drops volatile fields; each one must be present where the fixture has it.
inline nlohmann::json strip_volatile(nlohmann::json j, const std::vector<std::string>& pointers, bool* all_present) {
  for (const auto& p : pointers) {
    const nlohmann::json::json_pointer ptr(p);
    if (!j.contains(ptr)) {
      if (all_present) *all_present = false;
      continue;
    }
    j.at(ptr.parent_pointer()).erase(ptr.back());
  }
  return j;
}

}  // namespace cascada::testing
