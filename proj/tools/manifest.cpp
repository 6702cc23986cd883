#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <iterator>

#include <openssl/evp.h>

#include "fusionlab/error.hpp"

namespace fusionlab::cli {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "sha256 failed for " + path);
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::add_input(const std::string& path) { inputs.emplace_back(path, sha256_file(path)); }

nlohmann::json RunManifest::embedded() const {
  nlohmann::json j;
  j["command"] = command;
  j["args"] = args;
  j["inputs"] = nlohmann::json::array();
  for (const auto& [p, h] : inputs) j["inputs"].push_back({{"path", p}, {"sha256", h}});
  j["version"] = version;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json RunManifest::full() const {
  auto j = embedded();
  j["started_utc"] = started_utc;
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

void write_run_record(const std::string& out, const RunManifest& m, const nlohmann::json& extra) {
  if (out.empty() || out == "-") return;
  nlohmann::json j;
  j["manifest"] = m.full();
  if (!extra.is_null()) j["timing"] = extra;
  write_output(out + ".run.json", j.dump(2) + "\n");
}

}  // namespace fusionlab::cli
