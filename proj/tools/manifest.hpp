#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace fusionlab::cli {

/// What produced an output file. The deterministic part is embedded in the
/// output itself; timings go to a sidecar "<out>.run.json" so that reruns with
/// the same arguments and seed give byte-identical outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::string version;
  std::optional<std::uint64_t> seed;
  std::string started_utc;
  double wall_clock_seconds = 0.0;

  void add_input(const std::string& path);
  nlohmann::json embedded() const;
  nlohmann::json full() const;
};

std::string sha256_file(const std::string& path);
std::string utc_now();

/// Writes text to path (or stdout for "" or "-").
void write_output(const std::string& path, const std::string& text);
/// Writes the sidecar run record next to `out` (skipped for stdout).
void write_run_record(const std::string& out, const RunManifest& m, const nlohmann::json& extra);

}  // namespace fusionlab::cli
