// Output directory bookkeeping and the run manifest (written last).
#pragma once

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include "json.hpp"
#include <stdexcept>
#include <string>
#include <vector>

#include "fdasim/scenario.hpp"

#ifndef FDASIM_VERSION
#define FDASIM_VERSION "0.0.0"
#endif

namespace fdasim {

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes files into one output directory and remembers what it wrote.
class OutputDirectory {
 public:
  explicit OutputDirectory(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
  }

  const std::filesystem::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

  void write(const std::string& name, const std::string& content) {
    const auto path = root_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
    files_.push_back(name);
  }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

struct RunInfo {
  std::string command;
  std::string started_at;
  unsigned threads = 1;
};

inline constexpr const char* kManifestName = "manifest.json";

/// Checksums every recorded file as it is on disk, then writes the manifest.
inline nlohmann::json write_manifest(OutputDirectory& out, const ScenarioConfig& cfg,
                                     const RunInfo& info) {
  nlohmann::json m;
  m["software"] = {{"name", "fdasim"}, {"version", FDASIM_VERSION}};
  m["command"] = info.command;
  m["seed"] = cfg.seed;
  m["trials"] = cfg.trials;
  m["rng"] = "mt19937_64 per trial, seeded splitmix64(splitmix64(seed) ^ trial)";
  m["threads"] = info.threads;
  m["started_at"] = info.started_at;
  m["finished_at"] = utc_timestamp();
  m["config"] = serialize(cfg);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : out.files()) {
    const std::string data = read_file(out.root() / name);
    files.push_back({{"name", name}, {"bytes", data.size()}, {"sha256", sha256_hex(data)}});
  }
  m["files"] = files;
  const auto path = out.root() / kManifestName;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << m.dump(2) << "\n";
  return m;
}

}  // namespace fdasim
