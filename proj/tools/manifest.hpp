// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "atm/error.hpp"
#include "atm/io.hpp"

namespace atmtool {

inline constexpr const char* kToolVersion = "1.0.0";

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw atm::Error(atm::ErrorKind::io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

inline std::string file_digest(const std::filesystem::path& p) { return sha256_hex(atm::read_file(p)); }

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// One command invocation: its settings, the digests of what it read and
/// wrote, and the seeds it used.
class Run {
 public:
  explicit Run(std::string command) {
    j_["command"] = std::move(command);
    j_["tool_version"] = kToolVersion;
    j_["started"] = utc_timestamp();
    j_["config"] = nlohmann::json::object();
    j_["inputs"] = nlohmann::json::array();
    j_["outputs"] = nlohmann::json::array();
    j_["seeds"] = nlohmann::json::array();
  }

  nlohmann::json& config() { return j_["config"]; }
  void seed(std::uint64_t s) { j_["seeds"].push_back(s); }

  void input(const std::filesystem::path& p) {
    j_["inputs"].push_back({{"path", p.string()}, {"sha256", file_digest(p)}});
  }
  void output(const std::filesystem::path& p) {
    j_["outputs"].push_back({{"path", p.string()}, {"sha256", file_digest(p)}});
  }

  /// Appends this run to the manifest at `path`, creating it if absent.
  void commit(const std::filesystem::path& path) {
    j_["finished"] = utc_timestamp();
    nlohmann::json doc;
    if (std::filesystem::exists(path)) {
      try {
        doc = nlohmann::json::parse(atm::read_file(path));
      } catch (const nlohmann::json::exception& e) {
        throw atm::Error(atm::ErrorKind::format, path.string() + ": not a manifest: " + e.what());
      }
    }
    if (!doc.is_object() || !doc.contains("runs")) doc = {{"format", "atm-manifest"}, {"version", 1}, {"runs", nlohmann::json::array()}};
    doc["runs"].push_back(j_);
    atm::write_file_atomic(path, doc.dump(2) + "\n");
  }

 private:
  nlohmann::json j_;
};

struct VerifyIssue {
  std::string path;
  std::string problem;
};

/// Recomputes the digest of every input recorded in the manifest (the most
/// recent entry per path wins) and reports any that differ or are missing.
inline std::vector<VerifyIssue> verify_manifest(const std::filesystem::path& path,
                                                std::size_t* checked = nullptr) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(atm::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw atm::Error(atm::ErrorKind::format, path.string() + ": not a manifest: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array())
    throw atm::Error(atm::ErrorKind::format, path.string() + ": manifest has no runs");
  std::map<std::string, std::string> latest;
  for (const auto& run : doc["runs"])
    for (const auto& in : run.value("inputs", nlohmann::json::array()))
      latest[in.at("path").get<std::string>()] = in.at("sha256").get<std::string>();
  std::vector<VerifyIssue> issues;
  for (const auto& [p, digest] : latest) {
    if (!std::filesystem::exists(p)) {
      issues.push_back({p, "missing"});
      continue;
    }
    if (file_digest(p) != digest) issues.push_back({p, "digest mismatch"});
  }
  if (checked) *checked = latest.size();
  return issues;
}

}  // namespace atmtool
