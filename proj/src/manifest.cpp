#include "kinklab/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace kink {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OutputWriter::OutputWriter(std::string out_dir) : dir_(std::move(out_dir)) {
  std::filesystem::create_directories(dir_);
  started_ = iso_timestamp();
}

void OutputWriter::write(const std::string& name, const std::string& content) {
  const std::string path = dir_ + "/" + name;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
  entries_.push_back({name, content.size(), hex64(fnv1a64(content))});
}

void OutputWriter::set_config(const std::string& canonical_text) {
  config_hash_ = hex64(fnv1a64(canonical_text));
}

void OutputWriter::set_seed(std::uint64_t seed) { seed_ = seed; }

void OutputWriter::mark_failed(const std::string& reason) {
  failed_ = true;
  fail_reason_ = reason;
}

std::string OutputWriter::finalize() {
  nlohmann::json j;
  j["code_version"] = "kinklab 0.1.0";
  j["config_hash"] = config_hash_;
  j["seed"] = seed_;
  j["started"] = started_;
  j["finished"] = iso_timestamp();
  j["status"] = failed_ ? "FAILED" : "ok";
  if (failed_) j["error"] = fail_reason_;
  auto files = nlohmann::json::array();
  for (const auto& e : entries_)
    files.push_back({{"name", e.name}, {"bytes", e.bytes}, {"checksum", e.checksum}});
  j["files"] = files;

  const std::string path = dir_ + "/manifest.json";
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
  return path;
}

}  // namespace kink
