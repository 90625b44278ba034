#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kink {

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Collects experiment outputs, writes each atomically (temp + rename) and
// emits manifest.json last with a checksum inventory.
class OutputWriter {
 public:
  explicit OutputWriter(std::string out_dir);

  void write(const std::string& name, const std::string& content);
  const std::string& dir() const { return dir_; }

  void set_config(const std::string& canonical_text);
  void set_seed(std::uint64_t seed);
  void mark_failed(const std::string& reason);
  std::string finalize();  // writes manifest.json, returns its path

 private:
  struct Entry {
    std::string name;
    std::size_t bytes;
    std::string checksum;
  };
  std::string dir_;
  std::vector<Entry> entries_;
  std::string config_hash_;
  std::uint64_t seed_ = 0;
  std::string started_;
  bool failed_ = false;
  std::string fail_reason_;
};

std::string iso_timestamp();

}  // namespace kink
