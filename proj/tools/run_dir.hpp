#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace zf::cli {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Output directory of one command invocation. manifest.jsonl is append-only
// (start, resume and finish events); cursor.json records the next work unit
// and the committed size of the data file so an interrupted run can resume.
class RunDir {
 public:
  RunDir(std::filesystem::path dir, std::string command, nlohmann::ordered_json config, std::uint64_t seed);

  // Returns the first unfinished work unit (0 for a fresh directory).
  // Throws IoError when the directory holds a finished run or a run with a
  // different configuration.
  std::uint64_t open(const std::filesystem::path& data_file);

  // Appends text to the data file and moves the cursor to `next_unit`.
  void commit(const std::string& text, std::uint64_t next_unit);
  void finish(const std::vector<std::filesystem::path>& extra_outputs);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void append_manifest(nlohmann::ordered_json event) const;
  void write_cursor(std::uint64_t next_unit, std::uintmax_t bytes) const;

  std::filesystem::path dir_;
  std::string command_;
  nlohmann::ordered_json config_;
  std::uint64_t seed_;
  std::filesystem::path data_;
};

std::string timestamp();
std::string code_version();

}  // namespace zf::cli
