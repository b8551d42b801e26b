#include "run_dir.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef ZF_VERSION
#define ZF_VERSION "unknown"
#endif

namespace zf::cli {

namespace fs = std::filesystem;

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string code_version() { return ZF_VERSION; }

RunDir::RunDir(fs::path dir, std::string command, nlohmann::ordered_json config, std::uint64_t seed)
    : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)), seed_(seed) {}

void RunDir::append_manifest(nlohmann::ordered_json event) const {
  std::ofstream f(dir_ / "manifest.jsonl", std::ios::app);
  if (!f) throw IoError("cannot write " + (dir_ / "manifest.jsonl").string());
  f << event.dump() << '\n';
  if (!f.flush()) throw IoError("cannot write " + (dir_ / "manifest.jsonl").string());
}

void RunDir::write_cursor(std::uint64_t next_unit, std::uintmax_t bytes) const {
  const fs::path tmp = dir_ / "cursor.json.tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw IoError("cannot write " + tmp.string());
    f << nlohmann::json{{"next_unit", next_unit}, {"data_bytes", bytes}}.dump() << '\n';
    if (!f.flush()) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, dir_ / "cursor.json", ec);
  if (ec) throw IoError("cannot write cursor: " + ec.message());
}

std::uint64_t RunDir::open(const fs::path& data_file) {
  data_ = dir_ / data_file;
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());

  const fs::path manifest = dir_ / "manifest.jsonl";
  if (!fs::exists(manifest)) {
    nlohmann::ordered_json start;
    start["event"] = "start";
    start["command"] = command_;
    start["config"] = config_;
    start["master_seed"] = seed_;
    start["code_version"] = code_version();
    start["time"] = timestamp();
    append_manifest(start);
    write_cursor(0, 0);
    return 0;
  }

  // Existing directory: only an unfinished run with the same configuration may continue.
  std::ifstream in(manifest);
  std::string line;
  nlohmann::json first;
  bool finished = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto ev = nlohmann::json::parse(line, nullptr, false);
    if (ev.is_discarded()) continue;
    if (first.is_null()) first = ev;
    if (ev.value("event", "") == "finish") finished = true;
  }
  if (finished) throw IoError(dir_.string() + " holds a finished run; choose a new output directory");
  if (first.is_null() || first.value("command", "") != command_ || first["config"] != nlohmann::json(config_) ||
      first.value("master_seed", std::uint64_t{0}) != seed_) {
    throw IoError(dir_.string() + " holds a run with a different configuration");
  }
  std::ifstream cf(dir_ / "cursor.json");
  if (!cf) throw IoError("missing resume cursor in " + dir_.string());
  const auto cursor = nlohmann::json::parse(cf, nullptr, false);
  if (cursor.is_discarded()) throw IoError("unreadable resume cursor in " + dir_.string());
  const auto next = cursor.at("next_unit").get<std::uint64_t>();
  const auto bytes = cursor.at("data_bytes").get<std::uintmax_t>();
  // Drop anything written after the last commit.
  if (fs::exists(data_)) {
    fs::resize_file(data_, bytes, ec);
    if (ec) throw IoError("cannot truncate " + data_.string() + ": " + ec.message());
  }
  append_manifest({{"event", "resume"}, {"next_unit", next}, {"time", timestamp()}});
  return next;
}

void RunDir::commit(const std::string& text, std::uint64_t next_unit) {
  {
    std::ofstream f(data_, std::ios::app | std::ios::binary);
    if (!f) throw IoError("cannot write " + data_.string());
    f << text;
    if (!f.flush()) throw IoError("cannot write " + data_.string());
  }
  std::error_code ec;
  const auto bytes = fs::exists(data_) ? fs::file_size(data_, ec) : 0;
  write_cursor(next_unit, bytes);
}

void RunDir::finish(const std::vector<fs::path>& extra_outputs) {
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  if (!data_.empty() && fs::exists(data_)) outputs.push_back(data_.filename().string());
  for (const auto& p : extra_outputs) outputs.push_back(p.string());
  outputs.push_back("manifest.jsonl");
  append_manifest({{"event", "finish"}, {"time", timestamp()}, {"outputs", outputs}});
  std::error_code ec;
  fs::remove(dir_ / "cursor.json", ec);
}

}  // namespace zf::cli
