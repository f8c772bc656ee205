#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uloop/orchestrator.hpp"

namespace uloop::trace {

inline constexpr int kSchemaVersion = 1;

/// Wraps a record (or an error event) into a self-describing trace line.
nlohmann::json make_line(const orchestrator::RunRecord& record);
nlohmann::json make_error_line(const std::string& query, const std::string& error);

/// Append-only line-delimited trace sink. Each record is serialized to one
/// full line and written with a single flush, so readers only ever see whole
/// lines plus possibly one torn tail that fails to parse. Appends are
/// serialized; one writer can be shared across threads.
class TraceWriter {
 public:
  explicit TraceWriter(std::filesystem::path path);

  void append(const nlohmann::json& line);
  void append(const orchestrator::RunRecord& record) { append(make_line(record)); }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

/// Parses every line of a trace file. Invalid lines raise, naming the line
/// number; with tolerate_torn_tail, an unparseable final line is dropped
/// (the write was interrupted).
std::vector<nlohmann::json> read_lines(const std::filesystem::path& path,
                                       bool tolerate_torn_tail = false);

/// The subset of trace lines that are full run records.
std::vector<orchestrator::RunRecord> read_records(const std::filesystem::path& path);

}  // namespace uloop::trace
