#include "uloop/trace.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "uloop/json_codec.hpp"

namespace uloop::trace {

using nlohmann::json;

json make_line(const orchestrator::RunRecord& record) {
  json line = record;
  line["schema_version"] = kSchemaVersion;
  line["kind"] = "run";
  return line;
}

json make_error_line(const std::string& query, const std::string& error) {
  return json{{"schema_version", kSchemaVersion},
              {"kind", "error"},
              {"query", query},
              {"error", error}};
}

TraceWriter::TraceWriter(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
}

void TraceWriter::append(const json& line) {
  const std::string serialized = line.dump() + "\n";
  std::lock_guard<std::mutex> lock(mutex_);
  std::FILE* f = std::fopen(path_.string().c_str(), "ab");
  if (f == nullptr) {
    throw std::runtime_error("trace: cannot open " + path_.string() + " for append");
  }
  const std::size_t written = std::fwrite(serialized.data(), 1, serialized.size(), f);
  std::fflush(f);
  std::fclose(f);
  if (written != serialized.size()) {
    throw std::runtime_error("trace: short write to " + path_.string());
  }
}

std::vector<json> read_lines(const std::filesystem::path& path, bool tolerate_torn_tail) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("trace: cannot open " + path.string());
  }
  std::vector<json> lines;
  std::string line;
  std::size_t line_no = 0;
  int last_version = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::exception& e) {
      const bool at_tail = in.peek() == std::ifstream::traits_type::eof();
      if (tolerate_torn_tail && at_tail) {
        break;
      }
      throw std::runtime_error("trace: " + path.string() + ":" + std::to_string(line_no) +
                               ": invalid record: " + e.what());
    }
    const int version = lines.back().value("schema_version", 0);
    if (version < last_version) {
      throw std::runtime_error("trace: " + path.string() + ":" + std::to_string(line_no) +
                               ": schema version went backwards");
    }
    last_version = version;
  }
  return lines;
}

std::vector<orchestrator::RunRecord> read_records(const std::filesystem::path& path) {
  std::vector<orchestrator::RunRecord> records;
  for (const auto& line : read_lines(path)) {
    if (line.value("kind", "run") == "run") {
      records.push_back(line.get<orchestrator::RunRecord>());
    }
  }
  return records;
}

}  // namespace uloop::trace
