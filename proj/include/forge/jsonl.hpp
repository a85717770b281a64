#pragma once

#include "forge/action.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace forge {

struct JsonlError {
    std::size_t line_number = 0; // 1-based
    std::string message;
};

/// One parsed line of a JSONL file.
struct JsonlRecord {
    std::size_t line_number = 0;
    Json value;
};

/// Reads every line, collecting parse failures instead of throwing; blank
/// lines are skipped. Throws ConfigError when the file cannot be opened.
std::vector<JsonlRecord> read_jsonl(const std::filesystem::path& path,
                                    std::vector<JsonlError>& errors);

/// Incremental reader so pipelines hold only a bounded window of records.
class JsonlChunkReader {
  public:
    explicit JsonlChunkReader(const std::filesystem::path& path);

    /// Up to `max_records` parsed records; parse failures land in `errors`.
    /// An empty result means the input is exhausted.
    std::vector<JsonlRecord> next_chunk(std::size_t max_records,
                                        std::vector<JsonlError>& errors);

  private:
    std::ifstream in_;
    std::size_t line_number_ = 0;
};

/// Line-buffered writer producing one compact JSON document per line.
class JsonlWriter {
  public:
    explicit JsonlWriter(const std::filesystem::path& path);
    void write(const Json& value);
    std::size_t count() const { return count_; }

  private:
    std::ofstream out_;
    std::size_t count_ = 0;
};

void write_json_file(const std::filesystem::path& path, const Json& value);
Json read_json_file(const std::filesystem::path& path); // throws ConfigError

} // namespace forge
