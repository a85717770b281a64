#include "forge/jsonl.hpp"

#include "forge/error.hpp"

#include <nlohmann/json.hpp>

namespace forge {

std::vector<JsonlRecord> read_jsonl(const std::filesystem::path& path,
                                    std::vector<JsonlError>& errors) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path.string());
    std::vector<JsonlRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back({line_number, Json::parse(line)});
        } catch (const Json::exception& e) {
            errors.push_back({line_number, e.what()});
        }
    }
    return records;
}

JsonlChunkReader::JsonlChunkReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) throw ConfigError("cannot open input file: " + path.string());
}

std::vector<JsonlRecord> JsonlChunkReader::next_chunk(std::size_t max_records,
                                                      std::vector<JsonlError>& errors) {
    std::vector<JsonlRecord> records;
    std::string line;
    while (records.size() < max_records && std::getline(in_, line)) {
        ++line_number_;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back({line_number_, Json::parse(line)});
        } catch (const Json::exception& e) {
            errors.push_back({line_number_, e.what()});
        }
    }
    return records;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw ConfigError("cannot open output file: " + path.string());
}

void JsonlWriter::write(const Json& value) {
    out_ << value.dump() << '\n';
    ++count_;
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    out << value.dump(2) << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

} // namespace forge
