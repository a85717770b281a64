#include "forge/config.hpp"

#include "forge/error.hpp"
#include "forge/jsonl.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace forge {
namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const char* section) {
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError(std::string("config: unknown key '") + item.key() + "' in " +
                              section);
        }
    }
}

std::set<std::string> string_set(const Json& j) {
    std::set<std::string> out;
    for (const Json& item : j) out.insert(item.get<std::string>());
    return out;
}

void parse_endpoint(const Json& j, ChatEndpoint& endpoint, const char* section) {
    check_keys(j,
               {"base_url", "model_name", "api_key_env", "temperature", "max_retries",
                "timeout_ms"},
               section);
    if (j.contains("base_url")) endpoint.base_url = j["base_url"].get<std::string>();
    if (j.contains("model_name")) endpoint.model_name = j["model_name"].get<std::string>();
    if (j.contains("api_key_env")) endpoint.api_key_env = j["api_key_env"].get<std::string>();
    if (j.contains("temperature")) endpoint.temperature = j["temperature"].get<double>();
    if (j.contains("max_retries")) endpoint.max_retries = j["max_retries"].get<int>();
    if (j.contains("timeout_ms")) {
        endpoint.timeout = std::chrono::milliseconds(j["timeout_ms"].get<long>());
    }
}

} // namespace

PipelineConfig parse_pipeline_config(const Json& j, const std::filesystem::path& base_dir) {
    PipelineConfig config;
    if (!j.is_object()) throw ConfigError("config: expected an object");
    check_keys(j,
               {"clean", "mining", "synthesis", "reward", "alignment", "rules", "rules_file",
                "workers", "seed"},
               "config");

    if (j.contains("clean")) {
        const Json& clean = j["clean"];
        check_keys(clean,
                   {"removed_tags", "kept_attributes", "text_token_limit", "interactive_tags"},
                   "clean");
        if (clean.contains("removed_tags")) {
            config.clean.removed_tags = string_set(clean["removed_tags"]);
        }
        if (clean.contains("kept_attributes")) {
            config.clean.kept_attributes =
                clean["kept_attributes"].get<std::vector<std::string>>();
        }
        if (clean.contains("text_token_limit")) {
            config.clean.text_token_limit = clean["text_token_limit"].get<int>();
            if (config.clean.text_token_limit <= 0) {
                throw ConfigError("config: text_token_limit must be positive");
            }
        }
        if (clean.contains("interactive_tags")) {
            config.clean.interactive_tags = string_set(clean["interactive_tags"]);
        }
    }
    if (j.contains("mining")) {
        const Json& mining = j["mining"];
        check_keys(mining, {"k", "lambda", "include_role_tokens"}, "mining");
        if (mining.contains("k")) {
            config.mining.k = mining["k"].get<int>();
            if (config.mining.k <= 0) throw ConfigError("config: mining.k must be positive");
        }
        if (mining.contains("lambda")) {
            config.mining.weights.lambda = mining["lambda"].get<double>();
            if (config.mining.weights.lambda < 0.0 || config.mining.weights.lambda > 1.0) {
                throw ConfigError("config: mining.lambda must be in [0, 1]");
            }
        }
        if (mining.contains("include_role_tokens")) {
            config.mining.weights.include_role_tokens =
                mining["include_role_tokens"].get<bool>();
        }
    }
    if (j.contains("synthesis")) {
        const Json& synthesis = j["synthesis"];
        check_keys(synthesis,
                   {"overlap_threshold", "seed", "max_instruction_chars",
                    "instructions_per_page", "generator", "verifier"},
                   "synthesis");
        if (synthesis.contains("overlap_threshold")) {
            config.synthesis.overlap_threshold = synthesis["overlap_threshold"].get<double>();
        }
        if (synthesis.contains("seed")) {
            config.synthesis.seed = synthesis["seed"].get<std::uint64_t>();
        }
        if (synthesis.contains("max_instruction_chars")) {
            config.synthesis.max_instruction_chars =
                synthesis["max_instruction_chars"].get<int>();
        }
        if (synthesis.contains("instructions_per_page")) {
            config.synthesis.instructions_per_page =
                synthesis["instructions_per_page"].get<int>();
        }
        if (synthesis.contains("generator")) {
            parse_endpoint(synthesis["generator"], config.generator, "synthesis.generator");
        }
        if (synthesis.contains("verifier")) {
            parse_endpoint(synthesis["verifier"], config.verifier, "synthesis.verifier");
        }
    }
    if (j.contains("reward")) {
        const Json& reward = j["reward"];
        check_keys(reward, {"r_fmt", "r_opt", "r_perf"}, "reward");
        if (reward.contains("r_fmt")) config.reward.r_fmt = reward["r_fmt"].get<double>();
        if (reward.contains("r_opt")) config.reward.r_opt = reward["r_opt"].get<double>();
        if (reward.contains("r_perf")) config.reward.r_perf = reward["r_perf"].get<double>();
        if (config.reward.r_fmt < 0 || config.reward.r_opt < 0 || config.reward.r_perf < 0) {
            throw ConfigError("config: reward components must be nonnegative");
        }
    }
    if (j.contains("alignment")) {
        const Json& alignment = j["alignment"];
        check_keys(alignment, {"lambda_orpo", "group_size", "sample_count"}, "alignment");
        if (alignment.contains("lambda_orpo")) {
            config.lambda_orpo = alignment["lambda_orpo"].get<double>();
        }
        if (alignment.contains("group_size")) {
            config.group_size = alignment["group_size"].get<int>();
        }
        if (alignment.contains("sample_count")) {
            config.sample_count = alignment["sample_count"].get<int>();
        }
    }
    if (j.contains("rules") && j.contains("rules_file")) {
        throw ConfigError("config: use either rules or rules_file, not both");
    }
    if (j.contains("rules")) {
        config.rules = RuleSet::from_json(j["rules"]);
    } else if (j.contains("rules_file")) {
        std::filesystem::path rules_path = j["rules_file"].get<std::string>();
        if (rules_path.is_relative() && !base_dir.empty()) rules_path = base_dir / rules_path;
        config.rules = RuleSet::from_json(read_json_file(rules_path));
    }
    if (j.contains("workers")) config.workers = j["workers"].get<int>();
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    return parse_pipeline_config(read_json_file(path), path.parent_path());
}

Json pipeline_config_to_json(const PipelineConfig& config) {
    Json j;
    j["clean"] = {
        {"removed_tags",
         std::vector<std::string>(config.clean.removed_tags.begin(),
                                  config.clean.removed_tags.end())},
        {"kept_attributes", config.clean.kept_attributes},
        {"text_token_limit", config.clean.text_token_limit},
        {"interactive_tags",
         std::vector<std::string>(config.clean.interactive_tags.begin(),
                                  config.clean.interactive_tags.end())},
    };
    j["mining"] = {{"k", config.mining.k},
                   {"lambda", config.mining.weights.lambda},
                   {"include_role_tokens", config.mining.weights.include_role_tokens}};
    auto endpoint_json = [](const ChatEndpoint& endpoint) {
        return Json{{"base_url", endpoint.base_url},
                    {"model_name", endpoint.model_name},
                    {"api_key_env", endpoint.api_key_env},
                    {"temperature", endpoint.temperature},
                    {"max_retries", endpoint.max_retries},
                    {"timeout_ms", endpoint.timeout.count()}};
    };
    j["synthesis"] = {{"overlap_threshold", config.synthesis.overlap_threshold},
                      {"seed", config.synthesis.seed},
                      {"max_instruction_chars", config.synthesis.max_instruction_chars},
                      {"instructions_per_page", config.synthesis.instructions_per_page},
                      {"generator", endpoint_json(config.generator)},
                      {"verifier", endpoint_json(config.verifier)}};
    j["reward"] = {{"r_fmt", config.reward.r_fmt},
                   {"r_opt", config.reward.r_opt},
                   {"r_perf", config.reward.r_perf}};
    j["alignment"] = {{"lambda_orpo", config.lambda_orpo},
                      {"group_size", config.group_size},
                      {"sample_count", config.sample_count}};
    j["rules"] = config.rules.to_json();
    j["workers"] = config.workers;
    j["seed"] = config.seed;
    return j;
}

} // namespace forge
