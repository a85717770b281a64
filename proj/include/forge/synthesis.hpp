#pragma once

#include "forge/chat.hpp"
#include "forge/preprocess.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace forge {

enum class TaskType { NavigationIntent, InformationRetrieval, ReasoningQuestion };

constexpr int kTaskTypeCount = 3;

std::string_view task_type_name(TaskType type); // "navigation_intent" / ...
std::optional<TaskType> task_type_from(std::string_view name);

enum class Verdict { ExactMatch, PathOverlap, Rejected, VerifierNone };

std::string_view verdict_name(Verdict verdict);

inline bool verdict_retained(Verdict verdict) {
    return verdict == Verdict::ExactMatch || verdict == Verdict::PathOverlap;
}

struct SynthesisRecord {
    std::string html; // id-injected cleaned page
    std::string instruction;
    int target_id = -1;
    TaskType task_type = TaskType::NavigationIntent;
    std::optional<int> verifier_id;
    Verdict verdict = Verdict::Rejected;
};

Json synthesis_record_to_json(const SynthesisRecord& record);
SynthesisRecord synthesis_record_from_json(const Json& j); // throws ConfigError

struct SynthesisConfig {
    double overlap_threshold = 0.9;
    std::uint64_t seed = 0;
    int max_instruction_chars = 512;
    int instructions_per_page = 1;
};

struct SynthesisStats {
    long pages = 0;
    long no_interactive = 0;
    long invalid_generation = 0;
    long endpoint_failures = 0;
    long unparseable_responses = 0;
    long exact_match = 0;
    long path_overlap = 0;
    long rejected = 0;
    long verifier_none = 0;
    long retained = 0;

    long verified() const {
        return exact_match + path_overlap + rejected + verifier_none + unparseable_responses;
    }
    double pass_rate() const {
        return verified() == 0 ? 0.0
                               : static_cast<double>(retained) / static_cast<double>(verified());
    }
    Json to_json() const;
};

struct GeneratorPrompt {
    std::string system;
    std::string user;
};
GeneratorPrompt render_generator_prompt(const std::string& page_html,
                                        const std::string& target_html, TaskType type);

struct VerifierPrompt {
    std::string system;
    std::string user;
};
/// Depends only on the page HTML and the instruction; the generator's choice
/// never enters this payload.
VerifierPrompt render_verifier_prompt(const std::string& page_html,
                                      const std::string& instruction);

/// Serialization of a single element subtree (used as the generator's target
/// context).
std::string serialize_subtree(const DomTree& tree, int node_id, const CleanConfig& config,
                              bool inject_ids);

/// Asks the generator endpoint for an instruction grounded in the
/// pre-selected target element. Throws InvalidGenerationError when the reply
/// is empty or over-length, EndpointError on transport failure.
std::string generate_candidate(const DomTree& page, const std::string& page_html,
                               ChatClient& client, const ChatEndpoint& endpoint, TaskType type,
                               int target_id, const CleanConfig& clean_config,
                               int max_instruction_chars);

/// Blind verification: returns the verifier's element id, or nothing for an
/// explicit "None". Throws UnparseableResponseError when no Target ID line
/// can be found.
std::optional<int> verify_candidate(const std::string& page_html,
                                    const std::string& instruction, ChatClient& client,
                                    const ChatEndpoint& endpoint);

/// Longest-common-prefix ratio of two root-to-node paths.
double path_overlap(const DomPath& a, const DomPath& b);

/// Applies the consensus rule: exact id match, else path overlap strictly
/// above the threshold, else rejected (VerifierNone when the verifier
/// declined to answer).
SynthesisRecord consensus_filter(SynthesisRecord record, const DomTree& tree, double threshold);

/// Full generate -> verify -> filter loop over a page batch with bounded
/// parallelism. Per-page endpoint failures are skipped, never fatal.
std::pair<std::vector<SynthesisRecord>, SynthesisStats> run_synthesis(
    const std::vector<DomTree>& pages, ChatClient& generator, const ChatEndpoint& generator_ep,
    ChatClient& verifier, const ChatEndpoint& verifier_ep, const SynthesisConfig& config,
    const CleanConfig& clean_config, int workers);

} // namespace forge
