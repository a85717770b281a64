#include "forge/synthesis.hpp"

#include "forge/error.hpp"
#include "forge/parallel.hpp"
#include "forge/random.hpp"
#include "forge/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <iostream>

namespace forge {
namespace {

constexpr const char* kGeneratorSystem =
    "You are an expert web user specializing in creating realistic user interactions.";

constexpr const char* kVerifierSystem =
    "You are a precise web navigation assistant. Your goal is to identify the exact HTML "
    "element that matches the user's instruction.";

struct TaskBlock {
    const char* title;
    const char* instructions;
    const char* example;
};

const TaskBlock& task_block(TaskType type) {
    static const TaskBlock kNavigation{
        "Navigation Intent",
        "Generate a short, imperative command that directly operates on the target element. "
        "The command should be clear and action-oriented.",
        "Example Output: \"Click the 'Sign Up' button at the top right.\""};
    static const TaskBlock kRetrieval{
        "Information Retrieval",
        "Generate a query that asks for specific information contained within the target "
        "element. The user is looking for content, not performing an action.",
        "Example Output: \"What is the price of the Sony WH-1000XM4 headphones?\""};
    static const TaskBlock kReasoning{
        "Reasoning Question",
        "Generate a complex instruction that requires logical deduction or comparison with "
        "sibling elements to identify the target. Do not explicitly mention unique attributes "
        "(like IDs); describe the element by its relationship or condition.",
        "Example Output: \"Select the flight that has the shortest duration among the "
        "options.\""};
    switch (type) {
        case TaskType::NavigationIntent: return kNavigation;
        case TaskType::InformationRetrieval: return kRetrieval;
        case TaskType::ReasoningQuestion: return kReasoning;
    }
    return kNavigation;
}

} // namespace

std::string_view task_type_name(TaskType type) {
    switch (type) {
        case TaskType::NavigationIntent: return "navigation_intent";
        case TaskType::InformationRetrieval: return "information_retrieval";
        case TaskType::ReasoningQuestion: return "reasoning_question";
    }
    return "navigation_intent";
}

std::optional<TaskType> task_type_from(std::string_view name) {
    if (name == "navigation_intent") return TaskType::NavigationIntent;
    if (name == "information_retrieval") return TaskType::InformationRetrieval;
    if (name == "reasoning_question") return TaskType::ReasoningQuestion;
    return std::nullopt;
}

std::string_view verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::ExactMatch: return "exact_match";
        case Verdict::PathOverlap: return "path_overlap";
        case Verdict::Rejected: return "rejected";
        case Verdict::VerifierNone: return "verifier_none";
    }
    return "rejected";
}

Json synthesis_record_to_json(const SynthesisRecord& record) {
    Json j;
    j["html"] = record.html;
    j["instruction"] = record.instruction;
    j["target_id"] = record.target_id;
    j["task_type"] = std::string(task_type_name(record.task_type));
    if (record.verifier_id) j["verifier_id"] = *record.verifier_id;
    else j["verifier_id"] = nullptr;
    j["verdict"] = std::string(verdict_name(record.verdict));
    return j;
}

SynthesisRecord synthesis_record_from_json(const Json& j) {
    SynthesisRecord record;
    try {
        record.html = j.at("html").get<std::string>();
        record.instruction = j.at("instruction").get<std::string>();
        record.target_id = j.at("target_id").get<int>();
        auto type = task_type_from(j.at("task_type").get<std::string>());
        if (!type) throw ConfigError("synthesis record: unknown task_type");
        record.task_type = *type;
        if (j.contains("verifier_id") && !j["verifier_id"].is_null()) {
            record.verifier_id = j["verifier_id"].get<int>();
        }
        std::string verdict = j.at("verdict").get<std::string>();
        if (verdict == "exact_match") record.verdict = Verdict::ExactMatch;
        else if (verdict == "path_overlap") record.verdict = Verdict::PathOverlap;
        else if (verdict == "verifier_none") record.verdict = Verdict::VerifierNone;
        else if (verdict == "rejected") record.verdict = Verdict::Rejected;
        else throw ConfigError("synthesis record: unknown verdict");
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("synthesis record: ") + e.what());
    }
    return record;
}

Json SynthesisStats::to_json() const {
    Json j;
    j["pages"] = pages;
    j["no_interactive"] = no_interactive;
    j["invalid_generation"] = invalid_generation;
    j["endpoint_failures"] = endpoint_failures;
    j["unparseable_responses"] = unparseable_responses;
    Json verdicts;
    verdicts["exact_match"] = exact_match;
    verdicts["path_overlap"] = path_overlap;
    verdicts["rejected"] = rejected;
    verdicts["verifier_none"] = verifier_none;
    j["verdicts"] = std::move(verdicts);
    j["retained"] = retained;
    j["pass_rate"] = pass_rate();
    return j;
}

GeneratorPrompt render_generator_prompt(const std::string& page_html,
                                        const std::string& target_html, TaskType type) {
    const TaskBlock& block = task_block(type);
    GeneratorPrompt prompt;
    prompt.system = kGeneratorSystem;
    prompt.user = "[Shared Context]\nHTML Snippet:\n" + page_html +
                  "\n\nTarget Element:\n" + target_html +
                  "\n\n[Task-Specific Instructions]\n" + block.title + "\n" +
                  block.instructions + "\n" + block.example +
                  "\n\nRespond with the instruction text only.";
    return prompt;
}

VerifierPrompt render_verifier_prompt(const std::string& page_html,
                                      const std::string& instruction) {
    VerifierPrompt prompt;
    prompt.system = kVerifierSystem;
    prompt.user = "Webpage HTML:\n" + page_html + "\n\nUser Instruction:\n\"" + instruction +
                  "\"\n\n[Constraint]\nAnalyze the HTML structure carefully. Return the "
                  "backend_node_id of the element that best satisfies the instruction. If the "
                  "instruction is ambiguous or the element is missing, output \"None\".\n\n"
                  "[Response Format]\nThought: <Let's think step by step...>\nTarget ID: <ID>";
    return prompt;
}

std::string serialize_subtree(const DomTree& tree, int node_id, const CleanConfig& config,
                              bool inject_ids) {
    const DomNode& node = tree.node(node_id);
    // Rebuild the subtree as a standalone arena so the shared serializer can
    // run on it while keeping the original node ids as injected markers.
    DomTree sub;
    struct Copier {
        const DomTree& src;
        DomTree& dst;
        void copy(int src_id, std::optional<int> parent) {
            const DomNode& from = src.nodes[static_cast<std::size_t>(src_id)];
            int id = static_cast<int>(dst.nodes.size());
            DomNode to = from;
            to.node_id = from.node_id; // keep original ids for injection
            to.parent = parent;
            to.children.clear();
            dst.nodes.push_back(std::move(to));
            for (int child : from.children) {
                dst.nodes[static_cast<std::size_t>(id)].children.push_back(
                    static_cast<int>(dst.nodes.size()));
                copy(child, id);
            }
        }
    };
    Copier{tree, sub}.copy(node.node_id, std::nullopt);
    return serialize_html(sub, config, inject_ids);
}

std::string generate_candidate(const DomTree& page, const std::string& page_html,
                               ChatClient& client, const ChatEndpoint& endpoint, TaskType type,
                               int target_id, const CleanConfig& clean_config,
                               int max_instruction_chars) {
    page.node(target_id);
    const std::string target_html = serialize_subtree(page, target_id, clean_config, true);
    GeneratorPrompt prompt = render_generator_prompt(page_html, target_html, type);

    ChatRequest request;
    request.model = endpoint.model_name;
    request.temperature = endpoint.temperature;
    request.messages = {{"system", prompt.system}, {"user", prompt.user}};

    std::string instruction = collapse_ws(client.complete(request));
    if (instruction.empty()) throw InvalidGenerationError("generator returned empty text");
    if (max_instruction_chars > 0 &&
        static_cast<int>(instruction.size()) > max_instruction_chars) {
        throw InvalidGenerationError("generator output exceeds " +
                                     std::to_string(max_instruction_chars) + " chars");
    }
    return instruction;
}

std::optional<int> verify_candidate(const std::string& page_html,
                                    const std::string& instruction, ChatClient& client,
                                    const ChatEndpoint& endpoint) {
    VerifierPrompt prompt = render_verifier_prompt(page_html, instruction);
    ChatRequest request;
    request.model = endpoint.model_name;
    request.temperature = endpoint.temperature;
    request.messages = {{"system", prompt.system}, {"user", prompt.user}};
    std::string response = client.complete(request);

    // Last "Target ID:" line wins; templates echo one in the format section.
    std::size_t pos = response.rfind("Target ID:");
    if (pos == std::string::npos) {
        throw UnparseableResponseError("verifier response lacks a Target ID line");
    }
    std::size_t value_start = pos + std::string("Target ID:").size();
    std::size_t line_end = response.find('\n', value_start);
    std::string value = collapse_ws(
        response.substr(value_start, line_end == std::string::npos ? std::string::npos
                                                                   : line_end - value_start));
    if (value.empty()) throw UnparseableResponseError("empty Target ID value");
    std::string lowered = to_lower(value);
    if (lowered == "none" || lowered == "<none>") return std::nullopt;
    std::size_t digits = 0;
    while (digits < value.size() && std::isdigit(static_cast<unsigned char>(value[digits]))) {
        ++digits;
    }
    if (digits == 0) throw UnparseableResponseError("Target ID is neither a number nor None");
    return std::stoi(value.substr(0, digits));
}

double path_overlap(const DomPath& a, const DomPath& b) {
    const std::size_t limit = std::min(a.steps.size(), b.steps.size());
    std::size_t prefix = 0;
    while (prefix < limit && a.steps[prefix] == b.steps[prefix]) ++prefix;
    const std::size_t longest = std::max(a.steps.size(), b.steps.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(prefix) / static_cast<double>(longest);
}

SynthesisRecord consensus_filter(SynthesisRecord record, const DomTree& tree, double threshold) {
    if (!record.verifier_id) {
        record.verdict = Verdict::VerifierNone;
        return record;
    }
    if (*record.verifier_id == record.target_id) {
        record.verdict = Verdict::ExactMatch;
        return record;
    }
    if (!tree.contains(*record.verifier_id) || !tree.contains(record.target_id)) {
        record.verdict = Verdict::Rejected;
        return record;
    }
    const double overlap = path_overlap(node_path(tree, *record.verifier_id),
                                        node_path(tree, record.target_id));
    record.verdict = overlap > threshold ? Verdict::PathOverlap : Verdict::Rejected;
    return record;
}

namespace {

enum class PageOutcome {
    Retained,
    Filtered,
    NoInteractive,
    InvalidGeneration,
    EndpointFailure,
    Unparseable,
};

struct PageResult {
    PageOutcome outcome = PageOutcome::NoInteractive;
    std::optional<SynthesisRecord> record;
};

} // namespace

std::pair<std::vector<SynthesisRecord>, SynthesisStats> run_synthesis(
    const std::vector<DomTree>& pages, ChatClient& generator, const ChatEndpoint& generator_ep,
    ChatClient& verifier, const ChatEndpoint& verifier_ep, const SynthesisConfig& config,
    const CleanConfig& clean_config, int workers) {
    const int per_page = std::max(1, config.instructions_per_page);
    const std::size_t total = pages.size() * static_cast<std::size_t>(per_page);

    auto process = [&](std::size_t index) -> PageResult {
        const DomTree& page = pages[index / static_cast<std::size_t>(per_page)];
        PageResult result;
        std::vector<int> interactive = extract_interactive(page, clean_config);
        if (interactive.empty()) {
            result.outcome = PageOutcome::NoInteractive;
            return result;
        }
        Rng rng = Rng::forked(config.seed, index);
        const int target = interactive[rng.uniform_index(interactive.size())];
        const TaskType type = static_cast<TaskType>(rng.uniform_index(kTaskTypeCount));
        const std::string html = serialize_html(page, clean_config, /*inject_ids=*/true);

        SynthesisRecord record;
        record.html = html;
        record.target_id = target;
        record.task_type = type;
        try {
            record.instruction = generate_candidate(page, html, generator, generator_ep, type,
                                                    target, clean_config,
                                                    config.max_instruction_chars);
        } catch (const InvalidGenerationError&) {
            result.outcome = PageOutcome::InvalidGeneration;
            return result;
        } catch (const EndpointError&) {
            result.outcome = PageOutcome::EndpointFailure;
            return result;
        }
        try {
            record.verifier_id = verify_candidate(html, record.instruction, verifier,
                                                  verifier_ep);
        } catch (const UnparseableResponseError&) {
            record.verifier_id = std::nullopt;
            record.verdict = Verdict::Rejected;
            result.outcome = PageOutcome::Unparseable;
            result.record = std::move(record);
            return result;
        } catch (const EndpointError&) {
            result.outcome = PageOutcome::EndpointFailure;
            return result;
        }
        record = consensus_filter(std::move(record), page, config.overlap_threshold);
        result.outcome =
            verdict_retained(record.verdict) ? PageOutcome::Retained : PageOutcome::Filtered;
        result.record = std::move(record);
        return result;
    };

    std::vector<PageResult> results = parallel_map(total, workers, process);

    std::vector<SynthesisRecord> retained;
    SynthesisStats stats;
    stats.pages = static_cast<long>(pages.size());
    for (PageResult& result : results) {
        switch (result.outcome) {
            case PageOutcome::NoInteractive: ++stats.no_interactive; break;
            case PageOutcome::InvalidGeneration: ++stats.invalid_generation; break;
            case PageOutcome::EndpointFailure: ++stats.endpoint_failures; break;
            case PageOutcome::Unparseable: ++stats.unparseable_responses; break;
            case PageOutcome::Retained:
            case PageOutcome::Filtered: {
                switch (result.record->verdict) {
                    case Verdict::ExactMatch: ++stats.exact_match; break;
                    case Verdict::PathOverlap: ++stats.path_overlap; break;
                    case Verdict::Rejected: ++stats.rejected; break;
                    case Verdict::VerifierNone: ++stats.verifier_none; break;
                }
                if (verdict_retained(result.record->verdict)) {
                    ++stats.retained;
                    retained.push_back(std::move(*result.record));
                }
                break;
            }
        }
    }
    return {std::move(retained), stats};
}

} // namespace forge
