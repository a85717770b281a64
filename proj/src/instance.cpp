#include "forge/instance.hpp"

#include "forge/error.hpp"

#include <nlohmann/json.hpp>

namespace forge {

std::string_view sample_kind_name(SampleKind kind) {
    switch (kind) {
        case SampleKind::Base: return "base";
        case SampleKind::Discrimination: return "discrimination";
        case SampleKind::Rejection: return "rejection";
        case SampleKind::Synthetic: return "synthetic";
    }
    return "base";
}

std::optional<SampleKind> sample_kind_from(std::string_view name) {
    if (name == "base") return SampleKind::Base;
    if (name == "discrimination") return SampleKind::Discrimination;
    if (name == "rejection") return SampleKind::Rejection;
    if (name == "synthetic") return SampleKind::Synthetic;
    return std::nullopt;
}

Json instance_to_json(const TrainingInstance& instance) {
    Json j;
    j["instance_id"] = instance.instance_id;
    j["kind"] = std::string(sample_kind_name(instance.kind));
    j["instruction"] = instance.instruction;
    Json obs;
    obs["system"] = instance.observation.system_text;
    obs["html"] = instance.observation.html_text;
    obs["history_lines"] = instance.observation.history_lines;
    obs["instruction"] = instance.observation.instruction;
    j["observation"] = std::move(obs);
    Json history = Json::array();
    for (const Action& action : instance.history) history.push_back(action_to_json(action));
    j["history"] = std::move(history);
    j["label"] = action_to_json(instance.label);
    j["metadata"] = instance.metadata;
    return j;
}

TrainingInstance instance_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("instance: expected an object");
    TrainingInstance instance;
    try {
        instance.instance_id = j.at("instance_id").get<std::string>();
        auto kind = sample_kind_from(j.at("kind").get<std::string>());
        if (!kind) throw ConfigError("instance: unknown kind");
        instance.kind = *kind;
        instance.instruction = j.at("instruction").get<std::string>();
        const Json& obs = j.at("observation");
        instance.observation.system_text = obs.at("system").get<std::string>();
        instance.observation.html_text = obs.at("html").get<std::string>();
        instance.observation.history_lines =
            obs.at("history_lines").get<std::vector<std::string>>();
        instance.observation.instruction = obs.at("instruction").get<std::string>();
        for (const Json& action : j.at("history")) {
            instance.history.push_back(action_from_json(action));
        }
        instance.label = action_from_json(j.at("label"));
        instance.metadata = j.value("metadata", Json::object());
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("instance: ") + e.what());
    }
    return instance;
}

std::string validate_instance(const TrainingInstance& instance) {
    if (instance.instance_id.empty()) return "empty instance_id";
    if (!action_valid(instance.label)) return "invalid label action";
    for (const Action& action : instance.history) {
        if (!action_valid(action)) return "invalid history action";
    }
    if (instance.kind == SampleKind::Rejection && instance.label.kind != ActionKind::None) {
        return "rejection label must be None";
    }
    if (instance.kind == SampleKind::Discrimination) {
        if (!instance.metadata.contains("negatives") ||
            !instance.metadata["negatives"].is_array()) {
            return "discrimination instance missing negatives list";
        }
        if (instance.label.element_id) {
            for (const Json& id : instance.metadata["negatives"]) {
                if (id.is_number_integer() && id.get<int>() == *instance.label.element_id) {
                    return "negative id equals the label element";
                }
            }
        }
    }
    return {};
}

} // namespace forge
