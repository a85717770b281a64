#pragma once

#include "forge/action.hpp"
#include "forge/preprocess.hpp"

#include <string>
#include <vector>

namespace forge {

enum class SampleKind { Base, Discrimination, Rejection, Synthetic };

std::string_view sample_kind_name(SampleKind kind); // lowercase
std::optional<SampleKind> sample_kind_from(std::string_view name);

/// One supervised training sample as it lands in the output JSONL.
struct TrainingInstance {
    std::string instance_id;
    FormattedObservation observation;
    std::string instruction;
    std::vector<Action> history;
    Action label;
    SampleKind kind = SampleKind::Base;
    Json metadata = Json::object();
};

Json instance_to_json(const TrainingInstance& instance);
TrainingInstance instance_from_json(const Json& j); // throws ConfigError

/// Re-checks the type invariants on a decoded instance (rejection labels are
/// None, discrimination negatives never contain the label's element, ...).
/// Returns an empty string when valid, else a description of the violation.
std::string validate_instance(const TrainingInstance& instance);

} // namespace forge
