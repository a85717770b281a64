#pragma once

#include "forge/action.hpp"

#include <map>
#include <string>
#include <vector>

namespace forge {

struct StepRecord {
    std::string task_id;
    int step_index = 0;
    Action predicted;
    Action gold;
};

Json step_record_to_json(const StepRecord& record);
StepRecord step_record_from_json(const Json& j); // throws ConfigError

/// Element selection correctness; a None prediction matches a None gold.
bool element_match(const Action& predicted, const Action& gold);

/// 0 when the operation kinds differ, otherwise the argument token F1
/// (vacuously 1 for argument-less operations).
double operation_f1(const Action& predicted, const Action& gold);

/// Both sides correct: element, operation kind, and exact argument F1.
bool step_success(const Action& predicted, const Action& gold);

struct TaskMetrics {
    double acc = 0.0;
    double f1 = 0.0;
    double sr = 0.0;
};

struct MetricsReport {
    double acc_micro = 0.0;
    double f1_micro = 0.0;
    double acc_macro = 0.0;
    double f1_macro = 0.0;
    double step_sr = 0.0;
    double composite = 0.0;
    std::map<std::string, TaskMetrics> per_task;

    Json to_json() const;
    std::string to_table() const;
};

/// Micro metrics pool over all steps; macro metrics average the per-task
/// means; composite is the mean of the four accuracy/F1 terms.
/// Throws EmptyRunError on an empty record list.
MetricsReport compute_report(const std::vector<StepRecord>& records);

} // namespace forge
