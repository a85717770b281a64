#include "forge/metrics.hpp"

#include "forge/alignment.hpp"
#include "forge/error.hpp"

#include <nlohmann/json.hpp>

#include <iomanip>
#include <sstream>

namespace forge {

Json step_record_to_json(const StepRecord& record) {
    Json j;
    j["task_id"] = record.task_id;
    j["step_index"] = record.step_index;
    j["predicted"] = action_to_json(record.predicted);
    j["gold"] = action_to_json(record.gold);
    return j;
}

StepRecord step_record_from_json(const Json& j) {
    StepRecord record;
    try {
        record.task_id = j.at("task_id").get<std::string>();
        record.step_index = j.at("step_index").get<int>();
        record.predicted = action_from_json(j.at("predicted"));
        record.gold = action_from_json(j.at("gold"));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("step record: ") + e.what());
    }
    return record;
}

bool element_match(const Action& predicted, const Action& gold) {
    return predicted.element_id == gold.element_id;
}

double operation_f1(const Action& predicted, const Action& gold) {
    if (predicted.kind != gold.kind) return 0.0;
    if (!predicted.argument && !gold.argument) return 1.0;
    return token_f1(predicted.argument.value_or(""), gold.argument.value_or(""));
}

bool step_success(const Action& predicted, const Action& gold) {
    return element_match(predicted, gold) && predicted.kind == gold.kind &&
           operation_f1(predicted, gold) == 1.0;
}

MetricsReport compute_report(const std::vector<StepRecord>& records) {
    if (records.empty()) throw EmptyRunError("cannot score an empty prediction run");

    struct TaskAccum {
        double acc = 0.0;
        double f1 = 0.0;
        double sr = 0.0;
        int steps = 0;
    };
    std::map<std::string, TaskAccum> tasks;
    double acc_sum = 0.0;
    double f1_sum = 0.0;
    double sr_sum = 0.0;
    for (const StepRecord& record : records) {
        const double acc = element_match(record.predicted, record.gold) ? 1.0 : 0.0;
        const double f1 = operation_f1(record.predicted, record.gold);
        const double sr = step_success(record.predicted, record.gold) ? 1.0 : 0.0;
        acc_sum += acc;
        f1_sum += f1;
        sr_sum += sr;
        TaskAccum& task = tasks[record.task_id];
        task.acc += acc;
        task.f1 += f1;
        task.sr += sr;
        ++task.steps;
    }

    MetricsReport report;
    const double n = static_cast<double>(records.size());
    report.acc_micro = acc_sum / n;
    report.f1_micro = f1_sum / n;
    report.step_sr = sr_sum / n;

    double acc_macro = 0.0;
    double f1_macro = 0.0;
    for (auto& [task_id, accum] : tasks) {
        TaskMetrics metrics;
        metrics.acc = accum.acc / accum.steps;
        metrics.f1 = accum.f1 / accum.steps;
        metrics.sr = accum.sr / accum.steps;
        acc_macro += metrics.acc;
        f1_macro += metrics.f1;
        report.per_task.emplace(task_id, metrics);
    }
    report.acc_macro = acc_macro / static_cast<double>(tasks.size());
    report.f1_macro = f1_macro / static_cast<double>(tasks.size());
    report.composite =
        (report.acc_micro + report.f1_micro + report.acc_macro + report.f1_macro) / 4.0;
    return report;
}

Json MetricsReport::to_json() const {
    Json j;
    j["acc_micro"] = acc_micro;
    j["f1_micro"] = f1_micro;
    j["acc_macro"] = acc_macro;
    j["f1_macro"] = f1_macro;
    j["step_sr"] = step_sr;
    j["composite"] = composite;
    Json tasks = Json::object();
    for (const auto& [task_id, metrics] : per_task) {
        tasks[task_id] = {{"acc", metrics.acc}, {"f1", metrics.f1}, {"sr", metrics.sr}};
    }
    j["per_task"] = std::move(tasks);
    return j;
}

std::string MetricsReport::to_table() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << "Metric        Value\n";
    out << "------        -----\n";
    out << "Ele Acc (u)   " << acc_micro << "\n";
    out << "Op F1   (u)   " << f1_micro << "\n";
    out << "Ele Acc (M)   " << acc_macro << "\n";
    out << "Op F1   (M)   " << f1_macro << "\n";
    out << "Step SR       " << step_sr << "\n";
    out << "Composite     " << composite << "\n";
    return out.str();
}

} // namespace forge
