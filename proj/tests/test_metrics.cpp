#include "forge/metrics.hpp"

#include "forge/error.hpp"
#include "forge/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace forge;

namespace {

StepRecord step(const std::string& task, int index, Action predicted, Action gold) {
    return StepRecord{task, index, std::move(predicted), std::move(gold)};
}

} // namespace

TEST_CASE("step_success") {
    CHECK(step_success(Action::click(5), Action::click(5)));
    CHECK_FALSE(step_success(Action::click(5), Action::click(6)));
    CHECK_FALSE(step_success(Action::click(5), Action::type_text(5, "x")));
    // Right element, text off by one token: F1 < 1 so the step fails.
    CHECK_FALSE(step_success(Action::type_text(5, "iphone 13 pro"),
                             Action::type_text(5, "iphone 13")));
    CHECK(step_success(Action::type_text(5, "iphone 13"), Action::type_text(5, "iphone 13")));
    // A rejection prediction on a rejection gold counts as success.
    CHECK(step_success(Action::none(), Action::none()));
    CHECK_FALSE(step_success(Action::click(1), Action::none()));
    CHECK_FALSE(step_success(Action::none(), Action::click(1)));
}

TEST_CASE("operation_f1 gates on the kind") {
    CHECK(operation_f1(Action::click(1), Action::click(2)) == doctest::Approx(1.0));
    CHECK(operation_f1(Action::click(1), Action::type_text(1, "x")) == doctest::Approx(0.0));
    CHECK(operation_f1(Action::type_text(1, "buy red apple"),
                       Action::type_text(1, "buy green apple")) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(operation_f1(Action::none(), Action::none()) == doctest::Approx(1.0));
}

TEST_CASE("compute_report rejects an empty run") {
    CHECK_THROWS_AS(compute_report({}), EmptyRunError);
}

TEST_CASE("equal components make the composite equal to them") {
    // Single task, single step, everything correct: all four terms are 1.
    MetricsReport report =
        compute_report({step("t", 0, Action::click(3), Action::click(3))});
    CHECK(report.composite == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.acc_micro == doctest::Approx(report.acc_macro));
    CHECK(report.f1_micro == doctest::Approx(report.f1_macro));
    CHECK(report.step_sr == doctest::Approx(1.0));
}

TEST_CASE("micro and macro averaging diverge on unbalanced tasks") {
    // Task one: a single fully correct step. Task two: two fully wrong steps.
    std::vector<StepRecord> records = {
        step("one", 0, Action::click(1), Action::click(1)),
        step("two", 0, Action::click(9), Action::type_text(2, "x")),
        step("two", 1, Action::click(8), Action::type_text(3, "y")),
    };
    MetricsReport report = compute_report(records);
    CHECK(report.acc_micro == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(report.acc_macro == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.f1_micro == doctest::Approx(1.0 / 3.0));
    CHECK(report.f1_macro == doctest::Approx(0.5));
    CHECK(report.per_task.at("one").acc == doctest::Approx(1.0));
    CHECK(report.per_task.at("two").acc == doctest::Approx(0.0));
}

TEST_CASE("composite is the mean of its four components") {
    std::vector<StepRecord> records = {
        step("a", 0, Action::click(1), Action::click(1)),
        step("a", 1, Action::type_text(2, "x y"), Action::type_text(2, "x z")),
        step("b", 0, Action::click(4), Action::click(5)),
        step("b", 1, Action::none(), Action::none()),
    };
    MetricsReport report = compute_report(records);
    CHECK(std::abs(report.composite - (report.acc_micro + report.f1_micro +
                                       report.acc_macro + report.f1_macro) /
                                          4.0) < 1e-12);
}

TEST_CASE("composite is invariant under record permutation") {
    Rng rng(5150);
    std::vector<StepRecord> records;
    for (int i = 0; i < 24; ++i) {
        std::string task = "t" + std::to_string(i % 5);
        Action gold = (i % 3 == 0) ? Action::type_text(i, "alpha beta")
                                   : Action::click(i);
        Action predicted = (rng.uniform_index(2) == 0)
                               ? gold
                               : Action::click(static_cast<int>(rng.uniform_index(30)));
        records.push_back(step(task, i, predicted, gold));
    }
    MetricsReport base = compute_report(records);
    for (int round = 0; round < 10; ++round) {
        for (std::size_t i = records.size(); i > 1; --i) {
            std::swap(records[i - 1], records[rng.uniform_index(i)]);
        }
        MetricsReport shuffled = compute_report(records);
        CHECK(shuffled.composite == doctest::Approx(base.composite).epsilon(1e-12));
        CHECK(shuffled.acc_macro == doctest::Approx(base.acc_macro).epsilon(1e-12));
        CHECK(shuffled.step_sr == doctest::Approx(base.step_sr).epsilon(1e-12));
    }
}

TEST_CASE("step SR never exceeds micro element accuracy") {
    Rng rng(616);
    for (int run = 0; run < 200; ++run) {
        std::vector<StepRecord> records;
        const int steps = 1 + static_cast<int>(rng.uniform_index(12));
        for (int i = 0; i < steps; ++i) {
            auto random_action = [&]() {
                switch (rng.uniform_index(4)) {
                    case 0: return Action::click(static_cast<int>(rng.uniform_index(4)));
                    case 1:
                        return Action::type_text(static_cast<int>(rng.uniform_index(4)),
                                                 rng.uniform_index(2) ? "a b" : "a");
                    case 2:
                        return Action::select(static_cast<int>(rng.uniform_index(4)), "o");
                    default: return Action::none();
                }
            };
            records.push_back(step("t" + std::to_string(i % 3), i, random_action(),
                                   random_action()));
        }
        MetricsReport report = compute_report(records);
        CHECK(report.step_sr <= report.acc_micro + 1e-12);
        CHECK(report.composite >= 0.0);
        CHECK(report.composite <= 1.0);
    }
}

TEST_CASE("single-task single-step runs have micro equal to macro") {
    MetricsReport report = compute_report(
        {step("only", 0, Action::type_text(1, "a"), Action::type_text(1, "a b"))});
    CHECK(report.acc_micro == doctest::Approx(report.acc_macro).epsilon(1e-12));
    CHECK(report.f1_micro == doctest::Approx(report.f1_macro).epsilon(1e-12));
}

TEST_CASE("step records round-trip through json") {
    StepRecord record = step("task", 3, Action::type_text(4, "x"), Action::none());
    StepRecord copy = step_record_from_json(step_record_to_json(record));
    CHECK(copy.task_id == record.task_id);
    CHECK(copy.step_index == record.step_index);
    CHECK(copy.predicted == record.predicted);
    CHECK(copy.gold == record.gold);
}
