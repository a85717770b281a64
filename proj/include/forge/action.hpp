#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace forge {

using Json = nlohmann::ordered_json;

enum class ActionKind { Click, Type, Select, None };

std::string_view action_kind_name(ActionKind kind); // "Click" / "Type" / ...
std::optional<ActionKind> action_kind_from(std::string_view name); // case-insensitive

/// A grounded agent action. `None` is the explicit rejection action and
/// carries neither element nor argument; `Click` never carries an argument.
struct Action {
    ActionKind kind = ActionKind::None;
    std::optional<int> element_id;
    std::optional<std::string> argument;

    bool operator==(const Action&) const = default;

    static Action click(int element);
    static Action type_text(int element, std::string text);
    static Action select(int element, std::string option);
    static Action none();
};

/// True when the field combination satisfies the Action invariants.
bool action_valid(const Action& action);

Json action_to_json(const Action& action);
Action action_from_json(const Json& j); // throws ConfigError on bad shape

/// Canonical model-output block:
///   Element: 42
///   Operation: Type
///   Argument: "Apple"
std::string format_action_output(const Action& action);

/// Parses a model output into an Action. Accepts the canonical block above
/// as well as the compact form `ID=42, Type "Apple"` and a bare `<None>`.
/// Returns nothing when no valid element/operation pair can be recovered.
std::optional<Action> parse_action_output(std::string_view raw);

} // namespace forge
