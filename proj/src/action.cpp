#include "forge/action.hpp"

#include "forge/error.hpp"
#include "forge/text.hpp"

#include <nlohmann/json.hpp>

#include <regex>

namespace forge {

std::string_view action_kind_name(ActionKind kind) {
    switch (kind) {
        case ActionKind::Click: return "Click";
        case ActionKind::Type: return "Type";
        case ActionKind::Select: return "Select";
        case ActionKind::None: return "None";
    }
    return "None";
}

std::optional<ActionKind> action_kind_from(std::string_view name) {
    std::string lower = to_lower(name);
    if (lower == "click") return ActionKind::Click;
    if (lower == "type") return ActionKind::Type;
    if (lower == "select") return ActionKind::Select;
    if (lower == "none") return ActionKind::None;
    return std::nullopt;
}

Action Action::click(int element) {
    return Action{ActionKind::Click, element, std::nullopt};
}

Action Action::type_text(int element, std::string text) {
    return Action{ActionKind::Type, element, std::move(text)};
}

Action Action::select(int element, std::string option) {
    return Action{ActionKind::Select, element, std::move(option)};
}

Action Action::none() {
    return Action{ActionKind::None, std::nullopt, std::nullopt};
}

bool action_valid(const Action& action) {
    switch (action.kind) {
        case ActionKind::None:
            return !action.element_id && !action.argument;
        case ActionKind::Click:
            return action.element_id.has_value() && !action.argument;
        case ActionKind::Type:
        case ActionKind::Select:
            return action.element_id.has_value() && action.argument.has_value();
    }
    return false;
}

Json action_to_json(const Action& action) {
    Json j;
    j["kind"] = to_lower(action_kind_name(action.kind));
    if (action.element_id) j["element"] = *action.element_id;
    if (action.argument) j["argument"] = *action.argument;
    return j;
}

Action action_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ConfigError("action: missing kind");
    }
    auto kind = action_kind_from(j["kind"].get<std::string>());
    if (!kind) throw ConfigError("action: unknown kind '" + j["kind"].get<std::string>() + "'");
    Action action;
    action.kind = *kind;
    if (j.contains("element")) {
        if (!j["element"].is_number_integer()) throw ConfigError("action: element must be an integer");
        action.element_id = j["element"].get<int>();
    }
    if (j.contains("argument")) {
        if (!j["argument"].is_string()) throw ConfigError("action: argument must be a string");
        action.argument = j["argument"].get<std::string>();
    }
    if (!action_valid(action)) throw ConfigError("action: invalid field combination");
    return action;
}

std::string format_action_output(const Action& action) {
    std::string out = "Element: ";
    out += action.element_id ? std::to_string(*action.element_id) : "None";
    out += "\nOperation: ";
    out += action_kind_name(action.kind);
    if (action.argument) {
        out += "\nArgument: \"";
        out += *action.argument;
        out += "\"";
    }
    return out;
}

namespace {

std::optional<Action> finish(std::optional<int> element, std::optional<ActionKind> kind,
                             std::optional<std::string> argument) {
    if (!kind) return std::nullopt;
    Action action;
    action.kind = *kind;
    if (*kind == ActionKind::None) {
        return element ? std::nullopt : std::optional<Action>(Action::none());
    }
    if (!element) return std::nullopt;
    action.element_id = element;
    if (*kind == ActionKind::Type || *kind == ActionKind::Select) {
        action.argument = argument.value_or("");
    }
    return action;
}

} // namespace

std::optional<Action> parse_action_output(std::string_view raw) {
    static const std::regex kElementLine(R"((?:Element|ID)\s*[:=]\s*("?)(\d+|None|none)\1)",
                                         std::regex::icase);
    static const std::regex kOperationLine(R"(Operation\s*[:=]\s*(Click|Type|Select|None))",
                                           std::regex::icase);
    static const std::regex kArgumentLine(R"re(Argument\s*[:=]\s*"([^"]*)")re",
                                          std::regex::icase);
    static const std::regex kCompactOp(R"re(\b(Click|Type|Select)\b(?:\s+"([^"]*)")?)re",
                                       std::regex::icase);

    std::string text(raw);
    std::smatch m;

    // Bare rejection token.
    std::string stripped = collapse_ws(text);
    if (stripped == "<None>" || stripped == "None" || stripped == "none") {
        return Action::none();
    }

    std::optional<int> element;
    bool element_is_none = false;
    if (std::regex_search(text, m, kElementLine)) {
        std::string value = m[2].str();
        if (to_lower(value) == "none") element_is_none = true;
        else element = std::stoi(value);
    }

    std::optional<ActionKind> kind;
    if (std::regex_search(text, m, kOperationLine)) {
        kind = action_kind_from(m[1].str());
    }

    std::optional<std::string> argument;
    if (std::regex_search(text, m, kArgumentLine)) {
        argument = m[1].str();
    }

    // Compact form: `ID=42, Type "Apple"` carries the operation inline.
    if (!kind && std::regex_search(text, m, kCompactOp)) {
        kind = action_kind_from(m[1].str());
        if (!argument && m[2].matched) argument = m[2].str();
    }
    if (!kind && element_is_none) kind = ActionKind::None;
    if (kind == ActionKind::None || element_is_none) {
        if (kind && *kind != ActionKind::None) return std::nullopt;
        return Action::none();
    }
    return finish(element, kind, std::move(argument));
}

} // namespace forge
