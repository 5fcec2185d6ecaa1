#include <charconv>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cadseq/edit.hpp"
#include "cadseq/error.hpp"
#include "cadseq/repr.hpp"
#include "edit_support.hpp"

namespace cadseq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string &message) {
  throw Error(ErrorCode::ParseFailed, "edit script line " + std::to_string(line) + ": " + message);
}

std::optional<ParamValue> value_from_text(std::string_view text) {
  if (text == "true") return ParamValue{true};
  if (text == "false") return ParamValue{false};
  if (const auto kind = boolean_from_string(text)) return ParamValue{*kind};
  double d = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ec == std::errc() && ptr == text.data() + text.size()) return ParamValue{d};
  return std::nullopt;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits off the next whitespace-delimited word.
std::string_view next_word(std::string_view &rest) {
  rest = trim(rest);
  const std::size_t end = rest.find_first_of(" \t");
  const std::string_view word = rest.substr(0, end);
  rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
  return word;
}

std::size_t index_word(std::string_view &rest, std::size_t line, const char *what) {
  const std::string_view w = next_word(rest);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (w.empty() || ec != std::errc() || ptr != w.data() + w.size()) {
    fail(line, std::string("expected ") + what + " index but found '" + std::string(w) + "'");
  }
  return v;
}

template <typename F>
auto fragment(std::size_t line, F parse) {
  try {
    return parse();
  } catch (const Error &e) {
    fail(line, e.what());
  }
}

std::vector<std::size_t> index_list(std::string_view rest, std::size_t line) {
  std::vector<std::size_t> out;
  while (!trim(rest).empty()) out.push_back(index_word(rest, line, "op"));
  return out;
}

std::string join_indices(const std::vector<std::size_t> &v) {
  std::string s;
  for (const std::size_t i : v) s += " " + std::to_string(i);
  return s;
}

json value_json(const ParamValue &v) {
  if (const auto *d = std::get_if<double>(&v)) return *d;
  if (const auto *k = std::get_if<BooleanKind>(&v)) return std::string(to_string(*k));
  return std::get<bool>(v);
}

ParamValue value_from_json(const json &j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_string()) {
    if (const auto kind = boolean_from_string(j.get<std::string>())) return *kind;
  }
  throw Error(ErrorCode::ParseFailed, "invalid parameter value " + j.dump());
}

}  // namespace

std::string print_script(const EditScript &script) {
  std::string out;
  for (const EditAction &action : script.actions) {
    std::visit(
        [&](const auto &a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, DeleteOp>) {
            out += "delete_op " + std::to_string(a.op);
            if (a.payload) out += " " + print_op_fragment(*a.payload);
          } else if constexpr (std::is_same_v<T, InsertOp>) {
            out += "insert_op " + std::to_string(a.op) + " " + print_op_fragment(a.payload);
          } else if constexpr (std::is_same_v<T, DeleteLoop>) {
            out += "delete_loop " + std::to_string(a.op) + " " + std::to_string(a.loop);
            if (a.payload) out += " " + print_loop_fragment(*a.payload);
          } else if constexpr (std::is_same_v<T, InsertLoop>) {
            out += "insert_loop " + std::to_string(a.op) + " " + std::to_string(a.loop) + " " +
                   print_loop_fragment(a.payload);
          } else {
            out += "modify " + a.path + " " + to_string(a.old_value) + " -> " + to_string(a.new_value);
          }
        },
        action);
    out += "\n";
  }
  out += "edited_a" + join_indices(script.edited_ops_a) + "\n";
  out += "edited_b" + join_indices(script.edited_ops_b) + "\n";
  return out;
}

EditScript parse_script(std::string_view text) {
  EditScript script;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::string_view rest = line;
    const std::string_view verb = next_word(rest);
    if (verb == "delete_op" || verb == "insert_op") {
      const std::size_t op = index_word(rest, line_no, "op");
      const std::string_view payload = trim(rest);
      if (verb == "delete_op") {
        DeleteOp a{op, std::nullopt};
        if (!payload.empty()) a.payload = fragment(line_no, [&] { return parse_op_fragment(payload); });
        script.actions.push_back(std::move(a));
      } else {
        if (payload.empty()) fail(line_no, "insert_op needs an <operation> payload");
        script.actions.push_back(InsertOp{op, fragment(line_no, [&] { return parse_op_fragment(payload); })});
      }
    } else if (verb == "delete_loop" || verb == "insert_loop") {
      const std::size_t op = index_word(rest, line_no, "op");
      const std::size_t loop = index_word(rest, line_no, "loop");
      const std::string_view payload = trim(rest);
      if (verb == "delete_loop") {
        DeleteLoop a{op, loop, std::nullopt};
        if (!payload.empty()) a.payload = fragment(line_no, [&] { return parse_loop_fragment(payload); });
        script.actions.push_back(std::move(a));
      } else {
        if (payload.empty()) fail(line_no, "insert_loop needs a <loop> payload");
        script.actions.push_back(
            InsertLoop{op, loop, fragment(line_no, [&] { return parse_loop_fragment(payload); })});
      }
    } else if (verb == "modify") {
      const std::string_view path = next_word(rest);
      const std::string_view old_text = next_word(rest);
      const std::string_view arrow = next_word(rest);
      const std::string_view new_text = next_word(rest);
      if (path.empty() || arrow != "->" || new_text.empty() || !trim(rest).empty()) {
        fail(line_no, "expected 'modify <path> <old> -> <new>'");
      }
      const auto old_value = value_from_text(old_text);
      const auto new_value = value_from_text(new_text);
      if (!old_value) fail(line_no, "invalid value '" + std::string(old_text) + "'");
      if (!new_value) fail(line_no, "invalid value '" + std::string(new_text) + "'");
      script.actions.push_back(ModifyParam{std::string(path), *old_value, *new_value});
    } else if (verb == "edited_a") {
      script.edited_ops_a = index_list(rest, line_no);
    } else if (verb == "edited_b") {
      script.edited_ops_b = index_list(rest, line_no);
    } else {
      fail(line_no, "unknown action '" + std::string(verb) + "'");
    }
  }
  return script;
}

std::string script_to_json(const EditScript &script) {
  json actions = json::array();
  for (const EditAction &action : script.actions) {
    actions.push_back(std::visit(
        [](const auto &a) -> json {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, DeleteOp>) {
            json j{{"type", "delete_op"}, {"op", a.op}};
            if (a.payload) j["payload"] = print_op_fragment(*a.payload);
            return j;
          } else if constexpr (std::is_same_v<T, InsertOp>) {
            return {{"type", "insert_op"}, {"op", a.op}, {"payload", print_op_fragment(a.payload)}};
          } else if constexpr (std::is_same_v<T, DeleteLoop>) {
            json j{{"type", "delete_loop"}, {"op", a.op}, {"loop", a.loop}};
            if (a.payload) j["payload"] = print_loop_fragment(*a.payload);
            return j;
          } else if constexpr (std::is_same_v<T, InsertLoop>) {
            return {{"type", "insert_loop"}, {"op", a.op}, {"loop", a.loop}, {"payload", print_loop_fragment(a.payload)}};
          } else {
            return {{"type", "modify"}, {"path", a.path}, {"old", value_json(a.old_value)}, {"new", value_json(a.new_value)}};
          }
        },
        action));
  }
  return json{{"actions", actions}, {"edited_ops_a", script.edited_ops_a}, {"edited_ops_b", script.edited_ops_b}}.dump();
}

EditScript script_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    EditScript script;
    for (const json &a : j.at("actions")) {
      const std::string type = a.at("type").get<std::string>();
      if (type == "delete_op") {
        DeleteOp d{a.at("op").get<std::size_t>(), std::nullopt};
        if (a.contains("payload")) d.payload = parse_op_fragment(a["payload"].get<std::string>());
        script.actions.push_back(std::move(d));
      } else if (type == "insert_op") {
        script.actions.push_back(
            InsertOp{a.at("op").get<std::size_t>(), parse_op_fragment(a.at("payload").get<std::string>())});
      } else if (type == "delete_loop") {
        DeleteLoop d{a.at("op").get<std::size_t>(), a.at("loop").get<std::size_t>(), std::nullopt};
        if (a.contains("payload")) d.payload = parse_loop_fragment(a["payload"].get<std::string>());
        script.actions.push_back(std::move(d));
      } else if (type == "insert_loop") {
        script.actions.push_back(InsertLoop{a.at("op").get<std::size_t>(), a.at("loop").get<std::size_t>(),
                                            parse_loop_fragment(a.at("payload").get<std::string>())});
      } else if (type == "modify") {
        script.actions.push_back(
            ModifyParam{a.at("path").get<std::string>(), value_from_json(a.at("old")), value_from_json(a.at("new"))});
      } else {
        throw Error(ErrorCode::ParseFailed, "unknown action type '" + type + "'");
      }
    }
    if (j.contains("edited_ops_a")) script.edited_ops_a = j["edited_ops_a"].get<std::vector<std::size_t>>();
    if (j.contains("edited_ops_b")) script.edited_ops_b = j["edited_ops_b"].get<std::vector<std::size_t>>();
    return script;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::ParseFailed, std::string("edit script: ") + e.what());
  }
}

}  // namespace cadseq
