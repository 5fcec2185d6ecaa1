#include <regex>
#include <set>

#include "cadseq/datagen.hpp"
#include "cadseq/error.hpp"

namespace cadseq {

namespace {

const std::set<std::string> kMarkerVocabulary{"model", "operation", "frame", "sketch", "loop",
                                              "line",  "arc",       "circle", "extrude"};

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::vector<std::size_t> find_all(std::string_view text, const std::string &needle) {
  std::vector<std::size_t> out;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) {
    out.push_back(pos);
  }
  return out;
}

std::string trimmed(std::string_view s) {
  const std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

void check_analysis(const std::string &content, std::vector<ScotViolation> &out) {
  static const std::regex marker(R"(</?([A-Za-z_][A-Za-z0-9_]*)>)");
  for (auto it = std::sregex_iterator(content.begin(), content.end(), marker); it != std::sregex_iterator(); ++it) {
    const std::string name = (*it)[1];
    if (!kMarkerVocabulary.count(name)) {
      out.push_back({"modeling_analysis", "unknown_marker", "marker <" + name + "> is not a structured-text marker"});
    }
  }
  if (const auto err = check_markers(content)) {
    out.push_back({"modeling_analysis", "unbalanced_markers", err->describe()});
  }
}

void check_position(const std::string &content, const CadModel &current, ScotTrace &trace,
                    std::vector<ScotViolation> &out) {
  const std::string section = "position_identification";
  try {
    trace.script = parse_script(content);
  } catch (const Error &e) {
    out.push_back({section, "script_parse", e.what()});
    return;
  }
  if (trace.script.empty()) {
    out.push_back({section, "empty_script", "the edit script has no actions"});
    return;
  }
  for (const std::size_t i : trace.script.edited_ops_a) {
    if (i >= current.ops.size()) {
      out.push_back({section, "index_out_of_range",
                     "edited op " + std::to_string(i) + " does not exist in a model with " +
                         std::to_string(current.ops.size()) + " ops"});
    }
  }
  try {
    const CadModel result = apply(current, trace.script);
    for (const std::size_t j : trace.script.edited_ops_b) {
      if (j >= result.ops.size()) {
        out.push_back({section, "index_out_of_range",
                       "edited result op " + std::to_string(j) + " does not exist in a result with " +
                           std::to_string(result.ops.size()) + " ops"});
      }
    }
  } catch (const Error &e) {
    std::string code = "apply_failed";
    if (e.code() == ErrorCode::IndexOutOfBounds) code = "index_out_of_range";
    if (e.code() == ErrorCode::StaleOldValue) code = "stale_value";
    if (e.code() == ErrorCode::InvalidResult) code = "invalid_result";
    out.push_back({section, code, e.what()});
  }
}

std::string parameter_lines(const EditScript &script) {
  std::string out;
  for (const EditAction &action : script.actions) {
    std::visit(
        [&](const auto &a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, DeleteOp>) {
            out += "step " + std::to_string(a.op + 1) + " is removed\n";
          } else if constexpr (std::is_same_v<T, InsertOp>) {
            out += "step " + std::to_string(a.op + 1) + " is inserted with extrusion " +
                   to_string(ParamValue{a.payload.extrude_toward}) + " and " +
                   to_string(ParamValue{a.payload.extrude_opposite}) + ", sketch scale " +
                   to_string(ParamValue{a.payload.scale}) + "\n";
          } else if constexpr (std::is_same_v<T, DeleteLoop>) {
            out += "loop " + std::to_string(a.loop + 1) + " of step " + std::to_string(a.op + 1) + " is removed\n";
          } else if constexpr (std::is_same_v<T, InsertLoop>) {
            out += "loop " + std::to_string(a.loop + 1) + " of step " + std::to_string(a.op + 1) + " is inserted with " +
                   std::to_string(a.payload.curves.size()) + " curves\n";
          } else {
            out += a.path + ": " + to_string(a.old_value) + " -> " + to_string(a.new_value) + "\n";
          }
        },
        action);
  }
  return out.empty() ? "No parameters change.\n" : out;
}

}  // namespace

ScotResult validate_scot(std::string_view trace, const CadModel &current) {
  ScotResult result;
  std::vector<ScotViolation> &out = result.violations;
  std::array<std::string, 4> contents;
  std::size_t previous_end = 0;
  bool structure_ok = true;
  for (std::size_t s = 0; s < kScotSections.size(); ++s) {
    const std::string name(kScotSections[s]);
    const auto opens = find_all(trace, "<" + name + ">");
    const auto closes = find_all(trace, "</" + name + ">");
    if (opens.empty()) {
      out.push_back({name, "missing_section", "section <" + name + "> is missing"});
      structure_ok = false;
      continue;
    }
    if (opens.size() > 1 || closes.size() > 1) {
      out.push_back({name, "duplicate_section", "section <" + name + "> appears more than once"});
      structure_ok = false;
      continue;
    }
    if (closes.empty() || closes.front() < opens.front()) {
      out.push_back({name, "unclosed_section", "section <" + name + "> is not closed"});
      structure_ok = false;
      continue;
    }
    if (opens.front() < previous_end) {
      out.push_back({name, "section_order", "section <" + name + "> is out of order or nested"});
      structure_ok = false;
    }
    const std::size_t begin = opens.front() + name.size() + 2;
    contents[s] = std::string(trace.substr(begin, closes.front() - begin));
    previous_end = closes.front() + name.size() + 3;
    if (blank(contents[s])) out.push_back({name, "empty_section", "section <" + name + "> is empty"});
  }
  if (!structure_ok) return result;

  ScotTrace parsed;
  parsed.intent_understanding = trimmed(contents[0]);
  parsed.modeling_analysis = trimmed(contents[1]);
  parsed.parameter_computation = trimmed(contents[2]);
  parsed.position_identification = trimmed(contents[3]);
  check_analysis(contents[1], out);
  check_position(contents[3], current, parsed, out);
  if (out.empty()) result.trace = std::move(parsed);
  return result;
}

std::string write_scot(const InstructionRecord &record) {
  if (record.task != Task::Editing || !record.current || !record.script) {
    throw Error(ErrorCode::InvalidArgument, "a reasoning trace needs an editing record with current model and script");
  }
  const EditScript &script = *record.script;
  std::string analysis;
  for (const std::size_t j : script.edited_ops_b) {
    if (j < record.target.ops.size()) {
      analysis += "Step " + std::to_string(j + 1) + ": " + print_op_fragment(record.target.ops[j]) + "\n";
    }
  }
  if (analysis.empty()) analysis = "No steps are added or modified; the edit only removes geometry.\n";
  return "<intent_understanding>\n" + trimmed(record.text) + "\n</intent_understanding>\n<modeling_analysis>\n" +
         analysis + "</modeling_analysis>\n<parameter_computation>\n" + parameter_lines(script) +
         "</parameter_computation>\n<position_identification>\n" + print_script(script) +
         "</position_identification>\n";
}

}  // namespace cadseq
