#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cadseq/error.hpp"
#include "cadseq/metrics.hpp"
#include "cadseq/parallel.hpp"

namespace cadseq {

namespace {

using nlohmann::json;

std::optional<std::string> read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json optional_number(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

json summary_json(const EvalSummary &s) {
  return {{"type", "summary"},
          {"n_total", s.n_total},
          {"n_invalid", s.n_invalid},
          {"invalidity_ratio", s.invalidity_ratio},
          {"mean_cd", optional_number(s.mean_cd)},
          {"median_cd", optional_number(s.median_cd)},
          {"mean_cd_scaled", optional_number(s.mean_cd ? std::optional(*s.mean_cd * kCdReportScale) : std::nullopt)},
          {"median_cd_scaled",
           optional_number(s.median_cd ? std::optional(*s.median_cd * kCdReportScale) : std::nullopt)}};
}

}  // namespace

std::string_view to_string(EvalFailure failure) {
  switch (failure) {
    case EvalFailure::None: return "none";
    case EvalFailure::Parse: return "parse";
    case EvalFailure::Validate: return "validate";
    case EvalFailure::EmptyGeometry: return "empty_geometry";
  }
  return "none";
}

EvalRecord evaluate_item(const EvalItem &item, ReprKind kind, std::size_t n, std::uint64_t seed) {
  EvalRecord record;
  record.generated_label = item.generated_label;
  record.target_label = item.target_label;
  const ParseOutcome outcome = parse(item.generated, kind);
  if (!outcome) {
    record.failure =
        outcome.error().kind == ParseErrorKind::Semantic ? EvalFailure::Validate : EvalFailure::Parse;
    record.message = outcome.error().describe();
    return record;
  }
  try {
    record.cd = model_chamfer(outcome.model(), item.target, n, seed);
  } catch (const Error &e) {
    record.failure = EvalFailure::EmptyGeometry;
    record.message = e.what();
  }
  return record;
}

EvalSummary summarize(const std::vector<EvalRecord> &records) {
  EvalSummary s;
  s.n_total = records.size();
  std::vector<double> values;
  for (const EvalRecord &r : records) {
    if (r.valid()) {
      values.push_back(r.cd->value);
    } else {
      ++s.n_invalid;
    }
  }
  s.invalidity_ratio = s.n_total == 0 ? 0.0 : static_cast<double>(s.n_invalid) / static_cast<double>(s.n_total);
  if (!values.empty()) {
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean_cd = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    s.median_cd = values.size() % 2 == 1 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
  }
  return s;
}

EvalReport evaluate_batch(const std::vector<EvalItem> &items, ReprKind kind, std::size_t n, std::uint64_t seed,
                          std::size_t threads) {
  EvalReport report;
  report.records.resize(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    report.records[i] = evaluate_item(items[i], kind, n, seed);
    report.records[i].index = i;
  });
  report.summary = summarize(report.records);
  return report;
}

std::vector<EvalItem> parse_manifest(std::string_view text, const std::filesystem::path &base) {
  std::vector<EvalItem> items;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string generated, target, extra;
    if (!(fields >> generated) || generated.front() == '#') continue;
    if (!(fields >> target) || (fields >> extra)) {
      throw Error(ErrorCode::InvalidArgument,
                  "manifest line " + std::to_string(line_no) + ": expected '<generated> <target>'");
    }
    const std::filesystem::path target_path = base / target;
    const std::optional<std::string> target_text = read_file(target_path);
    if (!target_text) throw Error(ErrorCode::InvalidTarget, "cannot read target " + target_path.string());
    const ReprKind target_kind = repr_from_path(target).value_or(ReprKind::Json);
    ParseOutcome parsed = parse(*target_text, target_kind);
    if (!parsed) {
      throw Error(ErrorCode::InvalidTarget, target_path.string() + ": " + parsed.error().describe());
    }
    EvalItem item;
    item.generated = read_file(base / generated).value_or(std::string{});
    item.target = std::move(parsed.model());
    item.generated_label = generated;
    item.target_label = target;
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<EvalItem> read_manifest(const std::filesystem::path &manifest) {
  const std::optional<std::string> text = read_file(manifest);
  if (!text) throw Error(ErrorCode::InvalidArgument, "cannot read manifest " + manifest.string());
  return parse_manifest(*text, manifest.parent_path());
}

std::string eval_summary_to_json(const EvalSummary &summary) { return summary_json(summary).dump(); }

std::string eval_report_to_jsonl(const EvalReport &report) {
  std::string out;
  for (const EvalRecord &r : report.records) {
    json j{{"type", "item"},
           {"index", r.index},
           {"generated", r.generated_label},
           {"target", r.target_label},
           {"valid", r.valid()},
           {"failure", r.valid() ? json(nullptr) : json(std::string(to_string(r.failure)))},
           {"message", r.message},
           {"cd", r.cd ? json(r.cd->value) : json(nullptr)},
           {"cd_scaled", r.cd ? json(r.cd->scaled) : json(nullptr)}};
    out += j.dump() + "\n";
  }
  out += summary_json(report.summary).dump() + "\n";
  return out;
}

}  // namespace cadseq
