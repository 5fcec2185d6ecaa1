#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cadseq/edit.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/repr.hpp"

namespace cadseq {

inline constexpr double kCdReportScale = 1e3;

struct CdResult {
  double value = 0.0;   // sum of the two mean squared nearest distances
  double scaled = 0.0;  // value * 1e3
};

// Exact nearest neighbours through an R-tree. Throws EmptyCloud.
CdResult chamfer(const std::vector<Vec3> &a, const std::vector<Vec3> &b);
CdResult chamfer(const SurfacePointCloud &a, const SurfacePointCloud &b);

// Canonicalizes both models, samples n points each with `seed`, normalizes
// each cloud on its own and returns the chamfer distance. Throws EmptyGeometry
// when either model has no surface.
CdResult model_chamfer(const CadModel &generated, const CadModel &target, std::size_t n, std::uint64_t seed);

// Chamfer distance over the points contributed by the edited ops.
// `script` is the reference edit whose result is `target`; its edited_ops_b
// names the edited ops on both `generated` and `target`. Each side keeps the
// full-model boundary points whose source op is edited, falls back to the
// edited ops compiled in isolation when none survive, and uses the whole model
// when no edited index exists on that side. Clouds are normalized jointly.
// Throws EmptyEditSet for an empty script, EmptyGeometry when a side has no
// surface at all.
CdResult localized_chamfer(const CadModel &generated, const CadModel &target, const EditScript &script,
                           std::size_t n, std::uint64_t seed);

struct EvalItem {
  std::string generated;  // model text in the batch's ReprKind
  CadModel target;
  std::string generated_label;  // paths for reporting, may be empty
  std::string target_label;
};

enum class EvalFailure { None, Parse, Validate, EmptyGeometry };

std::string_view to_string(EvalFailure failure);

struct EvalRecord {
  std::size_t index = 0;
  EvalFailure failure = EvalFailure::None;
  std::string message;
  std::optional<CdResult> cd;
  std::string generated_label;
  std::string target_label;

  bool valid() const { return failure == EvalFailure::None; }
};

struct EvalSummary {
  std::optional<double> mean_cd;    // over valid entries, unscaled
  std::optional<double> median_cd;  // over valid entries, unscaled
  double invalidity_ratio = 0.0;
  std::size_t n_total = 0;
  std::size_t n_invalid = 0;
};

struct EvalReport {
  EvalSummary summary;
  std::vector<EvalRecord> records;
};

// Total: a failing entry becomes an invalid record. A target that cannot be
// sampled is also recorded as an EmptyGeometry failure.
EvalRecord evaluate_item(const EvalItem &item, ReprKind kind, std::size_t n, std::uint64_t seed);
EvalSummary summarize(const std::vector<EvalRecord> &records);
EvalReport evaluate_batch(const std::vector<EvalItem> &items, ReprKind kind, std::size_t n, std::uint64_t seed,
                          std::size_t threads = 0);

// Manifest: one entry per line, generated path then target path separated by
// whitespace; blank lines and lines starting with '#' are skipped. Relative
// paths resolve against the manifest directory. The target format follows its
// file extension and defaults to JSON. A missing or unreadable generated file
// yields an empty text (an invalid entry); an unreadable target throws
// InvalidTarget.
std::vector<EvalItem> read_manifest(const std::filesystem::path &manifest);
std::vector<EvalItem> parse_manifest(std::string_view text, const std::filesystem::path &base);

// One JSON record per line: every item record, then the summary record.
std::string eval_report_to_jsonl(const EvalReport &report);
std::string eval_summary_to_json(const EvalSummary &summary);

}  // namespace cadseq
