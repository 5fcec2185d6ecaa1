#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cadseq/edit.hpp"
#include "cadseq/error.hpp"
#include "cadseq/repr.hpp"

namespace cadseq {

inline constexpr double kFormatPenalty = -0.2;
inline constexpr double kExecPenalty = -0.1;

enum class LengthUnit { PrimitiveCount, CharacterCount };

std::string_view to_string(LengthUnit unit);  // "primitives", "characters"
std::optional<LengthUnit> length_unit_from_string(std::string_view name);

struct RewardConfig {
  double alpha = 5.0;
  double beta = 0.01;
  LengthUnit length_unit = LengthUnit::PrimitiveCount;
  ReprKind kind = ReprKind::Dsl;
  std::size_t n_points = 2048;
  std::uint64_t seed = 0;
  // Multiplier applied to the normalized chamfer value before the decay;
  // 1 uses the raw value, 1e3 the reporting scale.
  double cd_scale = 1.0;
};

// Throws InvalidArgument unless alpha > 0, beta >= 0, n_points > 0 and
// cd_scale > 0.
void check_config(const RewardConfig &cfg);

struct RewardBreakdown {
  double r_chamfer = 0.0;
  double r_format = 0.0;
  double r_exec = 0.0;
  double r_length = 0.0;
  double total = 0.0;
  std::optional<double> d_cd;  // value inside the decay, after cd_scale
  double length = 0.0;         // L

  bool operator==(const RewardBreakdown &) const = default;
};

// Staged composition: a format failure zeroes the exec and chamfer terms; an
// exec failure zeroes the chamfer term. total adds the four terms left to right.
RewardBreakdown compose(bool format_ok, bool exec_ok, std::optional<double> d_cd, double length,
                        const RewardConfig &cfg);

// Primitive count is ops plus curves of the parsed model and 0 when the text
// does not parse. Character count counts UTF-8 code points.
double reward_length(std::string_view text, const std::optional<CadModel> &parsed, LengthUnit unit);

// Per-episode sampling seed derived from the configured base seed.
std::uint64_t episode_seed(std::uint64_t base, std::uint64_t episode);

struct ScoreItem {
  std::string generated;
  CadModel target;
  std::optional<CadModel> current;
  std::optional<EditScript> script;
  std::optional<std::uint64_t> episode;
};

// Full CD when no edit context is given. With `current`, the reference edit is
// `script` or, when absent, diff(current, target); a non-empty edit switches
// to the localized CD. Throws InvalidTarget when the target (or current) does
// not validate or the target has no surface. Never throws for bad text.
RewardBreakdown score(std::string_view generated, const CadModel &target, const std::optional<CadModel> &current,
                      const std::optional<EditScript> &script, const RewardConfig &cfg,
                      std::optional<std::uint64_t> episode = std::nullopt);
RewardBreakdown score(const ScoreItem &item, const RewardConfig &cfg);

struct BatchEntry {
  std::optional<RewardBreakdown> breakdown;
  std::optional<ErrorCode> error;
  std::string message;
};

// Element-wise score with per-item errors recorded inline; order preserved.
std::vector<BatchEntry> score_batch(const std::vector<ScoreItem> &items, const RewardConfig &cfg,
                                    std::size_t threads = 0);

// Reward manifest: one entry per line, "<generated> <target> [<current>
// [<script>]]", '#' comments and blank lines skipped, relative paths against
// `base`. Generated text is read verbatim (missing file: empty text); models
// take their format from the extension; scripts ending in .json use the
// structured format, others the line format. Entry k gets episode k. Throws
// InvalidArgument for malformed lines, InvalidTarget for unreadable models.
std::vector<ScoreItem> parse_reward_manifest(std::string_view text, const std::filesystem::path &base);
std::vector<ScoreItem> read_reward_manifest(const std::filesystem::path &manifest);

std::string breakdown_to_json(const RewardBreakdown &breakdown);
std::string batch_entry_to_json(const BatchEntry &entry);

}  // namespace cadseq
