#include <cmath>

#include <nlohmann/json.hpp>

#include "cadseq/canonical.hpp"
#include "cadseq/metrics.hpp"
#include "cadseq/parallel.hpp"
#include "cadseq/reward.hpp"
#include "cadseq/validate.hpp"

namespace cadseq {

namespace {

using nlohmann::json;

void require_target(const CadModel &model, const char *what) {
  const ValidationReport report = validate(model);
  if (!report.ok()) {
    const Violation &v = report.violations.front();
    throw Error(ErrorCode::InvalidTarget,
                std::string(what) + " does not validate: " + v.path + ": " + v.message + " (" + v.code + ")");
  }
}

}  // namespace

std::string_view to_string(LengthUnit unit) {
  return unit == LengthUnit::PrimitiveCount ? "primitives" : "characters";
}

std::optional<LengthUnit> length_unit_from_string(std::string_view name) {
  if (name == "primitives") return LengthUnit::PrimitiveCount;
  if (name == "characters") return LengthUnit::CharacterCount;
  return std::nullopt;
}

void check_config(const RewardConfig &cfg) {
  if (!(cfg.alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  if (!(cfg.beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be non-negative");
  if (cfg.n_points == 0) throw Error(ErrorCode::InvalidArgument, "n_points must be positive");
  if (!(cfg.cd_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "cd_scale must be positive");
}

RewardBreakdown compose(bool format_ok, bool exec_ok, std::optional<double> d_cd, double length,
                        const RewardConfig &cfg) {
  RewardBreakdown b;
  b.length = length;
  b.r_length = 0.0 - cfg.beta * length;
  if (!format_ok) {
    b.r_format = kFormatPenalty;
  } else if (!exec_ok) {
    b.r_exec = kExecPenalty;
  } else if (d_cd) {
    b.d_cd = d_cd;
    b.r_chamfer = std::exp(-cfg.alpha * *d_cd);
  }
  b.total = b.r_chamfer + b.r_format + b.r_exec + b.r_length;
  return b;
}

double reward_length(std::string_view text, const std::optional<CadModel> &parsed, LengthUnit unit) {
  if (unit == LengthUnit::CharacterCount) {
    std::size_t n = 0;
    for (const char c : text) n += (static_cast<unsigned char>(c) & 0xC0) != 0x80 ? 1 : 0;
    return static_cast<double>(n);
  }
  return parsed ? static_cast<double>(primitive_count(*parsed)) : 0.0;
}

std::uint64_t episode_seed(std::uint64_t base, std::uint64_t episode) {
  std::uint64_t z = base ^ (episode + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RewardBreakdown score(std::string_view generated, const CadModel &target, const std::optional<CadModel> &current,
                      const std::optional<EditScript> &script, const RewardConfig &cfg,
                      std::optional<std::uint64_t> episode) {
  check_config(cfg);
  require_target(target, "target");
  if (current) require_target(*current, "current model");
  const std::uint64_t seed = episode ? episode_seed(cfg.seed, *episode) : cfg.seed;
  try {
    sample_surface(compile(canonicalize(target)), cfg.n_points, seed);
  } catch (const Error &e) {
    throw Error(ErrorCode::InvalidTarget, std::string("target has no surface: ") + e.what());
  }

  std::optional<EditScript> edit = script;
  if (!edit && current) edit = diff(*current, target);
  if (edit && edit->empty()) edit.reset();

  ParseOutcome parsed = parse(generated, cfg.kind);
  const std::optional<CadModel> model = parsed ? std::optional(parsed.model()) : std::nullopt;
  const double length = reward_length(generated, model, cfg.length_unit);
  if (!model) return compose(false, false, std::nullopt, length, cfg);
  try {
    const CdResult cd = edit ? localized_chamfer(*model, target, *edit, cfg.n_points, seed)
                             : model_chamfer(*model, target, cfg.n_points, seed);
    return compose(true, true, cd.value * cfg.cd_scale, length, cfg);
  } catch (const Error &) {
    return compose(true, false, std::nullopt, length, cfg);
  }
}

RewardBreakdown score(const ScoreItem &item, const RewardConfig &cfg) {
  return score(item.generated, item.target, item.current, item.script, cfg, item.episode);
}

std::vector<BatchEntry> score_batch(const std::vector<ScoreItem> &items, const RewardConfig &cfg,
                                    std::size_t threads) {
  check_config(cfg);
  std::vector<BatchEntry> out(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    try {
      out[i].breakdown = score(items[i], cfg);
    } catch (const Error &e) {
      out[i].error = e.code();
      out[i].message = e.what();
    }
  });
  return out;
}

namespace {

json breakdown_json(const RewardBreakdown &b) {
  return {{"r_chamfer", b.r_chamfer}, {"r_format", b.r_format}, {"r_exec", b.r_exec},
          {"r_length", b.r_length},   {"total", b.total},         {"d_cd", b.d_cd ? json(*b.d_cd) : json(nullptr)},
          {"length", b.length}};
}

}  // namespace

std::string breakdown_to_json(const RewardBreakdown &breakdown) { return breakdown_json(breakdown).dump(); }

std::string batch_entry_to_json(const BatchEntry &entry) {
  if (entry.breakdown) return breakdown_json(*entry.breakdown).dump();
  return json{{"error", std::string(to_string(*entry.error))}, {"message", entry.message}}.dump();
}

}  // namespace cadseq
