#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cadseq/canonical.hpp"
#include "cadseq/datagen.hpp"
#include "cadseq/error.hpp"
#include "cadseq/parallel.hpp"

namespace cadseq {

namespace {

using nlohmann::json;

constexpr int kModificationAttempts = 16;
constexpr std::size_t kSurfaceProbe = 64;
constexpr double kFactors[] = {0.5, 0.75, 1.25, 1.5, 2.0};
constexpr double kShifts[] = {-0.25, -0.1, 0.1, 0.25};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Candidate {
  EditType type;
  CadModel current;
  CadModel target;
  EditScript script;
  std::size_t model;
};

struct ModelYield {
  std::vector<Candidate> pairs;  // deletion, addition, deletion, ...
  std::vector<Candidate> modifications;
  std::vector<std::string> failures;
};

bool has_surface(const CadModel &model, std::uint64_t seed) {
  try {
    return !boundary_candidates(compile(model), kSurfaceProbe, seed).points.empty();
  } catch (const Error &) {
    return false;
  }
}

template <typename T>
const T &pick(std::mt19937_64 &rng, const std::vector<T> &v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

void check_mix(const EditMix &m) {
  if (m.addition < 0 || m.deletion < 0 || m.modification < 0 ||
      std::abs(m.addition + m.deletion + m.modification - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "edit mix fractions must be non-negative and sum to 1");
  }
}

std::vector<std::size_t> choose(std::size_t pool, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> idx(pool);
  for (std::size_t i = 0; i < pool; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(count, pool));
  std::sort(idx.begin(), idx.end());
  return idx;
}

void count(CorpusReport &report, EditType type) {
  switch (type) {
    case EditType::Addition: ++report.additions; break;
    case EditType::Deletion: ++report.deletions; break;
    case EditType::Modification: ++report.modifications; break;
  }
}

std::optional<Candidate> modification_candidate(const CadModel &model, std::size_t index, std::uint64_t seed) {
  auto result = synthesize_modification(model, seed);
  if (!result) return std::nullopt;
  return Candidate{EditType::Modification, canonicalize(model), std::move(result->second), std::move(result->first),
                   index};
}

json model_json(const std::optional<CadModel> &model, ReprKind kind) {
  return model ? json(print(*model, kind)) : json(nullptr);
}

template <typename E>
E enum_from(const json &j, std::initializer_list<E> values) {
  const std::string name = j.get<std::string>();
  for (const E v : values) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::ParseFailed, "unknown value '" + name + "'");
}

}  // namespace

std::string_view to_string(Modality modality) {
  return modality == Modality::Quantitative ? "quantitative" : "qualitative";
}

std::string_view to_string(Task task) { return task == Task::Generation ? "generation" : "editing"; }

std::string_view to_string(EditType type) {
  switch (type) {
    case EditType::Addition: return "addition";
    case EditType::Deletion: return "deletion";
    case EditType::Modification: return "modification";
  }
  return "";
}

double CorpusReport::proportion(EditType type) const {
  const std::size_t total = additions + deletions + modifications;
  if (total == 0) return 0.0;
  const std::size_t n =
      type == EditType::Addition ? additions : (type == EditType::Deletion ? deletions : modifications);
  return static_cast<double>(n) / static_cast<double>(total);
}

std::optional<std::pair<EditScript, CadModel>> synthesize_modification(const CadModel &model, std::uint64_t seed) {
  const CadModel m = canonicalize(model);
  if (m.ops.empty()) return std::nullopt;
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < kModificationAttempts; ++attempt) {
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, m.ops.size() - 1)(rng);
    const SketchExtrude &op = m.ops[i];
    const std::string prefix = "ops[" + std::to_string(i) + "].";
    std::vector<std::string> scaled{prefix + "scale"};
    if (op.extrude_toward > 0) scaled.push_back(prefix + "extrude_toward");
    if (op.extrude_opposite > 0) scaled.push_back(prefix + "extrude_opposite");
    for (std::size_t j = 0; j < op.profile.loops.size(); ++j) {
      const auto &curves = op.profile.loops[j].curves;
      if (curves.size() == 1 && std::holds_alternative<Circle>(curves[0])) {
        scaled.push_back(prefix + "profile.loops[" + std::to_string(j) + "].curves[0].radius");
      }
    }
    const std::vector<std::string> shifted{prefix + "frame.origin.x", prefix + "frame.origin.y",
                                           prefix + "frame.origin.z"};
    const bool shift = std::bernoulli_distribution(0.4)(rng);
    const std::string path = shift ? pick(rng, shifted) : pick(rng, scaled);
    const double old_value = std::get<double>(get_param(m, path));
    const double new_value = shift ? old_value + op.scale * kShifts[rng() % std::size(kShifts)]
                                   : old_value * kFactors[rng() % std::size(kFactors)];
    EditScript script;
    script.actions.push_back(ModifyParam{path, old_value, new_value});
    script.edited_ops_a = {i};
    script.edited_ops_b = {i};
    try {
      ApplyResult applied = apply_detailed(m, script);
      if (applied.model == m || !has_surface(applied.model, seed)) continue;
      applied.completed.edited_ops_a = {i};
      applied.completed.edited_ops_b = {i};
      return std::pair{std::move(applied.completed), std::move(applied.model)};
    } catch (const Error &) {
    }
  }
  return std::nullopt;
}

CorpusReport build_editing_corpus(const std::vector<CadModel> &models, CompletionClient *client,
                                  const CorpusOptions &options) {
  if (options.mix) check_mix(*options.mix);
  std::vector<ModelYield> yields(models.size());
  parallel_for(models.size(), options.threads, [&](std::size_t i) {
    ModelYield &y = yields[i];
    try {
      for (EditPair &p : make_pairs(models[i])) {
        y.pairs.push_back({EditType::Deletion, p.original, p.reduced, p.deletion, i});
        y.pairs.push_back({EditType::Addition, std::move(p.reduced), std::move(p.original), std::move(p.addition), i});
      }
    } catch (const Error &e) {
      y.failures.push_back(e.what());
    }
    if (options.mix) return;
    for (std::size_t k = 0; k < options.modifications_per_model; ++k) {
      try {
        if (auto c = modification_candidate(models[i], i, mix(options.seed, mix(i, k)))) {
          y.modifications.push_back(std::move(*c));
        } else {
          y.failures.push_back("no valid single-parameter modification found");
        }
      } catch (const Error &e) {
        y.failures.push_back(e.what());
      }
    }
  });

  CorpusReport report;
  std::vector<Candidate> chosen;
  for (std::size_t i = 0; i < yields.size(); ++i) {
    for (const std::string &f : yields[i].failures) {
      spdlog::info("corpus: model {} skipped: {}", i, f);
      report.failures.push_back({i, f});
    }
  }
  if (!options.mix) {
    for (ModelYield &y : yields) {
      for (Candidate &c : y.pairs) chosen.push_back(std::move(c));
      for (Candidate &c : y.modifications) chosen.push_back(std::move(c));
    }
  } else {
    const EditMix &mx = *options.mix;
    std::vector<Candidate> deletions, additions;
    for (ModelYield &y : yields) {
      for (Candidate &c : y.pairs) (c.type == EditType::Deletion ? deletions : additions).push_back(std::move(c));
    }
    const double pairs = static_cast<double>(deletions.size());
    double total = std::numeric_limits<double>::infinity();
    if (mx.addition > 0) total = std::min(total, pairs / mx.addition);
    if (mx.deletion > 0) total = std::min(total, pairs / mx.deletion);
    if (std::isinf(total)) total = static_cast<double>(models.size() * options.modifications_per_model);
    const auto t = static_cast<std::size_t>(std::floor(total + 1e-9));
    const auto n_add = std::min<std::size_t>(additions.size(), std::llround(mx.addition * t));
    const auto n_del = std::min<std::size_t>(deletions.size(), std::llround(mx.deletion * t));
    const std::size_t n_mod = t > n_add + n_del ? t - n_add - n_del : 0;
    for (const std::size_t k : choose(deletions.size(), n_del, mix(options.seed, 1))) {
      chosen.push_back(std::move(deletions[k]));
    }
    for (const std::size_t k : choose(additions.size(), n_add, mix(options.seed, 2))) {
      chosen.push_back(std::move(additions[k]));
    }
    std::size_t made = 0;
    for (std::size_t round = 0; made < n_mod; ++round) {
      std::size_t made_this_round = 0;
      for (std::size_t i = 0; i < models.size() && made < n_mod; ++i) {
        try {
          if (auto c = modification_candidate(models[i], i, mix(options.seed, mix(i, round)))) {
            chosen.push_back(std::move(*c));
            ++made;
            ++made_this_round;
          }
        } catch (const Error &) {
        }
      }
      if (made_this_round == 0) {
        report.failures.push_back({0, "could not synthesize enough modifications"});
        break;
      }
    }
  }

  for (Candidate &c : chosen) {
    InstructionRecord r;
    r.text = template_edit(c.script);
    r.modality = Modality::Quantitative;
    r.task = Task::Editing;
    r.edit_type = c.type;
    r.current = c.current;
    r.target = c.target;
    r.script = c.script;
    r.source_model = c.model;
    std::optional<InstructionRecord> twin;
    if (client) {
      try {
        twin = r;
        twin->modality = Modality::Qualitative;
        twin->text = request_qualitative(c.current, c.target, *client);
      } catch (const Error &e) {
        twin.reset();
        spdlog::info("corpus: qualitative request for model {} failed: {}", c.model, e.what());
        report.failures.push_back({c.model, e.what()});
      }
    }
    count(report, c.type);
    report.records.push_back(std::move(r));
    if (twin) {
      count(report, c.type);
      report.records.push_back(std::move(*twin));
    }
  }
  return report;
}

CorpusReport build_generation_corpus(const std::vector<CadModel> &models, CompletionClient *client) {
  CorpusReport report;
  for (std::size_t i = 0; i < models.size(); ++i) {
    try {
      InstructionRecord r;
      r.text = template_quantitative(models[i]);
      r.task = Task::Generation;
      r.target = canonicalize(models[i]);
      r.source_model = i;
      report.records.push_back(r);
      if (client) {
        r.modality = Modality::Qualitative;
        r.text = request_qualitative(models[i], *client);
        report.records.push_back(std::move(r));
      }
    } catch (const Error &e) {
      spdlog::info("corpus: model {} skipped: {}", i, e.what());
      report.failures.push_back({i, e.what()});
    }
  }
  return report;
}

std::string record_to_json(const InstructionRecord &record, ReprKind kind) {
  json j{{"task", std::string(to_string(record.task))},
         {"modality", std::string(to_string(record.modality))},
         {"edit_type", record.edit_type ? json(std::string(to_string(*record.edit_type))) : json(nullptr)},
         {"text", record.text},
         {"kind", std::string(to_string(kind))},
         {"current", model_json(record.current, kind)},
         {"target", print(record.target, kind)},
         {"script", record.script ? json::parse(script_to_json(*record.script)) : json(nullptr)},
         {"source_model", record.source_model}};
  return j.dump();
}

InstructionRecord record_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    const auto kind = repr_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::ParseFailed, "unknown representation in record");
    InstructionRecord r;
    r.task = enum_from(j.at("task"), {Task::Generation, Task::Editing});
    r.modality = enum_from(j.at("modality"), {Modality::Quantitative, Modality::Qualitative});
    if (!j.at("edit_type").is_null()) {
      r.edit_type = enum_from(j["edit_type"], {EditType::Addition, EditType::Deletion, EditType::Modification});
    }
    r.text = j.at("text").get<std::string>();
    if (!j.at("current").is_null()) r.current = parse_or_throw(j["current"].get<std::string>(), *kind);
    r.target = parse_or_throw(j.at("target").get<std::string>(), *kind);
    if (!j.at("script").is_null()) r.script = script_from_json(j["script"].dump());
    r.source_model = j.at("source_model").get<std::size_t>();
    return r;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::ParseFailed, std::string("corpus record: ") + e.what());
  }
}

std::string corpus_to_jsonl(const std::vector<InstructionRecord> &records, ReprKind kind) {
  std::string out;
  for (const InstructionRecord &r : records) out += record_to_json(r, kind) + "\n";
  return out;
}

}  // namespace cadseq
