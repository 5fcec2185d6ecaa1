#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include "cadseq/edit.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/repr.hpp"

namespace cadseq {

// ---------------------------------------------------------------- templates

// One sentence per line and per primitive: each op opens with a step sentence
// carrying boolean, extrusion, frame and scale; each curve follows with its
// loop role. Numbers print in shortest round-trip form. Describes
// canonicalize(model). Throws InvalidModel.
std::string template_quantitative(const CadModel &model);

// Inverse of template_quantitative; throws ParseFailed naming the line.
CadModel parse_quantitative(std::string_view text);

// Human-readable edit instruction, one sentence per action (inserted ops and
// loops expand into their primitive sentences).
std::string template_edit(const EditScript &script);

// ---------------------------------------------------------------- views

struct CameraPose {
  std::string name;
  Vec3 eye;
  Vec3 look_at;
  Vec3 up;
};

// Six axis views (+x, -x, +y, -y, +z, -z) then three corner views
// (+x+y+z, -x+y+z, +x-y+z), all looking at the bbox centre from 2.5 bbox
// diagonals away. Axis views along z use +y as up, all others +z.
struct ViewSpec {
  std::array<CameraPose, 9> poses;
  Box3 box;
};

// Throws EmptyGeometry when no op adds material, DegenerateExtent for a zero
// bbox diagonal.
ViewSpec nine_views(const CadModel &model);

// ---------------------------------------------------------------- completion clients

struct CompletionRequest {
  std::string tag;     // "qualitative_generation", "qualitative_editing", "scot_editing"
  std::string inputs;  // serialized models and instruction text
  std::optional<ViewSpec> views;
  std::string key;  // model or pair hash, used by ScriptedClient
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  // Throws ClientUnavailable, ClientTimeout or MalformedResponse.
  virtual std::string complete(const CompletionRequest &request) = 0;
};

// 16 hex digits of FNV-1a over the canonical structured-text print.
std::string model_hash(const CadModel &model);
std::string pair_hash(const CadModel &current, const CadModel &target);

// Canned responses keyed by request key; unregistered keys raise
// MalformedResponse.
class ScriptedClient : public CompletionClient {
 public:
  void add(std::string key, std::string response);
  std::string complete(const CompletionRequest &request) override;

 private:
  std::mutex mutex_;
  std::map<std::string, std::string> responses_;
};

struct HttpClientConfig {
  std::string endpoint;  // http://host[:port]/path
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
  int retries = 2;

  // Endpoint from CADSEQ_MODEL_ENDPOINT and key from CADSEQ_MODEL_KEY; an
  // optional JSON file supplies "timeout_ms" and "retries".
  static HttpClientConfig from_env(const std::optional<std::filesystem::path> &config_file = std::nullopt);
};

// POSTs {"tag", "inputs", "views"} as JSON with a bearer key and expects
// {"text": "..."} back. Requests and responses are logged at debug level.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(HttpClientConfig config);
  std::string complete(const CompletionRequest &request) override;

 private:
  HttpClientConfig config_;
  std::string host_;
  std::string path_;
};

// Caps the number of concurrent requests to the wrapped client.
class BoundedClient : public CompletionClient {
 public:
  BoundedClient(CompletionClient &inner, std::ptrdiff_t max_in_flight);
  std::string complete(const CompletionRequest &request) override;

 private:
  CompletionClient &inner_;
  std::counting_semaphore<1024> slots_;
};

std::string view_spec_to_json(const ViewSpec &views);

std::string request_qualitative(const CadModel &model, CompletionClient &client);
std::string request_qualitative(const CadModel &current, const CadModel &target, CompletionClient &client);

// ---------------------------------------------------------------- corpus

enum class Modality { Quantitative, Qualitative };
enum class Task { Generation, Editing };
enum class EditType { Addition, Deletion, Modification };

std::string_view to_string(Modality modality);
std::string_view to_string(Task task);
std::string_view to_string(EditType type);

struct InstructionRecord {
  std::string text;
  Modality modality = Modality::Quantitative;
  Task task = Task::Generation;
  std::optional<EditType> edit_type;
  std::optional<CadModel> current;
  CadModel target;
  std::optional<EditScript> script;
  std::size_t source_model = 0;

  bool operator==(const InstructionRecord &) const = default;
};

struct EditMix {
  double addition = 0.4;
  double deletion = 0.3;
  double modification = 0.3;
};

struct CorpusOptions {
  // Without a mix every pair contributes one deletion and one addition record
  // and each model `modifications_per_model` modification records. With a
  // mix, records are subsampled (and modifications synthesized) to match it.
  std::optional<EditMix> mix;
  std::size_t modifications_per_model = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct CorpusFailure {
  std::size_t model = 0;
  std::string message;
};

struct CorpusReport {
  std::vector<InstructionRecord> records;
  std::vector<CorpusFailure> failures;
  std::size_t additions = 0;
  std::size_t deletions = 0;
  std::size_t modifications = 0;

  double proportion(EditType type) const;
};

// One single-parameter change to `model` (extrusion, scale, frame origin or
// circle size) whose result validates and has a surface. Returns nullopt when
// no attempt succeeds.
std::optional<std::pair<EditScript, CadModel>> synthesize_modification(const CadModel &model, std::uint64_t seed);

// Editing records with quantitative templates; with a client, each record also
// gets a qualitative twin. Per-model failures are collected, never thrown.
CorpusReport build_editing_corpus(const std::vector<CadModel> &models, CompletionClient *client,
                                  const CorpusOptions &options = {});

// Generation records: a quantitative template per model, plus a qualitative
// one through the client when given.
CorpusReport build_generation_corpus(const std::vector<CadModel> &models, CompletionClient *client);

// One JSON object per line; models inline in `kind`, scripts in structured form.
std::string record_to_json(const InstructionRecord &record, ReprKind kind);
InstructionRecord record_from_json(std::string_view line);
std::string corpus_to_jsonl(const std::vector<InstructionRecord> &records, ReprKind kind);

// ---------------------------------------------------------------- SCoT

struct ScotTrace {
  std::string intent_understanding;
  std::string modeling_analysis;
  std::string parameter_computation;
  std::string position_identification;
  EditScript script;
};

struct ScotViolation {
  std::string section;
  std::string code;
  std::string message;
};

struct ScotResult {
  std::optional<ScotTrace> trace;
  std::vector<ScotViolation> violations;

  bool ok() const { return trace.has_value(); }
};

inline constexpr std::array<std::string_view, 4> kScotSections{
    "intent_understanding", "modeling_analysis", "parameter_computation", "position_identification"};

// Sections are <name>...</name> blocks in the order above. modeling_analysis
// may only use structured-text markers, balanced; position_identification
// holds an edit script in line format that must apply to `current`. Never
// throws.
ScotResult validate_scot(std::string_view trace, const CadModel &current);

// Trace for an editing record: intent is the instruction, modeling analysis
// lists the edited target ops as structured text, parameter computation lists
// the changed values, position identification is the script.
std::string write_scot(const InstructionRecord &record);

// ---------------------------------------------------------------- split

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

// Seeded shuffle of [0, n) cut by the fractions (train and validation sizes
// are floored, test takes the rest). Each part is returned sorted. Throws
// InvalidArgument unless fractions are non-negative and sum to 1.
Split split_indices(std::size_t n, double train, double validation, double test, std::uint64_t seed);

}  // namespace cadseq
