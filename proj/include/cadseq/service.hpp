#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cadseq/datagen.hpp"
#include "cadseq/edit.hpp"
#include "cadseq/repr.hpp"
#include "cadseq/reward.hpp"

namespace cadseq {

enum class BackendKind { Scripted, ManualEdit, ExternalModel };

std::string_view to_string(BackendKind kind);  // "scripted", "manual", "external"
std::optional<BackendKind> backend_from_string(std::string_view name);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  ReprKind default_kind = ReprKind::Dsl;
  RewardConfig reward;
  BackendKind default_backend = BackendKind::ManualEdit;
  double mesh_tolerance = 1e-3;
  std::size_t threads = 0;
  // Append-only session logs live here; nullopt keeps sessions in memory.
  std::optional<std::filesystem::path> session_dir;
  // Scripted backend fixtures: instruction text to edit script.
  std::map<std::string, EditScript> scripted;
  // ExternalModel backend; without one, external turns answer 503.
  std::shared_ptr<CompletionClient> client;

  // JSON keys: host, port, default_kind, reward (object with alpha, beta,
  // length_unit, kind, n_points, seed, cd_scale), backend, mesh_tolerance,
  // threads, session_dir, scripted (object of instruction to structured
  // script). With backend "external" the client comes from
  // HttpClientConfig::from_env.
  // Throws InvalidArgument.
  static ServiceConfig from_json(std::string_view text);
};

struct HistoryEntry {
  std::string instruction;
  EditScript script;  // completed: delete payloads filled in
  CadModel result;
};

struct Session {
  std::string id;
  BackendKind backend = BackendKind::ManualEdit;
  ReprKind kind = ReprKind::Dsl;
  std::vector<HistoryEntry> history;
  CadModel current;
  std::vector<EditScript> undo_stack;  // inverse of each history entry

  // Applies every history script to the empty model.
  CadModel replay() const;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Request dispatcher behind the HTTP server. handle() never throws: module
// errors map to 400 (409 for stale values and busy sessions, 422 for rejected
// reasoning traces, 502 for malformed backend output, 503 for an unavailable
// backend), unknown routes to 404 and wrong methods to 405.
class Service {
 public:
  explicit Service(ServiceConfig config);

  Response handle(std::string_view method, std::string_view path, std::string_view body);
  const ServiceConfig &config() const { return config_; }

  // Snapshot of one session; nullopt when unknown.
  std::optional<Session> session(const std::string &id) const;

 private:
  struct Slot {
    std::mutex writer;
    Session session;
  };

  Response create_session(std::string_view body);
  Response turn(const std::string &id, std::string_view body);
  Response undo(const std::string &id);
  Response get_session(const std::string &id) const;

  std::shared_ptr<Slot> find(const std::string &id) const;
  EditScript resolve(const Session &session, const std::string &instruction, std::string_view body);
  void append_log(const Session &session, const std::string &line) const;
  void load_sessions();

  ServiceConfig config_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::atomic<std::uint64_t> next_id_{1};
};

// Blocks serving `service` over HTTP until stop() is called from another
// thread. Returns false when the address cannot be bound.
class HttpServer {
 public:
  explicit HttpServer(Service &service);
  ~HttpServer();

  // Port 0 binds any free port; bound_port() reports it.
  bool bind(const std::string &host, int port);
  void listen();
  void stop();
  void wait_until_ready() const;
  int bound_port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace cadseq
