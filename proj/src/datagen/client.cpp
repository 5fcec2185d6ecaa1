#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cadseq/datagen.hpp"
#include "cadseq/error.hpp"

namespace cadseq {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

std::optional<ViewSpec> views_if_any(const CadModel &model) {
  try {
    return nine_views(model);
  } catch (const Error &) {
    return std::nullopt;
  }
}

std::string checked(std::string response) {
  if (response.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::MalformedResponse, "completion is empty");
  }
  return response;
}

}  // namespace

std::string model_hash(const CadModel &model) { return hex(fnv1a(print(model, ReprKind::StructuredText))); }

std::string pair_hash(const CadModel &current, const CadModel &target) {
  return hex(fnv1a(print(target, ReprKind::StructuredText),
                   fnv1a("\n--\n", fnv1a(print(current, ReprKind::StructuredText)))));
}

void ScriptedClient::add(std::string key, std::string response) {
  std::lock_guard lock(mutex_);
  responses_[std::move(key)] = std::move(response);
}

std::string ScriptedClient::complete(const CompletionRequest &request) {
  std::lock_guard lock(mutex_);
  const auto it = responses_.find(request.key);
  if (it == responses_.end()) {
    throw Error(ErrorCode::MalformedResponse, "no scripted response for key " + request.key);
  }
  return it->second;
}

HttpClientConfig HttpClientConfig::from_env(const std::optional<std::filesystem::path> &config_file) {
  HttpClientConfig cfg;
  if (const char *endpoint = std::getenv("CADSEQ_MODEL_ENDPOINT")) cfg.endpoint = endpoint;
  if (const char *key = std::getenv("CADSEQ_MODEL_KEY")) cfg.api_key = key;
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read client config " + config_file->string());
    try {
      const json j = json::parse(in);
      if (j.contains("timeout_ms")) cfg.timeout = std::chrono::milliseconds(j["timeout_ms"].get<std::int64_t>());
      if (j.contains("retries")) cfg.retries = j["retries"].get<int>();
    } catch (const json::exception &e) {
      throw Error(ErrorCode::InvalidArgument, std::string("client config: ") + e.what());
    }
  }
  return cfg;
}

HttpCompletionClient::HttpCompletionClient(HttpClientConfig config) : config_(std::move(config)) {
  const std::string prefix = "http://";
  if (config_.endpoint.empty()) throw Error(ErrorCode::ClientUnavailable, "no completion endpoint configured");
  if (config_.endpoint.rfind(prefix, 0) != 0) {
    throw Error(ErrorCode::ClientUnavailable, "endpoint must start with http://: " + config_.endpoint);
  }
  const std::size_t slash = config_.endpoint.find('/', prefix.size());
  host_ = config_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
}

std::string HttpCompletionClient::complete(const CompletionRequest &request) {
  json body{{"tag", request.tag}, {"inputs", request.inputs}, {"views", nullptr}};
  if (request.views) body["views"] = json::parse(view_spec_to_json(*request.views));
  const std::string payload = body.dump();
  spdlog::debug("completion request to {}{}: {}", host_, path_, payload);

  ErrorCode last = ErrorCode::ClientUnavailable;
  std::string last_message;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    httplib::Client client(host_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    const auto started = std::chrono::steady_clock::now();
    const httplib::Result res = client.Post(path_, headers, payload, "application/json");
    const auto elapsed = std::chrono::steady_clock::now() - started;
    if (!res) {
      last = elapsed >= config_.timeout || res.error() == httplib::Error::ConnectionTimeout
                 ? ErrorCode::ClientTimeout
                 : ErrorCode::ClientUnavailable;
      last_message = httplib::to_string(res.error());
      spdlog::warn("completion attempt {} failed: {}", attempt + 1, last_message);
      continue;
    }
    spdlog::debug("completion response {}: {}", res->status, res->body);
    if (res->status >= 500) {
      last = ErrorCode::ClientUnavailable;
      last_message = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::MalformedResponse, "completion endpoint returned status " + std::to_string(res->status));
    }
    try {
      const json j = json::parse(res->body);
      if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
        throw Error(ErrorCode::MalformedResponse, "completion response lacks a \"text\" string");
      }
      return j["text"].get<std::string>();
    } catch (const json::exception &e) {
      throw Error(ErrorCode::MalformedResponse, std::string("completion response is not JSON: ") + e.what());
    }
  }
  throw Error(last, "completion endpoint " + config_.endpoint + " failed after " +
                        std::to_string(config_.retries + 1) + " attempts: " + last_message);
}

BoundedClient::BoundedClient(CompletionClient &inner, std::ptrdiff_t max_in_flight)
    : inner_(inner), slots_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 1024)) {}

std::string BoundedClient::complete(const CompletionRequest &request) {
  slots_.acquire();
  try {
    std::string out = inner_.complete(request);
    slots_.release();
    return out;
  } catch (...) {
    slots_.release();
    throw;
  }
}

std::string view_spec_to_json(const ViewSpec &views) {
  json poses = json::array();
  for (const CameraPose &p : views.poses) {
    poses.push_back({{"name", p.name}, {"eye", vec_json(p.eye)}, {"look_at", vec_json(p.look_at)}, {"up", vec_json(p.up)}});
  }
  return json{{"poses", poses}, {"bbox", {{"lo", vec_json(views.box.lo)}, {"hi", vec_json(views.box.hi)}}}}.dump();
}

std::string request_qualitative(const CadModel &model, CompletionClient &client) {
  CompletionRequest request;
  request.tag = "qualitative_generation";
  request.inputs = print(model, ReprKind::StructuredText);
  request.views = views_if_any(model);
  request.key = model_hash(model);
  return checked(client.complete(request));
}

std::string request_qualitative(const CadModel &current, const CadModel &target, CompletionClient &client) {
  CompletionRequest request;
  request.tag = "qualitative_editing";
  request.inputs = "current:\n" + print(current, ReprKind::StructuredText) + "\ntarget:\n" +
                   print(target, ReprKind::StructuredText);
  request.views = views_if_any(target);
  request.key = pair_hash(current, target);
  return checked(client.complete(request));
}

}  // namespace cadseq
