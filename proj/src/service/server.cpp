#include <httplib.h>
#include <spdlog/spdlog.h>

#include "cadseq/service.hpp"

namespace cadseq {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service &service) : impl_(std::make_unique<Impl>()) {
  auto route = [&service](const httplib::Request &req, httplib::Response &res) {
    const Response r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
    spdlog::debug("{} {} -> {}", req.method, req.path, r.status);
  };
  impl_->server.Get(".*", route);
  impl_->server.Post(".*", route);
  impl_->server.Put(".*", route);
  impl_->server.Delete(".*", route);
  impl_->server.Patch(".*", route);
  impl_->server.set_payload_max_length(64 << 20);
}

HttpServer::~HttpServer() = default;

bool HttpServer::bind(const std::string &host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    return port_ > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace cadseq
