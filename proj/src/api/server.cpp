// Must match the retrieval library so both see one httplib configuration.
#ifdef EVICHECK_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "evicheck/api/api.hpp"
#include "evicheck/error.hpp"

namespace evicheck::api {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>()) {
  auto dispatch = [&api](const httplib::Request& req, httplib::Response& res) {
    Request request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [key, value] : req.params) request.query[key] = value;
    request.body = req.body;
    const auto response = api.handle(request);
    res.status = response.status;
    res.set_content(response.body, response.content_type);
  };
  impl_->server.Get(R"(/.*)", dispatch);
  impl_->server.Post(R"(/.*)", dispatch);
  impl_->server.Put(R"(/.*)", dispatch);
  impl_->server.Delete(R"(/.*)", dispatch);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "cannot listen on " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace evicheck::api
