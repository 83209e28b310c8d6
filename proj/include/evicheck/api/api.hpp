#pragma once
// JSON-over-HTTP surface. Api::handle is transport independent; HttpServer
// binds it to a socket.

#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "evicheck/feedback/store.hpp"
#include "evicheck/service/verdict_service.hpp"

namespace evicheck::api {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Wire forms shared by every endpoint that returns them.
nlohmann::json verdict_payload(const service::DocumentVerdict& verdict);
nlohmann::json session_payload(const service::ClaimSession& session,
                               const service::VerdictService& verdicts);
nlohmann::json error_payload(int status, std::string_view code, const std::string& message);

class Api {
 public:
  Api(service::VerdictService& verdicts, feedback::FeedbackStore& feedback)
      : verdicts_(verdicts), feedback_(feedback) {}

  // Never throws; failures become error responses.
  Response handle(const Request& request);

 private:
  Response post_claims(const Request& request);
  Response post_more(const std::string& verdict_id);
  Response post_feedback(const std::string& verdict_id, const Request& request);
  Response get_export(const Request& request, bool flagged);
  Response get_session(const std::string& session_id);
  Response get_verdict(const std::string& verdict_id);

  service::VerdictService& verdicts_;
  feedback::FeedbackStore& feedback_;
};

class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; kInvalidConfig on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evicheck::api
