#pragma once
// Minimal GET transport used by the live providers, plus record/replay
// wrappers so live-provider behaviour can be tested from cassettes.
//
// Cassette format:
//   {"interactions": [{"url": "...", "status": 200, "body": "..."}]}
// Values of the query parameter "key" are stored as REDACTED.

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace evicheck::retrieval {

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpClient {
 public:
  virtual ~HttpClient() = default;
  // Transport failures throw kProviderError; HTTP error statuses are returned.
  virtual HttpResponse get(const std::string& url) = 0;
};

// Blocking client over cpp-httplib. https needs the OpenSSL-enabled build.
class LiveHttpClient final : public HttpClient {
 public:
  explicit LiveHttpClient(std::chrono::seconds timeout = std::chrono::seconds(10));
  HttpResponse get(const std::string& url) override;

 private:
  std::chrono::seconds timeout_;
};

std::string redact_secrets(const std::string& url);

class RecordingHttpClient final : public HttpClient {
 public:
  RecordingHttpClient(HttpClient& inner, std::filesystem::path cassette);
  HttpResponse get(const std::string& url) override;
  void save() const;

 private:
  HttpClient& inner_;
  std::filesystem::path cassette_;
  mutable std::mutex mu_;
  std::vector<std::pair<std::string, HttpResponse>> recorded_;
};

class ReplayHttpClient final : public HttpClient {
 public:
  explicit ReplayHttpClient(const std::filesystem::path& cassette);
  // Unknown URLs throw kProviderError.
  HttpResponse get(const std::string& url) override;

 private:
  std::map<std::string, HttpResponse> responses_;
};

// Caps the request rate by spacing calls at least 1/rps apart.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
};

}  // namespace evicheck::retrieval
