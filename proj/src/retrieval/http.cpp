#include "evicheck/retrieval/http.hpp"

#include <fstream>
#include <regex>
#include <thread>

#ifdef EVICHECK_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "evicheck/error.hpp"

namespace evicheck::retrieval {

using nlohmann::json;

LiveHttpClient::LiveHttpClient(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse LiveHttpClient::get(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    throw Error(ErrorCode::kInvalidConfig, "unsupported URL " + url);
  }
  httplib::Client client(m[1].str());
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  const std::string path = m[2].matched ? m[2].str() : "/";
  auto res = client.Get(path);
  if (!res) {
    throw Error(ErrorCode::kProviderError,
                "request to " + redact_secrets(url) + " failed: " + httplib::to_string(res.error()));
  }
  return HttpResponse{res->status, res->body};
}

std::string redact_secrets(const std::string& url) {
  static const std::regex kKey(R"(([?&]key=)[^&]*)");
  return std::regex_replace(url, kKey, "$1REDACTED");
}

RecordingHttpClient::RecordingHttpClient(HttpClient& inner, std::filesystem::path cassette)
    : inner_(inner), cassette_(std::move(cassette)) {}

HttpResponse RecordingHttpClient::get(const std::string& url) {
  HttpResponse res = inner_.get(url);
  std::lock_guard lock(mu_);
  recorded_.emplace_back(redact_secrets(url), res);
  return res;
}

void RecordingHttpClient::save() const {
  std::lock_guard lock(mu_);
  json interactions = json::array();
  for (const auto& [url, res] : recorded_) {
    interactions.push_back({{"url", url}, {"status", res.status}, {"body", res.body}});
  }
  std::ofstream out(cassette_, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kExportError, "cannot write cassette " + cassette_.string());
  out << json{{"interactions", interactions}}.dump(2) << '\n';
}

ReplayHttpClient::ReplayHttpClient(const std::filesystem::path& cassette) {
  std::ifstream in(cassette);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read cassette " + cassette.string());
  try {
    const json j = json::parse(in);
    for (const auto& item : j.at("interactions")) {
      responses_[item.at("url").get<std::string>()] =
          HttpResponse{item.at("status").get<int>(), item.at("body").get<std::string>()};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, "bad cassette " + cassette.string() + ": " + e.what());
  }
}

HttpResponse ReplayHttpClient::get(const std::string& url) {
  auto it = responses_.find(redact_secrets(url));
  if (it == responses_.end()) {
    throw Error(ErrorCode::kProviderError, "no recorded interaction for " + redact_secrets(url));
  }
  return it->second;
}

RateLimiter::RateLimiter(double rps)
    : interval_(rps > 0.0 ? std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(1.0 / rps))
                          : std::chrono::steady_clock::duration::zero()),
      next_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

}  // namespace evicheck::retrieval
