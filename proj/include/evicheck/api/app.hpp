#pragma once
// Wires providers, model, verdict service, feedback store and API from one
// ApiConfig.

#include <memory>

#include "evicheck/api/api.hpp"
#include "evicheck/api/config.hpp"
#include "evicheck/retrieval/http.hpp"

namespace evicheck::api {

class Application {
 public:
  // Checks referenced paths, loads the checkpoint and opens the stores.
  explicit Application(ApiConfig config);
  ~Application();

  Api& api() { return *api_; }
  service::VerdictService& verdicts() { return *verdicts_; }
  feedback::FeedbackStore& feedback() { return *feedback_; }
  const ApiConfig& config() const { return config_; }

 private:
  ApiConfig config_;
  std::unique_ptr<retrieval::HttpClient> http_;
  std::unique_ptr<retrieval::RateLimiter> limiter_;
  std::unique_ptr<retrieval::SearchProvider> search_owner_;
  std::unique_ptr<retrieval::ContentProvider> content_owner_;
  retrieval::SearchProvider* search_ = nullptr;
  retrieval::ContentProvider* content_ = nullptr;
  std::unique_ptr<model::TwoPhaseModel> model_;
  std::unique_ptr<service::TwoPhaseChecker> checker_;
  std::unique_ptr<service::VerdictService> verdicts_;
  std::unique_ptr<feedback::FeedbackStore> feedback_;
  std::unique_ptr<Api> api_;
};

}  // namespace evicheck::api
