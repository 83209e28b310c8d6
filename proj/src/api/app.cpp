#include "evicheck/api/app.hpp"

#include "evicheck/error.hpp"
#include "evicheck/model/checkpoint.hpp"
#include "evicheck/retrieval/fixture_provider.hpp"
#include "evicheck/retrieval/live_provider.hpp"

namespace evicheck::api {

namespace {

// Owns one FixtureProvider and exposes it under both provider interfaces.
class SharedFixtures final : public retrieval::SearchProvider, public retrieval::ContentProvider {
 public:
  explicit SharedFixtures(std::shared_ptr<retrieval::FixtureProvider> inner) : inner_(std::move(inner)) {}
  std::vector<retrieval::SearchResult> search(const retrieval::Query& q, std::size_t k) override {
    return inner_->search(q, k);
  }
  retrieval::RawPage fetch(const std::string& id) override { return inner_->fetch(id); }

 private:
  std::shared_ptr<retrieval::FixtureProvider> inner_;
};

}  // namespace

Application::Application(ApiConfig config) : config_(std::move(config)) {
  config_.check_paths();

  if (config_.provider == ProviderKind::kFixture) {
    auto fixtures = std::make_shared<retrieval::FixtureProvider>(config_.fixtures);
    search_owner_ = std::make_unique<SharedFixtures>(fixtures);
    content_owner_ = std::make_unique<SharedFixtures>(fixtures);
  } else {
    http_ = std::make_unique<retrieval::LiveHttpClient>();
    limiter_ = std::make_unique<retrieval::RateLimiter>(config_.requests_per_second);
    search_owner_ = std::make_unique<retrieval::WebSearchProvider>(
        *http_, retrieval::WebSearchCredentials::from_env(), config_.search_endpoint, limiter_.get());
    content_owner_ = std::make_unique<retrieval::WikiContentProvider>(*http_, config_.wiki_endpoint,
                                                                      limiter_.get());
  }
  search_ = search_owner_.get();
  content_ = content_owner_.get();

  model_ = std::make_unique<model::TwoPhaseModel>(model::load_checkpoint(config_.checkpoint));
  auto inference = model_->phase1.config();
  inference.evidence_threshold = config_.threshold;
  checker_ = std::make_unique<service::TwoPhaseChecker>(*model_, inference);

  service::ServiceConfig sc;
  sc.default_k = config_.k;
  sc.window_size = config_.window;
  sc.context = config_.context;
  sc.lead_sentences = config_.lead_sentences;
  sc.cache_ttl = std::chrono::seconds(config_.cache_ttl_seconds);
  std::filesystem::path feedback_log;
  if (!config_.store.empty()) {
    std::filesystem::create_directories(config_.store);
    sc.session_log = config_.store / "sessions.jsonl";
    feedback_log = config_.store / "feedback.jsonl";
  }
  verdicts_ = std::make_unique<service::VerdictService>(*search_, *content_, *checker_, sc);
  feedback_ = std::make_unique<feedback::FeedbackStore>(feedback_log);
  api_ = std::make_unique<Api>(*verdicts_, *feedback_);
}

Application::~Application() = default;

}  // namespace evicheck::api
