#include <doctest.h>

#ifdef EVICHECK_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "evicheck/api/api.hpp"
#include "evicheck/api/app.hpp"
#include "evicheck/model/checkpoint.hpp"
#include "evicheck/model/synthetic.hpp"
#include "evicheck/retrieval/fixture_provider.hpp"
#include "schema_check.hpp"
#include "test_util.hpp"

using namespace evicheck::api;
using evicheck::ErrorCode;
using evicheck::model::Label;
using evicheck::model::RationaleMask;
using evicheck::model::TokenSequence;
using evicheck::testing::code_of;
using evicheck::testing::SchemaSet;
using evicheck::testing::TempDir;
using nlohmann::json;

namespace {

const std::filesystem::path kFixtures = EVICHECK_FIXTURES_DIR;

class CueChecker final : public evicheck::service::FactChecker {
 public:
  evicheck::model::PipelinePrediction check(const TokenSequence&, const TokenSequence& doc) const override {
    evicheck::model::PipelinePrediction p;
    std::vector<std::uint8_t> bits(doc.size(), 0);
    for (std::size_t i = 0; i < doc.size(); ++i) bits[i] = doc[i] == "american" ? 1 : 0;
    p.mask = RationaleMask(bits);
    const bool hit = p.mask.count_ones() > 0;
    p.label = hit ? Label::kRefutes : Label::kSupports;
    p.label_probs = hit ? std::array<double, 2>{0.1, 0.9} : std::array<double, 2>{0.8, 0.2};
    return p;
  }
};

class FailingSearch final : public evicheck::retrieval::SearchProvider {
 public:
  std::vector<evicheck::retrieval::SearchResult> search(const evicheck::retrieval::Query&, std::size_t) override {
    throw evicheck::Error(ErrorCode::kProviderError, "quota exhausted");
  }
};

struct Harness {
  evicheck::retrieval::FixtureProvider fixtures{kFixtures};
  CueChecker checker;
  evicheck::service::VerdictService verdicts{fixtures, fixtures, checker};
  evicheck::feedback::FeedbackStore store;
  Api api{verdicts, store};
  SchemaSet schemas{EVICHECK_SCHEMAS_DIR};

  Response call(const std::string& method, const std::string& path, const json& body = nullptr,
                std::map<std::string, std::string> query = {}) {
    return api.handle(Request{method, path, std::move(query), body.is_null() ? "" : body.dump()});
  }
  json ok(const std::string& method, const std::string& path, const json& body = nullptr) {
    const auto r = call(method, path, body);
    REQUIRE_MESSAGE(r.status == 200, r.body);
    return json::parse(r.body);
  }
  void expect_error(const Response& r, int status) {
    CHECK_MESSAGE(r.status == status, r.body);
    const auto errors = schemas.validate(json::parse(r.body), "error.schema.json");
    CHECK_MESSAGE(errors.empty(), (errors.empty() ? "" : errors[0]));
  }
  void expect_schema(const json& value, const std::string& schema) {
    const auto errors = schemas.validate(value, schema);
    CHECK_MESSAGE(errors.empty(), (errors.empty() ? "" : errors[0]));
  }
};

}  // namespace

TEST_CASE("POST /claims runs a claim check") {
  Harness h;
  const auto body = h.ok("POST", "/claims", {{"claim", "Microsoft is a Chinese company"}});
  h.expect_schema(body, "session.schema.json");
  CHECK(body["no_results"] == false);
  REQUIRE(body["verdicts"].size() == 3);
  CHECK(body["verdicts"][0]["page_id"] == "List_of_companies_of_China");
  const auto& third = body["verdicts"][2];
  CHECK(third["label"] == "REFUTES");
  CHECK(third["url"] == "https://en.wikipedia.org/wiki/Microsoft");
  const auto tokens = third["snippet"]["tokens"].get<std::vector<std::string>>();
  const auto mask = third["snippet"]["mask"].get<std::vector<int>>();
  REQUIRE(tokens.size() == mask.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) CHECK(mask[i] == (tokens[i] == "american" ? 1 : 0));

  SUBCASE("k limits the number of verdicts") {
    CHECK(h.ok("POST", "/claims", {{"claim", "Microsoft is a Chinese company"}, {"k", 1}})["verdicts"].size() == 1);
  }
  SUBCASE("no hits") {
    const auto none = h.ok("POST", "/claims", {{"claim", "zzz-no-hits"}});
    h.expect_schema(none, "session.schema.json");
    CHECK(none["no_results"] == true);
    CHECK(none["verdicts"].empty());
  }
}

TEST_CASE("POST /claims errors") {
  Harness h;
  h.expect_error(h.call("POST", "/claims", {{"claim", ""}}), 400);
  h.expect_error(h.call("POST", "/claims", {{"claim", "   "}}), 400);
  h.expect_error(h.call("POST", "/claims", json::object()), 400);
  h.expect_error(h.api.handle({"POST", "/claims", {}, "{not json"}), 400);
  h.expect_error(h.call("POST", "/claims", {{"claim", "microsoft"}, {"k", 0}}), 422);
  h.expect_error(h.call("POST", "/claims", {{"claim", "microsoft"}, {"k", 11}}), 422);
  h.expect_error(h.call("POST", "/claims", {{"claim", "microsoft"}, {"k", -2}}), 422);
  h.expect_error(h.call("POST", "/claims", {{"claim", "microsoft"}, {"k", "three"}}), 422);

  FailingSearch failing;
  evicheck::service::VerdictService broken(failing, h.fixtures, h.checker);
  Api api(broken, h.store);
  const auto r = api.handle({"POST", "/claims", {}, json{{"claim", "microsoft"}}.dump()});
  h.expect_error(r, 502);
  CHECK(json::parse(r.body)["error"]["code"] == "provider-error");
}

TEST_CASE("POST /verdicts/{id}/more pages through the document") {
  Harness h;
  const auto session = h.ok("POST", "/claims", {{"claim", "fact long article"}, {"k", 1}});
  const auto id = session["verdicts"][0]["verdict_id"].get<std::string>();
  CHECK(session["verdicts"][0]["window"]["offset"] == 0);
  std::size_t expected = 30;
  for (;;) {
    const auto r = h.call("POST", "/verdicts/" + id + "/more");
    if (expected > 90) {
      h.expect_error(r, 409);
      break;
    }
    REQUIRE(r.status == 200);
    const auto v = json::parse(r.body);
    h.expect_schema(v, "verdict.schema.json");
    CHECK(v["verdict_id"] == id);
    CHECK(v["window"]["offset"] == expected);
    expected += 30;
  }
  h.expect_error(h.call("POST", "/verdicts/v404/more"), 404);
}

TEST_CASE("POST /verdicts/{id}/feedback") {
  Harness h;
  const auto session = h.ok("POST", "/claims", {{"claim", "Microsoft is a Chinese company"}});
  const auto decoy = session["verdicts"][0]["verdict_id"].get<std::string>();
  const auto irrelevant = session["verdicts"][1]["verdict_id"].get<std::string>();
  const auto ms = session["verdicts"][2]["verdict_id"].get<std::string>();
  const auto n = session["verdicts"][2]["snippet"]["tokens"].size();

  auto post = [&](const std::string& id, const json& body) {
    h.expect_schema(body, "feedback_request.schema.json");
    const auto r = h.call("POST", "/verdicts/" + id + "/feedback", body);
    if (r.status == 200) h.expect_schema(json::parse(r.body), "feedback_response.schema.json");
    return r;
  };

  const auto agreed = post(ms, {{"agree", true}, {"user_id", "alice"}});
  REQUIRE(agreed.status == 200);
  CHECK(json::parse(agreed.body)["category"] == "agreed");

  const auto misleading = post(decoy, {{"category", "misleading"}, {"user_id", "alice"}});
  REQUIRE(misleading.status == 200);
  CHECK(json::parse(misleading.body)["category"] == "misleading");
  REQUIRE(post(irrelevant, {{"category", "irrelevant"}, {"user_id", "alice"}}).status == 200);

  std::vector<int> corrected(n, 0);
  corrected[0] = 1;
  REQUIRE(post(ms, {{"category", "corrected-evidence"}, {"corrected_label", "REFUTES"},
                    {"corrected_mask", corrected}, {"user_id", "bob"}})
              .status == 200);

  const auto records = h.store.records();
  REQUIRE(records.size() == 4);
  CHECK(records[1].category == evicheck::feedback::Category::kMisleading);
  CHECK_FALSE(records[1].corrected_mask);
  CHECK(records[3].corrected_mask->size() == n);

  SUBCASE("repeat submissions are idempotent") {
    const auto again = post(ms, {{"agree", true}, {"user_id", "alice"}});
    CHECK(json::parse(again.body)["record_id"] == json::parse(agreed.body)["record_id"]);
    CHECK(h.store.size() == 4);
  }
  SUBCASE("invalid bodies") {
    const json missing_label = {{"category", "corrected-evidence"}, {"corrected_mask", corrected}, {"user_id", "c"}};
    CHECK_FALSE(h.schemas.valid(missing_label, "feedback_request.schema.json"));
    h.expect_error(h.call("POST", "/verdicts/" + ms + "/feedback", missing_label), 422);

    std::vector<int> short_mask(n - 1, 0);
    h.expect_error(h.call("POST", "/verdicts/" + ms + "/feedback",
                          {{"category", "corrected-evidence"}, {"corrected_label", "SUPPORTS"},
                           {"corrected_mask", short_mask}, {"user_id", "c"}}),
                   422);
    const json flag_with_mask = {{"category", "misleading"}, {"corrected_mask", corrected}, {"user_id", "c"}};
    CHECK_FALSE(h.schemas.valid(flag_with_mask, "feedback_request.schema.json"));
    h.expect_error(h.call("POST", "/verdicts/" + ms + "/feedback", flag_with_mask), 422);
    h.expect_error(h.call("POST", "/verdicts/" + ms + "/feedback", {{"user_id", "c"}}), 422);
    h.expect_error(h.call("POST", "/verdicts/" + ms + "/feedback", {{"category", "spam"}, {"user_id", "c"}}), 422);
    h.expect_error(h.call("POST", "/verdicts/" + ms + "/feedback",
                          {{"agree", true}, {"category", "misleading"}, {"user_id", "c"}}),
                   422);
    h.expect_error(h.call("POST", "/verdicts/" + ms + "/feedback",
                          {{"category", "corrected-evidence"}, {"corrected_label", "REFUTES"},
                           {"corrected_mask", {2}}, {"user_id", "c"}}),
                   422);
    h.expect_error(h.call("POST", "/verdicts/v404/feedback", {{"agree", true}}), 404);
    CHECK(h.store.size() == 4);
  }
  SUBCASE("export streams") {
    const auto training = h.call("GET", "/export");
    CHECK(training.content_type == "application/x-ndjson");
    std::istringstream lines(training.body);
    std::string line;
    std::vector<json> rows;
    while (std::getline(lines, line)) rows.push_back(json::parse(line));
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) h.expect_schema(row, "training_record.schema.json");
    CHECK(rows[0]["provenance"] == "machine-agreed");
    CHECK(rows[1]["provenance"] == "human-corrected");

    const auto flagged = h.call("GET", "/export/flagged");
    std::istringstream flines(flagged.body);
    std::size_t count = 0;
    while (std::getline(flines, line)) {
      h.expect_schema(json::parse(line), "feedback_record.schema.json");
      ++count;
    }
    CHECK(count == 2);

    CHECK(h.call("GET", "/export", nullptr, {{"categories", "corrected-evidence"}}).body ==
          rows[1].dump() + "\n");
    CHECK(h.call("GET", "/export", nullptr, {{"since", "99999999999999"}}).body.empty());
    h.expect_error(h.call("GET", "/export", nullptr, {{"since", "yesterday"}}), 400);
    h.expect_error(h.call("GET", "/export", nullptr, {{"categories", "spam"}}), 400);
  }
}

TEST_CASE("GET routes and routing errors") {
  Harness h;
  const auto posted = h.ok("POST", "/claims", {{"claim", "Microsoft is a Chinese company"}});
  const auto sid = posted["session_id"].get<std::string>();
  CHECK(h.ok("GET", "/sessions/" + sid) == posted);
  const auto vid = posted["verdicts"][1]["verdict_id"].get<std::string>();
  CHECK(h.ok("GET", "/verdicts/" + vid) == posted["verdicts"][1]);
  h.expect_error(h.call("GET", "/sessions/s404"), 404);
  h.expect_error(h.call("GET", "/verdicts/v404"), 404);
  h.expect_error(h.call("GET", "/nowhere"), 404);
  h.expect_error(h.call("GET", "/claims"), 405);
  h.expect_error(h.call("DELETE", "/verdicts/" + vid), 405);
  CHECK(h.ok("GET", "/health")["status"] == "ok");
}

namespace {

// A small trained checkpoint so the full application can start.
std::filesystem::path write_checkpoint(const std::filesystem::path& dir) {
  evicheck::model::ModelConfig config;
  config.epochs = 2;
  const auto corpus = evicheck::model::synthetic::keyword_corpus(40, 3);
  const auto model = evicheck::model::train_two_phase(corpus, config);
  const auto path = dir / "ckpt";
  evicheck::model::save_checkpoint(path, model);
  return path;
}

}  // namespace

TEST_CASE("config files") {
  TempDir dir;
  SUBCASE("defaults") {
    const auto c = config_from_json(json::object());
    CHECK(c.k == 3);
    CHECK(c.window == 30);
    CHECK(c.threshold == 0.5);
    CHECK(c.lambda == 1.0);
    CHECK(c.provider == ProviderKind::kFixture);
    SchemaSet schemas(EVICHECK_SCHEMAS_DIR);
    CHECK(schemas.valid(config_to_json(c), "config.schema.json"));
  }
  SUBCASE("relative paths resolve against the file") {
    std::ofstream(dir.path() / "server.json") << R"({"fixtures": "fx", "store": "state", "k": 5})";
    const auto c = load_config(dir.path() / "server.json");
    CHECK(c.fixtures == dir.path() / "fx");
    CHECK(c.store == dir.path() / "state");
    CHECK(c.k == 5);
  }
  SUBCASE("rejections") {
    CHECK(code_of([] { config_from_json({{"kk", 3}}); }) == ErrorCode::kInvalidConfig);
    CHECK(code_of([] { config_from_json({{"k", 0}}); }) == ErrorCode::kInvalidConfig);
    CHECK(code_of([] { config_from_json({{"threshold", 1.0}}); }) == ErrorCode::kInvalidConfig);
    CHECK(code_of([] { config_from_json({{"provider", "bing"}}); }) == ErrorCode::kInvalidConfig);
    CHECK(code_of([] { config_from_json({{"port", "eighty"}}); }) == ErrorCode::kInvalidConfig);
    CHECK(code_of([&] { load_config(dir.path() / "absent.json"); }) == ErrorCode::kInvalidConfig);
    ApiConfig c;
    c.fixtures = dir.path() / "absent";
    c.checkpoint = dir.path();
    CHECK(code_of([&] { c.check_paths(); }) == ErrorCode::kInvalidConfig);
    c.fixtures = kFixtures;
    CHECK(code_of([&] { c.check_paths(); }) == ErrorCode::kInvalidConfig);  // no checkpoint.json
  }
}

TEST_CASE("restarting on the same stores answers GETs identically") {
  TempDir dir;
  ApiConfig config;
  config.fixtures = kFixtures;
  config.checkpoint = write_checkpoint(dir.path());
  config.store = dir.path() / "store";

  json session, export_body;
  std::string verdict_id;
  {
    Application app(config);
    auto& api = app.api();
    session = json::parse(api.handle({"POST", "/claims", {}, json{{"claim", "Microsoft is a Chinese company"}}.dump()}).body);
    verdict_id = session["verdicts"][2]["verdict_id"].get<std::string>();
    REQUIRE(api.handle({"POST", "/verdicts/" + verdict_id + "/feedback", {}, json{{"agree", true}}.dump()}).status == 200);
    export_body = api.handle({"GET", "/export", {}, ""}).body;
  }
  Application again(config);
  auto& api = again.api();
  const auto sid = session["session_id"].get<std::string>();
  CHECK(json::parse(api.handle({"GET", "/sessions/" + sid, {}, ""}).body) == session);
  CHECK(json::parse(api.handle({"GET", "/verdicts/" + verdict_id, {}, ""}).body) == session["verdicts"][2]);
  CHECK(api.handle({"GET", "/export", {}, ""}).body == export_body);
}

TEST_CASE("the HTTP server answers over a socket") {
  Harness h;
  HttpServer server(h.api);
  const int port = server.bind("127.0.0.1", 0);
  std::thread loop([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  auto posted = client.Post("/claims", json{{"claim", "Microsoft is a Chinese company"}}.dump(), "application/json");
  REQUIRE(posted);
  CHECK(posted->status == 200);
  const auto body = json::parse(posted->body);
  CHECK(body["verdicts"].size() == 3);
  const auto id = body["verdicts"][0]["verdict_id"].get<std::string>();

  auto fb = client.Post("/verdicts/" + id + "/feedback", json{{"category", "misleading"}}.dump(), "application/json");
  REQUIRE(fb);
  CHECK(fb->status == 200);

  auto flagged = client.Get("/export/flagged?since=0&categories=misleading,irrelevant");
  REQUIRE(flagged);
  CHECK(flagged->status == 200);
  CHECK(json::parse(flagged->body)["verdict_id"] == id);

  auto bad = client.Post("/claims", json{{"claim", ""}}.dump(), "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  server.stop();
  loop.join();
}
