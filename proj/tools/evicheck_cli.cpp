// evicheck: serve the API, train and evaluate models, export feedback and
// fine-tune on it.

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "evicheck/api/app.hpp"
#include "evicheck/error.hpp"
#include "evicheck/feedback/store.hpp"
#include "evicheck/model/checkpoint.hpp"
#include "evicheck/model/corpus.hpp"
#include "evicheck/model/metrics.hpp"
#include "evicheck/model/synthetic.hpp"

namespace {

using namespace evicheck;

struct ModelOptions {
  std::optional<std::size_t> epochs, batch, dim, hidden, max_length;
  std::optional<double> lambda, lr, threshold;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "Training epochs");
    cmd->add_option("--batch", batch, "Mini-batch size");
    cmd->add_option("--dim", dim, "Embedding width");
    cmd->add_option("--hidden", hidden, "Label-head hidden width");
    cmd->add_option("--max-length", max_length, "Model input limit in tokens");
    cmd->add_option("--lambda", lambda, "Weight of the explanation loss");
    cmd->add_option("--lr", lr, "Adam learning rate");
    cmd->add_option("--threshold", threshold, "Evidence threshold");
    cmd->add_option("--seed", seed, "Random seed");
  }

  model::ModelConfig apply(model::ModelConfig c) const {
    if (epochs) c.epochs = *epochs;
    if (batch) c.batch_size = *batch;
    if (dim) c.embedding_dim = *dim;
    if (hidden) c.label_hidden = *hidden;
    if (max_length) c.max_length = *max_length;
    if (lambda) c.lambda = *lambda;
    if (lr) c.learning_rate = *lr;
    if (threshold) c.evidence_threshold = *threshold;
    if (seed) c.seed = *seed;
    c.validate();
    return c;
  }
};

void print_report(const model::EvalReport& r) {
  std::cout << std::fixed << std::setprecision(4) << "instances " << r.instances << '\n'
            << "phase1_accuracy " << r.phase1_accuracy << '\n'
            << "pipeline_accuracy " << r.pipeline_accuracy << '\n'
            << "rationale_precision " << r.rationale.precision() << '\n'
            << "rationale_recall " << r.rationale.recall() << '\n'
            << "rationale_f1 " << r.rationale.f1() << '\n';
}

feedback::ExportFilter parse_filter(std::int64_t since, const std::string& categories) {
  feedback::ExportFilter filter;
  filter.since_ms = since;
  std::stringstream list(categories);
  std::string name;
  while (std::getline(list, name, ',')) {
    if (!name.empty()) filter.categories.insert(feedback::parse_category(name));
  }
  return filter;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kExportError, "cannot write " + path);
  return out;
}

int serve(api::ApiConfig config) {
  // Block the stop signals before any thread starts so sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  api::Application app(std::move(config));
  api::HttpServer server(app.api());
  const int port = server.bind(app.config().host, app.config().port);
  std::cerr << "listening on http://" << app.config().host << ':' << port << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  // listen() may return on its own (e.g. a bind failure); wake the waiter.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explainable claim checking with human feedback"};
  app.require_subcommand(1);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  std::string config_path, provider, fixtures, checkpoint, store, host;
  std::optional<int> port;
  serve_cmd->add_option("--config", config_path, "Server config file (JSON)");
  serve_cmd->add_option("--provider", provider, "fixture | live")->check(CLI::IsMember({"fixture", "live"}));
  serve_cmd->add_option("--fixtures", fixtures, "Fixture page directory");
  serve_cmd->add_option("--checkpoint", checkpoint, "Model checkpoint file or directory");
  serve_cmd->add_option("--store", store, "Directory for session and feedback logs");
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_option("--port", port, "Listen port (0 picks one)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train both model phases on a corpus");
  std::string corpus, out;
  ModelOptions train_opts;
  train_cmd->add_option("--corpus", corpus, "Training corpus (JSON lines)")->required();
  train_cmd->add_option("--out", out, "Checkpoint file or directory")->required();
  train_opts.attach(train_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Report accuracy and rationale token-F1");
  std::string eval_corpus, eval_ckpt;
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint file or directory")->required();
  eval_cmd->add_option("--corpus", eval_corpus, "Held-out corpus (JSON lines)")->required();

  // export
  auto* export_cmd = app.add_subcommand("export", "Export feedback as training data");
  std::string export_store, export_out, sidecar, categories;
  std::int64_t since = 0;
  export_cmd->add_option("--store", export_store, "Store directory (holds feedback.jsonl)")->required();
  export_cmd->add_option("--since", since, "Drop records created before this time (ms since epoch)");
  export_cmd->add_option("--categories", categories, "Comma-separated categories to keep");
  export_cmd->add_option("--out", export_out, "Training lines (default: stdout)");
  export_cmd->add_option("--sidecar", sidecar, "Misleading/irrelevant records");

  // fine-tune
  auto* tune_cmd = app.add_subcommand("fine-tune", "Retrain a checkpoint on exported feedback");
  std::string tune_export, tune_base, tune_out, base_corpus;
  ModelOptions tune_opts;
  tune_cmd->add_option("--export", tune_export, "Exported training lines")->required();
  tune_cmd->add_option("--checkpoint", tune_base, "Base checkpoint")->required();
  tune_cmd->add_option("--out", tune_out, "New checkpoint file or directory")->required();
  tune_cmd->add_option("--base-corpus", base_corpus, "Original corpus to train on alongside the export");
  tune_opts.attach(tune_cmd);

  // gen-corpus
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Write a synthetic corpus");
  std::string kind = "keyword", gen_out;
  std::size_t count = 500;
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("--kind", kind, "keyword | nationality | birthdate | novel");
  gen_cmd->add_option("-n,--count", count, "Number of instances");
  gen_cmd->add_option("--seed", gen_seed, "Random seed");
  gen_cmd->add_option("--out", gen_out, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve_cmd->parsed()) {
      api::ApiConfig config = config_path.empty() ? api::ApiConfig{} : api::load_config(config_path);
      if (!provider.empty()) config.provider = provider == "live" ? api::ProviderKind::kLive : api::ProviderKind::kFixture;
      if (!fixtures.empty()) config.fixtures = fixtures;
      if (!checkpoint.empty()) config.checkpoint = checkpoint;
      if (!store.empty()) config.store = store;
      if (!host.empty()) config.host = host;
      if (port) config.port = *port;
      return serve(std::move(config));
    }
    if (train_cmd->parsed()) {
      const auto data = model::read_corpus(std::filesystem::path(corpus));
      const auto config = train_opts.apply({});
      const auto trained = model::train_two_phase(data, config);
      model::save_checkpoint(out, trained);
      std::cerr << "trained on " << data.size() << " instances (" << trained.screened_in
                << " kept by screening); checkpoint " << model::resolve_checkpoint_path(out).string() << '\n';
      print_report(model::evaluate(trained, data));
      return 0;
    }
    if (eval_cmd->parsed()) {
      const auto trained = model::load_checkpoint(eval_ckpt);
      const auto data = model::read_corpus(std::filesystem::path(eval_corpus));
      print_report(model::evaluate(trained, data));
      return 0;
    }
    if (export_cmd->parsed()) {
      const auto log = std::filesystem::path(export_store) / "feedback.jsonl";
      if (!std::filesystem::is_directory(export_store)) {
        throw Error(ErrorCode::kInvalidConfig, "store directory '" + export_store + "' does not exist");
      }
      // A store that has never received feedback exports nothing.
      feedback::Export data;
      if (std::filesystem::exists(log)) {
        const feedback::FeedbackStore reader(log);
        data = reader.export_dataset(parse_filter(since, categories));
      } else {
        parse_filter(since, categories);
      }
      std::ofstream training_file, sidecar_file;
      std::ostringstream discard;
      if (!export_out.empty()) training_file = open_out(export_out);
      if (!sidecar.empty()) sidecar_file = open_out(sidecar);
      std::ostream& training = export_out.empty() ? std::cout : training_file;
      std::ostream& flagged = sidecar.empty() ? static_cast<std::ostream&>(discard) : sidecar_file;
      feedback::write_export(data, training, flagged);
      return 0;
    }
    if (tune_cmd->parsed()) {
      std::ifstream training(tune_export);
      if (!training) throw Error(ErrorCode::kInvalidInput, "cannot read " + tune_export);
      std::istringstream no_sidecar;
      const auto data = feedback::read_export(training, no_sidecar);
      const auto base = model::load_checkpoint(tune_base);
      std::vector<model::TrainingInstance> extra;
      if (!base_corpus.empty()) extra = model::read_corpus(std::filesystem::path(base_corpus));
      const auto config = tune_opts.apply(base.phase1.config());
      const auto tuned = feedback::fine_tune(data, base, config, extra);
      model::save_checkpoint(tune_out, tuned);
      std::cerr << "fine-tuned on " << data.annotations.size() << " exported + " << extra.size()
                << " base instances; checkpoint " << model::resolve_checkpoint_path(tune_out).string() << '\n';
      return 0;
    }
    if (gen_cmd->parsed()) {
      const auto data = model::synthetic::generate(kind, count, gen_seed);
      if (gen_out.empty()) {
        model::write_corpus(std::cout, data);
      } else {
        model::write_corpus(std::filesystem::path(gen_out), data);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "evicheck: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "evicheck: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
