// iie: command-line front door for extraction runs, form generation, the
// annotation service and the evaluation reports.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "iie/evaluation.hpp"
#include "iie/forms.hpp"
#include "iie/kg.hpp"
#include "iie/llm.hpp"
#include "iie/nli.hpp"
#include "iie/pipeline.hpp"
#include "iie/service.hpp"
#include "iie/verbalizer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace iie;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

struct SentenceInput {
  std::string id;
  std::string sentence;
};

// Plain text (one sentence per line) or JSONL with {"id", "sentence"}.
std::vector<SentenceInput> read_sentences(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<SentenceInput> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    SentenceInput s;
    if (line.front() == '{') {
      json j = json::parse(line);
      s.sentence = j.at("sentence").get<std::string>();
      if (j.contains("id")) s.id = j["id"].get<std::string>();
    } else {
      s.sentence = line;
    }
    if (s.id.empty()) s.id = "s" + std::to_string(out.size() + 1);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<fs::path> expand(const std::vector<std::string>& args, const std::string& suffix) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    if (fs::is_directory(a)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(a)) {
        std::string name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > suffix.size() && name.ends_with(suffix)) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(a);
    }
  }
  return out;
}

std::vector<AnnotationBundle> read_bundles(const std::vector<std::string>& args) {
  std::vector<AnnotationBundle> out;
  for (const auto& p : expand(args, ".form.json")) out.push_back(annotation_bundle_from_json(json::parse(slurp(p))));
  return out;
}

std::vector<AnnotationResponse> read_responses(const std::vector<std::string>& args) {
  std::vector<AnnotationResponse> out;
  for (const auto& p : expand(args, ".jsonl")) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    try {
      auto rs = ingest_responses(in);
      out.insert(out.end(), rs.begin(), rs.end());
    } catch (const std::exception& e) {
      throw std::runtime_error(p.string() + ": " + e.what());
    }
  }
  return out;
}

struct RunOptions {
  std::string input;
  std::string endpoint;
  std::string model = "mock";
  std::string mock;
  std::string prompts;
  std::string out = "out";
  double temperature = 0.0;
  int concurrency = 4;
  std::size_t batch = 12;
  int retries = 3;
};

int cmd_run(const RunOptions& o) {
  auto sentences = read_sentences(o.input);
  auto prompts = PromptLibrary::load(o.prompts.empty() ? PromptLibrary::default_dir() : fs::path(o.prompts));

  std::shared_ptr<Backend> backend;
  if (!o.mock.empty()) {
    backend = ReplayBackend::from_file(o.mock);
  } else if (!o.endpoint.empty()) {
    backend = std::make_shared<ChatCompletionsBackend>(o.endpoint, env("IIE_API_KEY"));
  } else {
    throw CLI::ValidationError("run", "one of --endpoint or --mock is required");
  }
  GatewayConfig gc;
  gc.model_id = o.model;
  gc.temperature = o.temperature;
  gc.concurrency = std::max(1, o.concurrency);
  gc.max_retries = o.retries;
  Gateway gateway(backend, gc);
  PipelineConfig pc;
  pc.pair_batch_size = o.batch;
  Pipeline pipeline(gateway, prompts, pc);

  fs::create_directories(o.out);
  std::mutex log_mu;
  std::atomic<int> failures = 0;
  auto process = [&](const SentenceInput& s) {
    fs::path base = fs::path(o.out) / s.id;
    try {
      auto result = pipeline.run_sentence(s.id, s.sentence);
      write_file(base.string() + ".kg.json", export_graph(result.kg, ExportFormat::json_bundle));
      write_file(base.string() + ".kg.dot", export_graph(result.kg, ExportFormat::dot));
      write_file(base.string() + ".transcript.json", result.run.transcript.to_json().dump(2));
      write_file(base.string() + ".run.json", to_json(result.run).dump(2));
      std::lock_guard lock(log_mu);
      std::cerr << s.id << ": " << result.kg.relational_edges.size() << " edges, " << result.kg.temporal_edges.size()
                << " temporal, " << result.run.lints.size() << " lints\n";
    } catch (const PipelineAborted& e) {
      ++failures;
      write_file(base.string() + ".transcript.json", e.partial().transcript.to_json().dump(2));
      write_file(base.string() + ".partial.json", to_json(e.partial()).dump(2));
      std::lock_guard lock(log_mu);
      std::cerr << s.id << ": aborted at " << e.step() << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::lock_guard lock(log_mu);
      std::cerr << s.id << ": " << e.what() << "\n";
    }
  };

  // Scripted replies are shared queues, so a replay runs one sentence at a time.
  std::size_t workers = o.mock.empty() ? std::size_t(std::max(1, o.concurrency)) : 1;
  std::atomic<std::size_t> next = 0;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, sentences.size()); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < sentences.size();) process(sentences[i]);
    });
  for (auto& t : pool) t.join();
  return failures == 0 ? 0 : 2;
}

int cmd_verbalize(const std::string& config_path) {
  VerbalizerConfig config = config_path.empty() ? VerbalizerConfig{} : load_verbalizer_config(config_path);
  std::string line;
  int bad = 0;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::cout << verbalize(parse_triplet(line), config) << "\n";
    } catch (const std::exception& e) {
      std::cerr << "skipped: " << line << ": " << e.what() << "\n";
      ++bad;
    }
  }
  return bad == 0 ? 0 : 2;
}

struct FormsOptions {
  std::vector<std::string> runs;
  std::uint64_t seed = 0;
  std::size_t per_form = 5;
  bool allow_short = false;
  std::string prefix = "form";
  std::string dataset = "default";
  std::string model = "mock";
  std::size_t unrelated = 1;
  std::string out = "forms";
};

int cmd_forms(const FormsOptions& o) {
  std::vector<SentenceRun> runs;
  for (const auto& p : expand(o.runs, ".run.json")) runs.push_back(sentence_run_from_json(json::parse(slurp(p))));
  FormsConfig fc;
  fc.dataset = o.dataset;
  fc.model = o.model;
  fc.sentences_per_form = o.per_form;
  fc.allow_short = o.allow_short;
  fc.unrelated_pairs_per_related = o.unrelated;
  for (const auto& b : generate_forms(runs, o.seed, fc, o.prefix)) {
    fs::path p = fs::path(o.out) / (b.form_id + ".form.json");
    write_file(p, to_json(b).dump(2));
    std::cout << p.string() << "\n";
  }
  return 0;
}

int cmd_eval(const std::vector<std::string>& forms, const std::vector<std::string>& responses,
             const std::string& oracle, const std::string& out) {
  std::vector<FormKey> keys;
  for (auto& b : read_bundles(forms)) keys.push_back(b.key);
  auto rs = read_responses(responses);
  SemanticOracle match;
  if (!oracle.empty()) match = table_oracle(json::parse(slurp(oracle)));
  auto report = evaluate(keys, rs, match);
  std::string table = render_report_table(report);
  if (!out.empty()) {
    write_file(fs::path(out) / "report.json", to_json(report).dump(2));
    write_file(fs::path(out) / "report.txt", table);
  }
  std::cout << table;
  return 0;
}

int cmd_probe(const std::vector<std::string>& forms, const std::vector<std::string>& responses,
              const std::string& endpoint, const std::string& scores, int concurrency, const std::string& out) {
  std::unique_ptr<NliScorer> owned;
  std::shared_ptr<ScriptedNliScorer> scripted;
  NliScorer* scorer = nullptr;
  if (!scores.empty()) {
    scripted = ScriptedNliScorer::from_json(json::parse(slurp(scores)));
    scorer = scripted.get();
  } else if (!endpoint.empty()) {
    owned = std::make_unique<HttpNliScorer>(endpoint);
    scorer = owned.get();
  } else {
    throw CLI::ValidationError("probe-nli", "one of --endpoint or --scores is required");
  }
  auto rs = filter_attention_checks(read_responses(responses));
  std::vector<NliItem> items;
  for (const auto& b : read_bundles(forms)) {
    std::vector<AnnotationResponse> mine;
    for (const auto& r : rs)
      if (r.form_id == b.form_id) mine.push_back(r);
    auto part = nli_items(b, mine);
    items.insert(items.end(), part.begin(), part.end());
  }
  std::vector<HypothesisPair> pairs;
  for (const auto& it : items) pairs.push_back(it.pair);
  auto scored = score_pairs(*scorer, pairs, std::max(1, concurrency));
  for (std::size_t i = 0; i < items.size(); ++i) items[i].score = scored[i];
  auto report = probe_report(items);
  std::string table = render_nli_table(report);
  if (!out.empty()) {
    write_file(fs::path(out) / "nli.json", to_json(report).dump(2));
    write_file(fs::path(out) / "nli.txt", table);
  }
  std::cout << table;
  return 0;
}

AnnotationService* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const std::vector<std::string>& forms, const std::string& responses_dir, const std::string& static_dir,
              const std::string& host, int port, std::size_t max_body) {
  ServiceConfig sc;
  sc.responses_dir = responses_dir;
  sc.static_dir = static_dir;
  sc.operator_token = env("IIE_OPERATOR_TOKEN").value_or("");
  sc.max_body_bytes = max_body;
  AnnotationService service(sc);
  for (auto& b : read_bundles(forms)) service.add_bundle(std::move(b));
  int bound = service.bind(host, port);
  std::cerr << "listening on http://" << host << ":" << bound << "/\n";
  if (sc.operator_token.empty()) std::cerr << "IIE_OPERATOR_TOKEN unset: response export disabled\n";
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  service.run();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit information extraction: pipeline runs, annotation forms and evaluation"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "Run the extraction pipeline over a sentence file");
  run->add_option("input", ro.input, "Text file (one sentence per line) or JSONL with id/sentence")->required();
  run->add_option("--endpoint", ro.endpoint, "OpenAI-compatible base URL");
  run->add_option("--model", ro.model, "Model id sent to the endpoint");
  run->add_option("--mock", ro.mock, "Replay file with scripted replies")->check(CLI::ExistingFile);
  run->add_option("--prompts", ro.prompts, "Prompt template directory")->check(CLI::ExistingDirectory);
  run->add_option("--out", ro.out, "Output directory");
  run->add_option("--temperature", ro.temperature);
  run->add_option("--concurrency", ro.concurrency, "Sentences and requests in flight")->check(CLI::PositiveNumber);
  run->add_option("--batch-size", ro.batch, "Ordered pairs per temporal prompt")->check(CLI::PositiveNumber);
  run->add_option("--retries", ro.retries, "Retries per request")->check(CLI::NonNegativeNumber);

  std::string verbalizer_config;
  auto* verb = app.add_subcommand("verbalize", "Turn triplets on stdin into hypothesis sentences");
  verb->add_option("--config", verbalizer_config, "Verbalizer config (key = value lines)")->check(CLI::ExistingFile);

  FormsOptions fo;
  auto* forms = app.add_subcommand("forms", "Generate annotation bundles from finished runs");
  forms->add_option("runs", fo.runs, "*.run.json files or directories")->required();
  forms->add_option("--seed", fo.seed);
  forms->add_option("--per-form", fo.per_form)->check(CLI::PositiveNumber);
  forms->add_flag("--allow-short", fo.allow_short, "Permit a final form with fewer sentences");
  forms->add_option("--prefix", fo.prefix);
  forms->add_option("--dataset", fo.dataset);
  forms->add_option("--model", fo.model);
  forms->add_option("--unrelated-per-related", fo.unrelated, "Unrelated timing pairs sampled per related pair");
  forms->add_option("--out", fo.out);

  std::vector<std::string> eval_forms, eval_responses;
  std::string eval_oracle, eval_out;
  auto* eval = app.add_subcommand("eval", "Agreement and statistics report from collected responses");
  eval->add_option("--forms", eval_forms, "*.form.json files or directories")->required();
  eval->add_option("--responses", eval_responses, "*.jsonl files or directories")->required();
  eval->add_option("--oracle", eval_oracle, "JSON list of equivalent triplet pairs")->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Directory for report.json and report.txt");

  std::vector<std::string> nli_forms, nli_responses;
  std::string nli_endpoint, nli_scores, nli_out;
  int nli_concurrency = 4;
  auto* probe = app.add_subcommand("probe-nli", "Score section-a triplets with an NLI model");
  probe->add_option("--forms", nli_forms)->required();
  probe->add_option("--responses", nli_responses)->required();
  probe->add_option("--endpoint", nli_endpoint, "NLI service base URL");
  probe->add_option("--scores", nli_scores, "Scripted scores instead of a service")->check(CLI::ExistingFile);
  probe->add_option("--concurrency", nli_concurrency)->check(CLI::PositiveNumber);
  probe->add_option("--out", nli_out);

  std::vector<std::string> serve_forms;
  std::string responses_dir = "responses", static_dir = IIE_DEFAULT_UI_DIR, host = "127.0.0.1";
  int port = 8080;
  std::size_t max_body = 1 << 20;
  auto* serve = app.add_subcommand("serve", "Serve annotation forms and collect responses");
  serve->add_option("--forms", serve_forms)->required();
  serve->add_option("--responses-dir", responses_dir);
  serve->add_option("--static", static_dir, "UI asset directory");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--max-body", max_body);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(ro);
    if (*verb) return cmd_verbalize(verbalizer_config);
    if (*forms) return cmd_forms(fo);
    if (*eval) return cmd_eval(eval_forms, eval_responses, eval_oracle, eval_out);
    if (*probe) return cmd_probe(nli_forms, nli_responses, nli_endpoint, nli_scores, nli_concurrency, nli_out);
    if (*serve) return cmd_serve(serve_forms, responses_dir, static_dir, host, port, max_body);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
