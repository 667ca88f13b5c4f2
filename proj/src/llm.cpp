#include "iie/llm.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"

namespace iie {

namespace {

using json = nlohmann::json;

struct PromptSpec {
  PromptId id;
  std::string_view name;
  std::vector<std::string> parameters;
  std::string_view hint;
};

const std::array<PromptSpec, kPromptCount>& specs() {
  static const std::array<PromptSpec, kPromptCount> table{{
      {PromptId::entity_extraction, "entity_extraction", {"context sentence"},
       "name <tag>; name <tag>; ... with tags from per, ani, org, gpe, fac, obj, occ, tim, num, msc"},
      {PromptId::explicit_extraction, "explicit_extraction", {"context sentence", "extracted entities"},
       "[(subject, relation, object) `text snippet`; (subject, relation, object) `text snippet`; ...]"},
      {PromptId::implicit_extraction, "implicit_extraction", {"context sentence", "extracted entities"},
       "[(subject, relation, object); (subject, relation, object); ...]"},
      {PromptId::inference_challenge, "inference_challenge", {"context sentence", "implicit triplet to analyze"},
       "yes, or no followed by a short explanation"},
      {PromptId::inference_correction, "inference_correction",
       {"context sentence", "implicit triplet to correct", "reason for discarding the triplet"},
       "a single triplet (subject, relation, object), or none"},
      {PromptId::inference_explanation, "inference_explanation",
       {"context sentence", "implicit triplet to explain", "extracted explicit relationships"},
       "[(sub1, rel1, obj1); (sub2, rel2, obj2); ...], or [] if no premise applies"},
      {PromptId::duplicate_removal, "duplicate_removal",
       {"context sentence", "extracted relationships", "implicit triplet to analyze"}, "yes or no"},
      {PromptId::event_state_grounding, "event_state_grounding", {"context sentence", "extracted relationships"},
       "[(subject, relation, object) <event> `time`; (subject, relation, object) <state> `none`; ...] echoing every "
       "input triplet in order"},
      {PromptId::temporal_relations, "temporal_relations", {"context sentence", "pairs of extracted triplets"},
       "[((triplet1), (triplet2)) -> <before>, ...] with one tag from before, after, while, none for every input "
       "pair"},
  }};
  return table;
}

const PromptSpec& spec(PromptId id) { return specs()[static_cast<std::size_t>(id)]; }

const std::regex& placeholder_re() {
  static const std::regex re(R"(\[([a-z][a-z ]*)\])");
  return re;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PromptError(PromptErrorKind::missing_asset, path.string(), "cannot read prompt asset " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::array<std::string_view, 5> kGatewayErrorNames{"endpoint_unreachable", "rate_limited",
                                                          "malformed_endpoint_reply", "format_unrecoverable",
                                                          "script_exhausted"};

json request_to_json(const CompletionRequest& r) {
  return json{{"model_id", r.model_id},
              {"rendered_prompt", r.rendered_prompt},
              {"temperature", r.temperature},
              {"max_tokens", r.max_tokens},
              {"attempt", r.attempt}};
}

CompletionRequest request_from_json(const json& j) {
  CompletionRequest r;
  r.model_id = j.at("model_id").get<std::string>();
  r.rendered_prompt = j.at("rendered_prompt").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.max_tokens = j.at("max_tokens").get<int>();
  r.attempt = j.at("attempt").get<int>();
  return r;
}

}  // namespace

std::string_view to_string(PromptId id) { return spec(id).name; }

std::optional<PromptId> prompt_id_from(std::string_view s) {
  for (const auto& p : specs()) {
    if (p.name == s) return p.id;
  }
  return std::nullopt;
}

const std::vector<std::string>& declared_parameters(PromptId id) { return spec(id).parameters; }
std::string_view format_hint(PromptId id) { return spec(id).hint; }

PromptError::PromptError(PromptErrorKind kind, const std::string& name, const std::string& detail)
    : std::runtime_error(detail), kind_(kind), name_(name) {}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
  const auto& declared = declared_parameters(tmpl.id);
  for (const auto& [name, value] : bindings) {
    if (std::find(declared.begin(), declared.end(), name) == declared.end()) {
      throw PromptError(PromptErrorKind::unknown_placeholder, name,
                        std::string(to_string(tmpl.id)) + " has no placeholder [" + name + "]");
    }
  }
  std::string out;
  out.reserve(tmpl.body.size() + 256);
  auto begin = std::sregex_iterator(tmpl.body.begin(), tmpl.body.end(), placeholder_re());
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    std::string name = m[1].str();
    auto bound = bindings.find(name);
    if (bound == bindings.end()) {
      throw PromptError(PromptErrorKind::missing_binding, name, "no binding for [" + name + "]");
    }
    out.append(tmpl.body, last, static_cast<std::size_t>(m.position(0)) - last);
    out += bound->second;
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  out.append(tmpl.body, last, std::string::npos);
  return out;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (const auto& p : specs()) {
    std::string body = read_file(dir / (std::string(p.name) + ".txt"));
    if (!body.empty() && body.back() == '\n') body.pop_back();
    if (!body.empty() && body.back() == '\r') body.pop_back();

    std::set<std::string> found;
    for (auto it = std::sregex_iterator(body.begin(), body.end(), placeholder_re()); it != std::sregex_iterator();
         ++it) {
      found.insert((*it)[1].str());
    }
    std::set<std::string> declared(p.parameters.begin(), p.parameters.end());
    if (found != declared) {
      std::string listed;
      for (const auto& f : found) listed += " [" + f + "]";
      throw PromptError(PromptErrorKind::placeholder_mismatch, std::string(p.name),
                        std::string(p.name) + " placeholders do not match the declared set:" + listed);
    }
    lib.templates_.emplace(p.id, PromptTemplate{p.id, std::move(body)});
  }
  return lib;
}

std::filesystem::path PromptLibrary::default_dir() {
  if (const char* env = std::getenv("IIE_PROMPT_DIR")) return env;
#ifdef IIE_DEFAULT_PROMPT_DIR
  return IIE_DEFAULT_PROMPT_DIR;
#else
  return "assets/prompts";
#endif
}

std::string_view to_string(GatewayErrorKind k) { return kGatewayErrorNames[static_cast<std::size_t>(k)]; }

std::optional<GatewayErrorKind> gateway_error_from(std::string_view s) {
  for (std::size_t i = 0; i < kGatewayErrorNames.size(); ++i) {
    if (kGatewayErrorNames[i] == s) return static_cast<GatewayErrorKind>(i);
  }
  if (s == "unreachable") return GatewayErrorKind::endpoint_unreachable;
  if (s == "malformed") return GatewayErrorKind::malformed_endpoint_reply;
  return std::nullopt;
}

GatewayError::GatewayError(GatewayErrorKind kind, const std::string& detail)
    : std::runtime_error(detail), kind_(kind) {}

// ---- transcript

Transcript::Transcript(const Transcript& other) {
  std::lock_guard lock(other.mu_);
  entries_ = other.entries_;
}

Transcript& Transcript::operator=(const Transcript& other) {
  if (this == &other) return *this;
  std::vector<TranscriptEntry> copy = other.entries();
  std::lock_guard lock(mu_);
  entries_ = std::move(copy);
  return *this;
}

void Transcript::append(TranscriptEntry entry) {
  std::lock_guard lock(mu_);
  entries_.push_back(std::move(entry));
}

std::vector<TranscriptEntry> Transcript::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

json Transcript::to_json() const {
  json out = json::array();
  for (const TranscriptEntry& e : entries()) {
    json j{{"run_id", e.run_id}, {"step", e.step}, {"request", request_to_json(e.request)}};
    if (e.reply) {
      json r{{"text", e.reply->text}, {"latency_ms", e.reply->latency_ms}};
      if (e.reply->token_usage) {
        r["token_usage"] = {{"prompt_tokens", e.reply->token_usage->prompt_tokens},
                            {"completion_tokens", e.reply->token_usage->completion_tokens}};
      }
      j["reply"] = std::move(r);
    }
    if (e.error) {
      j["error"] = std::string(to_string(*e.error));
      j["error_detail"] = e.error_detail;
    }
    out.push_back(std::move(j));
  }
  return out;
}

Transcript Transcript::from_json(const json& j) {
  Transcript t;
  for (const json& ej : j) {
    TranscriptEntry e;
    e.run_id = ej.value("run_id", "");
    e.step = ej.at("step").get<std::string>();
    e.request = request_from_json(ej.at("request"));
    if (ej.contains("reply")) {
      const json& r = ej["reply"];
      CompletionReply reply{r.at("text").get<std::string>(), r.value("latency_ms", 0.0), std::nullopt};
      if (r.contains("token_usage")) {
        reply.token_usage = TokenUsage{r["token_usage"].at("prompt_tokens").get<int>(),
                                       r["token_usage"].at("completion_tokens").get<int>()};
      }
      e.reply = std::move(reply);
    }
    if (ej.contains("error")) {
      e.error = gateway_error_from(ej["error"].get<std::string>());
      e.error_detail = ej.value("error_detail", "");
    }
    t.append(std::move(e));
  }
  return t;
}

// ---- HTTP backend

ChatCompletionsBackend::ChatCompletionsBackend(std::string base_url, std::optional<std::string> api_key,
                                               std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_(timeout) {
  if (!api_key_) {
    if (const char* env = std::getenv("IIE_API_KEY")) api_key_ = env;
  }
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url_, m, url_re)) {
    throw GatewayError(GatewayErrorKind::endpoint_unreachable, "bad endpoint URL " + base_url_);
  }
  host_ = m[1].str();
  path_prefix_ = m[2].matched ? m[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

json ChatCompletionsBackend::request_body(const CompletionRequest& request) {
  return json{{"model", request.model_id},
              {"messages", json::array({json{{"role", "user"}, {"content", request.rendered_prompt}}})},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens}};
}

CompletionReply ChatCompletionsBackend::parse_reply_body(std::string_view body) {
  try {
    json j = json::parse(body);
    CompletionReply reply;
    const json& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw GatewayError(GatewayErrorKind::malformed_endpoint_reply, "content is not text");
    reply.text = content.get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
      reply.token_usage = TokenUsage{j["usage"].value("prompt_tokens", 0), j["usage"].value("completion_tokens", 0)};
    }
    return reply;
  } catch (const json::exception& e) {
    throw GatewayError(GatewayErrorKind::malformed_endpoint_reply, std::string("unexpected reply body: ") + e.what());
  }
}

CompletionReply ChatCompletionsBackend::send(const StepContext&, const CompletionRequest& request) {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  httplib::Headers headers;
  if (api_key_) headers.emplace("Authorization", "Bearer " + *api_key_);
  std::string path = path_prefix_.ends_with("/v1") ? path_prefix_ + "/chat/completions"
                                                   : path_prefix_ + "/v1/chat/completions";
  auto res = client.Post(path, headers, request_body(request).dump(), "application/json");
  if (!res) {
    throw GatewayError(GatewayErrorKind::endpoint_unreachable,
                       "POST " + host_ + path + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) throw GatewayError(GatewayErrorKind::rate_limited, "rate limited by " + host_);
  if (res->status >= 500) {
    throw GatewayError(GatewayErrorKind::endpoint_unreachable, "HTTP " + std::to_string(res->status) + " from " + host_);
  }
  if (res->status != 200) {
    throw GatewayError(GatewayErrorKind::malformed_endpoint_reply,
                       "HTTP " + std::to_string(res->status) + " from " + host_ + ": " + res->body.substr(0, 200));
  }
  return parse_reply_body(res->body);
}

// ---- replay backend

std::shared_ptr<ReplayBackend> ReplayBackend::from_json(const json& j) {
  auto backend = std::make_shared<ReplayBackend>();
  const json& replies = j.contains("replies") ? j.at("replies") : j;
  for (const auto& [key, queue] : replies.items()) {
    for (const json& item : queue) {
      if (item.is_string()) {
        backend->script(key, item.get<std::string>());
      } else {
        std::string name = item.at("fail").get<std::string>();
        auto kind = gateway_error_from(name);
        if (!kind) throw std::invalid_argument("unknown failure kind in replay file: " + name);
        backend->script_failure(key, *kind);
      }
    }
  }
  return backend;
}

std::shared_ptr<ReplayBackend> ReplayBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read replay file " + path.string());
  return from_json(json::parse(in));
}

std::shared_ptr<ReplayBackend> ReplayBackend::from_transcript(const Transcript& transcript, bool key_by_run) {
  auto backend = std::make_shared<ReplayBackend>();
  for (const TranscriptEntry& e : transcript.entries()) {
    std::string key = key_by_run && !e.run_id.empty() ? e.run_id + "/" + e.step : e.step;
    if (e.reply) {
      backend->script(key, e.reply->text);
    } else {
      backend->script_failure(key, e.error.value_or(GatewayErrorKind::endpoint_unreachable));
    }
  }
  return backend;
}

void ReplayBackend::script(const std::string& key, std::string reply) {
  std::lock_guard lock(mu_);
  queues_[key].push_back(Scripted{std::move(reply), GatewayErrorKind::endpoint_unreachable});
}

void ReplayBackend::script_failure(const std::string& key, GatewayErrorKind kind) {
  std::lock_guard lock(mu_);
  queues_[key].push_back(Scripted{std::nullopt, kind});
}

CompletionReply ReplayBackend::send(const StepContext& ctx, const CompletionRequest& request) {
  std::lock_guard lock(mu_);
  prompts_.push_back(request.rendered_prompt);
  for (const std::string& key : {ctx.run_id + "/" + ctx.step, ctx.step}) {
    auto q = queues_.find(key);
    if (q == queues_.end()) continue;
    std::size_t& next = cursor_[key];
    if (next >= q->second.size()) continue;
    const Scripted& s = q->second[next++];
    if (!s.text) throw GatewayError(s.failure, "scripted failure for " + key);
    return CompletionReply{*s.text, 0.0, std::nullopt};
  }
  throw GatewayError(GatewayErrorKind::script_exhausted, "no scripted reply left for " + ctx.run_id + "/" + ctx.step);
}

std::size_t ReplayBackend::pending() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [key, q] : queues_) {
    auto c = cursor_.find(key);
    n += q.size() - (c == cursor_.end() ? 0 : c->second);
  }
  return n;
}

std::size_t ReplayBackend::calls() const {
  std::lock_guard lock(mu_);
  return prompts_.size();
}

std::vector<std::string> ReplayBackend::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

// ---- gateway

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayConfig config)
    : backend_(std::move(backend)), config_(std::move(config)), slots_(std::max(1, config_.concurrency)) {
  if (!backend_) throw std::invalid_argument("gateway needs a backend");
  if (config_.max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
}

void Gateway::pace() {
  if (config_.min_interval.count() <= 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(pace_mu_);
    auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_send_);
    next_send_ = slot + config_.min_interval;
  }
  std::this_thread::sleep_until(slot);
}

CompletionReply Gateway::complete(const StepContext& ctx, const std::string& prompt, Transcript& transcript) {
  CompletionRequest request{config_.model_id, prompt, config_.temperature, config_.max_tokens, 1};
  std::optional<GatewayError> last;
  for (int attempt = 1; attempt <= config_.max_retries + 1; ++attempt) {
    request.attempt = attempt;
    TranscriptEntry entry{ctx.run_id, ctx.step, request, std::nullopt, std::nullopt, {}};
    slots_.acquire();
    try {
      pace();
      auto start = std::chrono::steady_clock::now();
      CompletionReply reply = backend_->send(ctx, request);
      reply.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      slots_.release();
      entry.reply = reply;
      transcript.append(std::move(entry));
      return reply;
    } catch (const GatewayError& e) {
      slots_.release();
      entry.error = e.kind();
      entry.error_detail = e.what();
      transcript.append(std::move(entry));
      if (!e.retryable()) throw;
      last = e;
    } catch (...) {
      slots_.release();
      throw;
    }
    if (attempt <= config_.max_retries && config_.backoff_base.count() > 0) {
      std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
    }
  }
  throw GatewayError(last->kind(), ctx.step + ": giving up after " + std::to_string(config_.max_retries + 1) +
                                       " attempts: " + last->what());
}

std::string corrective_line(std::string_view parse_error, std::string_view hint) {
  return "\n\nYour previous reply could not be parsed (" + std::string(parse_error) +
         "). Reply again using exactly this format: " + std::string(hint);
}

CompletionReply Gateway::reprompt_on_parse_failure(const StepContext& ctx, const std::string& prompt,
                                                   std::string_view parse_error, std::string_view hint,
                                                   Transcript& transcript) {
  return complete(ctx, prompt + corrective_line(parse_error, hint), transcript);
}

}  // namespace iie
