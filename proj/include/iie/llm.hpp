#pragma once

// Chat-completion client: prompt templates loaded from asset files, retrying
// gateway with transcript capture, an HTTP backend and a scripted replay
// backend for tests.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace iie {

enum class PromptId {
  entity_extraction,
  explicit_extraction,
  implicit_extraction,
  inference_challenge,
  inference_correction,
  inference_explanation,
  duplicate_removal,
  event_state_grounding,
  temporal_relations,
};

inline constexpr std::size_t kPromptCount = 9;

std::string_view to_string(PromptId id);
std::optional<PromptId> prompt_id_from(std::string_view s);
// Placeholder names (without brackets) each template must bind.
const std::vector<std::string>& declared_parameters(PromptId id);
// One line describing the reply format, used by the corrective re-prompt.
std::string_view format_hint(PromptId id);

enum class PromptErrorKind { missing_binding, unknown_placeholder, missing_asset, placeholder_mismatch };

class PromptError : public std::runtime_error {
 public:
  PromptError(PromptErrorKind kind, const std::string& name, const std::string& detail);
  PromptErrorKind kind() const { return kind_; }
  // Placeholder or asset the error is about.
  const std::string& name() const { return name_; }

 private:
  PromptErrorKind kind_;
  std::string name_;
};

struct PromptTemplate {
  PromptId id = PromptId::entity_extraction;
  std::string body;
};

using Bindings = std::map<std::string, std::string>;

// Placeholders are "[name]" tokens drawn from the declared set. Substitution
// is literal and single-pass, so bound text is never re-expanded.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

class PromptLibrary {
 public:
  // Reads <dir>/<id>.txt for every template; one trailing newline is dropped.
  static PromptLibrary load(const std::filesystem::path& dir);
  static std::filesystem::path default_dir();

  const PromptTemplate& get(PromptId id) const { return templates_.at(id); }
  std::string render(PromptId id, const Bindings& bindings) const { return render_prompt(get(id), bindings); }

 private:
  std::map<PromptId, PromptTemplate> templates_;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  bool operator==(const TokenUsage&) const = default;
};

struct CompletionRequest {
  std::string model_id;
  std::string rendered_prompt;
  double temperature = 0.0;
  int max_tokens = 1024;
  int attempt = 1;
};

struct CompletionReply {
  std::string text;
  double latency_ms = 0.0;
  std::optional<TokenUsage> token_usage;
};

// Identifies one pipeline call for logging and replay lookup.
struct StepContext {
  std::string run_id;
  std::string step;
};

enum class GatewayErrorKind {
  endpoint_unreachable,
  rate_limited,
  malformed_endpoint_reply,
  format_unrecoverable,
  script_exhausted,
};

std::string_view to_string(GatewayErrorKind k);
std::optional<GatewayErrorKind> gateway_error_from(std::string_view s);

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& detail);
  GatewayErrorKind kind() const { return kind_; }
  bool retryable() const {
    return kind_ == GatewayErrorKind::endpoint_unreachable || kind_ == GatewayErrorKind::rate_limited;
  }

 private:
  GatewayErrorKind kind_;
};

struct TranscriptEntry {
  std::string run_id;
  std::string step;
  CompletionRequest request;
  std::optional<CompletionReply> reply;
  std::optional<GatewayErrorKind> error;
  std::string error_detail;
};

// Append-only record of every attempt made for one sentence run.
class Transcript {
 public:
  Transcript() = default;
  Transcript(const Transcript& other);
  Transcript& operator=(const Transcript& other);

  void append(TranscriptEntry entry);
  std::vector<TranscriptEntry> entries() const;
  std::size_t size() const;

  nlohmann::json to_json() const;
  static Transcript from_json(const nlohmann::json& j);

 private:
  mutable std::mutex mu_;
  std::vector<TranscriptEntry> entries_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  // Throws GatewayError on failure.
  virtual CompletionReply send(const StepContext& ctx, const CompletionRequest& request) = 0;
  // Endpoint key used for per-endpoint rate limiting.
  virtual std::string endpoint() const = 0;
};

// POST {base}/v1/chat/completions with the prompt as a single user message.
// The bearer token comes from IIE_API_KEY when set.
class ChatCompletionsBackend : public Backend {
 public:
  explicit ChatCompletionsBackend(std::string base_url, std::optional<std::string> api_key = std::nullopt,
                                  std::chrono::seconds timeout = std::chrono::seconds(120));
  CompletionReply send(const StepContext& ctx, const CompletionRequest& request) override;
  std::string endpoint() const override { return base_url_; }

  static nlohmann::json request_body(const CompletionRequest& request);
  // Extracts choices[0].message.content and usage; throws MalformedEndpointReply.
  static CompletionReply parse_reply_body(std::string_view body);

 private:
  std::string base_url_;
  std::string path_prefix_;
  std::string host_;
  std::optional<std::string> api_key_;
  std::chrono::seconds timeout_;
};

// Scripted replies keyed by step id, consumed first-in first-out. A key
// "<run_id>/<step>" takes precedence over a bare "<step>". File format:
//   {"replies": {"<key>": ["text", {"fail": "endpoint_unreachable"}, ...]}}
class ReplayBackend : public Backend {
 public:
  ReplayBackend() = default;
  static std::shared_ptr<ReplayBackend> from_json(const nlohmann::json& j);
  static std::shared_ptr<ReplayBackend> from_file(const std::filesystem::path& path);
  // Replays successful and failed attempts in transcript order.
  static std::shared_ptr<ReplayBackend> from_transcript(const Transcript& transcript, bool key_by_run = true);

  void script(const std::string& key, std::string reply);
  void script_failure(const std::string& key, GatewayErrorKind kind);

  CompletionReply send(const StepContext& ctx, const CompletionRequest& request) override;
  std::string endpoint() const override { return "replay"; }

  std::size_t pending() const;
  std::size_t calls() const;
  // Prompts received, in order.
  std::vector<std::string> prompts() const;

 private:
  struct Scripted {
    std::optional<std::string> text;
    GatewayErrorKind failure = GatewayErrorKind::endpoint_unreachable;
  };
  mutable std::mutex mu_;
  std::map<std::string, std::vector<Scripted>> queues_;
  std::map<std::string, std::size_t> cursor_;
  std::vector<std::string> prompts_;
};

struct GatewayConfig {
  std::string model_id = "mock";
  double temperature = 0.0;
  int max_tokens = 1024;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  int concurrency = 4;
  std::chrono::milliseconds min_interval{0};
};

class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, GatewayConfig config);

  // Sends one prompt with retries; every attempt lands in `transcript`.
  CompletionReply complete(const StepContext& ctx, const std::string& prompt, Transcript& transcript);

  // Re-issues `prompt` once with a corrective line naming the expected format.
  CompletionReply reprompt_on_parse_failure(const StepContext& ctx, const std::string& prompt,
                                            std::string_view parse_error, std::string_view hint,
                                            Transcript& transcript);

  // complete() then parse(); on ParseError one corrective re-prompt, after
  // which a second failure raises FormatUnrecoverable.
  template <class Parse>
  auto complete_parsed(const StepContext& ctx, const std::string& prompt, std::string_view hint,
                       Transcript& transcript, Parse&& parse) -> decltype(parse(std::string())) {
    CompletionReply first = complete(ctx, prompt, transcript);
    std::string error;
    try {
      return parse(first.text);
    } catch (const std::exception& e) {
      error = e.what();
    }
    CompletionReply second = reprompt_on_parse_failure(ctx, prompt, error, hint, transcript);
    try {
      return parse(second.text);
    } catch (const std::exception& e) {
      throw GatewayError(GatewayErrorKind::format_unrecoverable,
                         ctx.step + ": reply unparseable after re-prompt: " + e.what());
    }
  }

  const GatewayConfig& config() const { return config_; }

 private:
  void pace();

  std::shared_ptr<Backend> backend_;
  GatewayConfig config_;
  std::counting_semaphore<1 << 16> slots_;
  std::mutex pace_mu_;
  std::chrono::steady_clock::time_point next_send_{};
};

std::string corrective_line(std::string_view parse_error, std::string_view hint);

}  // namespace iie
