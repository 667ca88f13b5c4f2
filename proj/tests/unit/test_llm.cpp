#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "iie/llm.hpp"
#include "iie/triplet.hpp"
#include "test_support.hpp"

using namespace iie;

namespace {

PromptLibrary library() { return PromptLibrary::load(std::string(IIE_ASSET_DIR) + "/prompts"); }

GatewayConfig fast_config() {
  GatewayConfig c;
  c.backoff_base = std::chrono::milliseconds(0);
  return c;
}

const std::string kJesse =
    "Jesse was pet sitting for Addison, so Jesse came to Addison’s house and walked their dog.";

}  // namespace

TEST(Prompts, AllTemplatesLoadWithDeclaredPlaceholders) {
  auto lib = library();
  for (std::size_t i = 0; i < kPromptCount; ++i) {
    auto id = static_cast<PromptId>(i);
    EXPECT_FALSE(lib.get(id).body.empty()) << to_string(id);
    EXPECT_EQ(prompt_id_from(to_string(id)), id);
    EXPECT_NE(lib.get(id).body.back(), '\n');
  }
}

TEST(Prompts, EntityExtractionEndsWithSentence) {
  auto out = library().render(PromptId::entity_extraction, {{"context sentence", "S"}});
  EXPECT_TRUE(out.ends_with("Text: S\nEntities:")) << out.substr(out.size() - 40);
}

TEST(Prompts, RenderedBodyMatchesAssetAfterSubstitution) {
  // Substituting the placeholder text back in yields the asset byte for byte.
  std::string asset = test::prompt_asset("explicit_extraction");
  auto out = library().render(PromptId::explicit_extraction,
                              {{"context sentence", "[context sentence]"}, {"extracted entities", "[extracted entities]"}});
  EXPECT_EQ(out + "\n", asset);

  auto jesse = library().render(PromptId::explicit_extraction,
                                {{"context sentence", kJesse}, {"extracted entities", "[Jesse, Addison, house, dog]"}});
  EXPECT_TRUE(jesse.ends_with("Text: " + kJesse + "\nEntities: [Jesse, Addison, house, dog]\nTriplets:"));
}

TEST(Prompts, BindingErrors) {
  auto lib = library();
  try {
    lib.render(PromptId::inference_challenge, {{"context sentence", "S"}});
    FAIL();
  } catch (const PromptError& e) {
    EXPECT_EQ(e.kind(), PromptErrorKind::missing_binding);
    EXPECT_EQ(e.name(), "implicit triplet to analyze");
  }
  try {
    lib.render(PromptId::entity_extraction, {{"context sentence", "S"}, {"bogus", "x"}});
    FAIL();
  } catch (const PromptError& e) {
    EXPECT_EQ(e.kind(), PromptErrorKind::unknown_placeholder);
  }
}

TEST(Prompts, NoRecursiveExpansion) {
  auto out = library().render(PromptId::entity_extraction, {{"context sentence", "[context sentence] [x]"}});
  EXPECT_TRUE(out.ends_with("Text: [context sentence] [x]\nEntities:"));
}

TEST(Prompts, MismatchedAssetRejected) {
  auto dir = std::filesystem::temp_directory_path() / "iie_prompt_mismatch";
  std::filesystem::create_directories(dir);
  for (const auto& entry : std::filesystem::directory_iterator(std::string(IIE_ASSET_DIR) + "/prompts")) {
    std::filesystem::copy_file(entry.path(), dir / entry.path().filename(),
                               std::filesystem::copy_options::overwrite_existing);
  }
  std::ofstream(dir / "duplicate_removal.txt") << "Text: [context sentence]\nCandidate: [something else]\n";
  try {
    PromptLibrary::load(dir);
    FAIL();
  } catch (const PromptError& e) {
    EXPECT_EQ(e.kind(), PromptErrorKind::placeholder_mismatch);
  }
  std::filesystem::remove(dir / "duplicate_removal.txt");
  try {
    PromptLibrary::load(dir);
    FAIL();
  } catch (const PromptError& e) {
    EXPECT_EQ(e.kind(), PromptErrorKind::missing_asset);
  }
  std::filesystem::remove_all(dir);
}

TEST(Gateway, ScriptedReply) {
  auto replay = std::make_shared<ReplayBackend>();
  replay->script("inference_challenge", "yes");
  Gateway gw(replay, fast_config());
  Transcript t;
  EXPECT_EQ(gw.complete({"r1", "inference_challenge"}, "prompt", t).text, "yes");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.entries()[0].request.attempt, 1);
}

TEST(Gateway, RetriesTransportFailures) {
  auto replay = std::make_shared<ReplayBackend>();
  replay->script_failure("s", GatewayErrorKind::endpoint_unreachable);
  replay->script_failure("s", GatewayErrorKind::rate_limited);
  replay->script("s", "ok");
  Gateway gw(replay, fast_config());
  Transcript t;
  EXPECT_EQ(gw.complete({"r", "s"}, "p", t).text, "ok");
  auto entries = t.entries();
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[2].request.attempt, 3);
  EXPECT_TRUE(entries[0].error.has_value());
  EXPECT_TRUE(entries[2].reply.has_value());
}

TEST(Gateway, GivesUpAfterCap) {
  auto replay = std::make_shared<ReplayBackend>();
  for (int i = 0; i < 4; ++i) replay->script_failure("s", GatewayErrorKind::endpoint_unreachable);
  replay->script("s", "never reached");
  Gateway gw(replay, fast_config());
  Transcript t;
  try {
    gw.complete({"r", "s"}, "p", t);
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayErrorKind::endpoint_unreachable);
  }
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(replay->pending(), 1u);
}

TEST(Gateway, RateLimitedAfterRetries) {
  auto replay = std::make_shared<ReplayBackend>();
  for (int i = 0; i < 4; ++i) replay->script_failure("s", GatewayErrorKind::rate_limited);
  Gateway gw(replay, fast_config());
  Transcript t;
  try {
    gw.complete({"r", "s"}, "p", t);
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayErrorKind::rate_limited);
  }
}

TEST(Gateway, MalformedReplyNotRetried) {
  auto replay = std::make_shared<ReplayBackend>();
  replay->script_failure("s", GatewayErrorKind::malformed_endpoint_reply);
  replay->script("s", "ok");
  Gateway gw(replay, fast_config());
  Transcript t;
  EXPECT_THROW(gw.complete({"r", "s"}, "p", t), GatewayError);
  EXPECT_EQ(t.size(), 1u);
}

TEST(Gateway, RunScopedKeyWins) {
  auto replay = std::make_shared<ReplayBackend>();
  replay->script("s", "generic");
  replay->script("r9/s", "specific");
  Gateway gw(replay, fast_config());
  Transcript t;
  EXPECT_EQ(gw.complete({"r9", "s"}, "p", t).text, "specific");
  EXPECT_EQ(gw.complete({"r9", "s"}, "p", t).text, "generic");
  EXPECT_THROW(gw.complete({"r9", "s"}, "p", t), GatewayError);
}

TEST(Gateway, RepromptRecoversOnce) {
  auto replay = std::make_shared<ReplayBackend>();
  replay->script("implicit_extraction", "Here are some thoughts without any structure.");
  replay->script("implicit_extraction", "[(Addison, livesIn, house)]");
  Gateway gw(replay, fast_config());
  Transcript t;
  auto list = gw.complete_parsed({"r", "implicit_extraction"}, "PROMPT", format_hint(PromptId::implicit_extraction), t,
                                 [](const std::string& s) { return parse_triplet_list(s); });
  ASSERT_EQ(list.items.size(), 1u);
  auto prompts = replay->prompts();
  ASSERT_EQ(prompts.size(), 2u);
  EXPECT_EQ(prompts[0], "PROMPT");
  EXPECT_TRUE(prompts[1].starts_with("PROMPT\n\nYour previous reply could not be parsed"));
  EXPECT_NE(prompts[1].find(format_hint(PromptId::implicit_extraction)), std::string::npos);
}

TEST(Gateway, RepromptNotUsedWhenFirstReplyParses) {
  auto replay = std::make_shared<ReplayBackend>();
  replay->script("s", "yes");
  Gateway gw(replay, fast_config());
  Transcript t;
  auto j = gw.complete_parsed({"r", "s"}, "p", "yes or no", t, [](const std::string& s) { return parse_judgment(s); });
  EXPECT_EQ(j.verdict, Verdict::yes);
  EXPECT_EQ(replay->calls(), 1u);
}

TEST(Gateway, SecondParseFailureIsTerminal) {
  auto replay = std::make_shared<ReplayBackend>();
  replay->script("s", "perhaps");
  replay->script("s", "still unsure");
  Gateway gw(replay, fast_config());
  Transcript t;
  try {
    gw.complete_parsed({"r", "s"}, "p", "yes or no", t, [](const std::string& s) { return parse_judgment(s); });
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayErrorKind::format_unrecoverable);
  }
  EXPECT_EQ(t.size(), 2u);
}

TEST(Gateway, ConcurrencyCapHolds) {
  class SlowBackend : public Backend {
   public:
    CompletionReply send(const StepContext&, const CompletionRequest&) override {
      int now = ++in_flight;
      int seen = peak.load();
      while (now > seen && !peak.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      --in_flight;
      return {"ok", 0, std::nullopt};
    }
    std::string endpoint() const override { return "slow"; }
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
  };
  auto backend = std::make_shared<SlowBackend>();
  GatewayConfig config = fast_config();
  config.concurrency = 2;
  Gateway gw(backend, config);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&gw, i] {
      Transcript t;
      gw.complete({"r" + std::to_string(i), "s"}, "p", t);
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_LE(backend->peak.load(), 2);
  EXPECT_GE(backend->peak.load(), 1);
}

TEST(Gateway, MinIntervalSpacesRequests) {
  auto replay = std::make_shared<ReplayBackend>();
  for (int i = 0; i < 3; ++i) replay->script("s", "ok");
  GatewayConfig config = fast_config();
  config.min_interval = std::chrono::milliseconds(20);
  Gateway gw(replay, config);
  Transcript t;
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 3; ++i) gw.complete({"r", "s"}, "p", t);
  EXPECT_GE(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(40));
}

TEST(Transcript, JsonRoundTripAndReplay) {
  auto replay = std::make_shared<ReplayBackend>();
  replay->script_failure("a", GatewayErrorKind::endpoint_unreachable);
  replay->script("a", "first");
  replay->script("b", "second");
  Gateway gw(replay, fast_config());
  Transcript t;
  gw.complete({"r", "a"}, "pa", t);
  gw.complete({"r", "b"}, "pb", t);
  auto back = Transcript::from_json(t.to_json());
  EXPECT_EQ(back.to_json(), t.to_json());

  Gateway again(ReplayBackend::from_transcript(back), fast_config());
  Transcript t2;
  EXPECT_EQ(again.complete({"r", "a"}, "pa", t2).text, "first");
  EXPECT_EQ(again.complete({"r", "b"}, "pb", t2).text, "second");
  EXPECT_EQ(t2.size(), 3u);
}

TEST(ChatBackend, WireFormat) {
  CompletionRequest req{"gpt-x", "hello", 0.0, 64, 1};
  auto body = ChatCompletionsBackend::request_body(req);
  EXPECT_EQ(body["model"], "gpt-x");
  EXPECT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(body["max_tokens"], 64);

  auto reply = ChatCompletionsBackend::parse_reply_body(
      R"({"choices":[{"message":{"role":"assistant","content":"yes"}}],"usage":{"prompt_tokens":10,"completion_tokens":1}})");
  EXPECT_EQ(reply.text, "yes");
  ASSERT_TRUE(reply.token_usage);
  EXPECT_EQ(reply.token_usage->prompt_tokens, 10);
  try {
    ChatCompletionsBackend::parse_reply_body(R"({"choices":[]})");
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayErrorKind::malformed_endpoint_reply);
  }
}

TEST(ChatBackend, UnreachableEndpointIsRetryable) {
  ChatCompletionsBackend backend("http://127.0.0.1:1", std::string("k"), std::chrono::seconds(1));
  try {
    backend.send({"r", "s"}, CompletionRequest{});
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayErrorKind::endpoint_unreachable);
    EXPECT_TRUE(e.retryable());
  }
}
