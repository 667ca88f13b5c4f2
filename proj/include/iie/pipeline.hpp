#pragma once

// Per-sentence extraction pipeline: entities, explicit and implicit triplets,
// self-critique with corrections, premises, event/state grounding and
// pairwise temporal relations, then graph assembly.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iie/kg.hpp"
#include "iie/llm.hpp"
#include "iie/triplet.hpp"
#include "json.hpp"

namespace iie {

enum class RecordStatus { candidate, validated, discarded_duplicate, discarded_rejected };

std::string_view to_string(RecordStatus s);

struct ChallengeRound {
  Triplet triplet;  // what was challenged in this round
  Verdict verdict = Verdict::yes;
  std::optional<std::string> explanation;
  std::optional<Triplet> correction;
};

// One generated triplet with its history. A correction chain is a single
// record: `triplet` is the latest version, rounds hold every challenge.
struct ExtractionRecord {
  Triplet triplet;
  Provenance provenance;
  RecordStatus status = RecordStatus::candidate;
  std::vector<ChallengeRound> challenge_rounds;
  std::vector<Triplet> premises;
};

struct RunLint {
  std::string step;
  std::string message;
};

struct SentenceRun {
  std::string run_id;
  std::string sentence;
  std::vector<Entity> entities;
  std::vector<ExtractionRecord> records;
  std::vector<TaggedTriplet> event_state_tags;
  // Raw tag for each ordered pair of validated triplets.
  std::vector<TaggedPair> pair_tags;
  // Reconciled relation per unordered pair (first precedes second in the
  // validated order), including `none`.
  std::vector<TemporalRelation> temporal_relations;
  std::vector<RunLint> lints;
  Transcript transcript;

  std::vector<const ExtractionRecord*> validated() const;
};

nlohmann::json to_json(const SentenceRun& run);
SentenceRun sentence_run_from_json(const nlohmann::json& j);

struct PipelineConfig {
  int max_strikes = 3;
  std::size_t pair_batch_size = 12;
  // Put the two orders of a pair into different batches.
  bool split_pair_orders = true;
  int max_depth = 5;
  int explanation_word_cap = 20;
};

enum class PipelineErrorKind { empty_sentence, echo_mismatch, aborted };

class PipelineError : public std::runtime_error {
 public:
  PipelineError(PipelineErrorKind kind, const std::string& detail);
  PipelineErrorKind kind() const { return kind_; }

 private:
  PipelineErrorKind kind_;
};

// Raised by run_sentence; carries everything produced before the failure.
class PipelineAborted : public PipelineError {
 public:
  PipelineAborted(std::string step, const std::string& cause, SentenceRun partial);
  const std::string& step() const { return step_; }
  const SentenceRun& partial() const { return partial_; }

 private:
  std::string step_;
  SentenceRun partial_;
};

struct SentenceResult {
  SentenceRun run;
  TwoTierKG kg;
};

// (tag of a->b, tag of b->a) -> tag of the unordered pair read as a->b.
TemporalTag reconcile_relation_pair(TemporalTag ab, TemporalTag ba);

// Ordered pairs (i, j), i != j, grouped into prompts. With `split_orders`
// forward (i < j) and reverse (i > j) pairs are batched separately.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> plan_pair_batches(std::size_t n, std::size_t batch_size,
                                                                                 bool split_orders);

class Pipeline {
 public:
  Pipeline(Gateway& gateway, const PromptLibrary& prompts, PipelineConfig config = {});

  // The individual steps. `run` supplies the sentence and collects the
  // transcript and lints.
  std::vector<Entity> extract_entities(SentenceRun& run);
  std::vector<ExtractionRecord> extract_explicit(SentenceRun& run, const std::vector<Entity>& entities);
  std::vector<ExtractionRecord> extract_implicit(SentenceRun& run, const std::vector<Entity>& entities);
  bool remove_duplicate(SentenceRun& run, const Triplet& candidate, const std::vector<Triplet>& accepted);
  JudgmentReply challenge_inference(SentenceRun& run, const Triplet& candidate);
  std::optional<Triplet> correct_inference(SentenceRun& run, const Triplet& discarded, const std::string& explanation);
  std::vector<Triplet> explain_inference(SentenceRun& run, const Triplet& validated,
                                         const std::vector<Triplet>& explicit_triplets);
  std::vector<TaggedTriplet> classify_and_ground(SentenceRun& run, const std::vector<Triplet>& validated);
  std::map<std::pair<std::size_t, std::size_t>, TemporalTag> extract_pairwise_relations(
      SentenceRun& run, const std::vector<Triplet>& validated);

  // Steps 4-6 for every implicit candidate, in generation order.
  void validate_candidates(SentenceRun& run, std::vector<ExtractionRecord>& candidates);

  SentenceResult run_sentence(const std::string& run_id, const std::string& sentence);

  const PipelineConfig& config() const { return config_; }

 private:
  ParseOptions parse_options(std::vector<std::string>* notes) const;
  void note_all(SentenceRun& run, const std::string& step, const std::vector<std::string>& notes);

  Gateway& gateway_;
  const PromptLibrary& prompts_;
  PipelineConfig config_;
};

// Records accepted into the graph, with audit trails.
std::vector<FinalRecord> final_records(const SentenceRun& run);
TwoTierKG build_graph(const SentenceRun& run, const std::string& model_id);

}  // namespace iie
