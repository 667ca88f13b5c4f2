#pragma once

// NLI probe: triplets are verbalized into hypotheses, scored against their
// context sentence by an external NLI service, and averaged per label group.

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iie/annotation.hpp"
#include "iie/triplet.hpp"
#include "iie/verbalizer.hpp"
#include "json.hpp"

namespace iie {

inline constexpr double kProbabilitySumTolerance = 1e-6;

struct NliScore {
  double p_ent = 0.0;
  double p_neu = 0.0;
  double p_con = 0.0;
  bool operator==(const NliScore&) const = default;
};

enum class NliErrorKind { endpoint_unreachable, non_probabilistic_reply };

class NliError : public std::runtime_error {
 public:
  NliError(NliErrorKind kind, const std::string& detail);
  NliErrorKind kind() const { return kind_; }

 private:
  NliErrorKind kind_;
};

// Checks each value is in [0, 1] and the sum is within tolerance of 1, then
// rescales to sum exactly 1.
NliScore make_nli_score(double entailment, double neutral, double contradiction);

// Strict argmax; a tie for the top probability is not entailment.
bool entailment_is_argmax(const NliScore& s);

struct HypothesisPair {
  std::string premise;
  std::string hypothesis;
  bool operator==(const HypothesisPair&) const = default;
};

std::vector<HypothesisPair> build_hypothesis_pairs(const std::string& sentence, const std::vector<Triplet>& triplets,
                                                   const VerbalizerConfig& config = {});

class NliScorer {
 public:
  virtual ~NliScorer() = default;
  virtual NliScore score(const HypothesisPair& pair) = 0;
};

// POST {base}/score with {premise, hypothesis}; reply {entailment, neutral,
// contradiction}.
class HttpNliScorer : public NliScorer {
 public:
  explicit HttpNliScorer(std::string base_url, std::chrono::seconds timeout = std::chrono::seconds(60));
  NliScore score(const HypothesisPair& pair) override;

  static nlohmann::json request_body(const HypothesisPair& pair);
  static NliScore parse_reply_body(std::string_view body);

 private:
  std::string host_;
  std::string path_;
  std::chrono::seconds timeout_;
};

// Replies looked up by hypothesis, with an optional fallback. Values are
// passed through make_nli_score, so bad triples fail the same way.
//   {"scores": {"<hypothesis>": [e, n, c]}, "default": [e, n, c]}
class ScriptedNliScorer : public NliScorer {
 public:
  static std::shared_ptr<ScriptedNliScorer> from_json(const nlohmann::json& j);
  void set(const std::string& hypothesis, std::array<double, 3> raw);
  void set_default(std::array<double, 3> raw) { fallback_ = raw; }
  NliScore score(const HypothesisPair& pair) override;
  std::size_t calls() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::array<double, 3>> scores_;
  std::optional<std::array<double, 3>> fallback_;
  std::size_t calls_ = 0;
};

// Scores every pair with up to `concurrency` requests in flight. Results keep
// input order.
std::vector<NliScore> score_pairs(NliScorer& scorer, const std::vector<HypothesisPair>& pairs,
                                  std::size_t concurrency = 4);

// One scored triplet with the labels it is grouped by.
struct NliItem {
  std::string dataset;
  std::string model;
  std::string item_id;
  HypothesisPair pair;
  TripletLabel pipeline_label = TripletLabel::factual;  // wrong = discarded
  std::optional<TripletLabel> human_label;              // absent without consensus
  NliScore score;
};

struct GroupAggregate {
  std::string dataset;
  std::string model;
  std::string group;  // Factual / Deducible / Wrong, or A / B
  double mean_p_ent = 0.0;
  double mean_p_neu = 0.0;
  double mean_p_con = 0.0;
  double entail_rate = 0.0;
  std::size_t n = 0;
};

enum class Grouping { by_human_label, by_pipeline_label };

// Ordered by dataset, model, then label. Empty groups are left out.
std::vector<GroupAggregate> aggregate_check(const std::vector<NliItem>& items, Grouping grouping);

struct DisagreementGroups {
  std::vector<std::size_t> group_a;  // human factual/deducible, pipeline discarded
  std::vector<std::size_t> group_b;  // human wrong, pipeline kept
};

DisagreementGroups select_disagreement_groups(const std::vector<NliItem>& items);
std::vector<GroupAggregate> aggregate_disagreement(const std::vector<NliItem>& items);

struct NliReport {
  std::vector<GroupAggregate> by_human;
  std::vector<GroupAggregate> by_pipeline;
  std::vector<GroupAggregate> disagreement;
  std::vector<NliItem> group_a_items;
  std::vector<NliItem> group_b_items;
};

NliReport probe_report(const std::vector<NliItem>& items);
nlohmann::json to_json(const NliReport& report);
std::string render_nli_table(const NliReport& report);

}  // namespace iie
