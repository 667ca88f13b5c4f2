#pragma once

// Agreement metrics over filtered annotation responses: majority consensus,
// model-human agreement, Cohen's kappa, polarity scores, removal agreement,
// output overlap, plus the report that ties them together.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iie/annotation.hpp"
#include "iie/stats.hpp"
#include "iie/triplet.hpp"
#include "json.hpp"

namespace iie {

enum class EvaluationErrorKind { empty_denominator, empty_matrix, misaligned };

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(EvaluationErrorKind kind, const std::string& detail);
  EvaluationErrorKind kind() const { return kind_; }

 private:
  EvaluationErrorKind kind_;
};

// Yes/no judge for "do these two triplets say the same thing".
using SemanticOracle = std::function<bool(const Triplet&, const Triplet&)>;

std::vector<AnnotationResponse> filter_attention_checks(const std::vector<AnnotationResponse>& responses);

// Strict plurality winner; a tie for the top count means no consensus.
template <class L>
std::optional<L> majority_label(const std::vector<L>& votes) {
  std::map<L, std::size_t> counts;
  for (const L& v : votes) ++counts[v];
  std::optional<L> best;
  std::size_t top = 0;
  bool tied = false;
  for (auto& [label, n] : counts) {
    if (n > top) {
      best = label;
      top = n;
      tied = false;
    } else if (n == top) {
      tied = true;
    }
  }
  if (tied) return std::nullopt;
  return best;
}

// Share of voters backing the most frequent label (ties count once).
template <class L>
double majority_share(const std::vector<L>& votes) {
  std::map<L, std::size_t> counts;
  for (const L& v : votes) ++counts[v];
  std::size_t top = 0;
  for (auto& [_, n] : counts) top = std::max(top, n);
  return votes.empty() ? 0.0 : static_cast<double>(top) / static_cast<double>(votes.size());
}

// Fraction of questions whose consensus equals the model's answer. Questions
// without consensus are left out of the denominator.
template <class L>
double compute_mha(const std::vector<L>& model, const std::vector<std::optional<L>>& consensus) {
  if (model.size() != consensus.size())
    throw EvaluationError(EvaluationErrorKind::misaligned, "model and consensus lists differ in length");
  std::size_t agree = 0, counted = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (!consensus[i]) continue;
    ++counted;
    if (*consensus[i] == model[i]) ++agree;
  }
  if (counted == 0) throw EvaluationError(EvaluationErrorKind::empty_denominator, "no question has a consensus");
  return static_cast<double>(agree) / static_cast<double>(counted);
}

// counts[model][human]. Cells are doubles so tables of percentages can be fed
// in directly.
struct ConfusionMatrix {
  std::vector<std::vector<double>> counts;

  explicit ConfusionMatrix(std::size_t k = 3) : counts(k, std::vector<double>(k, 0.0)) {}
  std::size_t size() const { return counts.size(); }
  double total() const;
  double row_total(std::size_t r) const;
  double column_total(std::size_t c) const;
  // Every cell as a percentage of the grand total.
  std::vector<std::vector<double>> percentages() const;
};

double cohen_kappa(const ConfusionMatrix& m);

ConfusionMatrix confusion_matrix(const std::vector<TripletLabel>& model, const std::vector<TripletLabel>& human);

struct Polarity {
  double raw_mean = 0.0;    // in [-1, 1]
  double normalized = 0.5;  // (raw_mean + 1) / 2
  bool concur = false;      // raw_mean > 0
};

Polarity polarity_consensus(const std::vector<Agreement>& answers);
// Same score from answer proportions.
Polarity polarity_from_proportions(double fully_agree, double disagree);

// True iff fewer than half of the annotators flagged the triplet.
bool removal_agreement(const std::vector<bool>& flags);

enum class MatchKind { exact, semantic, none };
std::string_view to_string(MatchKind m);

MatchKind classify_match(const Triplet& t, const std::vector<Triplet>& others, const SemanticOracle& oracle);

enum class AdditionCategory { over_pruned, modification, missing_explicit, missing_implicit };
std::string_view to_string(AdditionCategory c);

struct AdditionReport {
  std::vector<AdditionCategory> categories;  // aligned with the input
  std::map<AdditionCategory, std::size_t> counts;
  std::optional<double> overlap_with_discarded;  // absent for no additions
};

AdditionReport categorize_additions(const std::vector<AddedTriplet>& additions, const std::vector<Triplet>& kept,
                                    const std::vector<Triplet>& discarded, const SemanticOracle& oracle);

// Pairs listed in a JSON array of [a, b] canonical strings are equivalent, in
// either order. Anything else is not.
SemanticOracle table_oracle(const nlohmann::json& pairs);

// One response per line. Errors name the line.
std::vector<AnnotationResponse> ingest_responses(std::istream& in);

// ---- report ----

struct SectionAgreement {
  std::size_t questions = 0;
  std::optional<double> mha;
  std::optional<double> kappa;
};

struct ConsensusStrength {
  std::size_t questions = 0;
  double chance = 0.0;
  std::optional<double> mean_majority_share;
  std::optional<TestResult> vs_chance;
};

struct IcrSummary {
  std::size_t items = 0;
  std::optional<double> fully_majority_rate;
  std::optional<double> disagree_majority_rate;
  std::optional<double> average_polarity;
  std::optional<double> average_fully;
  std::optional<double> average_disagree;
  std::optional<double> reason_polarity;
  std::optional<double> correction_polarity;
};

struct OutputSummary {
  std::optional<double> generated_median;
  std::optional<double> additions_median;
  std::optional<double> additions_overlap_with_discarded;
  std::optional<double> removal_rate;
  std::map<AdditionCategory, std::size_t> addition_categories;
  std::map<InferenceType, std::map<AdditionCategory, std::size_t>> additions_by_type;
};

struct GroupReport {
  std::string dataset;
  std::string model;
  std::size_t forms = 0;
  std::size_t responses = 0;  // after filtering
  std::size_t excluded = 0;   // failed an attention check

  SectionAgreement classification;
  SectionAgreement event_state;
  SectionAgreement timing;
  SectionAgreement icr_discard;
  SectionAgreement icr_reason;
  SectionAgreement icr_correction;
  SectionAgreement mec_removal;

  ConfusionMatrix classification_matrix{3};
  std::optional<double> model_wrong_rate;
  std::optional<double> human_wrong_rate;
  std::optional<TestResult> strictness_chi_squared;
  std::optional<double> strictness_binomial_p;
  std::optional<double> model_abstain_rate;  // timing: no clear relation
  std::optional<double> human_abstain_rate;

  IcrSummary icr;
  OutputSummary output;
  std::map<std::string, ConsensusStrength> consensus;  // by section name
};

struct OverlapRow {
  std::string dataset;
  std::string model;
  std::string other_model;
  std::size_t triplets = 0;
  std::map<MatchKind, std::size_t> counts;
};

struct EvaluationReport {
  std::vector<GroupReport> groups;  // sorted by (dataset, model)
  std::vector<OverlapRow> overlaps;
  std::size_t orphan_responses = 0;  // form id not among the keys
};

EvaluationReport evaluate(const std::vector<FormKey>& keys, const std::vector<AnnotationResponse>& responses,
                          const SemanticOracle& oracle);

nlohmann::json to_json(const EvaluationReport& report);
std::string render_report_table(const EvaluationReport& report);

}  // namespace iie
