#pragma once

// Annotation records shared by the form service and the evaluation: the
// annotator's response, and the answer key kept back from annotators.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iie/triplet.hpp"
#include "json.hpp"

namespace iie {

inline constexpr std::string_view kResponseSchemaVersion = "1";
inline constexpr std::size_t kAttentionChecks = 5;
inline constexpr std::size_t kMaxFreeText = 512;

enum class TripletLabel { factual, deducible, wrong };
enum class Agreement { fully_agree, somewhat_agree, disagree };
enum class TimingLabel { before, after, while_, no_clear_relation };

std::string_view to_string(TripletLabel l);
std::string_view to_string(Agreement a);
std::string_view to_string(TimingLabel t);
std::optional<TripletLabel> triplet_label_from(std::string_view s);
std::optional<Agreement> agreement_from(std::string_view s);
std::optional<TimingLabel> timing_label_from(std::string_view s);
TimingLabel timing_label_of(TemporalTag tag);

struct IcrAnswer {
  Agreement discard_agreement = Agreement::fully_agree;
  std::optional<Agreement> reason_agreement;
  std::optional<Agreement> correction_agreement;
  bool operator==(const IcrAnswer&) const = default;
};

struct AddedTriplet {
  std::size_t sentence = 0;  // index into the form's sentences
  Triplet triplet;
  InferenceType inference_type = InferenceType::fact;
  bool operator==(const AddedTriplet&) const = default;
};

struct MecAnswer {
  std::set<std::string> removals;
  std::vector<AddedTriplet> additions;
  bool operator==(const MecAnswer&) const = default;
};

struct AnnotationResponse {
  std::string annotator_id;
  std::string form_id;
  std::map<std::string, TripletLabel> triplet_classification;
  std::map<std::string, IcrAnswer> icr;
  std::map<std::string, EventState> event_state;
  std::map<std::string, TimingLabel> timing;
  MecAnswer mec;
  std::vector<bool> attention_outcomes;
  bool operator==(const AnnotationResponse&) const = default;
};

// Thrown on records that do not match the response schema. `path` points at
// the offending field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& detail);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

nlohmann::json to_json(const AnnotationResponse& r);
AnnotationResponse annotation_response_from_json(const nlohmann::json& j);

// Per-sentence material the evaluation needs beyond the answers.
struct SentenceKey {
  std::string sentence;
  std::size_t generated = 0;  // triplets produced before validation
  std::vector<Triplet> kept;
  std::vector<Triplet> discarded;
  std::vector<std::string> final_items;  // section e item ids, aligned with kept
  bool operator==(const SentenceKey&) const = default;
};

// The model's side of every question in a form.
struct FormKey {
  std::string form_id;
  std::string dataset;
  std::string model;
  std::map<std::string, TripletLabel> classification;  // wrong = discarded
  std::set<std::string> attention_items;
  std::set<std::string> icr_items;
  std::set<std::string> icr_reason_items;
  std::set<std::string> icr_correction_items;
  std::map<std::string, EventState> event_state;
  std::map<std::string, TimingLabel> timing;
  std::vector<SentenceKey> sentences;
  bool operator==(const FormKey&) const = default;
};

nlohmann::json to_json(const FormKey& k);
FormKey form_key_from_json(const nlohmann::json& j);

// Checks a response against the questions of a form: every question answered,
// no unknown ids, follow-ups only where offered and not after `disagree`.
void check_response_against_key(const AnnotationResponse& r, const FormKey& key);

// Attention outcomes in attention-item order: true when labelled `wrong`.
std::vector<bool> attention_outcomes(const AnnotationResponse& r, const FormKey& key);

}  // namespace iie
