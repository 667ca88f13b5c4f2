#pragma once

// Annotation forms built from pipeline runs. A bundle holds five sections per
// sentence (all generated triplets, discards, validated triplets, triplet
// pairs, final set) plus attention checks; the answer key stays server-side.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "iie/annotation.hpp"
#include "iie/nli.hpp"
#include "iie/pipeline.hpp"
#include "json.hpp"

namespace iie {

struct TripletItem {
  std::string id;
  Triplet triplet;
  bool operator==(const TripletItem&) const = default;
};

struct DiscardItem {
  std::string id;
  Triplet triplet;
  std::optional<std::string> reason;
  std::optional<Triplet> correction;
  bool ask_reason = false;
  bool ask_correction = false;
  bool operator==(const DiscardItem&) const = default;
};

struct PairItem {
  std::string id;
  Triplet first;
  Triplet second;
  bool operator==(const PairItem&) const = default;
};

struct BundleSentence {
  std::string run_id;
  std::string sentence;
  std::vector<TripletItem> section_a;
  std::vector<DiscardItem> section_b;
  std::vector<TripletItem> section_c;
  std::vector<PairItem> section_d;
  std::vector<TripletItem> section_e;
  bool operator==(const BundleSentence&) const = default;
};

struct AttentionItem {
  std::string id;
  std::size_t sentence = 0;
  std::size_t position = 0;  // index in that sentence's section a
  Triplet triplet;
  bool operator==(const AttentionItem&) const = default;
};

struct AnnotationBundle {
  std::string form_id;
  std::vector<BundleSentence> sentences;
  std::vector<AttentionItem> attention_items;
  FormKey key;
  bool operator==(const AnnotationBundle&) const = default;
};

struct FormsConfig {
  std::string dataset = "default";
  std::string model = "mock";
  std::size_t sentences_per_form = 5;
  // Accept a final form with fewer sentences instead of failing.
  bool allow_short = false;
  // Per sentence: every related pair plus this many unrelated pairs per
  // related one (sampled).
  std::size_t unrelated_pairs_per_related = 1;
};

class FormsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Obviously false triplets used as attention checks.
const std::vector<Triplet>& attention_pool();

// Uniform integer in [0, n) by rejection sampling, identical on every
// platform (std::uniform_int_distribution is not).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

// One form from exactly `sentences_per_form` runs (fewer with allow_short).
AnnotationBundle generate_form_bundle(const std::vector<SentenceRun>& runs, std::uint64_t seed,
                                      const FormsConfig& config = {}, const std::string& form_id = "");

// Splits runs into consecutive forms named <prefix>-1, <prefix>-2, ...
std::vector<AnnotationBundle> generate_forms(const std::vector<SentenceRun>& runs, std::uint64_t seed,
                                             const FormsConfig& config, const std::string& prefix);

nlohmann::json to_json(const AnnotationBundle& bundle);  // includes the key
AnnotationBundle annotation_bundle_from_json(const nlohmann::json& j);
// What annotators see: no key, no attention markers, no model labels.
nlohmann::json public_view(const AnnotationBundle& bundle);

// Section a items of a form as NLI items, labelled by the pipeline and by the
// consensus of `responses` (already filtered). Scores are left empty.
std::vector<NliItem> nli_items(const AnnotationBundle& bundle, const std::vector<AnnotationResponse>& responses,
                               const VerbalizerConfig& verbalizer = {});

}  // namespace iie
