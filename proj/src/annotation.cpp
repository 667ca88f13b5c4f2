#include "iie/annotation.hpp"

#include <algorithm>

namespace iie {

using json = nlohmann::json;

std::string_view to_string(TripletLabel l) {
  switch (l) {
    case TripletLabel::factual: return "factual";
    case TripletLabel::deducible: return "deducible";
    case TripletLabel::wrong: return "wrong";
  }
  return "?";
}

std::string_view to_string(Agreement a) {
  switch (a) {
    case Agreement::fully_agree: return "fully_agree";
    case Agreement::somewhat_agree: return "somewhat_agree";
    case Agreement::disagree: return "disagree";
  }
  return "?";
}

std::string_view to_string(TimingLabel t) {
  switch (t) {
    case TimingLabel::before: return "before";
    case TimingLabel::after: return "after";
    case TimingLabel::while_: return "while";
    case TimingLabel::no_clear_relation: return "no_clear_relation";
  }
  return "?";
}

std::optional<TripletLabel> triplet_label_from(std::string_view s) {
  for (auto l : {TripletLabel::factual, TripletLabel::deducible, TripletLabel::wrong})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

std::optional<Agreement> agreement_from(std::string_view s) {
  for (auto a : {Agreement::fully_agree, Agreement::somewhat_agree, Agreement::disagree})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

std::optional<TimingLabel> timing_label_from(std::string_view s) {
  for (auto t : {TimingLabel::before, TimingLabel::after, TimingLabel::while_, TimingLabel::no_clear_relation})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

TimingLabel timing_label_of(TemporalTag tag) {
  switch (tag) {
    case TemporalTag::before: return TimingLabel::before;
    case TemporalTag::after: return TimingLabel::after;
    case TemporalTag::while_: return TimingLabel::while_;
    case TemporalTag::none: break;
  }
  return TimingLabel::no_clear_relation;
}

SchemaError::SchemaError(std::string path, const std::string& detail)
    : std::runtime_error(path + ": " + detail), path_(std::move(path)) {}

namespace {

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing");
  return *it;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  auto s = j.get<std::string>();
  if (s.size() > kMaxFreeText) throw SchemaError(path, "longer than " + std::to_string(kMaxFreeText) + " bytes");
  return s;
}

template <class T, class F>
T enum_value(const json& j, const std::string& path, F from) {
  auto v = from(text(j, path));
  if (!v) throw SchemaError(path, "unknown value '" + j.get<std::string>() + "'");
  return *v;
}

template <class T, class F>
std::map<std::string, T> enum_map(const json& j, const std::string& path, F from) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  std::map<std::string, T> out;
  for (auto& [id, v] : j.items()) out[id] = enum_value<T>(v, path + "." + id, from);
  return out;
}

template <class T>
json enum_map_json(const std::map<std::string, T>& m) {
  json j = json::object();
  for (auto& [id, v] : m) j[id] = std::string(to_string(v));
  return j;
}

Triplet triplet_text(const json& j, const std::string& path) {
  ParseOptions opts;
  opts.max_depth = 64;
  try {
    return parse_triplet(text(j, path), opts);
  } catch (const ParseError& e) {
    throw SchemaError(path, e.what());
  }
}

// Additions come either as a canonical string or as separate fields.
Triplet added_triplet(const json& j, const std::string& path) {
  if (j.contains("triplet")) return triplet_text(j["triplet"], path + ".triplet");
  auto subject = normalize_whitespace(text(field(j, path, "subject"), path + ".subject"));
  auto relation = normalize_whitespace(text(field(j, path, "relation"), path + ".relation"));
  std::string object;
  if (j.contains("object") && !j["object"].is_null()) object = normalize_whitespace(text(j["object"], path + ".object"));
  if (subject.empty()) throw SchemaError(path + ".subject", "empty");
  if (relation.empty()) throw SchemaError(path + ".relation", "empty");
  if (object.empty() || object == "<none>") return Triplet::unary(subject, relation);
  return Triplet::make(subject, relation, object);
}

std::vector<Triplet> triplets(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(triplet_text(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json triplets_json(const std::vector<Triplet>& ts) {
  json j = json::array();
  for (auto& t : ts) j.push_back(render_canonical(t));
  return j;
}

std::set<std::string> id_set(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  std::set<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.insert(text(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::optional<Agreement> optional_agreement(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return enum_value<Agreement>(j[key], path + "." + key, agreement_from);
}

}  // namespace

json to_json(const AnnotationResponse& r) {
  json j{{"schema_version", std::string(kResponseSchemaVersion)},
         {"annotator_id", r.annotator_id},
         {"form_id", r.form_id},
         {"triplet_classification", enum_map_json(r.triplet_classification)},
         {"event_state", enum_map_json(r.event_state)},
         {"timing", enum_map_json(r.timing)}};
  json icr = json::object();
  for (auto& [id, a] : r.icr) {
    json item{{"discard_agreement", std::string(to_string(a.discard_agreement))}};
    if (a.reason_agreement) item["reason_agreement"] = std::string(to_string(*a.reason_agreement));
    if (a.correction_agreement) item["correction_agreement"] = std::string(to_string(*a.correction_agreement));
    icr[id] = item;
  }
  j["icr"] = icr;
  json additions = json::array();
  for (auto& a : r.mec.additions)
    additions.push_back({{"sentence", a.sentence},
                         {"triplet", render_canonical(a.triplet)},
                         {"inference_type", std::string(to_string(a.inference_type))}});
  j["mec"] = {{"removals", r.mec.removals}, {"additions", additions}};
  j["attention_outcomes"] = r.attention_outcomes;
  return j;
}

AnnotationResponse annotation_response_from_json(const json& j) {
  const std::string root = "$";
  auto version = text(field(j, root, "schema_version"), "$.schema_version");
  if (version != kResponseSchemaVersion) throw SchemaError("$.schema_version", "unsupported version '" + version + "'");
  AnnotationResponse r;
  r.annotator_id = j.contains("annotator_id") ? text(j["annotator_id"], "$.annotator_id") : "";
  r.form_id = text(field(j, root, "form_id"), "$.form_id");
  r.triplet_classification = enum_map<TripletLabel>(field(j, root, "triplet_classification"),
                                                    "$.triplet_classification", triplet_label_from);
  r.event_state = enum_map<EventState>(field(j, root, "event_state"), "$.event_state", event_state_from);
  r.timing = enum_map<TimingLabel>(field(j, root, "timing"), "$.timing", timing_label_from);
  const json& icr = field(j, root, "icr");
  if (!icr.is_object()) throw SchemaError("$.icr", "expected an object");
  for (auto& [id, item] : icr.items()) {
    std::string path = "$.icr." + id;
    IcrAnswer a;
    a.discard_agreement = enum_value<Agreement>(field(item, path, "discard_agreement"), path + ".discard_agreement",
                                                agreement_from);
    a.reason_agreement = optional_agreement(item, "reason_agreement", path);
    a.correction_agreement = optional_agreement(item, "correction_agreement", path);
    r.icr[id] = a;
  }
  const json& mec = field(j, root, "mec");
  r.mec.removals = id_set(field(mec, "$.mec", "removals"), "$.mec.removals");
  const json& additions = field(mec, "$.mec", "additions");
  if (!additions.is_array()) throw SchemaError("$.mec.additions", "expected an array");
  for (std::size_t i = 0; i < additions.size(); ++i) {
    std::string path = "$.mec.additions[" + std::to_string(i) + "]";
    const json& a = additions[i];
    AddedTriplet added;
    const json& s = field(a, path, "sentence");
    if (!s.is_number_integer() || s.get<long long>() < 0) throw SchemaError(path + ".sentence", "expected a sentence index");
    added.sentence = s.get<std::size_t>();
    added.triplet = added_triplet(a, path);
    added.inference_type =
        enum_value<InferenceType>(field(a, path, "inference_type"), path + ".inference_type", inference_type_from);
    r.mec.additions.push_back(std::move(added));
  }
  const json& att = field(j, root, "attention_outcomes");
  if (!att.is_array() || att.size() != kAttentionChecks)
    throw SchemaError("$.attention_outcomes", "expected " + std::to_string(kAttentionChecks) + " booleans");
  for (auto& b : att) {
    if (!b.is_boolean()) throw SchemaError("$.attention_outcomes", "expected booleans");
    r.attention_outcomes.push_back(b.get<bool>());
  }
  return r;
}

json to_json(const FormKey& k) {
  json sentences = json::array();
  for (auto& s : k.sentences)
    sentences.push_back({{"sentence", s.sentence},
                         {"generated", s.generated},
                         {"kept", triplets_json(s.kept)},
                         {"discarded", triplets_json(s.discarded)},
                         {"final_items", s.final_items}});
  return {{"form_id", k.form_id},
          {"dataset", k.dataset},
          {"model", k.model},
          {"classification", enum_map_json(k.classification)},
          {"attention_items", k.attention_items},
          {"icr_items", k.icr_items},
          {"icr_reason_items", k.icr_reason_items},
          {"icr_correction_items", k.icr_correction_items},
          {"event_state", enum_map_json(k.event_state)},
          {"timing", enum_map_json(k.timing)},
          {"sentences", sentences}};
}

FormKey form_key_from_json(const json& j) {
  const std::string root = "$.key";
  FormKey k;
  k.form_id = text(field(j, root, "form_id"), root + ".form_id");
  k.dataset = text(field(j, root, "dataset"), root + ".dataset");
  k.model = text(field(j, root, "model"), root + ".model");
  k.classification =
      enum_map<TripletLabel>(field(j, root, "classification"), root + ".classification", triplet_label_from);
  k.attention_items = id_set(field(j, root, "attention_items"), root + ".attention_items");
  k.icr_items = id_set(field(j, root, "icr_items"), root + ".icr_items");
  k.icr_reason_items = id_set(field(j, root, "icr_reason_items"), root + ".icr_reason_items");
  k.icr_correction_items = id_set(field(j, root, "icr_correction_items"), root + ".icr_correction_items");
  k.event_state = enum_map<EventState>(field(j, root, "event_state"), root + ".event_state", event_state_from);
  k.timing = enum_map<TimingLabel>(field(j, root, "timing"), root + ".timing", timing_label_from);
  const json& sentences = field(j, root, "sentences");
  if (!sentences.is_array()) throw SchemaError(root + ".sentences", "expected an array");
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::string path = root + ".sentences[" + std::to_string(i) + "]";
    const json& s = sentences[i];
    SentenceKey sk;
    sk.sentence = field(s, path, "sentence").get<std::string>();
    sk.generated = field(s, path, "generated").get<std::size_t>();
    sk.kept = triplets(field(s, path, "kept"), path + ".kept");
    sk.discarded = triplets(field(s, path, "discarded"), path + ".discarded");
    for (auto& id : field(s, path, "final_items")) sk.final_items.push_back(id.get<std::string>());
    k.sentences.push_back(std::move(sk));
  }
  return k;
}

namespace {

template <class A, class B>
void same_ids(const std::map<std::string, A>& answers, const std::map<std::string, B>& questions,
              const std::string& section) {
  for (auto& [id, _] : questions)
    if (!answers.count(id)) throw SchemaError("$." + section + "." + id, "unanswered");
  for (auto& [id, _] : answers)
    if (!questions.count(id)) throw SchemaError("$." + section + "." + id, "unknown item");
}

}  // namespace

void check_response_against_key(const AnnotationResponse& r, const FormKey& key) {
  if (r.form_id != key.form_id) throw SchemaError("$.form_id", "does not match form '" + key.form_id + "'");
  same_ids(r.triplet_classification, key.classification, "triplet_classification");
  same_ids(r.event_state, key.event_state, "event_state");
  same_ids(r.timing, key.timing, "timing");
  std::map<std::string, bool> icr;
  for (auto& id : key.icr_items) icr[id] = true;
  same_ids(r.icr, icr, "icr");
  for (auto& [id, a] : r.icr) {
    std::string path = "$.icr." + id;
    bool open = a.discard_agreement != Agreement::disagree;
    bool wants_reason = open && key.icr_reason_items.count(id);
    bool wants_correction = open && key.icr_correction_items.count(id);
    if (a.reason_agreement && !wants_reason) throw SchemaError(path + ".reason_agreement", "question not shown");
    if (!a.reason_agreement && wants_reason) throw SchemaError(path + ".reason_agreement", "unanswered");
    if (a.correction_agreement && !wants_correction)
      throw SchemaError(path + ".correction_agreement", "question not shown");
    if (!a.correction_agreement && wants_correction) throw SchemaError(path + ".correction_agreement", "unanswered");
  }
  std::set<std::string> finals;
  for (auto& s : key.sentences) finals.insert(s.final_items.begin(), s.final_items.end());
  for (auto& id : r.mec.removals)
    if (!finals.count(id)) throw SchemaError("$.mec.removals", "unknown item '" + id + "'");
  for (std::size_t i = 0; i < r.mec.additions.size(); ++i)
    if (r.mec.additions[i].sentence >= key.sentences.size())
      throw SchemaError("$.mec.additions[" + std::to_string(i) + "].sentence", "no such sentence");
}

std::vector<bool> attention_outcomes(const AnnotationResponse& r, const FormKey& key) {
  std::vector<bool> out;
  for (auto& id : key.attention_items) {
    auto it = r.triplet_classification.find(id);
    out.push_back(it != r.triplet_classification.end() && it->second == TripletLabel::wrong);
  }
  return out;
}

}  // namespace iie
