#include "iie/forms.hpp"

#include <limits>
#include <map>
#include <set>

#include "iie/evaluation.hpp"
#include "iie/kg.hpp"

namespace iie {

using json = nlohmann::json;

const std::vector<Triplet>& attention_pool() {
  static const std::vector<Triplet> pool{
      Triplet::make("moon", "isMadeOf", "cheese"),   Triplet::make("chair", "eats", "breakfast"),
      Triplet::make("river", "singsIn", "opera"),    Triplet::make("pencil", "drives", "truck"),
      Triplet::make("cloud", "owns", "bank"),        Triplet::make("rock", "writes", "poem"),
      Triplet::make("teapot", "votesIn", "election"), Triplet::make("banana", "flies", "airplane"),
      Triplet::make("spoon", "speaks", "French"),    Triplet::make("mountain", "wears", "hat"),
  };
  return pool;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below(0)");
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % n;
}

namespace {

std::string item_id(std::size_t sentence, char section, std::size_t n) {
  return "s" + std::to_string(sentence) + "." + section + std::to_string(n);
}

struct Generated {
  Triplet triplet;
  TripletLabel label;
};

// Every distinct triplet the pipeline produced for a sentence, duplicates
// excluded. A triplet that was both discarded and validated counts as kept.
std::vector<Generated> generated_triplets(const SentenceRun& run) {
  std::vector<Generated> out;
  std::map<std::string, std::size_t> index;
  auto add = [&](const Triplet& t, TripletLabel label) {
    auto canon = render_canonical(t);
    auto it = index.find(canon);
    if (it == index.end()) {
      index[canon] = out.size();
      out.push_back({t, label});
    } else if (label != TripletLabel::wrong) {
      out[it->second].label = label;
    }
  };
  for (const ExtractionRecord& r : run.records) {
    if (r.status == RecordStatus::discarded_duplicate) continue;
    for (const ChallengeRound& round : r.challenge_rounds)
      if (round.verdict == Verdict::no) add(round.triplet, TripletLabel::wrong);
    if (r.status == RecordStatus::validated)
      add(r.triplet, r.provenance.is_explicit() ? TripletLabel::factual : TripletLabel::deducible);
    else if (r.challenge_rounds.empty())
      add(r.triplet, TripletLabel::wrong);
  }
  return out;
}

std::string derive_form_id(const std::vector<SentenceRun>& runs, std::uint64_t seed) {
  std::string basis = std::to_string(seed);
  for (const SentenceRun& r : runs) basis += "\n" + r.run_id + "\n" + r.sentence;
  return "form-" + entity_id(basis).substr(2, 12);
}

}  // namespace

AnnotationBundle generate_form_bundle(const std::vector<SentenceRun>& runs, std::uint64_t seed,
                                      const FormsConfig& config, const std::string& form_id) {
  if (runs.empty() || (runs.size() < config.sentences_per_form && !config.allow_short))
    throw FormsError("InsufficientSentences: need " + std::to_string(config.sentences_per_form) + " sentences, got " +
                     std::to_string(runs.size()));
  if (runs.size() > config.sentences_per_form)
    throw FormsError("too many sentences for one form: " + std::to_string(runs.size()));

  std::mt19937_64 rng(seed);
  AnnotationBundle b;
  b.form_id = form_id.empty() ? derive_form_id(runs, seed) : form_id;
  FormKey& key = b.key;
  key.form_id = b.form_id;
  key.dataset = config.dataset;
  key.model = config.model;

  std::vector<std::vector<Generated>> generated;
  std::set<std::string> real;
  for (const SentenceRun& run : runs) {
    generated.push_back(generated_triplets(run));
    for (auto& g : generated.back()) real.insert(render_canonical(g.triplet));
  }

  // Attention checks: five pool triplets, each placed in a random sentence.
  std::vector<Triplet> pool;
  for (const Triplet& t : attention_pool())
    if (!real.count(render_canonical(t))) pool.push_back(t);
  if (pool.size() < kAttentionChecks) throw FormsError("attention pool overlaps the form's triplets");
  seeded_shuffle(pool, rng);
  pool.resize(kAttentionChecks);
  std::vector<std::size_t> attention_sentence;
  for (std::size_t i = 0; i < kAttentionChecks; ++i) attention_sentence.push_back(uniform_below(rng, runs.size()));

  for (std::size_t si = 0; si < runs.size(); ++si) {
    const SentenceRun& run = runs[si];
    BundleSentence bs;
    bs.run_id = run.run_id;
    bs.sentence = run.sentence;
    SentenceKey sk;
    sk.sentence = run.sentence;
    sk.generated = generated[si].size();

    // Section a: generated triplets and this sentence's attention items, shuffled.
    struct Entry {
      Triplet triplet;
      TripletLabel label;
      std::optional<std::size_t> attention;
    };
    std::vector<Entry> entries;
    for (auto& g : generated[si]) entries.push_back({g.triplet, g.label, std::nullopt});
    for (std::size_t a = 0; a < kAttentionChecks; ++a)
      if (attention_sentence[a] == si) entries.push_back({pool[a], TripletLabel::wrong, a});
    seeded_shuffle(entries, rng);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      std::string id = item_id(si, 'a', i + 1);
      bs.section_a.push_back({id, entries[i].triplet});
      key.classification[id] = entries[i].label;
      if (entries[i].attention) {
        key.attention_items.insert(id);
        b.attention_items.push_back({id, si, i, entries[i].triplet});
      }
    }

    // Section b: every discarded version, with one item carrying follow-ups.
    for (const ExtractionRecord& r : run.records) {
      if (r.status == RecordStatus::discarded_duplicate) continue;
      for (const ChallengeRound& round : r.challenge_rounds) {
        if (round.verdict != Verdict::no) continue;
        DiscardItem d;
        d.id = item_id(si, 'b', bs.section_b.size() + 1);
        d.triplet = round.triplet;
        d.reason = round.explanation;
        d.correction = round.correction;
        bs.section_b.push_back(d);
        sk.discarded.push_back(round.triplet);
        key.icr_items.insert(d.id);
      }
    }
    if (!bs.section_b.empty()) {
      DiscardItem& d = bs.section_b[uniform_below(rng, bs.section_b.size())];
      d.ask_reason = d.reason.has_value();
      d.ask_correction = d.correction.has_value();
      if (d.ask_reason) key.icr_reason_items.insert(d.id);
      if (d.ask_correction) key.icr_correction_items.insert(d.id);
    }

    // Sections c and e: validated triplets.
    for (const ExtractionRecord* r : run.validated()) {
      for (const TaggedTriplet& tag : run.event_state_tags) {
        if (!(tag.triplet == r->triplet)) continue;
        std::string id = item_id(si, 'c', bs.section_c.size() + 1);
        bs.section_c.push_back({id, r->triplet});
        key.event_state[id] = tag.tag.kind;
        break;
      }
      std::string id = item_id(si, 'e', bs.section_e.size() + 1);
      bs.section_e.push_back({id, r->triplet});
      sk.kept.push_back(r->triplet);
      sk.final_items.push_back(id);
    }

    // Section d: related pairs plus a sample of unrelated ones.
    std::vector<std::size_t> related, unrelated;
    for (std::size_t i = 0; i < run.temporal_relations.size(); ++i)
      (run.temporal_relations[i].tag == TemporalTag::none ? unrelated : related).push_back(i);
    seeded_shuffle(unrelated, rng);
    unrelated.resize(std::min(unrelated.size(), related.size() * config.unrelated_pairs_per_related));
    std::set<std::size_t> shown(related.begin(), related.end());
    shown.insert(unrelated.begin(), unrelated.end());
    for (std::size_t i : shown) {
      const TemporalRelation& rel = run.temporal_relations[i];
      std::string id = item_id(si, 'd', bs.section_d.size() + 1);
      bs.section_d.push_back({id, rel.first, rel.second});
      key.timing[id] = timing_label_of(rel.tag);
    }

    b.sentences.push_back(std::move(bs));
    key.sentences.push_back(std::move(sk));
  }
  return b;
}

std::vector<AnnotationBundle> generate_forms(const std::vector<SentenceRun>& runs, std::uint64_t seed,
                                             const FormsConfig& config, const std::string& prefix) {
  if (config.sentences_per_form == 0) throw FormsError("sentences_per_form must be positive");
  std::vector<AnnotationBundle> out;
  for (std::size_t start = 0, n = 1; start < runs.size(); start += config.sentences_per_form, ++n) {
    std::size_t end = std::min(runs.size(), start + config.sentences_per_form);
    std::vector<SentenceRun> chunk(runs.begin() + static_cast<long>(start), runs.begin() + static_cast<long>(end));
    out.push_back(generate_form_bundle(chunk, seed + n - 1, config, prefix + "-" + std::to_string(n)));
  }
  if (out.empty()) throw FormsError("InsufficientSentences: no runs");
  return out;
}

// ---- JSON

namespace {

Triplet parse_stored(const json& j) {
  ParseOptions opts;
  opts.max_depth = 64;
  return parse_triplet(j.get<std::string>(), opts);
}

json items_json(const std::vector<TripletItem>& items) {
  json out = json::array();
  for (auto& i : items) out.push_back({{"id", i.id}, {"triplet", render_canonical(i.triplet)}});
  return out;
}

std::vector<TripletItem> items_from(const json& j) {
  std::vector<TripletItem> out;
  for (auto& i : j) out.push_back({i.at("id").get<std::string>(), parse_stored(i.at("triplet"))});
  return out;
}

json sentence_json(const BundleSentence& s, std::size_t index) {
  json b = json::array();
  for (auto& d : s.section_b) {
    json item{{"id", d.id},
              {"triplet", render_canonical(d.triplet)},
              {"reason", d.reason ? json(*d.reason) : json(nullptr)},
              {"correction", d.correction ? json(render_canonical(*d.correction)) : json(nullptr)},
              {"ask_reason", d.ask_reason},
              {"ask_correction", d.ask_correction}};
    b.push_back(item);
  }
  json d = json::array();
  for (auto& p : s.section_d)
    d.push_back({{"id", p.id}, {"first", render_canonical(p.first)}, {"second", render_canonical(p.second)}});
  return {{"index", index},
          {"sentence", s.sentence},
          {"section_a", items_json(s.section_a)},
          {"section_b", b},
          {"section_c", items_json(s.section_c)},
          {"section_d", d},
          {"section_e", items_json(s.section_e)}};
}

json options_json() {
  return {{"triplet_classification", {"factual", "deducible", "wrong"}},
          {"agreement", {"fully_agree", "somewhat_agree", "disagree"}},
          {"event_state", {"event", "state"}},
          {"timing", {"before", "after", "while", "no_clear_relation"}},
          {"inference_type", {to_string(InferenceType::fact), to_string(InferenceType::pre_condition),
                              to_string(InferenceType::post_condition), to_string(InferenceType::intent),
                              to_string(InferenceType::reaction), to_string(InferenceType::attribute)}}};
}

}  // namespace

json public_view(const AnnotationBundle& bundle) {
  json sentences = json::array();
  for (std::size_t i = 0; i < bundle.sentences.size(); ++i) sentences.push_back(sentence_json(bundle.sentences[i], i));
  return {{"schema_version", std::string(kResponseSchemaVersion)},
          {"form_id", bundle.form_id},
          {"sentences", sentences},
          {"options", options_json()}};
}

json to_json(const AnnotationBundle& bundle) {
  json j = public_view(bundle);
  for (std::size_t i = 0; i < bundle.sentences.size(); ++i) j["sentences"][i]["run_id"] = bundle.sentences[i].run_id;
  json att = json::array();
  for (auto& a : bundle.attention_items)
    att.push_back(
        {{"id", a.id}, {"sentence", a.sentence}, {"position", a.position}, {"triplet", render_canonical(a.triplet)}});
  j["attention_items"] = att;
  j["key"] = to_json(bundle.key);
  return j;
}

AnnotationBundle annotation_bundle_from_json(const json& j) {
  AnnotationBundle b;
  try {
    b.form_id = j.at("form_id").get<std::string>();
    for (auto& s : j.at("sentences")) {
      BundleSentence bs;
      bs.run_id = s.value("run_id", "");
      bs.sentence = s.at("sentence").get<std::string>();
      bs.section_a = items_from(s.at("section_a"));
      for (auto& d : s.at("section_b")) {
        DiscardItem item;
        item.id = d.at("id").get<std::string>();
        item.triplet = parse_stored(d.at("triplet"));
        if (!d.at("reason").is_null()) item.reason = d["reason"].get<std::string>();
        if (!d.at("correction").is_null()) item.correction = parse_stored(d["correction"]);
        item.ask_reason = d.at("ask_reason").get<bool>();
        item.ask_correction = d.at("ask_correction").get<bool>();
        bs.section_b.push_back(std::move(item));
      }
      bs.section_c = items_from(s.at("section_c"));
      for (auto& p : s.at("section_d"))
        bs.section_d.push_back({p.at("id").get<std::string>(), parse_stored(p.at("first")), parse_stored(p.at("second"))});
      bs.section_e = items_from(s.at("section_e"));
      b.sentences.push_back(std::move(bs));
    }
    for (auto& a : j.at("attention_items"))
      b.attention_items.push_back({a.at("id").get<std::string>(), a.at("sentence").get<std::size_t>(),
                                   a.at("position").get<std::size_t>(), parse_stored(a.at("triplet"))});
    b.key = form_key_from_json(j.at("key"));
  } catch (const json::exception& e) {
    throw FormsError(std::string("malformed bundle: ") + e.what());
  } catch (const ParseError& e) {
    throw FormsError(std::string("malformed bundle triplet: ") + e.what());
  }
  return b;
}

std::vector<NliItem> nli_items(const AnnotationBundle& bundle, const std::vector<AnnotationResponse>& responses,
                               const VerbalizerConfig& verbalizer) {
  std::vector<NliItem> out;
  for (const BundleSentence& s : bundle.sentences) {
    for (const TripletItem& item : s.section_a) {
      if (bundle.key.attention_items.count(item.id)) continue;
      NliItem n;
      n.dataset = bundle.key.dataset;
      n.model = bundle.key.model;
      n.item_id = bundle.form_id + "/" + item.id;
      n.pair = {s.sentence, verbalize(item.triplet, verbalizer)};
      n.pipeline_label = bundle.key.classification.at(item.id);
      std::vector<TripletLabel> votes;
      for (const AnnotationResponse& r : responses) {
        if (r.form_id != bundle.form_id) continue;
        auto it = r.triplet_classification.find(item.id);
        if (it != r.triplet_classification.end()) votes.push_back(it->second);
      }
      n.human_label = majority_label(votes);
      out.push_back(std::move(n));
    }
  }
  return out;
}

}  // namespace iie
