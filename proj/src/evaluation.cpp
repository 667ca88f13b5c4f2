#include "iie/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace iie {

using json = nlohmann::json;

EvaluationError::EvaluationError(EvaluationErrorKind kind, const std::string& detail)
    : std::runtime_error(detail), kind_(kind) {}

std::vector<AnnotationResponse> filter_attention_checks(const std::vector<AnnotationResponse>& responses) {
  std::vector<AnnotationResponse> out;
  for (const auto& r : responses) {
    bool ok = r.attention_outcomes.size() == kAttentionChecks &&
              std::all_of(r.attention_outcomes.begin(), r.attention_outcomes.end(), [](bool b) { return b; });
    if (ok) out.push_back(r);
  }
  return out;
}

double ConfusionMatrix::total() const {
  double t = 0;
  for (auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

double ConfusionMatrix::row_total(std::size_t r) const {
  return std::accumulate(counts[r].begin(), counts[r].end(), 0.0);
}

double ConfusionMatrix::column_total(std::size_t c) const {
  double t = 0;
  for (auto& row : counts) t += row[c];
  return t;
}

std::vector<std::vector<double>> ConfusionMatrix::percentages() const {
  double t = total();
  auto out = counts;
  for (auto& row : out)
    for (double& v : row) v = t > 0 ? 100.0 * v / t : 0.0;
  return out;
}

double cohen_kappa(const ConfusionMatrix& m) {
  double n = m.total();
  if (!(n > 0)) throw EvaluationError(EvaluationErrorKind::empty_matrix, "confusion matrix is empty");
  double po = 0, pe = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    po += m.counts[i][i] / n;
    pe += (m.row_total(i) / n) * (m.column_total(i) / n);
  }
  if (pe >= 1.0) return 1.0;  // a single category used by both raters
  return (po - pe) / (1.0 - pe);
}

ConfusionMatrix confusion_matrix(const std::vector<TripletLabel>& model, const std::vector<TripletLabel>& human) {
  if (model.size() != human.size())
    throw EvaluationError(EvaluationErrorKind::misaligned, "model and human label lists differ in length");
  ConfusionMatrix m(3);
  for (std::size_t i = 0; i < model.size(); ++i)
    m.counts[static_cast<std::size_t>(model[i])][static_cast<std::size_t>(human[i])] += 1;
  return m;
}

Polarity polarity_from_proportions(double fully_agree, double disagree) {
  Polarity p;
  p.raw_mean = fully_agree - disagree;
  p.normalized = (p.raw_mean + 1.0) / 2.0;
  p.concur = p.raw_mean > 0;
  return p;
}

Polarity polarity_consensus(const std::vector<Agreement>& answers) {
  if (answers.empty()) throw EvaluationError(EvaluationErrorKind::empty_denominator, "no answers");
  double n = static_cast<double>(answers.size());
  double f = static_cast<double>(std::count(answers.begin(), answers.end(), Agreement::fully_agree));
  double d = static_cast<double>(std::count(answers.begin(), answers.end(), Agreement::disagree));
  Polarity p;
  p.raw_mean = (f - d) / n;
  p.normalized = (p.raw_mean + 1.0) / 2.0;
  p.concur = p.raw_mean > 0;
  return p;
}

bool removal_agreement(const std::vector<bool>& flags) {
  if (flags.empty()) throw EvaluationError(EvaluationErrorKind::empty_denominator, "no removal flags");
  auto flagged = std::count(flags.begin(), flags.end(), true);
  return 2 * static_cast<std::size_t>(flagged) < flags.size();
}

std::string_view to_string(MatchKind m) {
  switch (m) {
    case MatchKind::exact: return "exact";
    case MatchKind::semantic: return "semantic";
    case MatchKind::none: return "none";
  }
  return "?";
}

MatchKind classify_match(const Triplet& t, const std::vector<Triplet>& others, const SemanticOracle& oracle) {
  std::string canon = render_canonical(t);
  for (const Triplet& o : others)
    if (render_canonical(o) == canon) return MatchKind::exact;
  if (oracle)
    for (const Triplet& o : others)
      if (oracle(t, o)) return MatchKind::semantic;
  return MatchKind::none;
}

std::string_view to_string(AdditionCategory c) {
  switch (c) {
    case AdditionCategory::over_pruned: return "over_pruned";
    case AdditionCategory::modification: return "modification";
    case AdditionCategory::missing_explicit: return "missing_explicit";
    case AdditionCategory::missing_implicit: return "missing_implicit";
  }
  return "?";
}

AdditionReport categorize_additions(const std::vector<AddedTriplet>& additions, const std::vector<Triplet>& kept,
                                    const std::vector<Triplet>& discarded, const SemanticOracle& oracle) {
  AdditionReport report;
  for (const AddedTriplet& a : additions) {
    AdditionCategory c;
    if (classify_match(a.triplet, discarded, oracle) != MatchKind::none)
      c = AdditionCategory::over_pruned;
    else if (classify_match(a.triplet, kept, oracle) != MatchKind::none)
      c = AdditionCategory::modification;
    else if (a.inference_type == InferenceType::fact)
      c = AdditionCategory::missing_explicit;
    else
      c = AdditionCategory::missing_implicit;
    report.categories.push_back(c);
    ++report.counts[c];
  }
  if (!additions.empty())
    report.overlap_with_discarded =
        static_cast<double>(report.counts[AdditionCategory::over_pruned]) / static_cast<double>(additions.size());
  return report;
}

SemanticOracle table_oracle(const json& pairs) {
  std::set<std::pair<std::string, std::string>> table;
  ParseOptions opts;
  opts.max_depth = 64;
  for (auto& p : pairs) {
    if (!p.is_array() || p.size() != 2) throw SchemaError("$", "expected [a, b] pairs");
    auto a = render_canonical(parse_triplet(p[0].get<std::string>(), opts));
    auto b = render_canonical(parse_triplet(p[1].get<std::string>(), opts));
    table.emplace(a, b);
    table.emplace(b, a);
  }
  return [table](const Triplet& x, const Triplet& y) {
    return table.count({render_canonical(x), render_canonical(y)}) > 0;
  };
}

std::vector<AnnotationResponse> ingest_responses(std::istream& in) {
  std::vector<AnnotationResponse> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (normalize_whitespace(line).empty()) continue;
    std::string where = "line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(where, e.what());
    }
    try {
      out.push_back(annotation_response_from_json(j));
    } catch (const SchemaError& e) {
      throw SchemaError(where + " " + e.path(), e.what());
    } catch (const json::exception& e) {
      throw SchemaError(where, e.what());
    }
  }
  return out;
}

namespace {

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

std::optional<double> mean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> fraction(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

// Model answers and human votes for one categorical section.
template <class L>
struct Section {
  std::size_t k;
  std::vector<L> model;
  std::vector<std::optional<L>> consensus;
  std::vector<double> shares;

  explicit Section(std::size_t categories) : k(categories) {}

  void add(const L& model_answer, const std::vector<L>& votes) {
    if (votes.empty()) return;
    model.push_back(model_answer);
    consensus.push_back(majority_label(votes));
    shares.push_back(majority_share(votes));
  }

  ConfusionMatrix matrix() const {
    ConfusionMatrix m(k);
    for (std::size_t i = 0; i < model.size(); ++i)
      if (consensus[i]) m.counts[static_cast<std::size_t>(model[i])][static_cast<std::size_t>(*consensus[i])] += 1;
    return m;
  }

  SectionAgreement agreement() const {
    SectionAgreement a;
    a.questions = model.size();
    try {
      a.mha = compute_mha(model, consensus);
      a.kappa = cohen_kappa(matrix());
    } catch (const EvaluationError&) {
    }
    return a;
  }
};

ConsensusStrength strength(const std::vector<double>& shares, double chance) {
  ConsensusStrength s;
  s.questions = shares.size();
  s.chance = chance;
  s.mean_majority_share = mean(shares);
  try {
    s.vs_chance = t_test_vs_chance(shares, chance);
  } catch (const StatsError&) {
  }
  return s;
}

template <class L, class F>
std::vector<L> votes_for(const std::vector<const AnnotationResponse*>& rs, const std::string& id, F section) {
  std::vector<L> out;
  for (auto* r : rs) {
    const auto& answers = section(*r);
    auto it = answers.find(id);
    if (it != answers.end()) out.push_back(it->second);
  }
  return out;
}

void evaluate_group(GroupReport& g, const std::vector<const FormKey*>& keys,
                    const std::map<std::string, std::vector<const AnnotationResponse*>>& by_form,
                    const SemanticOracle& oracle) {
  Section<TripletLabel> cls(3);
  Section<EventState> es(2);
  Section<TimingLabel> tm(4);
  std::vector<double> icr_shares, mec_shares;
  std::vector<double> polarities, fully, disagree, reason_pol, correction_pol;
  std::size_t icr_items = 0, concur = 0, fully_major = 0, disagree_major = 0;
  std::size_t reason_items = 0, reason_concur = 0, correction_items = 0, correction_concur = 0;
  std::size_t final_items = 0, kept_by_humans = 0;
  std::vector<double> removal_rates, generated, additions_per;
  std::size_t additions_total = 0, over_pruned = 0;

  static const std::vector<const AnnotationResponse*> kNone;
  for (const FormKey* key : keys) {
    auto it = by_form.find(key->form_id);
    const auto& rs = it == by_form.end() ? kNone : it->second;

    for (auto& [id, label] : key->classification) {
      if (key->attention_items.count(id)) continue;
      cls.add(label, votes_for<TripletLabel>(rs, id, [](auto& r) -> auto& { return r.triplet_classification; }));
    }
    for (auto& [id, tag] : key->event_state)
      es.add(tag, votes_for<EventState>(rs, id, [](auto& r) -> auto& { return r.event_state; }));
    for (auto& [id, tag] : key->timing)
      tm.add(tag, votes_for<TimingLabel>(rs, id, [](auto& r) -> auto& { return r.timing; }));

    for (const std::string& id : key->icr_items) {
      std::vector<Agreement> discard, reason, correction;
      for (auto* r : rs) {
        auto a = r->icr.find(id);
        if (a == r->icr.end()) continue;
        discard.push_back(a->second.discard_agreement);
        if (a->second.discard_agreement == Agreement::disagree) continue;
        if (a->second.reason_agreement) reason.push_back(*a->second.reason_agreement);
        if (a->second.correction_agreement) correction.push_back(*a->second.correction_agreement);
      }
      if (discard.empty()) continue;
      ++icr_items;
      Polarity p = polarity_consensus(discard);
      concur += p.concur;
      polarities.push_back(p.normalized);
      double n = static_cast<double>(discard.size());
      double nf = static_cast<double>(std::count(discard.begin(), discard.end(), Agreement::fully_agree));
      double nd = static_cast<double>(std::count(discard.begin(), discard.end(), Agreement::disagree));
      fully.push_back(nf / n);
      disagree.push_back(nd / n);
      fully_major += 2 * nf > n;
      disagree_major += 2 * nd > n;
      icr_shares.push_back(majority_share(discard));
      if (key->icr_reason_items.count(id) && !reason.empty()) {
        Polarity rp = polarity_consensus(reason);
        ++reason_items;
        reason_concur += rp.concur;
        reason_pol.push_back(rp.normalized);
      }
      if (key->icr_correction_items.count(id) && !correction.empty()) {
        Polarity cp = polarity_consensus(correction);
        ++correction_items;
        correction_concur += cp.concur;
        correction_pol.push_back(cp.normalized);
      }
    }

    for (std::size_t si = 0; si < key->sentences.size(); ++si) {
      const SentenceKey& s = key->sentences[si];
      generated.push_back(static_cast<double>(s.generated));
      std::size_t removed_here = 0, counted_here = 0;
      for (const std::string& id : s.final_items) {
        std::vector<bool> flags;
        for (auto* r : rs) flags.push_back(r->mec.removals.count(id) > 0);
        if (flags.empty()) continue;
        ++final_items;
        ++counted_here;
        bool agree = removal_agreement(flags);
        kept_by_humans += agree;
        removed_here += !agree;
        auto flagged = static_cast<double>(std::count(flags.begin(), flags.end(), true));
        double share = flagged / static_cast<double>(flags.size());
        mec_shares.push_back(std::max(share, 1.0 - share));
      }
      if (counted_here) removal_rates.push_back(static_cast<double>(removed_here) / static_cast<double>(counted_here));
      for (auto* r : rs) {
        std::vector<AddedTriplet> mine;
        for (const AddedTriplet& a : r->mec.additions)
          if (a.sentence == si) mine.push_back(a);
        additions_per.push_back(static_cast<double>(mine.size()));
        AdditionReport rep = categorize_additions(mine, s.kept, s.discarded, oracle);
        for (std::size_t i = 0; i < mine.size(); ++i) {
          ++g.output.addition_categories[rep.categories[i]];
          ++g.output.additions_by_type[mine[i].inference_type][rep.categories[i]];
        }
        additions_total += mine.size();
        over_pruned += rep.counts[AdditionCategory::over_pruned];
      }
    }
  }

  g.classification = cls.agreement();
  g.event_state = es.agreement();
  g.timing = tm.agreement();
  g.classification_matrix = cls.matrix();

  const ConfusionMatrix& m = g.classification_matrix;
  double n = m.total();
  std::size_t w = static_cast<std::size_t>(TripletLabel::wrong);
  if (n > 0) {
    g.model_wrong_rate = m.row_total(w) / n;
    g.human_wrong_rate = m.column_total(w) / n;
    std::array<double, 3> model_dist{}, human_dist{};
    for (std::size_t i = 0; i < 3; ++i) {
      model_dist[i] = m.row_total(i);
      human_dist[i] = m.column_total(i);
    }
    try {
      g.strictness_chi_squared = chi_squared_homogeneity(model_dist, human_dist);
    } catch (const StatsError&) {
    }
    try {
      g.strictness_binomial_p = binomial_one_sided(std::lround(m.column_total(w)), std::lround(n),
                                                   *g.model_wrong_rate, Tail::lower);
    } catch (const StatsError&) {
    }
  }

  std::size_t abstain_model = 0, abstain_human = 0, with_consensus = 0;
  for (std::size_t i = 0; i < tm.model.size(); ++i) {
    abstain_model += tm.model[i] == TimingLabel::no_clear_relation;
    if (tm.consensus[i]) {
      ++with_consensus;
      abstain_human += *tm.consensus[i] == TimingLabel::no_clear_relation;
    }
  }
  g.model_abstain_rate = fraction(abstain_model, tm.model.size());
  g.human_abstain_rate = fraction(abstain_human, with_consensus);

  g.icr_discard = {icr_items, fraction(concur, icr_items), std::nullopt};
  g.icr_reason = {reason_items, fraction(reason_concur, reason_items), std::nullopt};
  g.icr_correction = {correction_items, fraction(correction_concur, correction_items), std::nullopt};
  g.mec_removal = {final_items, fraction(kept_by_humans, final_items), std::nullopt};

  g.icr.items = icr_items;
  g.icr.fully_majority_rate = fraction(fully_major, icr_items);
  g.icr.disagree_majority_rate = fraction(disagree_major, icr_items);
  g.icr.average_polarity = mean(polarities);
  g.icr.average_fully = mean(fully);
  g.icr.average_disagree = mean(disagree);
  g.icr.reason_polarity = mean(reason_pol);
  g.icr.correction_polarity = mean(correction_pol);

  g.output.generated_median = median(generated);
  g.output.additions_median = median(additions_per);
  g.output.additions_overlap_with_discarded = fraction(over_pruned, additions_total);
  g.output.removal_rate = mean(removal_rates);

  g.consensus["triplet_classification"] = strength(cls.shares, 1.0 / 3.0);
  g.consensus["inference_correction_review"] = strength(icr_shares, 1.0 / 3.0);
  g.consensus["event_state_classification"] = strength(es.shares, 1.0 / 2.0);
  g.consensus["timing_comparison"] = strength(tm.shares, 1.0 / 4.0);
  g.consensus["model_error_correction"] = strength(mec_shares, 1.0 / 2.0);
}

}  // namespace

EvaluationReport evaluate(const std::vector<FormKey>& keys, const std::vector<AnnotationResponse>& responses,
                          const SemanticOracle& oracle) {
  EvaluationReport report;
  std::map<std::string, const FormKey*> key_by_form;
  std::map<std::pair<std::string, std::string>, std::vector<const FormKey*>> groups;
  for (const FormKey& k : keys) {
    key_by_form[k.form_id] = &k;
    groups[{k.dataset, k.model}].push_back(&k);
  }

  std::map<std::string, std::vector<const AnnotationResponse*>> by_form;
  std::map<std::string, std::size_t> excluded;
  for (const AnnotationResponse& r : responses) {
    if (!key_by_form.count(r.form_id)) {
      ++report.orphan_responses;
      continue;
    }
    bool ok = r.attention_outcomes.size() == kAttentionChecks &&
              std::all_of(r.attention_outcomes.begin(), r.attention_outcomes.end(), [](bool b) { return b; });
    if (ok)
      by_form[r.form_id].push_back(&r);
    else
      ++excluded[r.form_id];
  }

  for (auto& [gk, forms] : groups) {
    GroupReport g;
    g.dataset = gk.first;
    g.model = gk.second;
    g.forms = forms.size();
    for (const FormKey* k : forms) {
      if (auto it = by_form.find(k->form_id); it != by_form.end()) g.responses += it->second.size();
      if (auto it = excluded.find(k->form_id); it != excluded.end()) g.excluded += it->second;
    }
    evaluate_group(g, forms, by_form, oracle);
    report.groups.push_back(std::move(g));
  }

  // Overlap between models on the same sentence of the same dataset.
  std::map<std::tuple<std::string, std::string, std::string>, const SentenceKey*> by_sentence;
  for (const FormKey& k : keys)
    for (const SentenceKey& s : k.sentences) by_sentence.emplace(std::make_tuple(k.dataset, k.model, s.sentence), &s);
  for (auto& [a, _] : groups) {
    for (auto& [b, __] : groups) {
      if (a.first != b.first || a.second == b.second) continue;
      OverlapRow row{a.first, a.second, b.second, 0, {}};
      for (auto& [key, s] : by_sentence) {
        if (std::get<0>(key) != a.first || std::get<1>(key) != a.second) continue;
        auto other = by_sentence.find({a.first, b.second, std::get<2>(key)});
        if (other == by_sentence.end()) continue;
        for (const Triplet& t : s->kept) {
          ++row.triplets;
          ++row.counts[classify_match(t, other->second->kept, oracle)];
        }
      }
      if (row.triplets) report.overlaps.push_back(std::move(row));
    }
  }
  return report;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json section_json(const SectionAgreement& s) {
  return {{"questions", s.questions}, {"mha", opt(s.mha)}, {"kappa", opt(s.kappa)}};
}

json test_json(const std::optional<TestResult>& t) {
  if (!t) return nullptr;
  return {{"statistic", t->statistic}, {"p_value", t->p_value}};
}

template <class K>
json count_map(const std::map<K, std::size_t>& m) {
  json j = json::object();
  for (auto& [k, v] : m) j[std::string(to_string(k))] = v;
  return j;
}

}  // namespace

json to_json(const EvaluationReport& report) {
  json groups = json::array();
  for (const GroupReport& g : report.groups) {
    json cm = json::array();
    for (auto& row : g.classification_matrix.counts) cm.push_back(row);
    json consensus = json::object();
    for (auto& [name, c] : g.consensus)
      consensus[name] = {{"questions", c.questions},
                         {"chance", c.chance},
                         {"mean_majority_share", opt(c.mean_majority_share)},
                         {"t_test", test_json(c.vs_chance)}};
    json by_type = json::object();
    for (auto& [type, counts] : g.output.additions_by_type) by_type[std::string(to_string(type))] = count_map(counts);
    groups.push_back(
        {{"dataset", g.dataset},
         {"model", g.model},
         {"forms", g.forms},
         {"responses", g.responses},
         {"excluded", g.excluded},
         {"sections",
          {{"triplet_classification", section_json(g.classification)},
           {"event_state_classification", section_json(g.event_state)},
           {"timing_comparison", section_json(g.timing)},
           {"icr_discard", section_json(g.icr_discard)},
           {"icr_reason", section_json(g.icr_reason)},
           {"icr_correction", section_json(g.icr_correction)},
           {"mec_removal", section_json(g.mec_removal)}}},
         {"classification_matrix", {{"rows", "model"}, {"columns", "human"}, {"labels", {"factual", "deducible", "wrong"}},
                                    {"counts", cm}}},
         {"strictness",
          {{"model_wrong_rate", opt(g.model_wrong_rate)},
           {"human_wrong_rate", opt(g.human_wrong_rate)},
           {"chi_squared", test_json(g.strictness_chi_squared)},
           {"binomial_p", opt(g.strictness_binomial_p)}}},
         {"timing_abstention", {{"model", opt(g.model_abstain_rate)}, {"human", opt(g.human_abstain_rate)}}},
         {"icr",
          {{"items", g.icr.items},
           {"fully_agree_majority_rate", opt(g.icr.fully_majority_rate)},
           {"disagree_majority_rate", opt(g.icr.disagree_majority_rate)},
           {"average_polarity", opt(g.icr.average_polarity)},
           {"average_fully_agree", opt(g.icr.average_fully)},
           {"average_disagree", opt(g.icr.average_disagree)},
           {"reason_polarity", opt(g.icr.reason_polarity)},
           {"correction_polarity", opt(g.icr.correction_polarity)}}},
         {"output",
          {{"generated_median", opt(g.output.generated_median)},
           {"additions_median", opt(g.output.additions_median)},
           {"additions_overlap_with_discarded", opt(g.output.additions_overlap_with_discarded)},
           {"removal_rate", opt(g.output.removal_rate)},
           {"addition_categories", count_map(g.output.addition_categories)},
           {"additions_by_type", by_type}}},
         {"consensus", consensus}});
  }
  json overlaps = json::array();
  for (const OverlapRow& o : report.overlaps)
    overlaps.push_back({{"dataset", o.dataset},
                        {"model", o.model},
                        {"other_model", o.other_model},
                        {"triplets", o.triplets},
                        {"counts", count_map(o.counts)}});
  return {{"groups", groups}, {"overlaps", overlaps}, {"orphan_responses", report.orphan_responses}};
}

namespace {

std::string pct(const std::optional<double>& v) {
  if (!v) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * *v);
  return buf;
}

std::string num(const std::optional<double>& v, const char* fmt = "%.2f") {
  if (!v) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, *v);
  return buf;
}

std::string pvalue(const std::optional<double>& p) {
  if (!p) return "--";
  if (*p < 0.001) return "<0.001";
  return num(p, "%.4f");
}

struct Table {
  std::vector<std::vector<std::string>> rows;

  std::string render() const {
    std::vector<std::size_t> width;
    for (auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (width.size() <= i) width.push_back(0);
        width[i] = std::max(width[i], r[i].size());
      }
    std::ostringstream out;
    for (auto& r : rows) {
      std::string line;
      for (std::size_t i = 0; i < r.size(); ++i) {
        line += r[i];
        if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
      }
      out << line << "\n";
    }
    return out.str();
  }
};

}  // namespace

std::string render_report_table(const EvaluationReport& report) {
  std::ostringstream out;
  std::vector<std::string> header{"Section", "Metric"};
  for (auto& g : report.groups) header.push_back(g.dataset + "/" + g.model);

  Table t1{{header}};
  auto row = [&](const std::string& section, const std::string& metric, auto get) {
    std::vector<std::string> r{section, metric};
    for (auto& g : report.groups) r.push_back(get(g));
    t1.rows.push_back(r);
  };
  row("Triplet classification", "MHA", [](auto& g) { return pct(g.classification.mha); });
  row("", "kappa", [](auto& g) { return num(g.classification.kappa); });
  row("Event/state classification", "MHA", [](auto& g) { return pct(g.event_state.mha); });
  row("", "kappa", [](auto& g) { return num(g.event_state.kappa); });
  row("Timing comparison", "MHA", [](auto& g) { return pct(g.timing.mha); });
  row("", "kappa", [](auto& g) { return num(g.timing.kappa); });
  row("ICR: discard", "MHA", [](auto& g) { return pct(g.icr_discard.mha); });
  row("ICR: reason", "MHA", [](auto& g) { return pct(g.icr_reason.mha); });
  row("ICR: correction", "MHA", [](auto& g) { return pct(g.icr_correction.mha); });
  row("MEC: removal", "MHA", [](auto& g) { return pct(g.mec_removal.mha); });
  out << "Model-human agreement\n" << t1.render() << "\n";

  Table t2{{header}};
  auto orow = [&](const std::string& metric, auto get) {
    std::vector<std::string> r{metric, ""};
    for (auto& g : report.groups) r.push_back(get(g));
    t2.rows.push_back(r);
  };
  t2.rows[0][0] = "Metric";
  t2.rows[0][1] = "";
  orow("Generated triplets (median)", [](auto& g) { return num(g.output.generated_median, "%g"); });
  orow("Human additions (median)", [](auto& g) { return num(g.output.additions_median, "%g"); });
  orow("Additions overlapping discarded", [](auto& g) { return pct(g.output.additions_overlap_with_discarded); });
  orow("Human removal rate", [](auto& g) { return pct(g.output.removal_rate); });
  orow("Responses kept / excluded", [](auto& g) {
    return std::to_string(g.responses) + " / " + std::to_string(g.excluded);
  });
  out << "Output summary\n" << t2.render() << "\n";

  if (!report.overlaps.empty()) {
    Table t3{{{"Dataset", "Model", "vs", "Exact", "Semantic", "None"}}};
    for (auto& o : report.overlaps) {
      auto share = [&](MatchKind k) {
        auto it = o.counts.find(k);
        return pct(fraction(it == o.counts.end() ? 0 : it->second, o.triplets));
      };
      t3.rows.push_back({o.dataset, o.model, o.other_model, share(MatchKind::exact), share(MatchKind::semantic),
                         share(MatchKind::none)});
    }
    out << "Model output overlap\n" << t3.render() << "\n";
  }

  static const char* labels[] = {"f", "d", "w"};
  for (auto& g : report.groups) {
    auto p = g.classification_matrix.percentages();
    Table t4{{{g.dataset + "/" + g.model, "human=f", "human=d", "human=w"}}};
    for (std::size_t r = 0; r < 3; ++r) {
      std::vector<std::string> cells{std::string("model=") + labels[r]};
      for (std::size_t c = 0; c < 3; ++c) cells.push_back(num(p[r][c], "%.1f%%"));
      t4.rows.push_back(cells);
    }
    out << "Triplet classification confusion\n" << t4.render();
    out << "strictness: model wrong " << pct(g.model_wrong_rate) << ", human wrong " << pct(g.human_wrong_rate)
        << ", chi-squared p " << pvalue(g.strictness_chi_squared ? std::optional<double>(g.strictness_chi_squared->p_value)
                                                                  : std::nullopt)
        << ", binomial p " << pvalue(g.strictness_binomial_p) << "\n\n";
  }

  Table t5{{header}};
  t5.rows[0][1] = "";
  for (const char* name : {"triplet_classification", "inference_correction_review", "event_state_classification",
                           "timing_comparison", "model_error_correction"}) {
    std::vector<std::string> r{name, "majority"};
    std::vector<std::string> r2{"", "t-test p"};
    for (auto& g : report.groups) {
      auto it = g.consensus.find(name);
      r.push_back(it == g.consensus.end() ? "--" : pct(it->second.mean_majority_share));
      r2.push_back(it == g.consensus.end() || !it->second.vs_chance
                       ? "--"
                       : pvalue(std::optional<double>(it->second.vs_chance->p_value)));
    }
    t5.rows.push_back(r);
    t5.rows.push_back(r2);
  }
  out << "Human majority agreement\n" << t5.render() << "\n";

  Table t6{{header}};
  auto irow = [&](const std::string& metric, auto get) {
    std::vector<std::string> r{"", metric};
    for (auto& g : report.groups) r.push_back(get(g));
    t6.rows.push_back(r);
  };
  t6.rows[0][0] = "ICR";
  irow("Fully agree majority", [](auto& g) { return pct(g.icr.fully_majority_rate); });
  irow("Disagree majority", [](auto& g) { return pct(g.icr.disagree_majority_rate); });
  irow("Average polarity", [](auto& g) { return pct(g.icr.average_polarity); });
  irow("Average fully agree", [](auto& g) { return pct(g.icr.average_fully); });
  irow("Average disagree", [](auto& g) { return pct(g.icr.average_disagree); });
  irow("Reason polarity", [](auto& g) { return pct(g.icr.reason_polarity); });
  irow("Correction polarity", [](auto& g) { return pct(g.icr.correction_polarity); });
  out << "Inference correction review\n" << t6.render();
  if (report.orphan_responses) out << "\n" << report.orphan_responses << " response(s) matched no form\n";
  return out.str();
}

}  // namespace iie
