#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "iie/evaluation.hpp"
#include "oracles.hpp"

using namespace iie;
using L = TripletLabel;

namespace {

EvaluationErrorKind eval_error(auto&& fn) {
  try {
    fn();
  } catch (const EvaluationError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected EvaluationError";
  return EvaluationErrorKind::misaligned;
}

std::string schema_error(auto&& fn) {
  try {
    fn();
  } catch (const SchemaError& e) {
    return e.path();
  }
  ADD_FAILURE() << "expected SchemaError";
  return "";
}

AnnotationResponse with_attention(std::vector<bool> outcomes) {
  AnnotationResponse r;
  r.form_id = "f";
  r.attention_outcomes = std::move(outcomes);
  return r;
}

ConfusionMatrix from_rows(std::vector<std::vector<double>> rows) {
  ConfusionMatrix m(rows.size());
  m.counts = std::move(rows);
  return m;
}

std::vector<Agreement> answers(int f, int s, int d) {
  std::vector<Agreement> out;
  out.insert(out.end(), f, Agreement::fully_agree);
  out.insert(out.end(), s, Agreement::somewhat_agree);
  out.insert(out.end(), d, Agreement::disagree);
  return out;
}

}  // namespace

TEST(AttentionFilter, Examples) {
  auto kept = filter_attention_checks({with_attention({true, true, true, true, true}),
                                       with_attention({true, true, true, true, false})});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_TRUE(filter_attention_checks({}).empty());
}

TEST(AttentionFilter, Idempotent) {
  std::mt19937 rng(3);
  std::bernoulli_distribution pass(0.8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AnnotationResponse> rs;
    for (int i = 0; i < 20; ++i) {
      std::vector<bool> o;
      for (int c = 0; c < 5; ++c) o.push_back(pass(rng));
      rs.push_back(with_attention(o));
      rs.back().annotator_id = std::to_string(i);
    }
    auto once = filter_attention_checks(rs);
    EXPECT_EQ(filter_attention_checks(once), once);
  }
}

TEST(Majority, Examples) {
  EXPECT_EQ(majority_label<L>({L::factual, L::factual, L::factual, L::deducible}), L::factual);
  EXPECT_EQ(majority_label<L>({L::factual, L::factual, L::deducible, L::deducible}), std::nullopt);
  EXPECT_EQ(majority_label<L>({L::wrong}), L::wrong);
  // Plurality, not absolute majority.
  EXPECT_EQ(majority_label<L>({L::factual, L::factual, L::deducible, L::wrong}), L::factual);
}

TEST(Mha, Examples) {
  EXPECT_DOUBLE_EQ(compute_mha<L>({L::factual, L::wrong}, {L::factual, L::wrong}), 1.0);
  EXPECT_NEAR(compute_mha<L>({L::factual, L::wrong, L::deducible}, {L::factual, L::wrong, L::factual}), 2.0 / 3, 1e-12);
  EXPECT_EQ(eval_error([] { compute_mha<L>({L::factual}, {std::nullopt}); }), EvaluationErrorKind::empty_denominator);
  // Absent consensus leaves the denominator.
  EXPECT_DOUBLE_EQ(compute_mha<L>({L::factual, L::wrong}, {L::factual, std::nullopt}), 1.0);
}

TEST(Mha, AgainstItselfIsOne) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> label(0, 2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<L> labels;
    std::vector<std::optional<L>> same;
    for (int i = 0; i < 30; ++i) {
      labels.push_back(static_cast<L>(label(rng)));
      same.push_back(labels.back());
    }
    EXPECT_DOUBLE_EQ(compute_mha(labels, same), 1.0);
  }
}

TEST(Kappa, Examples) {
  EXPECT_DOUBLE_EQ(cohen_kappa(from_rows({{4, 0, 0}, {0, 3, 0}, {0, 0, 0}})), 1.0);
  // po = 0.85, pe = 0.3 * 0.35 + 0.7 * 0.65 = 0.56.
  EXPECT_NEAR(cohen_kappa(from_rows({{25, 5}, {10, 60}})), (0.85 - 0.56) / 0.44, 1e-12);
  EXPECT_NEAR(cohen_kappa(from_rows({{25, 25}, {25, 25}})), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(cohen_kappa(from_rows({{5, 0}, {0, 0}})), 1.0);
  EXPECT_EQ(eval_error([] { cohen_kappa(ConfusionMatrix(3)); }), EvaluationErrorKind::empty_matrix);
}

TEST(Kappa, MatchesDirectFormulaOnRandomMatrices) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> k_dist(2, 4), cell(0, 40);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t k = k_dist(rng);
    ConfusionMatrix m(k);
    for (auto& row : m.counts)
      for (double& v : row) v = cell(rng);
    m.counts[0][0] += 1;  // keep the total positive
    ASSERT_NEAR(cohen_kappa(m), oracle::kappa(m.counts), 1e-9);
  }
}

TEST(Confusion, HandBuiltTenItems) {
  std::vector<L> model{L::factual, L::factual, L::factual, L::deducible, L::deducible,
                       L::deducible, L::deducible, L::wrong, L::wrong, L::wrong};
  std::vector<L> human{L::factual, L::factual, L::deducible, L::factual, L::deducible,
                       L::deducible, L::deducible, L::factual, L::deducible, L::wrong};
  auto m = confusion_matrix(model, human);
  std::vector<std::vector<double>> expected{{2, 1, 0}, {1, 3, 0}, {1, 1, 1}};
  EXPECT_EQ(m.counts, expected);
  double sum = 0;
  for (auto& row : m.percentages())
    for (double v : row) sum += v;
  EXPECT_NEAR(sum, 100.0, 1e-9);
}

TEST(Confusion, SingleItem) {
  auto p = confusion_matrix({L::factual}, {L::factual}).percentages();
  EXPECT_DOUBLE_EQ(p[0][0], 100.0);
  EXPECT_EQ(eval_error([] { confusion_matrix({L::factual}, {}); }), EvaluationErrorKind::misaligned);
}

// Published percentage tables (rows model label, columns human label) fed in
// as counts; the human wrong rate is the wrong column.
TEST(Confusion, PublishedWrongColumns) {
  struct Case {
    std::vector<std::vector<double>> cells;
    double wrong;
  };
  std::vector<Case> cases{
      {{{33.8, 2.8, 0.0}, {9.9, 28.2, 2.8}, {0.0, 18.3, 4.2}}, 7.0},
      {{{36.8, 1.5, 1.5}, {25.0, 19.1, 0.0}, {2.9, 13.2, 0.0}}, 1.5},
      {{{12.3, 3.0, 1.0}, {2.5, 59.6, 6.9}, {0.0, 11.8, 3.0}}, 10.9},
      {{{29.7, 9.5, 2.7}, {10.8, 28.4, 5.4}, {1.4, 5.4, 6.8}}, 14.9},
  };
  for (auto& c : cases) {
    auto m = from_rows(c.cells);
    EXPECT_NEAR(m.column_total(2), c.wrong, 0.1);
    EXPECT_NEAR(100.0 * m.column_total(2) / m.total(), c.wrong, 0.1);
  }
}

TEST(Polarity, Examples) {
  auto all = polarity_consensus(answers(4, 0, 0));
  EXPECT_DOUBLE_EQ(all.raw_mean, 1.0);
  EXPECT_DOUBLE_EQ(all.normalized, 1.0);
  EXPECT_TRUE(all.concur);
  auto even = polarity_consensus(answers(1, 1, 1));
  EXPECT_DOUBLE_EQ(even.raw_mean, 0.0);
  EXPECT_FALSE(even.concur);
  EXPECT_EQ(eval_error([] { polarity_consensus({}); }), EvaluationErrorKind::empty_denominator);
}

TEST(Polarity, PublishedAverages) {
  // (fully agree, disagree) proportions against the printed average polarity.
  struct Row {
    double fully, disagree, printed;
  };
  for (Row r : {Row{0.499, 0.238, 63.1}, Row{0.356, 0.444, 45.6}, Row{0.794, 0.042, 87.6}, Row{0.556, 0.187, 68.4}})
    EXPECT_NEAR(100.0 * polarity_from_proportions(r.fully, r.disagree).normalized, r.printed, 0.5);
  EXPECT_FALSE(polarity_from_proportions(0.356, 0.444).concur);
}

TEST(Polarity, NormalizedIdentity) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> c(0, 12);
  for (int trial = 0; trial < 200; ++trial) {
    int f = c(rng), s = c(rng), d = c(rng);
    if (f + s + d == 0) continue;
    auto p = polarity_consensus(answers(f, s, d));
    EXPECT_EQ(p.normalized, (p.raw_mean + 1) / 2);
    EXPECT_NEAR(p.raw_mean, double(f - d) / (f + s + d), 1e-12);
    EXPECT_EQ(p.concur, f > d);
  }
}

TEST(Removal, Examples) {
  EXPECT_TRUE(removal_agreement({true, true, false, false, false}));
  EXPECT_FALSE(removal_agreement({true, true, true, false, false}));
  EXPECT_FALSE(removal_agreement({true, true, false, false}));
  EXPECT_EQ(eval_error([] { removal_agreement({}); }), EvaluationErrorKind::empty_denominator);
}

TEST(Match, Examples) {
  auto never = [](const Triplet&, const Triplet&) { return false; };
  auto always = [](const Triplet&, const Triplet&) { return true; };
  Triplet walks = Triplet::make("Jesse", "walks", "dog");
  Triplet takes = Triplet::nest("Jesse", "takesFor", Triplet::unary("dog", "walks"));
  EXPECT_EQ(classify_match(walks, {Triplet::make("Jesse", "walks", "dog")}, never), MatchKind::exact);
  EXPECT_EQ(classify_match(walks, {takes}, always), MatchKind::semantic);
  EXPECT_EQ(classify_match(walks, {takes}, never), MatchKind::none);
  EXPECT_EQ(classify_match(walks, {}, always), MatchKind::none);
}

TEST(Match, OracleStopsAtFirstYes) {
  int calls = 0;
  auto oracle = [&](const Triplet&, const Triplet& b) {
    ++calls;
    return b.relation == "second";
  };
  std::vector<Triplet> others{Triplet::make("a", "first", "b"), Triplet::make("a", "second", "b"),
                              Triplet::make("a", "third", "b")};
  EXPECT_EQ(classify_match(Triplet::make("x", "y", "z"), others, oracle), MatchKind::semantic);
  EXPECT_EQ(calls, 2);
}

TEST(Match, TableOracle) {
  auto oracle = table_oracle(nlohmann::json::parse(R"j([["(Jesse, walks, dog)", "(Jesse, takesFor, (dog, walks, <none>))"]])j"));
  Triplet takes = Triplet::nest("Jesse", "takesFor", Triplet::unary("dog", "walks"));
  EXPECT_TRUE(oracle(takes, Triplet::make("Jesse", "walks", "dog")));
  EXPECT_FALSE(oracle(takes, Triplet::make("Jesse", "owns", "dog")));
}

TEST(Additions, Categories) {
  auto never = [](const Triplet&, const Triplet&) { return false; };
  std::vector<Triplet> kept{Triplet::make("dog", "isAt", "house")};
  std::vector<Triplet> discarded{Triplet::make("Addison", "owns", "dogs")};
  std::vector<AddedTriplet> adds{
      {0, Triplet::make("Addison", "owns", "dogs"), InferenceType::attribute},
      {0, Triplet::make("dog", "isAt", "house"), InferenceType::fact},
      {0, Triplet::make("Jesse", "has", "key"), InferenceType::fact},
      {0, Triplet::make("Jesse", "wants", "money"), InferenceType::intent},
  };
  auto report = categorize_additions(adds, kept, discarded, never);
  std::vector<AdditionCategory> expected{AdditionCategory::over_pruned, AdditionCategory::modification,
                                         AdditionCategory::missing_explicit, AdditionCategory::missing_implicit};
  EXPECT_EQ(report.categories, expected);
  EXPECT_DOUBLE_EQ(*report.overlap_with_discarded, 0.25);
  auto empty = categorize_additions({}, kept, discarded, never);
  EXPECT_TRUE(empty.categories.empty());
  EXPECT_FALSE(empty.overlap_with_discarded);
}

TEST(Additions, SemanticOverPruning) {
  auto always = [](const Triplet&, const Triplet&) { return true; };
  auto report = categorize_additions({{0, Triplet::make("x", "y", "z"), InferenceType::fact}},
                                     {Triplet::make("a", "b", "c")}, {Triplet::make("d", "e", "f")}, always);
  EXPECT_EQ(report.categories[0], AdditionCategory::over_pruned);
}

// ---- a small form evaluated end to end ----

namespace {

FormKey toy_key(const std::string& model = "m") {
  FormKey k;
  k.form_id = "f-" + model;
  k.dataset = "toy";
  k.model = model;
  k.classification = {{"a1", L::factual}, {"a2", L::deducible}, {"a3", L::wrong}};
  for (int i = 4; i <= 8; ++i) {
    k.classification["a" + std::to_string(i)] = L::wrong;
    k.attention_items.insert("a" + std::to_string(i));
  }
  k.event_state = {{"c1", EventState::event}, {"c2", EventState::state}};
  k.timing = {{"d1", TimingLabel::before}, {"d2", TimingLabel::no_clear_relation}};
  k.icr_items = k.icr_reason_items = k.icr_correction_items = {"b1"};
  SentenceKey s;
  s.sentence = "X did things.";
  s.generated = 3;
  s.kept = {Triplet::make("x", "r", "y")};
  s.discarded = {Triplet::make("x", "s", "z")};
  s.final_items = {"e1"};
  k.sentences = {s};
  return k;
}

AnnotationResponse toy_response(const std::string& who, std::vector<L> a, std::vector<EventState> c,
                                std::vector<TimingLabel> d, IcrAnswer b, bool remove, std::vector<AddedTriplet> adds) {
  AnnotationResponse r;
  r.annotator_id = who;
  r.form_id = "f-m";
  for (int i = 0; i < 3; ++i) r.triplet_classification["a" + std::to_string(i + 1)] = a[i];
  for (int i = 4; i <= 8; ++i) r.triplet_classification["a" + std::to_string(i)] = L::wrong;
  r.event_state = {{"c1", c[0]}, {"c2", c[1]}};
  r.timing = {{"d1", d[0]}, {"d2", d[1]}};
  r.icr["b1"] = b;
  if (remove) r.mec.removals.insert("e1");
  r.mec.additions = std::move(adds);
  r.attention_outcomes = attention_outcomes(r, toy_key());
  return r;
}

std::vector<AnnotationResponse> toy_responses() {
  using A = Agreement;
  using T = TimingLabel;
  using E = EventState;
  auto r1 = toy_response("r1", {L::factual, L::deducible, L::factual}, {E::event, E::state}, {T::before, T::before},
                         {A::fully_agree, A::fully_agree, A::somewhat_agree}, false,
                         {{0, Triplet::make("x", "s", "z"), InferenceType::intent},
                          {0, Triplet::make("x", "q", "w"), InferenceType::fact}});
  auto r2 = toy_response("r2", {L::factual, L::factual, L::factual}, {E::event, E::event}, {T::before, T::after},
                         {A::disagree, std::nullopt, std::nullopt}, true, {});
  auto r3 = toy_response("r3", {L::deducible, L::deducible, L::wrong}, {E::event, E::state}, {T::after, T::before},
                         {A::somewhat_agree, A::disagree, A::fully_agree}, false,
                         {{0, Triplet::make("x", "r", "y"), InferenceType::attribute}});
  auto cheat = r1;
  cheat.annotator_id = "r4";
  cheat.triplet_classification["a5"] = L::factual;
  cheat.attention_outcomes = attention_outcomes(cheat, toy_key());
  return {r1, r2, r3, cheat};
}

}  // namespace

TEST(Response, JsonRoundTripAndKeyCheck) {
  auto key = toy_key();
  for (const auto& r : toy_responses()) {
    check_response_against_key(r, key);
    auto back = annotation_response_from_json(nlohmann::json::parse(to_json(r).dump()));
    EXPECT_EQ(back, r);
  }
  EXPECT_EQ(form_key_from_json(nlohmann::json::parse(to_json(key).dump())), key);
}

TEST(Response, AttentionOutcomes) {
  auto rs = toy_responses();
  EXPECT_EQ(rs[0].attention_outcomes, std::vector<bool>(5, true));
  EXPECT_EQ(rs[3].attention_outcomes, (std::vector<bool>{true, false, true, true, true}));
}

TEST(Response, KeyCheckFailures) {
  auto key = toy_key();
  auto rs = toy_responses();
  auto missing = rs[0];
  missing.timing.erase("d2");
  EXPECT_EQ(schema_error([&] { check_response_against_key(missing, key); }), "$.timing.d2");
  auto gated = rs[1];
  gated.icr["b1"].reason_agreement = Agreement::fully_agree;
  EXPECT_EQ(schema_error([&] { check_response_against_key(gated, key); }), "$.icr.b1.reason_agreement");
  auto unanswered = rs[0];
  unanswered.icr["b1"].correction_agreement.reset();
  EXPECT_EQ(schema_error([&] { check_response_against_key(unanswered, key); }), "$.icr.b1.correction_agreement");
  auto stray = rs[0];
  stray.mec.removals.insert("e9");
  EXPECT_EQ(schema_error([&] { check_response_against_key(stray, key); }), "$.mec.removals");
}

TEST(Response, SchemaErrors) {
  auto good = to_json(toy_responses()[0]);
  auto no_version = good;
  no_version.erase("schema_version");
  EXPECT_EQ(schema_error([&] { annotation_response_from_json(no_version); }), "$.schema_version");
  auto no_section = good;
  no_section.erase("timing");
  EXPECT_EQ(schema_error([&] { annotation_response_from_json(no_section); }), "$.timing");
  auto short_att = good;
  short_att["attention_outcomes"] = {true, true};
  EXPECT_EQ(schema_error([&] { annotation_response_from_json(short_att); }), "$.attention_outcomes");
  auto bad_label = good;
  bad_label["triplet_classification"]["a1"] = "maybe";
  EXPECT_EQ(schema_error([&] { annotation_response_from_json(bad_label); }), "$.triplet_classification.a1");
  auto long_text = good;
  long_text["mec"]["additions"][0]["triplet"] = "(" + std::string(600, 'x') + ", r, y)";
  EXPECT_EQ(schema_error([&] { annotation_response_from_json(long_text); }), "$.mec.additions[0].triplet");
}

TEST(Response, StructuredAdditionFields) {
  auto j = to_json(toy_responses()[0]);
  j["mec"]["additions"] = nlohmann::json::array(
      {{{"sentence", 0}, {"subject", "dog"}, {"relation", "wants"}, {"object", ""}, {"inference_type", "intent"}}});
  auto r = annotation_response_from_json(j);
  EXPECT_EQ(r.mec.additions[0].triplet, Triplet::unary("dog", "wants"));
}

TEST(Ingest, LinesAndErrors) {
  std::ostringstream out;
  for (const auto& r : toy_responses()) out << to_json(r).dump() << "\n";
  out << "\n";
  std::istringstream in(out.str());
  EXPECT_EQ(ingest_responses(in).size(), 4u);

  std::istringstream bad(to_json(toy_responses()[0]).dump() + "\n{\"schema_version\": \"1\"}\n");
  EXPECT_EQ(schema_error([&] { ingest_responses(bad); }), "line 2 $.form_id");
  std::istringstream garbage("not json\n");
  EXPECT_EQ(schema_error([&] { ingest_responses(garbage); }), "line 1");
}

TEST(Evaluate, ToyFormByHand) {
  auto report = evaluate({toy_key()}, toy_responses(), nullptr);
  ASSERT_EQ(report.groups.size(), 1u);
  const GroupReport& g = report.groups[0];
  EXPECT_EQ(g.responses, 3u);
  EXPECT_EQ(g.excluded, 1u);

  EXPECT_EQ(g.classification.questions, 3u);
  EXPECT_NEAR(*g.classification.mha, 2.0 / 3, 1e-12);
  EXPECT_NEAR(*g.classification.kappa, 0.5, 1e-12);
  EXPECT_NEAR(*g.model_wrong_rate, 1.0 / 3, 1e-12);
  EXPECT_NEAR(*g.human_wrong_rate, 0.0, 1e-12);
  // model [1,1,1] vs human [2,1,0]: wrong is empty for humans but not for the model.
  EXPECT_NEAR(g.strictness_chi_squared->statistic, 4.0 / 3, 1e-12);
  EXPECT_NEAR(g.strictness_chi_squared->p_value, oracle::chi2_survival_df2(4.0 / 3), 1e-12);
  EXPECT_NEAR(*g.strictness_binomial_p, 8.0 / 27, 1e-12);

  EXPECT_DOUBLE_EQ(*g.event_state.mha, 1.0);
  EXPECT_DOUBLE_EQ(*g.event_state.kappa, 1.0);
  EXPECT_DOUBLE_EQ(*g.timing.mha, 0.5);
  EXPECT_NEAR(*g.timing.kappa, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(*g.model_abstain_rate, 0.5);
  EXPECT_DOUBLE_EQ(*g.human_abstain_rate, 0.0);

  EXPECT_DOUBLE_EQ(*g.icr_discard.mha, 0.0);
  EXPECT_DOUBLE_EQ(*g.icr.average_polarity, 0.5);
  EXPECT_NEAR(*g.icr.average_fully, 1.0 / 3, 1e-12);
  EXPECT_NEAR(*g.icr.average_disagree, 1.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(*g.icr.fully_majority_rate, 0.0);
  EXPECT_EQ(g.icr_reason.questions, 1u);
  EXPECT_DOUBLE_EQ(*g.icr_reason.mha, 0.0);
  EXPECT_DOUBLE_EQ(*g.icr.reason_polarity, 0.5);
  EXPECT_DOUBLE_EQ(*g.icr_correction.mha, 1.0);
  EXPECT_DOUBLE_EQ(*g.icr.correction_polarity, 0.75);

  EXPECT_DOUBLE_EQ(*g.mec_removal.mha, 1.0);
  EXPECT_DOUBLE_EQ(*g.output.removal_rate, 0.0);
  EXPECT_DOUBLE_EQ(*g.output.generated_median, 3.0);
  EXPECT_DOUBLE_EQ(*g.output.additions_median, 1.0);
  EXPECT_NEAR(*g.output.additions_overlap_with_discarded, 1.0 / 3, 1e-12);
  EXPECT_EQ(g.output.addition_categories.at(AdditionCategory::over_pruned), 1u);
  EXPECT_EQ(g.output.addition_categories.at(AdditionCategory::modification), 1u);
  EXPECT_EQ(g.output.addition_categories.at(AdditionCategory::missing_explicit), 1u);

  auto& cls = g.consensus.at("triplet_classification");
  EXPECT_NEAR(*cls.mean_majority_share, 2.0 / 3, 1e-12);
  EXPECT_FALSE(cls.vs_chance);  // every share equal
  EXPECT_NEAR(*g.consensus.at("model_error_correction").mean_majority_share, 2.0 / 3, 1e-12);

  auto j = to_json(report);
  EXPECT_EQ(j["groups"][0]["sections"]["timing_comparison"]["mha"], 0.5);
  auto table = render_report_table(report);
  EXPECT_NE(table.find("toy/m"), std::string::npos);
  EXPECT_NE(table.find("66.7%"), std::string::npos);
}

TEST(Evaluate, OverlapAndOrphans) {
  auto k1 = toy_key("m");
  auto k2 = toy_key("m2");
  k2.sentences[0].kept.push_back(Triplet::make("u", "v", "w"));
  auto oracle = table_oracle(nlohmann::json::parse(R"j([["(u, v, w)", "(x, r, y)"]])j"));
  auto rs = toy_responses();
  rs[0].form_id = "nope";
  auto report = evaluate({k1, k2}, rs, oracle);
  EXPECT_EQ(report.orphan_responses, 1u);
  ASSERT_EQ(report.overlaps.size(), 2u);
  EXPECT_EQ(report.overlaps[0].model, "m");
  EXPECT_EQ(report.overlaps[0].counts.at(MatchKind::exact), 1u);
  EXPECT_EQ(report.overlaps[1].model, "m2");
  EXPECT_EQ(report.overlaps[1].triplets, 2u);
  EXPECT_EQ(report.overlaps[1].counts.at(MatchKind::semantic), 1u);
}
