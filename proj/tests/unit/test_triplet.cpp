#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "iie/triplet.hpp"
#include "test_support.hpp"

using namespace iie;

namespace {

ParseErrorKind error_kind(auto&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected ParseError";
  return ParseErrorKind::empty_input;
}

Triplet nested_chain(int depth) {
  Triplet t = Triplet::make("a", "r", "b");
  for (int i = 1; i < depth; ++i) t = Triplet::nest("a", "r" + std::to_string(i), t);
  return t;
}

}  // namespace

TEST(EntityList, ParsesPromptExamples) {
  auto lines = test::example_lines("entity_extraction", "Entities: ");
  ASSERT_EQ(lines.size(), 3u);
  for (const auto& line : lines) {
    auto entities = parse_entity_list(line);
    EXPECT_EQ(render_canonical(entities), line);
  }
  auto max = parse_entity_list(lines[2]);
  ASSERT_EQ(max.size(), 4u);
  EXPECT_EQ(max[2].name, "Max’s car");
  EXPECT_EQ(max[2].type, EntityType::obj);
}

TEST(EntityList, CameronExample) {
  auto e = parse_entity_list("Cameron <per>; barbecue <msc>; friends <per>");
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0], (Entity{"Cameron", EntityType::per}));
  EXPECT_EQ(e[1], (Entity{"barbecue", EntityType::msc}));
  EXPECT_EQ(e[2], (Entity{"friends", EntityType::per}));
}

TEST(EntityList, Errors) {
  EXPECT_EQ(error_kind([] { parse_entity_list(""); }), ParseErrorKind::empty_input);
  EXPECT_EQ(error_kind([] { parse_entity_list("Cameron <person>"); }), ParseErrorKind::unknown_tag);
  EXPECT_EQ(error_kind([] { parse_entity_list("Cameron"); }), ParseErrorKind::malformed_segment);
  EXPECT_EQ(error_kind([] { parse_entity_list("Ann <per>; Ann <per>"); }), ParseErrorKind::duplicate_name);
}

TEST(EntityList, ResolvesDuplicatesWhenAsked) {
  std::vector<std::string> notes;
  ParseOptions opts;
  opts.resolve_duplicate_names = true;
  opts.notes = &notes;
  auto e = parse_entity_list("Entities: Ann <per>; Ann <per>", opts);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[1].name, "Ann (2)");
  EXPECT_EQ(notes.size(), 2u);
}

TEST(EntityList, AllTenTags) {
  auto e = parse_entity_list("a <per>; b <ani>; c <org>; d <gpe>; e <fac>; f <obj>; g <occ>; h <tim>; i <num>; j <msc>");
  ASSERT_EQ(e.size(), 10u);
  EXPECT_EQ(e[9].type, EntityType::msc);
}

TEST(TripletList, ParsesPromptExamples) {
  auto explicit_lines = test::example_lines("explicit_extraction", "Triplets: ");
  auto implicit_lines = test::example_lines("implicit_extraction", "Triplets: ");
  ASSERT_EQ(explicit_lines.size(), 4u);
  ASSERT_EQ(implicit_lines.size(), 3u);
  for (const auto& line : explicit_lines) {
    auto list = parse_triplet_list(line);
    EXPECT_EQ(render_canonical(list), line);
    for (const auto& item : list.items) EXPECT_TRUE(item.snippet.has_value());
  }
  for (const auto& line : implicit_lines) {
    auto list = parse_triplet_list(line);
    EXPECT_EQ(render_canonical(list), line);
  }
}

TEST(TripletList, KeepsSeparator) {
  EXPECT_EQ(parse_triplet_list("[(a, r, b); (c, s, d)]").separator, ';');
  EXPECT_EQ(parse_triplet_list("[(a, r, b), (c, s, d)]").separator, ',');
}

TEST(TripletList, JesseExplicit) {
  auto list = parse_triplet_list(
      "[(Jesse, petSittingFor, Addison) `Jesse was pet sitting for Addison`; (Jesse, goesTo, house) `Jesse came to "
      "Addison’s house`]");
  ASSERT_EQ(list.items.size(), 2u);
  EXPECT_EQ(list.items[0].triplet, Triplet::make("Jesse", "petSittingFor", "Addison"));
  EXPECT_EQ(*list.items[0].snippet, "Jesse was pet sitting for Addison");
  EXPECT_EQ(list.items[1].triplet.object_name() ? *list.items[1].triplet.object_name() : "", "house");
}

TEST(Triplet, NestedAndNone) {
  auto t = parse_triplet("(Mona, wants, (Mona, sleeps, <none>))");
  ASSERT_NE(t.nested(), nullptr);
  EXPECT_TRUE(t.nested()->has_none_object());
  EXPECT_EQ(t.depth(), 2);
  EXPECT_EQ(render_canonical(t), "(Mona, wants, (Mona, sleeps, <none>))");

  auto lewis = parse_triplet("(Lewis, mentions, (Lewis, wouldLike, (Lewis, isA, musician)))");
  EXPECT_EQ(lewis.depth(), 3);
  EXPECT_EQ(lewis, Triplet::nest("Lewis", "mentions",
                                 Triplet::nest("Lewis", "wouldLike", Triplet::make("Lewis", "isA", "musician"))));
}

TEST(Triplet, NormalizesFieldWhitespace) {
  EXPECT_EQ(parse_triplet("(  recital ,locatedAt,   town   square )"), Triplet::make("recital", "locatedAt", "town square"));
}

TEST(Triplet, Errors) {
  EXPECT_EQ(error_kind([] { parse_triplet("(a, r, b"); }), ParseErrorKind::unbalanced_parens);
  EXPECT_EQ(error_kind([] { parse_triplet("(a, r, (b, s, c)"); }), ParseErrorKind::unbalanced_parens);
  EXPECT_EQ(error_kind([] { parse_triplet("(a, , b)"); }), ParseErrorKind::empty_field);
  EXPECT_EQ(error_kind([] { parse_triplet("(<none>, r, b)"); }), ParseErrorKind::none_in_subject);
  EXPECT_EQ(error_kind([] { parse_triplet("((a, r, b), s, c)"); }), ParseErrorKind::nested_subject);
  EXPECT_EQ(error_kind([] { parse_triplet("(a, r, b) extra"); }), ParseErrorKind::trailing_input);
  EXPECT_EQ(error_kind([] { parse_triplet("(a, r)"); }), ParseErrorKind::malformed_segment);
  EXPECT_EQ(error_kind([] { parse_triplet("  "); }), ParseErrorKind::empty_input);
  EXPECT_EQ(error_kind([] { parse_triplet_list("[(a, r, b) `open"); }), ParseErrorKind::unterminated_snippet);
  EXPECT_EQ(error_kind([] { parse_triplet_list("[(a, r, b); (c, s, d)"); }), ParseErrorKind::unbalanced_parens);
}

TEST(Triplet, DepthCap) {
  for (int d = 1; d <= 5; ++d) {
    auto t = nested_chain(d);
    EXPECT_EQ(parse_triplet(render_canonical(t)), t) << d;
  }
  EXPECT_EQ(error_kind([] { parse_triplet(render_canonical(nested_chain(6))); }), ParseErrorKind::depth_exceeded);

  ParseOptions deeper;
  deeper.max_depth = 6;
  EXPECT_EQ(parse_triplet(render_canonical(nested_chain(6)), deeper).depth(), 6);
}

TEST(TripletList, SkipsLeadingProseWithNote) {
  std::vector<std::string> notes;
  ParseOptions opts;
  opts.notes = &notes;
  auto list = parse_triplet_list("Sure! Here are the triplets: [(a, r, b)]", opts);
  ASSERT_EQ(list.items.size(), 1u);
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_NE(notes[0].find("Sure!"), std::string::npos);
}

TEST(TripletList, AcceptsUnbracketedSequence) {
  auto list = parse_triplet_list("(a, r, b); (c, s, <none>)");
  ASSERT_EQ(list.items.size(), 2u);
  EXPECT_TRUE(list.items[1].triplet.has_none_object());
}

TEST(TaggedList, ParsesPromptExamples) {
  auto lines = test::example_lines("event_state_grounding", "Tags: ");
  ASSERT_EQ(lines.size(), 2u);
  for (const auto& line : lines) EXPECT_EQ(render_canonical(parse_tagged_list(line)), line);

  auto aubrey = parse_tagged_list(lines[1]);
  ASSERT_EQ(aubrey.items.size(), 3u);
  EXPECT_EQ(aubrey.items[1].tag.kind, EventState::event);
  EXPECT_EQ(aubrey.items[1].tag.time_ref, "next Wednesday");
  EXPECT_EQ(aubrey.items[2].tag.kind, EventState::state);
  EXPECT_FALSE(aubrey.items[2].tag.time_ref.has_value());
}

TEST(TaggedList, Errors) {
  EXPECT_EQ(error_kind([] { parse_tagged_list("[(a, r, b) `none`]"); }), ParseErrorKind::missing_tag);
  EXPECT_EQ(error_kind([] { parse_tagged_list("[(a, r, b) <process> `none`]"); }), ParseErrorKind::unknown_tag);
  EXPECT_EQ(error_kind([] { parse_tagged_list("[(a, r, b) <event>]"); }), ParseErrorKind::missing_time_field);
}

TEST(PairTags, ParsesPromptExamples) {
  auto lines = test::example_lines("temporal_relations", "Tags: ");
  ASSERT_EQ(lines.size(), 2u);
  for (const auto& line : lines) EXPECT_EQ(render_canonical(parse_pair_tags(line)), line);

  auto cameron = parse_pair_tags(lines[1]);
  ASSERT_EQ(cameron.items.size(), 2u);
  EXPECT_EQ(cameron.items[0].tag, TemporalTag::after);
  EXPECT_EQ(cameron.items[1].tag, TemporalTag::before);
  EXPECT_EQ(cameron.items[0].first, Triplet::make("Cameron", "hosted", "barbecue"));
}

TEST(PairTags, ArityAndArrow) {
  EXPECT_EQ(error_kind([] { parse_pair_tags("[((a, r, b)) -> <before>]"); }), ParseErrorKind::pair_arity);
  EXPECT_EQ(error_kind([] { parse_pair_tags("[((a, r, b), (c, s, d), (e, t, f)) -> <before>]"); }),
            ParseErrorKind::pair_arity);
  EXPECT_EQ(error_kind([] { parse_pair_tags("[((a, r, b), (c, s, d)) <before>]"); }), ParseErrorKind::missing_arrow);
  EXPECT_EQ(error_kind([] { parse_pair_tags("[((a, r, b), (c, s, d)) -> <during>]"); }), ParseErrorKind::unknown_tag);
  auto bare = parse_pair_tags("[((a, r, b), (c, s, d)) -> while]");
  EXPECT_EQ(bare.items[0].tag, TemporalTag::while_);
}

TEST(Judgment, VerdictAndExplanation) {
  auto yes = parse_judgment("yes");
  EXPECT_EQ(yes.verdict, Verdict::yes);
  EXPECT_FALSE(yes.explanation);

  auto no = parse_judgment("no; The text does not imply that Addison is the legal owner of the house.");
  EXPECT_EQ(no.verdict, Verdict::no);
  EXPECT_EQ(no.explanation, "The text does not imply that Addison is the legal owner of the house.");

  EXPECT_EQ(parse_judgment("  **No**, because reasons").verdict, Verdict::no);
  EXPECT_EQ(parse_judgment("YES.").verdict, Verdict::yes);
  EXPECT_EQ(error_kind([] { parse_judgment("maybe"); }), ParseErrorKind::unrecognized_verdict);
  EXPECT_EQ(error_kind([] { parse_judgment(""); }), ParseErrorKind::unrecognized_verdict);
}

TEST(Judgment, LongExplanationKeptWithNote) {
  std::vector<std::string> notes;
  ParseOptions opts;
  opts.notes = &notes;
  std::string text = "no;";
  for (int i = 0; i < 25; ++i) text += " word";
  auto j = parse_judgment(text, opts);
  EXPECT_TRUE(j.explanation);
  EXPECT_EQ(notes.size(), 1u);
}

TEST(Correction, NoneOrTriplet) {
  EXPECT_FALSE(parse_correction("none"));
  EXPECT_FALSE(parse_correction(" None. "));
  EXPECT_EQ(*parse_correction("(Addison, livesIn, house)"), Triplet::make("Addison", "livesIn", "house"));
  EXPECT_EQ(*parse_correction("Correction: (Addison, livesIn, house)"), Triplet::make("Addison", "livesIn", "house"));
  EXPECT_EQ(error_kind([] { parse_correction("I cannot say"); }), ParseErrorKind::malformed_segment);
}

TEST(Render, EntityNames) {
  std::vector<Entity> e{{"Jesse", EntityType::per}, {"house", EntityType::fac}};
  EXPECT_EQ(render_entity_names(e), "[Jesse, house]");
}

TEST(Lint, FormattingChecks) {
  std::vector<Entity> entities{{"Jesse", EntityType::per}, {"dog", EntityType::ani}};
  auto codes = [&](const Triplet& t, bool implicit) {
    std::vector<std::string> out;
    for (const auto& f : lint_triplet(t, entities, implicit)) out.push_back(f.code);
    return out;
  };
  EXPECT_TRUE(codes(Triplet::make("Jesse", "walks", "dog"), false).empty());
  EXPECT_EQ(codes(Triplet::make("Jesse", "walked", "dog"), false), std::vector<std::string>{"relation-tense"});
  EXPECT_EQ(codes(Triplet::make("Jesse", "pet sits", "dog"), false), std::vector<std::string>{"relation-whitespace"});
  EXPECT_EQ(codes(Triplet::make("Kai", "walks", "dog"), false), std::vector<std::string>{"unknown-entity"});
  // attribute objects are legal in explicit triplets
  EXPECT_TRUE(codes(Triplet::make("Jesse", "is", "athletic"), false).empty());
  auto implicit = lint_triplet(Triplet::make("Jesse", "likes", "dogs"), entities, true);
  ASSERT_EQ(implicit.size(), 1u);
  EXPECT_EQ(implicit[0].severity, LintSeverity::info);
  EXPECT_EQ(implicit[0].code, "new-entity");
}

// Random triplets survive render -> parse unchanged, for every list format.
TEST(Property, RoundTrip) {
  std::mt19937 rng(7);
  const std::vector<std::string> names{"Jesse", "Addison", "town square", "Max’s car", "dog", "a-b", "x_1"};
  const std::vector<std::string> relations{"walks", "isAt", "petSittingFor", "hasAttribute", "wants"};
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  std::function<Triplet(int)> gen = [&](int depth) {
    int r = static_cast<int>(rng() % 3);
    if (r == 0 && depth < 5) return Triplet::nest(pick(names), pick(relations), gen(depth + 1));
    if (r == 1) return Triplet::unary(pick(names), pick(relations));
    return Triplet::make(pick(names), pick(relations), pick(names));
  };
  for (int i = 0; i < 500; ++i) {
    Triplet t = gen(1);
    std::string text = render_canonical(t);
    ASSERT_EQ(parse_triplet(text), t) << text;
    ASSERT_EQ(render_canonical(parse_triplet(text)), text);

    ReplyList<SnippetTriplet> list{{{t, "snippet " + std::to_string(i)}, {gen(1), std::nullopt}},
                                   i % 2 ? ',' : ';'};
    ASSERT_EQ(parse_triplet_list(render_canonical(list)), list);

    ReplyList<TaggedTriplet> tags{{{t, {EventState::state, std::nullopt}}, {gen(1), {EventState::event, "monday"}}},
                                  ';'};
    ASSERT_EQ(parse_tagged_list(render_canonical(tags)), tags);

    ReplyList<TaggedPair> pairs{{{t, gen(1), static_cast<TemporalTag>(i % 4)}, {gen(1), t, TemporalTag::none}},
                                i % 2 ? ',' : ';'};
    ASSERT_EQ(parse_pair_tags(render_canonical(pairs)), pairs);
  }
}
