#include "iie/pipeline.hpp"

#include <algorithm>
#include <set>

namespace iie {

namespace {

using json = nlohmann::json;

constexpr std::string_view kStatusNames[] = {"candidate", "validated", "discarded_duplicate", "discarded_rejected"};

std::string step_name(PromptId id) { return std::string(to_string(id)); }

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

bool contains(const std::vector<Triplet>& v, const Triplet& t) { return std::find(v.begin(), v.end(), t) != v.end(); }

std::string render_pair(const Triplet& a, const Triplet& b) {
  return "(" + render_canonical(a) + ", " + render_canonical(b) + ")";
}

std::string pair_key(const Triplet& a, const Triplet& b) { return render_canonical(a) + "\x1f" + render_canonical(b); }

void lint_into(SentenceRun& run, const std::string& step, const Triplet& t, bool implicit) {
  for (const LintFinding& f : lint_triplet(t, run.entities, implicit)) {
    run.lints.push_back({step, f.code + ": " + f.message + " in " + render_canonical(t)});
  }
}

// Outcome of one classification attempt.
struct EchoCheck {
  std::optional<ReplyList<TaggedTriplet>> list;
  std::string error;
  bool echo_failed = false;
};

EchoCheck check_echo(const std::string& text, const std::vector<Triplet>& expected, const ParseOptions& opts) {
  EchoCheck out;
  try {
    auto list = parse_tagged_list(text, opts);
    if (list.items.size() != expected.size()) {
      out.echo_failed = true;
      out.error = "expected " + std::to_string(expected.size()) + " tagged triplets, got " +
                  std::to_string(list.items.size());
      return out;
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (!(list.items[i].triplet == expected[i])) {
        out.echo_failed = true;
        out.error = "triplet " + std::to_string(i + 1) + " not echoed verbatim: " +
                    render_canonical(list.items[i].triplet) + " instead of " + render_canonical(expected[i]);
        return out;
      }
    }
    out.list = std::move(list);
  } catch (const ParseError& e) {
    out.error = e.what();
  }
  return out;
}

json triplet_json(const Triplet& t) { return render_canonical(t); }

Triplet triplet_from(const json& j) {
  ParseOptions opts;
  opts.max_depth = 64;
  return parse_triplet(j.get<std::string>(), opts);
}

}  // namespace

std::string_view to_string(RecordStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }

PipelineError::PipelineError(PipelineErrorKind kind, const std::string& detail)
    : std::runtime_error(detail), kind_(kind) {}

PipelineAborted::PipelineAborted(std::string step, const std::string& cause, SentenceRun partial)
    : PipelineError(PipelineErrorKind::aborted, step + ": " + cause), step_(std::move(step)),
      partial_(std::move(partial)) {}

std::vector<const ExtractionRecord*> SentenceRun::validated() const {
  std::vector<const ExtractionRecord*> out;
  for (const auto& r : records) {
    if (r.status == RecordStatus::validated) out.push_back(&r);
  }
  return out;
}

TemporalTag reconcile_relation_pair(TemporalTag ab, TemporalTag ba) {
  if (ab == TemporalTag::before && ba == TemporalTag::after) return TemporalTag::before;
  if (ab == TemporalTag::after && ba == TemporalTag::before) return TemporalTag::after;
  if (ab == TemporalTag::while_ && ba == TemporalTag::while_) return TemporalTag::while_;
  return TemporalTag::none;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> plan_pair_batches(std::size_t n, std::size_t batch_size,
                                                                                 bool split_orders) {
  using Pair = std::pair<std::size_t, std::size_t>;
  if (batch_size == 0) throw std::invalid_argument("pair batch size must be positive");
  std::vector<std::vector<Pair>> groups;
  if (split_orders) {
    std::vector<Pair> forward, reverse;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        forward.emplace_back(i, j);
        reverse.emplace_back(j, i);
      }
    }
    groups = {std::move(forward), std::move(reverse)};
  } else {
    std::vector<Pair> all;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) all.emplace_back(i, j);
      }
    }
    groups = {std::move(all)};
  }
  std::vector<std::vector<Pair>> batches;
  for (const auto& group : groups) {
    for (std::size_t start = 0; start < group.size(); start += batch_size) {
      auto end = std::min(group.size(), start + batch_size);
      batches.emplace_back(group.begin() + static_cast<std::ptrdiff_t>(start),
                           group.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  return batches;
}

Pipeline::Pipeline(Gateway& gateway, const PromptLibrary& prompts, PipelineConfig config)
    : gateway_(gateway), prompts_(prompts), config_(config) {
  if (config_.max_strikes < 1) throw std::invalid_argument("max_strikes must be >= 1");
}

ParseOptions Pipeline::parse_options(std::vector<std::string>* notes) const {
  ParseOptions opts;
  opts.max_depth = config_.max_depth;
  opts.explanation_word_cap = config_.explanation_word_cap;
  opts.notes = notes;
  return opts;
}

void Pipeline::note_all(SentenceRun& run, const std::string& step, const std::vector<std::string>& notes) {
  for (const auto& n : notes) run.lints.push_back({step, n});
}

std::vector<Entity> Pipeline::extract_entities(SentenceRun& run) {
  if (blank(run.sentence)) throw PipelineError(PipelineErrorKind::empty_sentence, "empty context sentence");
  const PromptId id = PromptId::entity_extraction;
  std::string prompt = prompts_.render(id, {{"context sentence", run.sentence}});
  std::vector<std::string> notes;
  auto entities = gateway_.complete_parsed({run.run_id, step_name(id)}, prompt, format_hint(id), run.transcript,
                                           [&](const std::string& text) {
                                             notes.clear();
                                             ParseOptions opts = parse_options(&notes);
                                             opts.resolve_duplicate_names = true;
                                             return parse_entity_list(text, opts);
                                           });
  note_all(run, step_name(id), notes);
  return entities;
}

std::vector<ExtractionRecord> Pipeline::extract_explicit(SentenceRun& run, const std::vector<Entity>& entities) {
  const PromptId id = PromptId::explicit_extraction;
  std::string step = step_name(id);
  std::string prompt =
      prompts_.render(id, {{"context sentence", run.sentence}, {"extracted entities", render_entity_names(entities)}});
  std::vector<std::string> notes;
  auto list = gateway_.complete_parsed({run.run_id, step}, prompt, format_hint(id), run.transcript,
                                       [&](const std::string& text) {
                                         notes.clear();
                                         return parse_triplet_list(text, parse_options(&notes));
                                       });
  note_all(run, step, notes);

  std::vector<ExtractionRecord> out;
  std::vector<Triplet> seen;
  for (auto& item : list.items) {
    std::string rendered = render_canonical(item.triplet);
    if (!item.snippet || blank(*item.snippet)) {
      run.lints.push_back({step, "dropped explicit triplet without snippet: " + rendered});
      continue;
    }
    if (contains(seen, item.triplet)) {
      run.lints.push_back({step, "dropped repeated explicit triplet: " + rendered});
      continue;
    }
    seen.push_back(item.triplet);
    lint_into(run, step, item.triplet, false);
    out.push_back(ExtractionRecord{item.triplet, Provenance::from_snippet(*item.snippet), RecordStatus::validated, {}, {}});
  }
  return out;
}

std::vector<ExtractionRecord> Pipeline::extract_implicit(SentenceRun& run, const std::vector<Entity>& entities) {
  const PromptId id = PromptId::implicit_extraction;
  std::string step = step_name(id);
  // Conditioned on the sentence and entities only.
  std::string prompt =
      prompts_.render(id, {{"context sentence", run.sentence}, {"extracted entities", render_entity_names(entities)}});
  std::vector<std::string> notes;
  auto list = gateway_.complete_parsed({run.run_id, step}, prompt, format_hint(id), run.transcript,
                                       [&](const std::string& text) {
                                         notes.clear();
                                         return parse_triplet_list(text, parse_options(&notes));
                                       });
  note_all(run, step, notes);

  std::vector<ExtractionRecord> out;
  for (auto& item : list.items) {
    if (item.snippet) run.lints.push_back({step, "ignored snippet on implicit triplet " + render_canonical(item.triplet)});
    lint_into(run, step, item.triplet, true);
    out.push_back(ExtractionRecord{item.triplet, Provenance::inferred(), RecordStatus::candidate, {}, {}});
  }
  return out;
}

bool Pipeline::remove_duplicate(SentenceRun& run, const Triplet& candidate, const std::vector<Triplet>& accepted) {
  const PromptId id = PromptId::duplicate_removal;
  std::string step = step_name(id);
  std::string prompt = prompts_.render(id, {{"context sentence", run.sentence},
                                            {"extracted relationships", render_canonical(accepted, ',')},
                                            {"implicit triplet to analyze", render_canonical(candidate)}});
  try {
    auto verdict = gateway_.complete_parsed({run.run_id, step}, prompt, format_hint(id), run.transcript,
                                            [&](const std::string& text) { return parse_judgment(text, parse_options(nullptr)); });
    return verdict.verdict == Verdict::yes;
  } catch (const GatewayError& e) {
    if (e.kind() != GatewayErrorKind::format_unrecoverable) throw;
    run.lints.push_back({step, "unreadable duplicate verdict, kept " + render_canonical(candidate)});
    return false;
  }
}

JudgmentReply Pipeline::challenge_inference(SentenceRun& run, const Triplet& candidate) {
  const PromptId id = PromptId::inference_challenge;
  std::string step = step_name(id);
  std::string prompt = prompts_.render(
      id, {{"context sentence", run.sentence}, {"implicit triplet to analyze", render_canonical(candidate)}});
  std::vector<std::string> notes;
  auto reply = gateway_.complete_parsed({run.run_id, step}, prompt, format_hint(id), run.transcript,
                                        [&](const std::string& text) {
                                          notes.clear();
                                          return parse_judgment(text, parse_options(&notes));
                                        });
  note_all(run, step, notes);
  return reply;
}

std::optional<Triplet> Pipeline::correct_inference(SentenceRun& run, const Triplet& discarded,
                                                   const std::string& explanation) {
  const PromptId id = PromptId::inference_correction;
  std::string step = step_name(id);
  std::string prompt = prompts_.render(id, {{"context sentence", run.sentence},
                                            {"implicit triplet to correct", render_canonical(discarded)},
                                            {"reason for discarding the triplet", explanation}});
  std::vector<std::string> notes;
  auto reply = gateway_.complete_parsed({run.run_id, step}, prompt, format_hint(id), run.transcript,
                                        [&](const std::string& text) {
                                          notes.clear();
                                          return parse_correction(text, parse_options(&notes));
                                        });
  note_all(run, step, notes);
  return reply;
}

std::vector<Triplet> Pipeline::explain_inference(SentenceRun& run, const Triplet& validated,
                                                 const std::vector<Triplet>& explicit_triplets) {
  const PromptId id = PromptId::inference_explanation;
  std::string step = step_name(id);
  std::string prompt = prompts_.render(id, {{"context sentence", run.sentence},
                                            {"implicit triplet to explain", render_canonical(validated)},
                                            {"extracted explicit relationships", render_canonical(explicit_triplets, ',')}});
  std::vector<std::string> notes;
  auto list = gateway_.complete_parsed({run.run_id, step}, prompt, format_hint(id), run.transcript,
                                       [&](const std::string& text) {
                                         notes.clear();
                                         return parse_triplet_list(text, parse_options(&notes));
                                       });
  note_all(run, step, notes);
  std::vector<Triplet> premises;
  for (const auto& item : list.items) {
    if (!contains(explicit_triplets, item.triplet)) {
      run.lints.push_back({step, "dropped premise that is not an explicit triplet: " + render_canonical(item.triplet)});
      continue;
    }
    if (!contains(premises, item.triplet)) premises.push_back(item.triplet);
  }
  return premises;
}

std::vector<TaggedTriplet> Pipeline::classify_and_ground(SentenceRun& run, const std::vector<Triplet>& validated) {
  const PromptId id = PromptId::event_state_grounding;
  std::string step = step_name(id);
  if (validated.empty()) return {};
  std::string prompt = prompts_.render(
      id, {{"context sentence", run.sentence}, {"extracted relationships", render_canonical(validated, ';')}});
  std::vector<std::string> notes;
  StepContext ctx{run.run_id, step};

  CompletionReply first = gateway_.complete(ctx, prompt, run.transcript);
  EchoCheck check = check_echo(first.text, validated, parse_options(&notes));
  if (!check.list) {
    notes.clear();
    CompletionReply second = gateway_.reprompt_on_parse_failure(ctx, prompt, check.error, format_hint(id), run.transcript);
    check = check_echo(second.text, validated, parse_options(&notes));
    if (!check.list) {
      if (check.echo_failed) throw PipelineError(PipelineErrorKind::echo_mismatch, step + ": " + check.error);
      throw GatewayError(GatewayErrorKind::format_unrecoverable, step + ": " + check.error);
    }
  }
  note_all(run, step, notes);
  return check.list->items;
}

std::map<std::pair<std::size_t, std::size_t>, TemporalTag> Pipeline::extract_pairwise_relations(
    SentenceRun& run, const std::vector<Triplet>& validated) {
  const PromptId id = PromptId::temporal_relations;
  std::string step = step_name(id);
  std::map<std::pair<std::size_t, std::size_t>, TemporalTag> tags;
  if (validated.size() < 2) return tags;

  for (const auto& batch : plan_pair_batches(validated.size(), config_.pair_batch_size, config_.split_pair_orders)) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> wanted;
    std::string pairs = "[";
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const auto& [i, j] = batch[k];
      if (k > 0) pairs += ", ";
      pairs += render_pair(validated[i], validated[j]);
      wanted.emplace(pair_key(validated[i], validated[j]), batch[k]);
    }
    pairs += "]";
    std::string prompt = prompts_.render(id, {{"context sentence", run.sentence}, {"pairs of extracted triplets", pairs}});
    StepContext ctx{run.run_id, step};

    std::vector<std::string> notes;
    auto absorb = [&](const ReplyList<TaggedPair>& reply) {
      for (const TaggedPair& p : reply.items) {
        auto it = wanted.find(pair_key(p.first, p.second));
        if (it == wanted.end()) {
          run.lints.push_back({step, "ignored tag for a pair that was not asked: " + render_canonical(p)});
          continue;
        }
        if (!tags.emplace(it->second, p.tag).second) {
          run.lints.push_back({step, "ignored repeated tag for " + render_pair(p.first, p.second)});
        }
      }
    };
    auto missing = [&] {
      std::size_t n = 0;
      for (const auto& pr : batch) n += tags.count(pr) ? 0 : 1;
      return n;
    };

    auto reply = gateway_.complete_parsed(ctx, prompt, format_hint(id), run.transcript, [&](const std::string& text) {
      notes.clear();
      return parse_pair_tags(text, parse_options(&notes));
    });
    note_all(run, step, notes);
    absorb(reply);
    if (std::size_t gap = missing(); gap > 0) {
      CompletionReply again = gateway_.reprompt_on_parse_failure(
          ctx, prompt, std::to_string(gap) + " of the pairs have no tag", format_hint(id), run.transcript);
      try {
        notes.clear();
        absorb(parse_pair_tags(again.text, parse_options(&notes)));
        note_all(run, step, notes);
      } catch (const ParseError& e) {
        run.lints.push_back({step, std::string("unreadable re-prompt reply: ") + e.what()});
      }
    }
    for (const auto& pr : batch) {
      if (tags.emplace(pr, TemporalTag::none).second) {
        run.lints.push_back({step, "no tag for " + render_pair(validated[pr.first], validated[pr.second]) +
                                       ", using none"});
      }
    }
  }
  return tags;
}

void Pipeline::validate_candidates(SentenceRun& run, std::vector<ExtractionRecord>& candidates) {
  std::vector<Triplet> accepted;
  for (const auto& r : run.records) {
    if (r.status == RecordStatus::validated) accepted.push_back(r.triplet);
  }
  const std::string dup_step = step_name(PromptId::duplicate_removal);

  for (ExtractionRecord& rec : candidates) {
    if (rec.status != RecordStatus::candidate) continue;
    Triplet current = rec.triplet;
    int strikes = 0;
    while (true) {
      rec.triplet = current;
      if (remove_duplicate(run, current, accepted)) {
        rec.status = RecordStatus::discarded_duplicate;
        break;
      }
      if (contains(accepted, current)) {
        run.lints.push_back({dup_step, "model kept an exact repeat, discarded: " + render_canonical(current)});
        rec.status = RecordStatus::discarded_duplicate;
        break;
      }
      JudgmentReply judgment = challenge_inference(run, current);
      ChallengeRound round{current, judgment.verdict, judgment.explanation, std::nullopt};
      if (judgment.verdict == Verdict::yes) {
        rec.challenge_rounds.push_back(std::move(round));
        rec.status = RecordStatus::validated;
        accepted.push_back(current);
        break;
      }
      if (++strikes >= config_.max_strikes) {
        rec.challenge_rounds.push_back(std::move(round));
        rec.status = RecordStatus::discarded_rejected;
        break;
      }
      if (!judgment.explanation) {
        run.lints.push_back({step_name(PromptId::inference_challenge),
                             "rejection without explanation for " + render_canonical(current)});
      }
      round.correction = correct_inference(run, current, judgment.explanation.value_or(""));
      rec.challenge_rounds.push_back(round);
      if (!round.correction) {
        rec.status = RecordStatus::discarded_rejected;
        break;
      }
      current = *round.correction;
      lint_into(run, step_name(PromptId::inference_correction), current, true);
    }
  }
}

SentenceResult Pipeline::run_sentence(const std::string& run_id, const std::string& sentence) {
  SentenceRun run;
  run.run_id = run_id;
  run.sentence = sentence;
  if (blank(sentence)) throw PipelineError(PipelineErrorKind::empty_sentence, "empty context sentence");

  std::string step = "entity_extraction";
  try {
    run.entities = extract_entities(run);

    step = "explicit_extraction";
    run.records = extract_explicit(run, run.entities);

    step = "implicit_extraction";
    std::vector<ExtractionRecord> candidates = extract_implicit(run, run.entities);

    step = "validation";
    validate_candidates(run, candidates);
    std::vector<Triplet> explicit_triplets;
    for (const auto& r : run.records) explicit_triplets.push_back(r.triplet);
    for (auto& c : candidates) run.records.push_back(std::move(c));

    step = "inference_explanation";
    for (auto& r : run.records) {
      if (r.status == RecordStatus::validated && !r.provenance.is_explicit()) {
        r.premises = explain_inference(run, r.triplet, explicit_triplets);
      }
    }

    std::vector<Triplet> validated;
    for (const ExtractionRecord* r : run.validated()) validated.push_back(r->triplet);

    step = "event_state_grounding";
    run.event_state_tags = classify_and_ground(run, validated);

    step = "temporal_relations";
    auto tags = extract_pairwise_relations(run, validated);
    for (const auto& [pair, tag] : tags) run.pair_tags.push_back({validated[pair.first], validated[pair.second], tag});
    for (std::size_t i = 0; i < validated.size(); ++i) {
      for (std::size_t j = i + 1; j < validated.size(); ++j) {
        run.temporal_relations.push_back(
            {validated[i], validated[j], reconcile_relation_pair(tags.at({i, j}), tags.at({j, i}))});
      }
    }

    step = "graph";
    TwoTierKG kg = build_graph(run, gateway_.config().model_id);
    return SentenceResult{std::move(run), std::move(kg)};
  } catch (const PipelineAborted&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineAborted(step, e.what(), std::move(run));
  }
}

std::vector<FinalRecord> final_records(const SentenceRun& run) {
  std::vector<FinalRecord> out;
  for (const ExtractionRecord* r : run.validated()) {
    FinalRecord f{r->triplet, r->provenance, r->premises, {}};
    for (std::size_t i = 0; i < r->challenge_rounds.size(); ++i) {
      const ChallengeRound& round = r->challenge_rounds[i];
      int n = static_cast<int>(i) + 1;
      f.audit.push_back({"inference_challenge", n, std::string(to_string(round.verdict)), round.explanation});
      if (round.correction) {
        f.audit.push_back({"inference_correction", n, "corrected", render_canonical(*round.correction)});
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

TwoTierKG build_graph(const SentenceRun& run, const std::string& model_id) {
  return build_graph(run.sentence, model_id, run.entities, final_records(run), run.event_state_tags,
                     run.temporal_relations);
}

json to_json(const SentenceRun& run) {
  json j;
  j["schema_version"] = "1";
  j["run_id"] = run.run_id;
  j["sentence"] = run.sentence;
  j["entities"] = json::array();
  for (const Entity& e : run.entities) j["entities"].push_back({{"name", e.name}, {"type", std::string(to_string(e.type))}});
  j["records"] = json::array();
  for (const ExtractionRecord& r : run.records) {
    json rj{{"triplet", triplet_json(r.triplet)},
            {"kind", r.provenance.is_explicit() ? "explicit" : "implicit"},
            {"status", std::string(to_string(r.status))}};
    if (r.provenance.snippet) rj["snippet"] = *r.provenance.snippet;
    if (r.provenance.inference_type) rj["inference_type"] = std::string(to_string(*r.provenance.inference_type));
    rj["rounds"] = json::array();
    for (const ChallengeRound& c : r.challenge_rounds) {
      json cj{{"triplet", triplet_json(c.triplet)}, {"verdict", std::string(to_string(c.verdict))}};
      if (c.explanation) cj["explanation"] = *c.explanation;
      if (c.correction) cj["correction"] = triplet_json(*c.correction);
      rj["rounds"].push_back(std::move(cj));
    }
    rj["premises"] = json::array();
    for (const Triplet& p : r.premises) rj["premises"].push_back(triplet_json(p));
    j["records"].push_back(std::move(rj));
  }
  j["event_state_tags"] = json::array();
  for (const TaggedTriplet& t : run.event_state_tags) {
    json tj{{"triplet", triplet_json(t.triplet)}, {"kind", std::string(to_string(t.tag.kind))}};
    if (t.tag.time_ref) tj["time_ref"] = *t.tag.time_ref;
    j["event_state_tags"].push_back(std::move(tj));
  }
  j["pair_tags"] = json::array();
  for (const TaggedPair& p : run.pair_tags) {
    j["pair_tags"].push_back(
        {{"first", triplet_json(p.first)}, {"second", triplet_json(p.second)}, {"tag", std::string(to_string(p.tag))}});
  }
  j["temporal_relations"] = json::array();
  for (const TemporalRelation& r : run.temporal_relations) {
    j["temporal_relations"].push_back(
        {{"first", triplet_json(r.first)}, {"second", triplet_json(r.second)}, {"tag", std::string(to_string(r.tag))}});
  }
  j["lints"] = json::array();
  for (const RunLint& l : run.lints) j["lints"].push_back({{"step", l.step}, {"message", l.message}});
  return j;
}

SentenceRun sentence_run_from_json(const json& j) {
  auto need = [](auto opt, const std::string& what) {
    if (!opt) throw std::invalid_argument("bad " + what + " in run file");
    return *opt;
  };
  SentenceRun run;
  if (j.at("schema_version").get<std::string>() != "1") throw std::invalid_argument("unsupported run schema_version");
  run.run_id = j.at("run_id").get<std::string>();
  run.sentence = j.at("sentence").get<std::string>();
  for (const json& e : j.at("entities")) {
    run.entities.push_back({e.at("name").get<std::string>(), need(entity_type_from(e.at("type").get<std::string>()), "entity type")});
  }
  for (const json& rj : j.at("records")) {
    ExtractionRecord r;
    r.triplet = triplet_from(rj.at("triplet"));
    std::string kind = rj.at("kind").get<std::string>();
    if (kind == "explicit") {
      r.provenance = Provenance::from_snippet(rj.value("snippet", ""));
    } else {
      r.provenance = Provenance::inferred();
      if (rj.contains("inference_type")) {
        r.provenance.inference_type = need(inference_type_from(rj["inference_type"].get<std::string>()), "inference type");
      }
    }
    std::string status = rj.at("status").get<std::string>();
    auto it = std::find(std::begin(kStatusNames), std::end(kStatusNames), status);
    if (it == std::end(kStatusNames)) throw std::invalid_argument("bad status in run file: " + status);
    r.status = static_cast<RecordStatus>(it - std::begin(kStatusNames));
    for (const json& cj : rj.at("rounds")) {
      ChallengeRound c;
      c.triplet = triplet_from(cj.at("triplet"));
      c.verdict = cj.at("verdict").get<std::string>() == "yes" ? Verdict::yes : Verdict::no;
      if (cj.contains("explanation")) c.explanation = cj["explanation"].get<std::string>();
      if (cj.contains("correction")) c.correction = triplet_from(cj["correction"]);
      r.challenge_rounds.push_back(std::move(c));
    }
    for (const json& p : rj.at("premises")) r.premises.push_back(triplet_from(p));
    run.records.push_back(std::move(r));
  }
  for (const json& tj : j.at("event_state_tags")) {
    EventStateTag tag{need(event_state_from(tj.at("kind").get<std::string>()), "event/state kind"), std::nullopt};
    if (tj.contains("time_ref")) tag.time_ref = tj["time_ref"].get<std::string>();
    run.event_state_tags.push_back({triplet_from(tj.at("triplet")), tag});
  }
  for (const json& pj : j.at("pair_tags")) {
    run.pair_tags.push_back({triplet_from(pj.at("first")), triplet_from(pj.at("second")),
                             need(temporal_tag_from(pj.at("tag").get<std::string>()), "temporal tag")});
  }
  for (const json& rj : j.at("temporal_relations")) {
    run.temporal_relations.push_back({triplet_from(rj.at("first")), triplet_from(rj.at("second")),
                                      need(temporal_tag_from(rj.at("tag").get<std::string>()), "temporal tag")});
  }
  for (const json& lj : j.at("lints")) run.lints.push_back({lj.at("step").get<std::string>(), lj.at("message").get<std::string>()});
  return run;
}

}  // namespace iie
