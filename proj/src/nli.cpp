#include "iie/nli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>
#include <thread>
#include <tuple>

#include "httplib.h"

namespace iie {

using json = nlohmann::json;

NliError::NliError(NliErrorKind kind, const std::string& detail) : std::runtime_error(detail), kind_(kind) {}

NliScore make_nli_score(double e, double n, double c) {
  for (double v : {e, n, c})
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw NliError(NliErrorKind::non_probabilistic_reply, "probability outside [0, 1]: " + std::to_string(v));
  double sum = e + n + c;
  if (std::fabs(sum - 1.0) > kProbabilitySumTolerance)
    throw NliError(NliErrorKind::non_probabilistic_reply, "probabilities sum to " + std::to_string(sum));
  return {e / sum, n / sum, c / sum};
}

bool entailment_is_argmax(const NliScore& s) { return s.p_ent > s.p_neu && s.p_ent > s.p_con; }

std::vector<HypothesisPair> build_hypothesis_pairs(const std::string& sentence, const std::vector<Triplet>& triplets,
                                                   const VerbalizerConfig& config) {
  std::vector<HypothesisPair> out;
  out.reserve(triplets.size());
  for (const Triplet& t : triplets) out.push_back({sentence, verbalize(t, config)});
  return out;
}

// ---- HTTP scorer

HttpNliScorer::HttpNliScorer(std::string base_url, std::chrono::seconds timeout) : timeout_(timeout) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url, m, url_re))
    throw NliError(NliErrorKind::endpoint_unreachable, "bad NLI endpoint URL " + base_url);
  host_ = m[1].str();
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix.ends_with("/score") ? prefix : prefix + "/score";
}

json HttpNliScorer::request_body(const HypothesisPair& pair) {
  return {{"premise", pair.premise}, {"hypothesis", pair.hypothesis}};
}

NliScore HttpNliScorer::parse_reply_body(std::string_view body) {
  try {
    json j = json::parse(body);
    return make_nli_score(j.at("entailment").get<double>(), j.at("neutral").get<double>(),
                          j.at("contradiction").get<double>());
  } catch (const json::exception& e) {
    throw NliError(NliErrorKind::non_probabilistic_reply, std::string("unexpected NLI reply: ") + e.what());
  }
}

NliScore HttpNliScorer::score(const HypothesisPair& pair) {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  auto res = client.Post(path_, request_body(pair).dump(), "application/json");
  if (!res)
    throw NliError(NliErrorKind::endpoint_unreachable,
                   "POST " + host_ + path_ + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw NliError(res->status >= 500 ? NliErrorKind::endpoint_unreachable : NliErrorKind::non_probabilistic_reply,
                   "HTTP " + std::to_string(res->status) + " from " + host_ + path_);
  return parse_reply_body(res->body);
}

// ---- scripted scorer

namespace {

std::array<double, 3> triple(const json& j) {
  if (!j.is_array() || j.size() != 3) throw NliError(NliErrorKind::non_probabilistic_reply, "expected [e, n, c]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::shared_ptr<ScriptedNliScorer> ScriptedNliScorer::from_json(const json& j) {
  auto s = std::make_shared<ScriptedNliScorer>();
  if (j.contains("scores"))
    for (auto& [hyp, v] : j["scores"].items()) s->set(hyp, triple(v));
  if (j.contains("default")) s->set_default(triple(j["default"]));
  return s;
}

void ScriptedNliScorer::set(const std::string& hypothesis, std::array<double, 3> raw) {
  std::lock_guard lock(mu_);
  scores_[hypothesis] = raw;
}

NliScore ScriptedNliScorer::score(const HypothesisPair& pair) {
  std::array<double, 3> raw;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    auto it = scores_.find(pair.hypothesis);
    if (it != scores_.end())
      raw = it->second;
    else if (fallback_)
      raw = *fallback_;
    else
      throw NliError(NliErrorKind::endpoint_unreachable, "no scripted score for '" + pair.hypothesis + "'");
  }
  return make_nli_score(raw[0], raw[1], raw[2]);
}

std::size_t ScriptedNliScorer::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::vector<NliScore> score_pairs(NliScorer& scorer, const std::vector<HypothesisPair>& pairs,
                                  std::size_t concurrency) {
  std::vector<NliScore> out(pairs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      try {
        out[i] = scorer.score(pairs[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        next = pairs.size();
      }
    }
  };
  std::size_t n = std::clamp<std::size_t>(concurrency, 1, std::max<std::size_t>(pairs.size(), 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

// ---- aggregation

namespace {

std::string group_name(TripletLabel l) {
  switch (l) {
    case TripletLabel::factual: return "Factual";
    case TripletLabel::deducible: return "Deducible";
    case TripletLabel::wrong: return "Wrong";
  }
  return "?";
}

// Sums in sorted order so the result does not depend on input order.
double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

GroupAggregate aggregate(const std::string& dataset, const std::string& model, const std::string& group,
                         const std::vector<const NliItem*>& items) {
  GroupAggregate g{dataset, model, group, 0, 0, 0, 0, items.size()};
  std::vector<double> e, n, c;
  std::size_t entailed = 0;
  for (auto* it : items) {
    e.push_back(it->score.p_ent);
    n.push_back(it->score.p_neu);
    c.push_back(it->score.p_con);
    entailed += entailment_is_argmax(it->score);
  }
  g.mean_p_ent = sorted_mean(e);
  g.mean_p_neu = sorted_mean(n);
  g.mean_p_con = sorted_mean(c);
  g.entail_rate = static_cast<double>(entailed) / static_cast<double>(items.size());
  return g;
}

}  // namespace

std::vector<GroupAggregate> aggregate_check(const std::vector<NliItem>& items, Grouping grouping) {
  std::map<std::tuple<std::string, std::string, TripletLabel>, std::vector<const NliItem*>> groups;
  for (const NliItem& it : items) {
    std::optional<TripletLabel> label = grouping == Grouping::by_human_label ? it.human_label : it.pipeline_label;
    if (!label) continue;
    groups[{it.dataset, it.model, *label}].push_back(&it);
  }
  std::vector<GroupAggregate> out;
  for (auto& [key, members] : groups)
    out.push_back(aggregate(std::get<0>(key), std::get<1>(key), group_name(std::get<2>(key)), members));
  return out;
}

DisagreementGroups select_disagreement_groups(const std::vector<NliItem>& items) {
  DisagreementGroups g;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const NliItem& it = items[i];
    if (!it.human_label) continue;
    bool discarded = it.pipeline_label == TripletLabel::wrong;
    bool human_wrong = *it.human_label == TripletLabel::wrong;
    if (!human_wrong && discarded) g.group_a.push_back(i);
    if (human_wrong && !discarded) g.group_b.push_back(i);
  }
  return g;
}

std::vector<GroupAggregate> aggregate_disagreement(const std::vector<NliItem>& items) {
  auto sel = select_disagreement_groups(items);
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const NliItem*>> groups;
  for (std::size_t i : sel.group_a) groups[{items[i].dataset, items[i].model, "A"}].push_back(&items[i]);
  for (std::size_t i : sel.group_b) groups[{items[i].dataset, items[i].model, "B"}].push_back(&items[i]);
  std::vector<GroupAggregate> out;
  for (auto& [key, members] : groups)
    out.push_back(aggregate(std::get<0>(key), std::get<1>(key), std::get<2>(key), members));
  return out;
}

NliReport probe_report(const std::vector<NliItem>& items) {
  NliReport r;
  r.by_human = aggregate_check(items, Grouping::by_human_label);
  r.by_pipeline = aggregate_check(items, Grouping::by_pipeline_label);
  r.disagreement = aggregate_disagreement(items);
  auto sel = select_disagreement_groups(items);
  for (std::size_t i : sel.group_a) r.group_a_items.push_back(items[i]);
  for (std::size_t i : sel.group_b) r.group_b_items.push_back(items[i]);
  return r;
}

namespace {

json rows_json(const std::vector<GroupAggregate>& rows) {
  json out = json::array();
  for (auto& g : rows)
    out.push_back({{"dataset", g.dataset},
                   {"model", g.model},
                   {"group", g.group},
                   {"mean_p_ent", g.mean_p_ent},
                   {"mean_p_neu", g.mean_p_neu},
                   {"mean_p_con", g.mean_p_con},
                   {"entail_rate", g.entail_rate},
                   {"n", g.n}});
  return out;
}

json items_json(const std::vector<NliItem>& items) {
  json out = json::array();
  for (auto& it : items)
    out.push_back({{"dataset", it.dataset},
                   {"model", it.model},
                   {"item_id", it.item_id},
                   {"premise", it.pair.premise},
                   {"hypothesis", it.pair.hypothesis},
                   {"pipeline_label", std::string(to_string(it.pipeline_label))},
                   {"human_label", it.human_label ? json(std::string(to_string(*it.human_label))) : json(nullptr)},
                   {"score", {it.score.p_ent, it.score.p_neu, it.score.p_con}}});
  return out;
}

std::string render_rows(const std::string& title, const std::string& group_header,
                        const std::vector<GroupAggregate>& rows) {
  std::ostringstream out;
  out << title << "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %-20s %-10s %10s %10s %10s %12s %5s\n", "Dataset", "LLM",
                group_header.c_str(), "mean p_ent", "mean p_neu", "mean p_con", "entail_rate", "n");
  out << buf;
  for (auto& g : rows) {
    std::snprintf(buf, sizeof buf, "%-12s %-20s %-10s %10.3f %10.3f %10.3f %12.3f %5zu\n", g.dataset.c_str(),
                  g.model.c_str(), g.group.c_str(), g.mean_p_ent, g.mean_p_neu, g.mean_p_con, g.entail_rate, g.n);
    out << buf;
  }
  return out.str();
}

}  // namespace

json to_json(const NliReport& report) {
  return {{"check1_by_human_label", rows_json(report.by_human)},
          {"check2_by_pipeline_label", rows_json(report.by_pipeline)},
          {"check3_disagreement", rows_json(report.disagreement)},
          {"group_a_items", items_json(report.group_a_items)},
          {"group_b_items", items_json(report.group_b_items)}};
}

std::string render_nli_table(const NliReport& report) {
  return render_rows("Check 1: grouped by human label", "Group", report.by_human) + "\n" +
         render_rows("Check 2: grouped by pipeline label", "Label", report.by_pipeline) + "\n" +
         render_rows("Check 3: disagreement groups", "Group", report.disagreement);
}

}  // namespace iie
