#pragma once

// Fills in a public form view the way the browser client would, choosing
// answers at random. With `disagree_all` every discard is rejected, which
// must hide the follow-up questions.

#include <random>
#include <string>

#include "json.hpp"

namespace iie::fixture {

inline nlohmann::json complete_form(const nlohmann::json& view, std::mt19937& rng, bool disagree_all = false) {
  using json = nlohmann::json;
  auto pick = [&](const json& options) { return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)]; };
  const json& opt = view["options"];
  json r{{"schema_version", view["schema_version"]},
         {"form_id", view["form_id"]},
         {"triplet_classification", json::object()},
         {"icr", json::object()},
         {"event_state", json::object()},
         {"timing", json::object()},
         {"mec", {{"removals", json::array()}, {"additions", json::array()}}}};
  for (const json& s : view["sentences"]) {
    for (const json& i : s["section_a"]) r["triplet_classification"][i["id"].get<std::string>()] = pick(opt["triplet_classification"]);
    for (const json& i : s["section_b"]) {
      json a{{"discard_agreement", disagree_all ? json("disagree") : pick(opt["agreement"])}};
      if (a["discard_agreement"] != "disagree") {
        if (i["ask_reason"].get<bool>()) a["reason_agreement"] = pick(opt["agreement"]);
        if (i["ask_correction"].get<bool>()) a["correction_agreement"] = pick(opt["agreement"]);
      }
      r["icr"][i["id"].get<std::string>()] = a;
    }
    for (const json& i : s["section_c"]) r["event_state"][i["id"].get<std::string>()] = pick(opt["event_state"]);
    for (const json& i : s["section_d"]) r["timing"][i["id"].get<std::string>()] = pick(opt["timing"]);
    for (const json& i : s["section_e"])
      if (std::bernoulli_distribution(0.2)(rng)) r["mec"]["removals"].push_back(i["id"]);
    r["mec"]["additions"].push_back({{"sentence", s["index"]},
                                     {"subject", "someone"},
                                     {"relation", "feels"},
                                     {"object", "tired"},
                                     {"inference_type", pick(opt["inference_type"])}});
  }
  return r;
}

}  // namespace iie::fixture
