#include "iie/kg.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace iie {

namespace {

using ojson = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_id(char prefix, std::string_view data) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%c-%016llx", prefix, static_cast<unsigned long long>(fnv1a(data)));
  return buf;
}

class Builder {
 public:
  explicit Builder(TwoTierKG& kg) : kg_(kg) {}

  void add_entity(const Entity& e) {
    std::string id = entity_id(e.name);
    auto [it, inserted] = kg_.nodes.try_emplace(id, KgNode{id, NodeKind::entity, e});
    if (!inserted) {
      const auto* existing = std::get_if<Entity>(&it->second.payload);
      if (!existing || existing->name != e.name) throw KgError(KgErrorKind::id_collision, "id collision on " + id);
    }
  }

  void ensure_entity(const std::string& name) {
    if (!kg_.nodes.count(entity_id(name))) add_entity(Entity{name, EntityType::msc});
  }

  // Registers names used by t and reified nodes for every nested object.
  void register_triplet(const Triplet& t) {
    ensure_entity(t.subject);
    if (const std::string* name = t.object_name()) ensure_entity(*name);
    if (const Triplet* inner = t.nested()) {
      std::string id = triplet_id(*inner);
      auto [it, inserted] = kg_.nodes.try_emplace(id, KgNode{id, NodeKind::reified_triplet, *inner});
      if (!inserted && it->second.payload != std::variant<Entity, Triplet>(*inner)) {
        throw KgError(KgErrorKind::id_collision, "id collision on " + id);
      }
      register_triplet(*inner);
    }
  }

 private:
  TwoTierKG& kg_;
};

std::optional<std::string> object_node_id(const Triplet& t) {
  if (const std::string* name = t.object_name()) return entity_id(*name);
  if (const Triplet* inner = t.nested()) return triplet_id(*inner);
  return std::nullopt;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string provenance_kind(const Provenance& p) { return p.is_explicit() ? "explicit" : "implicit"; }

}  // namespace

KgError::KgError(KgErrorKind kind, const std::string& detail) : std::runtime_error(detail), kind_(kind) {}

std::string entity_id(std::string_view name) {
  std::string key = "entity:";
  key += name;
  return hex_id('e', key);
}

std::string triplet_id(const Triplet& t) { return hex_id('t', render_canonical(t)); }

const KgNode* TwoTierKG::node(std::string_view id) const {
  auto it = nodes.find(std::string(id));
  return it == nodes.end() ? nullptr : &it->second;
}

const RelationalEdge* TwoTierKG::edge(std::string_view triplet_id) const {
  auto it = std::lower_bound(relational_edges.begin(), relational_edges.end(), triplet_id,
                             [](const RelationalEdge& e, std::string_view id) { return e.id < id; });
  if (it == relational_edges.end() || it->id != triplet_id) return nullptr;
  return &*it;
}

std::vector<const KgNode*> TwoTierKG::entity_nodes() const {
  std::vector<const KgNode*> out;
  for (const auto& [id, n] : nodes) {
    if (n.kind == NodeKind::entity) out.push_back(&n);
  }
  return out;
}

std::vector<const KgNode*> TwoTierKG::reified_nodes() const {
  std::vector<const KgNode*> out;
  for (const auto& [id, n] : nodes) {
    if (n.kind == NodeKind::reified_triplet) out.push_back(&n);
  }
  return out;
}

TemporalTag TwoTierKG::relation_between(std::string_view a, std::string_view b) const {
  for (const TemporalEdge& e : temporal_edges) {
    if (e.from == a && e.to == b) return e.tag;
    if (e.from == b && e.to == a) return e.tag == TemporalTag::before ? TemporalTag::after : e.tag;
  }
  return TemporalTag::none;
}

TwoTierKG build_graph(std::string sentence, std::string model_id, std::vector<Entity> entities,
                      const std::vector<FinalRecord>& records,
                      const std::vector<TaggedTriplet>& event_state_tags,
                      const std::vector<TemporalRelation>& temporal_relations) {
  TwoTierKG kg;
  kg.sentence = std::move(sentence);
  kg.model_id = std::move(model_id);
  Builder builder(kg);
  for (const Entity& e : entities) builder.add_entity(e);

  std::set<std::string> explicit_ids;
  for (const FinalRecord& r : records) {
    if (r.provenance.is_explicit()) explicit_ids.insert(triplet_id(r.triplet));
  }

  for (const FinalRecord& r : records) {
    std::string rendered = render_canonical(r.triplet);
    if (r.provenance.is_explicit()) {
      if (!r.provenance.snippet || r.provenance.snippet->empty()) {
        throw KgError(KgErrorKind::invalid_record, "explicit triplet without snippet: " + rendered);
      }
      if (!r.premises.empty()) throw KgError(KgErrorKind::invalid_record, "premises on explicit triplet: " + rendered);
    }
    for (const Triplet& p : r.premises) {
      if (!explicit_ids.count(triplet_id(p))) {
        throw KgError(KgErrorKind::dangling_reference, "premise is not an explicit triplet: " + render_canonical(p));
      }
    }
    builder.register_triplet(r.triplet);
    RelationalEdge edge;
    edge.id = triplet_id(r.triplet);
    edge.subject_id = entity_id(r.triplet.subject);
    edge.object_id = object_node_id(r.triplet);
    edge.triplet = r.triplet;
    edge.provenance = r.provenance;
    edge.premises = r.premises;
    edge.audit = r.audit;
    if (std::any_of(kg.relational_edges.begin(), kg.relational_edges.end(),
                    [&](const RelationalEdge& e) { return e.id == edge.id; })) {
      throw KgError(KgErrorKind::invalid_record, "duplicate triplet: " + rendered);
    }
    kg.relational_edges.push_back(std::move(edge));
  }
  std::sort(kg.relational_edges.begin(), kg.relational_edges.end(),
            [](const RelationalEdge& a, const RelationalEdge& b) { return a.id < b.id; });

  auto find_edge = [&](const Triplet& t) -> RelationalEdge& {
    std::string id = triplet_id(t);
    auto it = std::lower_bound(kg.relational_edges.begin(), kg.relational_edges.end(), id,
                               [](const RelationalEdge& e, const std::string& key) { return e.id < key; });
    if (it == kg.relational_edges.end() || it->id != id) {
      throw KgError(KgErrorKind::dangling_reference, "unknown triplet " + render_canonical(t));
    }
    return *it;
  };

  for (const TaggedTriplet& tag : event_state_tags) find_edge(tag.triplet).event_state = tag.tag;

  std::map<std::pair<std::string, std::string>, TemporalTag> canonical;
  for (const TemporalRelation& rel : temporal_relations) {
    if (rel.tag == TemporalTag::none) continue;
    std::string a = find_edge(rel.first).id;
    std::string b = find_edge(rel.second).id;
    if (a == b) throw KgError(KgErrorKind::conflicting_temporal, "temporal self-relation on " + a);
    TemporalEdge e;
    switch (rel.tag) {
      case TemporalTag::before: e = {a, b, TemporalTag::before}; break;
      case TemporalTag::after: e = {b, a, TemporalTag::before}; break;
      default: e = {std::min(a, b), std::max(a, b), TemporalTag::while_}; break;
    }
    auto key = std::minmax(e.from, e.to);
    auto [it, inserted] = canonical.try_emplace({key.first, key.second}, e.tag);
    bool same = inserted || (it->second == e.tag &&
                             std::find(kg.temporal_edges.begin(), kg.temporal_edges.end(), e) != kg.temporal_edges.end());
    if (!same) {
      throw KgError(KgErrorKind::conflicting_temporal,
                    "conflicting temporal relations between " + e.from + " and " + e.to);
    }
    if (inserted) kg.temporal_edges.push_back(e);
  }
  std::sort(kg.temporal_edges.begin(), kg.temporal_edges.end());
  return kg;
}

std::string export_graph(const TwoTierKG& kg, ExportFormat format) {
  if (format == ExportFormat::dot) {
    std::ostringstream out;
    out << "digraph kg {\n  compound=true;\n";
    out << "  subgraph cluster_relational {\n    label=\"relational\";\n";
    for (const auto& [id, n] : kg.nodes) {
      std::string label = n.kind == NodeKind::entity ? std::get<Entity>(n.payload).name
                                                     : render_canonical(std::get<Triplet>(n.payload));
      out << "    \"" << id << "\" [label=\"" << dot_escape(label) << "\""
          << (n.kind == NodeKind::reified_triplet ? ", shape=box" : "") << "];\n";
    }
    for (const RelationalEdge& e : kg.relational_edges) {
      std::string target = e.object_id.value_or("none-" + e.id);
      if (!e.object_id) out << "    \"" << target << "\" [label=\"<none>\", shape=point];\n";
      out << "    \"" << e.subject_id << "\" -> \"" << target << "\" [label=\"" << dot_escape(e.triplet.relation)
          << "\"" << (e.provenance.is_explicit() ? "" : ", style=dashed") << "];\n";
    }
    out << "  }\n";
    out << "  subgraph cluster_temporal {\n    label=\"temporal\";\n";
    for (const RelationalEdge& e : kg.relational_edges) {
      out << "    \"tmp-" << e.id << "\" [label=\"" << dot_escape(render_canonical(e.triplet)) << "\", shape=box];\n";
    }
    for (const TemporalEdge& e : kg.temporal_edges) {
      out << "    \"tmp-" << e.from << "\" -> \"tmp-" << e.to << "\" [label=\"" << to_string(e.tag) << "\""
          << (e.tag == TemporalTag::while_ ? ", dir=none" : "") << "];\n";
    }
    out << "  }\n}\n";
    return out.str();
  }

  ojson j;
  j["schema_version"] = "1";
  j["sentence"] = kg.sentence;
  j["model_id"] = kg.model_id;
  j["entities"] = ojson::array();
  std::vector<const Entity*> entities;
  for (const KgNode* n : kg.entity_nodes()) entities.push_back(&std::get<Entity>(n->payload));
  std::sort(entities.begin(), entities.end(), [](const Entity* a, const Entity* b) { return a->name < b->name; });
  for (const Entity* e : entities) {
    ojson ej;
    ej["name"] = e->name;
    ej["type"] = std::string(to_string(e->type));
    j["entities"].push_back(std::move(ej));
  }

  // Top-level edges plus reified nodes that are not edges themselves, by id.
  std::map<std::string, ojson> triplets;
  auto object_field = [](const Triplet& t) -> std::string {
    if (const std::string* name = t.object_name()) return *name;
    if (const Triplet* inner = t.nested()) return triplet_id(*inner);
    return "<none>";
  };
  for (const RelationalEdge& e : kg.relational_edges) {
    ojson tj;
    tj["id"] = e.id;
    tj["subject"] = e.triplet.subject;
    tj["relation"] = e.triplet.relation;
    tj["object"] = object_field(e.triplet);
    ojson pj;
    pj["kind"] = provenance_kind(e.provenance);
    if (e.provenance.snippet) pj["snippet"] = *e.provenance.snippet;
    if (e.provenance.inference_type) pj["inference_type"] = std::string(to_string(*e.provenance.inference_type));
    tj["provenance"] = std::move(pj);
    tj["status"] = "validated";
    tj["premises"] = ojson::array();
    std::vector<std::string> premise_ids;
    for (const Triplet& p : e.premises) premise_ids.push_back(triplet_id(p));
    for (const std::string& id : premise_ids) tj["premises"].push_back(id);
    if (e.event_state) {
      tj["event_state"] = std::string(to_string(e.event_state->kind));
      if (e.event_state->time_ref) tj["time_ref"] = *e.event_state->time_ref;
    }
    tj["audit"] = ojson::array();
    for (const AuditEntry& a : e.audit) {
      ojson aj;
      aj["step"] = a.step;
      aj["round"] = a.round;
      aj["verdict"] = a.verdict;
      if (a.explanation) aj["explanation"] = *a.explanation;
      tj["audit"].push_back(std::move(aj));
    }
    triplets.emplace(e.id, std::move(tj));
  }
  for (const KgNode* n : kg.reified_nodes()) {
    if (triplets.count(n->id)) continue;
    const Triplet& t = std::get<Triplet>(n->payload);
    ojson tj;
    tj["id"] = n->id;
    tj["subject"] = t.subject;
    tj["relation"] = t.relation;
    tj["object"] = object_field(t);
    tj["provenance"] = ojson{{"kind", "reified"}};
    tj["status"] = "reified";
    tj["premises"] = ojson::array();
    tj["audit"] = ojson::array();
    triplets.emplace(n->id, std::move(tj));
  }
  j["triplets"] = ojson::array();
  for (auto& [id, tj] : triplets) j["triplets"].push_back(std::move(tj));

  j["temporal"] = ojson::array();
  for (const TemporalEdge& e : kg.temporal_edges) {
    ojson ej;
    ej["from"] = e.from;
    ej["to"] = e.to;
    ej["tag"] = std::string(to_string(e.tag));
    j["temporal"].push_back(std::move(ej));
  }
  return j.dump(2) + "\n";
}

TwoTierKG import_graph(std::string_view json_bundle) {
  ojson j;
  try {
    j = ojson::parse(json_bundle);
  } catch (const nlohmann::json::exception& e) {
    throw KgError(KgErrorKind::malformed_bundle, e.what());
  }
  try {
    if (j.at("schema_version").get<std::string>() != "1") {
      throw KgError(KgErrorKind::malformed_bundle, "unsupported schema_version");
    }
    std::vector<Entity> entities;
    for (const auto& ej : j.at("entities")) {
      auto type = entity_type_from(ej.at("type").get<std::string>());
      if (!type) throw KgError(KgErrorKind::malformed_bundle, "unknown entity type");
      entities.push_back(Entity{ej.at("name").get<std::string>(), *type});
    }

    std::map<std::string, const ojson*> by_id;
    for (const auto& tj : j.at("triplets")) by_id[tj.at("id").get<std::string>()] = &tj;

    std::map<std::string, Triplet> resolved;
    std::function<Triplet(const std::string&, int)> resolve = [&](const std::string& id, int depth) -> Triplet {
      if (auto it = resolved.find(id); it != resolved.end()) return it->second;
      auto it = by_id.find(id);
      if (it == by_id.end()) throw KgError(KgErrorKind::dangling_reference, "unknown triplet id " + id);
      if (depth > 64) throw KgError(KgErrorKind::malformed_bundle, "cyclic triplet reference");
      const ojson& tj = *it->second;
      std::string object = tj.at("object").get<std::string>();
      Triplet t;
      t.subject = tj.at("subject").get<std::string>();
      t.relation = tj.at("relation").get<std::string>();
      if (object == "<none>") {
        t.object = NoneObject{};
      } else if (by_id.count(object)) {
        t.object = Nested{std::make_shared<const Triplet>(resolve(object, depth + 1))};
      } else {
        t.object = EntityRef{object};
      }
      if (triplet_id(t) != id) throw KgError(KgErrorKind::malformed_bundle, "triplet id mismatch for " + id);
      resolved.emplace(id, t);
      return t;
    };

    std::vector<FinalRecord> records;
    std::vector<TaggedTriplet> tags;
    for (const auto& tj : j.at("triplets")) {
      const ojson& pj = tj.at("provenance");
      std::string kind = pj.at("kind").get<std::string>();
      if (kind == "reified") continue;
      FinalRecord r;
      r.triplet = resolve(tj.at("id").get<std::string>(), 0);
      if (kind == "explicit") {
        r.provenance = Provenance::from_snippet(pj.at("snippet").get<std::string>());
      } else if (kind == "implicit") {
        r.provenance = Provenance::inferred();
        if (pj.contains("inference_type")) {
          r.provenance.inference_type = inference_type_from(pj["inference_type"].get<std::string>());
          if (!r.provenance.inference_type) throw KgError(KgErrorKind::malformed_bundle, "unknown inference type");
        }
      } else {
        throw KgError(KgErrorKind::malformed_bundle, "unknown provenance kind " + kind);
      }
      for (const auto& pid : tj.at("premises")) r.premises.push_back(resolve(pid.get<std::string>(), 0));
      for (const auto& aj : tj.at("audit")) {
        AuditEntry a{aj.at("step").get<std::string>(), aj.at("round").get<int>(), aj.at("verdict").get<std::string>(),
                     std::nullopt};
        if (aj.contains("explanation")) a.explanation = aj["explanation"].get<std::string>();
        r.audit.push_back(std::move(a));
      }
      if (tj.contains("event_state")) {
        auto es = event_state_from(tj["event_state"].get<std::string>());
        if (!es) throw KgError(KgErrorKind::malformed_bundle, "unknown event_state");
        EventStateTag tag{*es, std::nullopt};
        if (tj.contains("time_ref")) tag.time_ref = tj["time_ref"].get<std::string>();
        tags.push_back(TaggedTriplet{r.triplet, tag});
      }
      records.push_back(std::move(r));
    }

    std::vector<TemporalRelation> temporal;
    for (const auto& ej : j.at("temporal")) {
      auto tag = temporal_tag_from(ej.at("tag").get<std::string>());
      if (!tag) throw KgError(KgErrorKind::malformed_bundle, "unknown temporal tag");
      temporal.push_back(TemporalRelation{resolve(ej.at("from").get<std::string>(), 0),
                                          resolve(ej.at("to").get<std::string>(), 0), *tag});
    }
    return build_graph(j.at("sentence").get<std::string>(), j.at("model_id").get<std::string>(),
                       std::move(entities), records, tags, temporal);
  } catch (const nlohmann::json::exception& e) {
    throw KgError(KgErrorKind::malformed_bundle, e.what());
  }
}

}  // namespace iie
