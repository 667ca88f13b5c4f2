#pragma once

// Two-tier knowledge graph: a relational tier of entities and triplet edges
// (nested objects become reified triplet nodes) and a temporal tier of
// before/while edges between top-level triplets.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iie/triplet.hpp"

namespace iie {

enum class NodeKind { entity, reified_triplet };

struct KgNode {
  std::string id;
  NodeKind kind = NodeKind::entity;
  std::variant<Entity, Triplet> payload;
  bool operator==(const KgNode&) const = default;
};

struct Provenance {
  enum class Kind { explicit_, implicit };
  Kind kind = Kind::explicit_;
  std::optional<std::string> snippet;
  std::optional<InferenceType> inference_type;

  static Provenance from_snippet(std::string snippet) { return {Kind::explicit_, std::move(snippet), std::nullopt}; }
  static Provenance inferred(std::optional<InferenceType> type = std::nullopt) {
    return {Kind::implicit, std::nullopt, type};
  }
  bool is_explicit() const { return kind == Kind::explicit_; }
  bool operator==(const Provenance&) const = default;
};

struct AuditEntry {
  std::string step;
  int round = 1;
  std::string verdict;
  std::optional<std::string> explanation;
  bool operator==(const AuditEntry&) const = default;
};

// A validated triplet as handed to the graph builder.
struct FinalRecord {
  Triplet triplet;
  Provenance provenance;
  std::vector<Triplet> premises;
  std::vector<AuditEntry> audit;
};

struct RelationalEdge {
  std::string id;  // id of the triplet this edge encodes
  std::string subject_id;
  std::optional<std::string> object_id;  // absent for <none>
  Triplet triplet;
  Provenance provenance;
  std::vector<Triplet> premises;
  std::optional<EventStateTag> event_state;
  std::vector<AuditEntry> audit;
  bool operator==(const RelationalEdge&) const = default;
};

// Stored only as `before` or `while`; `while` keeps the smaller id first.
struct TemporalEdge {
  std::string from;
  std::string to;
  TemporalTag tag = TemporalTag::before;
  bool operator==(const TemporalEdge&) const = default;
  auto operator<=>(const TemporalEdge&) const = default;
};

struct TemporalRelation {
  Triplet first;
  Triplet second;
  TemporalTag tag = TemporalTag::none;
};

struct TwoTierKG {
  std::string sentence;
  std::string model_id;
  std::map<std::string, KgNode> nodes;  // by id
  std::vector<RelationalEdge> relational_edges;  // sorted by id
  std::vector<TemporalEdge> temporal_edges;  // sorted

  const KgNode* node(std::string_view id) const;
  const RelationalEdge* edge(std::string_view triplet_id) const;
  std::vector<const KgNode*> entity_nodes() const;
  std::vector<const KgNode*> reified_nodes() const;
  // Tag of (a, b) reconstructed from canonical storage, `none` if unrelated.
  TemporalTag relation_between(std::string_view a, std::string_view b) const;

  bool operator==(const TwoTierKG&) const = default;
};

enum class KgErrorKind { dangling_reference, conflicting_temporal, invalid_record, id_collision, malformed_bundle };

class KgError : public std::runtime_error {
 public:
  KgError(KgErrorKind kind, const std::string& detail);
  KgErrorKind kind() const { return kind_; }

 private:
  KgErrorKind kind_;
};

std::string entity_id(std::string_view name);
std::string triplet_id(const Triplet& t);

// Names referenced by a triplet that are missing from `entities` are added
// with type msc. Temporal relations and event/state tags must refer to
// triplets present in `records`.
TwoTierKG build_graph(std::string sentence, std::string model_id, std::vector<Entity> entities,
                      const std::vector<FinalRecord>& records,
                      const std::vector<TaggedTriplet>& event_state_tags,
                      const std::vector<TemporalRelation>& temporal_relations);

enum class ExportFormat { json_bundle, dot };

std::string export_graph(const TwoTierKG& kg, ExportFormat format);
TwoTierKG import_graph(std::string_view json_bundle);

}  // namespace iie
