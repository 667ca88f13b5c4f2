#pragma once

// Triplet grammar: domain types, strict parsers for every reply format the
// extraction prompts ask for, and the canonical renderer.

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iie {

enum class EntityType { per, ani, org, gpe, fac, obj, occ, tim, num, msc };
enum class InferenceType { fact, pre_condition, post_condition, intent, reaction, attribute };
enum class TemporalTag { before, after, while_, none };
enum class EventState { event, state };
enum class Verdict { yes, no };

std::string_view to_string(EntityType t);
std::string_view to_string(InferenceType t);
std::string_view to_string(TemporalTag t);
std::string_view to_string(EventState t);
std::string_view to_string(Verdict v);

std::optional<EntityType> entity_type_from(std::string_view s);
std::optional<InferenceType> inference_type_from(std::string_view s);
std::optional<TemporalTag> temporal_tag_from(std::string_view s);
std::optional<EventState> event_state_from(std::string_view s);

struct Entity {
  std::string name;
  EntityType type = EntityType::msc;
  bool operator==(const Entity&) const = default;
};

struct Triplet;

struct EntityRef {
  std::string name;
  bool operator==(const EntityRef&) const = default;
};

struct NoneObject {
  bool operator==(const NoneObject&) const = default;
};

// Reified object. Triplets are immutable once built, so nested values share
// storage; equality is structural.
struct Nested {
  std::shared_ptr<const Triplet> triplet;
  bool operator==(const Nested& other) const;
};

using Object = std::variant<EntityRef, NoneObject, Nested>;

// (subject, relation, object). The subject is always an entity reference.
struct Triplet {
  std::string subject;
  std::string relation;
  Object object;

  static Triplet make(std::string subject, std::string relation, std::string object);
  static Triplet unary(std::string subject, std::string relation);
  static Triplet nest(std::string subject, std::string relation, Triplet inner);

  bool has_none_object() const { return std::holds_alternative<NoneObject>(object); }
  const Triplet* nested() const;
  const std::string* object_name() const;
  // 1 for a flat triplet, +1 per nesting level.
  int depth() const;

  bool operator==(const Triplet& other) const;
};

struct EventStateTag {
  EventState kind = EventState::event;
  std::optional<std::string> time_ref;
  bool operator==(const EventStateTag&) const = default;
};

struct JudgmentReply {
  Verdict verdict = Verdict::yes;
  std::optional<std::string> explanation;
  bool operator==(const JudgmentReply&) const = default;
};

enum class ParseErrorKind {
  empty_input,
  unknown_tag,
  duplicate_name,
  malformed_segment,
  unbalanced_parens,
  empty_field,
  none_in_subject,
  nested_subject,
  depth_exceeded,
  trailing_input,
  unterminated_snippet,
  missing_tag,
  missing_time_field,
  missing_arrow,
  pair_arity,
  unrecognized_verdict,
};

std::string_view to_string(ParseErrorKind k);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& detail);
  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

struct ParseOptions {
  int max_depth = 5;
  // Entity lists: rename repeated names to "name (2)", ... instead of failing.
  bool resolve_duplicate_names = false;
  int explanation_word_cap = 20;
  // Non-fatal observations (skipped prose, renamed duplicates, ...).
  std::vector<std::string>* notes = nullptr;
};

struct SnippetTriplet {
  Triplet triplet;
  std::optional<std::string> snippet;
  bool operator==(const SnippetTriplet&) const = default;
};

struct TaggedTriplet {
  Triplet triplet;
  EventStateTag tag;
  bool operator==(const TaggedTriplet&) const = default;
};

struct TaggedPair {
  Triplet first;
  Triplet second;
  TemporalTag tag = TemporalTag::none;
  bool operator==(const TaggedPair&) const = default;
};

// A bracketed reply list. The separator the model used is kept so rendering
// reproduces the reply.
template <class Item>
struct ReplyList {
  std::vector<Item> items;
  char separator = ';';
  bool operator==(const ReplyList&) const = default;
};

std::vector<Entity> parse_entity_list(std::string_view text, const ParseOptions& opts = {});
Triplet parse_triplet(std::string_view text, const ParseOptions& opts = {});
ReplyList<SnippetTriplet> parse_triplet_list(std::string_view text, const ParseOptions& opts = {});
ReplyList<TaggedTriplet> parse_tagged_list(std::string_view text, const ParseOptions& opts = {});
ReplyList<TaggedPair> parse_pair_tags(std::string_view text, const ParseOptions& opts = {});
JudgmentReply parse_judgment(std::string_view text, const ParseOptions& opts = {});
std::optional<Triplet> parse_correction(std::string_view text, const ParseOptions& opts = {});

std::string render_canonical(const Entity& e);
std::string render_canonical(const std::vector<Entity>& entities);
std::string render_canonical(const Triplet& t);
std::string render_canonical(const std::vector<Triplet>& triplets, char separator = ';');
std::string render_canonical(const ReplyList<SnippetTriplet>& list);
std::string render_canonical(const ReplyList<TaggedTriplet>& list);
std::string render_canonical(const ReplyList<TaggedPair>& list);
std::string render_canonical(const TaggedPair& pair);
// "[Jesse, Addison, house]" as used by the extraction prompts.
std::string render_entity_names(const std::vector<Entity>& entities);

// Collapses whitespace runs to one space and trims the ends.
std::string normalize_whitespace(std::string_view s);

enum class LintSeverity { info, warning };

struct LintFinding {
  LintSeverity severity = LintSeverity::warning;
  std::string code;
  std::string message;
};

// Formatting checks that never fail. `implicit` marks triplets that may
// legally introduce entities outside the extracted set.
std::vector<LintFinding> lint_triplet(const Triplet& t, const std::vector<Entity>& entities,
                                      bool implicit = false);

}  // namespace iie
