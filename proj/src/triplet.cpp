#include "iie/triplet.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

namespace iie {

namespace {

constexpr std::array<std::string_view, 10> kEntityTags = {"per", "ani", "org", "gpe", "fac",
                                                          "obj", "occ", "tim", "num", "msc"};
constexpr std::array<std::string_view, 6> kInferenceTags = {
    "fact", "pre_condition", "post_condition", "intent", "reaction", "attribute"};
constexpr std::array<std::string_view, 4> kTemporalTags = {"before", "after", "while", "none"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void note(const ParseOptions& opts, std::string msg) {
  if (opts.notes) opts.notes->push_back(std::move(msg));
}

// Recursive-descent reader over one reply.
class Reader {
 public:
  Reader(std::string_view text, const ParseOptions& opts) : text_(text), opts_(opts) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  std::size_t pos() const { return pos_; }
  void advance(std::size_t n = 1) { pos_ = std::min(text_.size(), pos_ + n); }
  std::string_view rest() const { return text_.substr(pos_); }

  void skip_space() {
    while (!done() && is_space(text_[pos_])) ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(ParseErrorKind kind, const std::string& detail) const {
    throw ParseError(kind, pos_, detail);
  }

  // Skips any prose before the first structural character.
  void skip_to_structure(std::string_view structural) {
    std::size_t found = text_.find_first_of(structural, pos_);
    if (found == std::string_view::npos) fail(ParseErrorKind::malformed_segment, "no list or triplet found");
    if (!trim(text_.substr(pos_, found - pos_)).empty()) {
      note(opts_, "skipped leading prose: \"" + std::string(trim(text_.substr(pos_, found - pos_))) + "\"");
    }
    pos_ = found;
  }

  Triplet triplet(int depth = 1) {
    skip_space();
    if (peek() != '(') fail(ParseErrorKind::malformed_segment, "expected '('");
    if (depth > opts_.max_depth) {
      fail(ParseErrorKind::depth_exceeded, "nesting deeper than " + std::to_string(opts_.max_depth));
    }
    advance();

    skip_space();
    if (peek() == '(') fail(ParseErrorKind::nested_subject, "subject must be an entity");
    std::string subject = field(0);
    if (subject == "<none>") fail(ParseErrorKind::none_in_subject, "<none> in subject position");
    expect_comma();

    std::string relation = field(1);
    expect_comma();

    skip_space();
    Object object;
    if (peek() == '(') {
      object = Nested{std::make_shared<const Triplet>(triplet(depth + 1))};
    } else {
      std::string name = field(2);
      if (name == "<none>") {
        object = NoneObject{};
      } else {
        object = EntityRef{std::move(name)};
      }
    }
    skip_space();
    if (done()) fail(ParseErrorKind::unbalanced_parens, "missing ')'");
    if (peek() != ')') fail(ParseErrorKind::malformed_segment, "expected ')' after object");
    advance();
    return Triplet{std::move(subject), std::move(relation), std::move(object)};
  }

  // Backtick-quoted field; returns the verbatim contents.
  std::string backticked() {
    skip_space();
    if (peek() != '`') fail(ParseErrorKind::malformed_segment, "expected '`'");
    std::size_t start = pos_ + 1;
    std::size_t end = text_.find('`', start);
    if (end == std::string_view::npos) fail(ParseErrorKind::unterminated_snippet, "unterminated `snippet`");
    pos_ = end + 1;
    return std::string(text_.substr(start, end - start));
  }

  // <tag> -> tag
  std::string angle_tag() {
    skip_space();
    if (peek() != '<') fail(ParseErrorKind::missing_tag, "expected <tag>");
    std::size_t end = text_.find('>', pos_);
    if (end == std::string_view::npos) fail(ParseErrorKind::missing_tag, "unterminated <tag>");
    std::string tag(trim(text_.substr(pos_ + 1, end - pos_ - 1)));
    pos_ = end + 1;
    return tag;
  }

  // Parses `[item sep item ...]`, or a bare `item sep item` sequence when
  // the reply has no brackets.
  template <class Item, class Fn>
  ReplyList<Item> list(Fn&& item) {
    ReplyList<Item> out;
    skip_to_structure("[(");
    bool bracketed = peek() == '[';
    if (bracketed) advance();
    bool have_sep = false;
    while (true) {
      skip_space();
      if (bracketed && peek() == ']') {
        advance();
        break;
      }
      if (done()) {
        if (bracketed) fail(ParseErrorKind::unbalanced_parens, "missing ']'");
        break;
      }
      out.items.push_back(item(*this));
      skip_space();
      char c = peek();
      if (c == ';' || c == ',') {
        if (!have_sep) {
          out.separator = c;
          have_sep = true;
        }
        advance();
        continue;
      }
      if (bracketed && c == ']') continue;
      if (done()) {
        if (bracketed) fail(ParseErrorKind::unbalanced_parens, "missing ']'");
        break;
      }
      if (!bracketed && c == '(') continue;
      fail(ParseErrorKind::malformed_segment, "expected ';', ',' or ']' between items");
    }
    skip_space();
    if (!done()) note(opts_, "ignored trailing text after list: \"" + std::string(trim(rest())) + "\"");
    return out;
  }

 private:
  std::string field(int position) {
    skip_space();
    std::size_t start = pos_;
    while (!done()) {
      char c = peek();
      if (c == ',' || c == ')') break;
      if (c == '(') fail(ParseErrorKind::malformed_segment, "unexpected '(' inside a field");
      ++pos_;
    }
    if (done()) fail(ParseErrorKind::unbalanced_parens, "missing ')'");
    std::string value = normalize_whitespace(text_.substr(start, pos_ - start));
    if (value.empty()) fail(ParseErrorKind::empty_field, "empty field at position " + std::to_string(position));
    return value;
  }

  void expect_comma() {
    skip_space();
    if (done()) fail(ParseErrorKind::unbalanced_parens, "missing ')'");
    if (peek() != ',') fail(ParseErrorKind::malformed_segment, "expected ','");
    advance();
  }

  std::string_view text_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
};

SnippetTriplet snippet_item(Reader& r) {
  SnippetTriplet out{r.triplet(), std::nullopt};
  r.skip_space();
  if (r.peek() == '`') out.snippet = r.backticked();
  return out;
}

TaggedTriplet tagged_item(Reader& r) {
  Triplet t = r.triplet();
  r.skip_space();
  if (r.peek() != '<') r.fail(ParseErrorKind::missing_tag, "missing <event>/<state> tag");
  std::string tag = r.angle_tag();
  auto kind = event_state_from(lower(tag));
  if (!kind) r.fail(ParseErrorKind::unknown_tag, "unknown tag <" + tag + ">");
  r.skip_space();
  if (r.peek() != '`') r.fail(ParseErrorKind::missing_time_field, "missing `time` field");
  std::string time = r.backticked();
  EventStateTag est{*kind, std::nullopt};
  std::string trimmed(trim(time));
  if (lower(trimmed) != "none") est.time_ref = time;
  return TaggedTriplet{std::move(t), std::move(est)};
}

TaggedPair pair_item(Reader& r) {
  r.skip_space();
  if (r.peek() != '(') r.fail(ParseErrorKind::malformed_segment, "expected '(' opening a pair");
  r.advance();
  r.skip_space();
  if (r.peek() != '(') r.fail(ParseErrorKind::pair_arity, "pair must contain two triplets");
  Triplet first = r.triplet();
  r.skip_space();
  if (r.peek() == ')') r.fail(ParseErrorKind::pair_arity, "pair contains one triplet");
  if (r.peek() != ',' && r.peek() != ';') r.fail(ParseErrorKind::malformed_segment, "expected ',' inside pair");
  r.advance();
  Triplet second = r.triplet();
  r.skip_space();
  if (r.peek() == ',' || r.peek() == ';') {
    r.advance();
    r.skip_space();
    if (r.peek() == '(') r.fail(ParseErrorKind::pair_arity, "pair contains more than two triplets");
  }
  if (!r.consume(')')) r.fail(ParseErrorKind::unbalanced_parens, "missing ')' closing the pair");
  r.skip_space();
  if (r.rest().substr(0, 2) != "->") r.fail(ParseErrorKind::missing_arrow, "missing '->'");
  r.advance(2);
  r.skip_space();
  std::string tag;
  if (r.peek() == '<') {
    tag = r.angle_tag();
  } else {
    std::size_t n = 0;
    std::string_view rest = r.rest();
    while (n < rest.size() && std::isalpha(static_cast<unsigned char>(rest[n]))) ++n;
    tag = std::string(rest.substr(0, n));
    r.advance(n);
  }
  auto parsed = temporal_tag_from(lower(tag));
  if (!parsed) r.fail(ParseErrorKind::unknown_tag, "unknown temporal tag '" + tag + "'");
  return TaggedPair{std::move(first), std::move(second), *parsed};
}

void render_into(const Triplet& t, std::string& out) {
  out += '(';
  out += t.subject;
  out += ", ";
  out += t.relation;
  out += ", ";
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, EntityRef>) {
          out += o.name;
        } else if constexpr (std::is_same_v<T, NoneObject>) {
          out += "<none>";
        } else {
          render_into(*o.triplet, out);
        }
      },
      t.object);
  out += ')';
}

template <class Item, class Fn>
std::string render_list(const ReplyList<Item>& list, Fn&& render_item) {
  std::string out = "[";
  for (std::size_t i = 0; i < list.items.size(); ++i) {
    if (i > 0) {
      out += list.separator;
      out += ' ';
    }
    out += render_item(list.items[i]);
  }
  out += ']';
  return out;
}

bool is_camel_case(std::string_view rel) {
  if (rel.empty() || !std::islower(static_cast<unsigned char>(rel.front()))) return false;
  return std::all_of(rel.begin(), rel.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

bool has_tense_marker(std::string_view rel) {
  for (std::string_view prefix : {"was", "were", "had", "did"}) {
    if (rel.size() > prefix.size() && rel.substr(0, prefix.size()) == prefix &&
        std::isupper(static_cast<unsigned char>(rel[prefix.size()]))) {
      return true;
    }
  }
  // First camelCase token in simple past: walked, stopped (but not need/feed).
  std::size_t end = 0;
  while (end < rel.size() && std::islower(static_cast<unsigned char>(rel[end]))) ++end;
  std::string_view head = rel.substr(0, end);
  return head.size() > 3 && head.substr(head.size() - 2) == "ed" && head.substr(head.size() - 3) != "eed";
}

void lint_names(const Triplet& t, const std::set<std::string>& known, bool implicit,
                std::vector<LintFinding>& out) {
  auto check = [&](const std::string& name) {
    if (known.count(name)) return;
    if (implicit) {
      out.push_back({LintSeverity::info, "new-entity", "new entity '" + name + "' will be added to the entity list"});
    } else {
      out.push_back({LintSeverity::warning, "unknown-entity", "'" + name + "' is not an extracted entity"});
    }
  };
  check(t.subject);
  // Explicit objects may be attributes ("(Todd, is, athletic)"), which are not entities.
  if (const std::string* name = t.object_name(); name && implicit) check(*name);
  if (const Triplet* inner = t.nested()) lint_names(*inner, known, implicit, out);
}

void lint_relations(const Triplet& t, std::vector<LintFinding>& out) {
  const std::string& rel = t.relation;
  if (rel.find(' ') != std::string::npos) {
    out.push_back({LintSeverity::warning, "relation-whitespace", "relation '" + rel + "' contains whitespace"});
  } else if (!is_camel_case(rel)) {
    out.push_back({LintSeverity::warning, "relation-not-camel-case", "relation '" + rel + "' is not camelCase"});
  }
  if (has_tense_marker(rel)) {
    out.push_back({LintSeverity::warning, "relation-tense", "relation '" + rel + "' is not in the present tense"});
  }
  if (const Triplet* inner = t.nested()) lint_relations(*inner, out);
}

}  // namespace

std::string_view to_string(EntityType t) { return kEntityTags[static_cast<std::size_t>(t)]; }
std::string_view to_string(InferenceType t) { return kInferenceTags[static_cast<std::size_t>(t)]; }
std::string_view to_string(TemporalTag t) { return kTemporalTags[static_cast<std::size_t>(t)]; }
std::string_view to_string(EventState t) { return t == EventState::event ? "event" : "state"; }
std::string_view to_string(Verdict v) { return v == Verdict::yes ? "yes" : "no"; }

std::optional<EntityType> entity_type_from(std::string_view s) {
  for (std::size_t i = 0; i < kEntityTags.size(); ++i) {
    if (kEntityTags[i] == s) return static_cast<EntityType>(i);
  }
  return std::nullopt;
}

std::optional<InferenceType> inference_type_from(std::string_view s) {
  for (std::size_t i = 0; i < kInferenceTags.size(); ++i) {
    if (kInferenceTags[i] == s) return static_cast<InferenceType>(i);
  }
  return std::nullopt;
}

std::optional<TemporalTag> temporal_tag_from(std::string_view s) {
  for (std::size_t i = 0; i < kTemporalTags.size(); ++i) {
    if (kTemporalTags[i] == s) return static_cast<TemporalTag>(i);
  }
  return std::nullopt;
}

std::optional<EventState> event_state_from(std::string_view s) {
  if (s == "event") return EventState::event;
  if (s == "state") return EventState::state;
  return std::nullopt;
}

bool Nested::operator==(const Nested& other) const {
  if (triplet == other.triplet) return true;
  if (!triplet || !other.triplet) return false;
  return *triplet == *other.triplet;
}

Triplet Triplet::make(std::string subject, std::string relation, std::string object) {
  return Triplet{std::move(subject), std::move(relation), EntityRef{std::move(object)}};
}

Triplet Triplet::unary(std::string subject, std::string relation) {
  return Triplet{std::move(subject), std::move(relation), NoneObject{}};
}

Triplet Triplet::nest(std::string subject, std::string relation, Triplet inner) {
  return Triplet{std::move(subject), std::move(relation),
                 Nested{std::make_shared<const Triplet>(std::move(inner))}};
}

const Triplet* Triplet::nested() const {
  if (const auto* n = std::get_if<Nested>(&object)) return n->triplet.get();
  return nullptr;
}

const std::string* Triplet::object_name() const {
  if (const auto* e = std::get_if<EntityRef>(&object)) return &e->name;
  return nullptr;
}

int Triplet::depth() const {
  const Triplet* inner = nested();
  return inner ? 1 + inner->depth() : 1;
}

bool Triplet::operator==(const Triplet& other) const {
  return subject == other.subject && relation == other.relation && object == other.object;
}

std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::empty_input: return "EmptyInput";
    case ParseErrorKind::unknown_tag: return "UnknownTag";
    case ParseErrorKind::duplicate_name: return "DuplicateName";
    case ParseErrorKind::malformed_segment: return "MalformedSegment";
    case ParseErrorKind::unbalanced_parens: return "UnbalancedParens";
    case ParseErrorKind::empty_field: return "EmptyField";
    case ParseErrorKind::none_in_subject: return "NoneInSubject";
    case ParseErrorKind::nested_subject: return "NestedSubject";
    case ParseErrorKind::depth_exceeded: return "DepthExceeded";
    case ParseErrorKind::trailing_input: return "TrailingInput";
    case ParseErrorKind::unterminated_snippet: return "UnterminatedSnippet";
    case ParseErrorKind::missing_tag: return "MissingTag";
    case ParseErrorKind::missing_time_field: return "MissingTimeField";
    case ParseErrorKind::missing_arrow: return "MissingArrow";
    case ParseErrorKind::pair_arity: return "PairArityError";
    case ParseErrorKind::unrecognized_verdict: return "UnrecognizedVerdict";
  }
  return "ParseError";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t offset, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset) {}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::vector<Entity> parse_entity_list(std::string_view text, const ParseOptions& opts) {
  std::string_view body = trim(text);
  if (body.empty()) throw ParseError(ParseErrorKind::empty_input, 0, "empty entity list");
  std::size_t base = static_cast<std::size_t>(body.data() - text.data());
  if (body.substr(0, 9) == "Entities:") {
    note(opts, "stripped 'Entities:' label");
    body.remove_prefix(9);
    base += 9;
  }

  std::vector<Entity> out;
  std::map<std::string, int> seen;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find(';', start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view segment = trim(body.substr(start, end - start));
    std::size_t offset = base + start;
    start = end + 1;
    if (segment.empty()) {
      if (end == body.size()) break;
      throw ParseError(ParseErrorKind::malformed_segment, offset, "empty segment");
    }
    std::size_t open = segment.rfind('<');
    if (open == std::string_view::npos || segment.back() != '>') {
      throw ParseError(ParseErrorKind::malformed_segment, offset, "expected 'name <tag>'");
    }
    std::string name = normalize_whitespace(segment.substr(0, open));
    std::string tag = lower(trim(segment.substr(open + 1, segment.size() - open - 2)));
    if (name.empty()) throw ParseError(ParseErrorKind::malformed_segment, offset, "missing entity name");
    auto type = entity_type_from(tag);
    if (!type) throw ParseError(ParseErrorKind::unknown_tag, offset, "unknown entity tag <" + tag + ">");
    int& count = seen[name];
    ++count;
    if (count > 1) {
      if (!opts.resolve_duplicate_names) {
        throw ParseError(ParseErrorKind::duplicate_name, offset, "duplicate entity '" + name + "'");
      }
      std::string renamed = name + " (" + std::to_string(count) + ")";
      note(opts, "renamed duplicate entity '" + name + "' to '" + renamed + "'");
      name = std::move(renamed);
    }
    out.push_back(Entity{std::move(name), *type});
    if (end == body.size()) break;
  }
  if (out.empty()) throw ParseError(ParseErrorKind::empty_input, base, "no entities");
  return out;
}

Triplet parse_triplet(std::string_view text, const ParseOptions& opts) {
  Reader r(text, opts);
  r.skip_space();
  if (r.done()) throw ParseError(ParseErrorKind::empty_input, 0, "empty triplet");
  Triplet t = r.triplet();
  r.skip_space();
  if (!r.done()) r.fail(ParseErrorKind::trailing_input, "unexpected text after triplet");
  return t;
}

ReplyList<SnippetTriplet> parse_triplet_list(std::string_view text, const ParseOptions& opts) {
  if (trim(text).empty()) throw ParseError(ParseErrorKind::empty_input, 0, "empty reply");
  Reader r(text, opts);
  return r.list<SnippetTriplet>(snippet_item);
}

ReplyList<TaggedTriplet> parse_tagged_list(std::string_view text, const ParseOptions& opts) {
  if (trim(text).empty()) throw ParseError(ParseErrorKind::empty_input, 0, "empty reply");
  Reader r(text, opts);
  return r.list<TaggedTriplet>(tagged_item);
}

ReplyList<TaggedPair> parse_pair_tags(std::string_view text, const ParseOptions& opts) {
  if (trim(text).empty()) throw ParseError(ParseErrorKind::empty_input, 0, "empty reply");
  Reader r(text, opts);
  return r.list<TaggedPair>(pair_item);
}

JudgmentReply parse_judgment(std::string_view text, const ParseOptions& opts) {
  std::string_view body = trim(text);
  // Models sometimes quote or emphasise the verdict.
  while (!body.empty() && (body.front() == '"' || body.front() == '*' || body.front() == '`' ||
                           body.front() == '\'')) {
    body.remove_prefix(1);
  }
  std::size_t n = 0;
  while (n < body.size() && std::isalpha(static_cast<unsigned char>(body[n]))) ++n;
  std::string word = lower(body.substr(0, n));
  JudgmentReply out;
  if (word == "yes") {
    out.verdict = Verdict::yes;
  } else if (word == "no") {
    out.verdict = Verdict::no;
  } else {
    throw ParseError(ParseErrorKind::unrecognized_verdict, 0, "expected yes or no, got '" + word + "'");
  }
  std::string_view rest = body.substr(n);
  while (!rest.empty() && (is_space(rest.front()) || std::string_view(";,:.!-\"*`'").find(rest.front()) !=
                                                          std::string_view::npos)) {
    rest.remove_prefix(1);
  }
  std::string explanation = normalize_whitespace(rest);
  if (explanation.empty()) return out;
  if (out.verdict == Verdict::yes) {
    note(opts, "ignored explanation after 'yes'");
    return out;
  }
  std::size_t words = 0;
  bool in_word = false;
  for (char c : explanation) {
    if (c == ' ') {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  if (static_cast<int>(words) > opts.explanation_word_cap) {
    note(opts, "explanation has " + std::to_string(words) + " words, above the cap of " +
                   std::to_string(opts.explanation_word_cap));
  }
  out.explanation = std::move(explanation);
  return out;
}

std::optional<Triplet> parse_correction(std::string_view text, const ParseOptions& opts) {
  std::string_view body = trim(text);
  std::string_view word = body;
  while (!word.empty() && (word.back() == '.' || word.back() == '"' || word.back() == '`')) word.remove_suffix(1);
  while (!word.empty() && (word.front() == '"' || word.front() == '`')) word.remove_prefix(1);
  if (lower(word) == "none") return std::nullopt;
  if (body.empty()) throw ParseError(ParseErrorKind::empty_input, 0, "empty correction");
  std::size_t open = body.find('(');
  if (open == std::string_view::npos) throw ParseError(ParseErrorKind::malformed_segment, 0, "expected a triplet or 'none'");
  if (open > 0) note(opts, "skipped leading prose: \"" + std::string(trim(body.substr(0, open))) + "\"");
  return parse_triplet(body.substr(open), opts);
}

std::string render_canonical(const Entity& e) {
  return e.name + " <" + std::string(to_string(e.type)) + ">";
}

std::string render_canonical(const std::vector<Entity>& entities) {
  std::string out;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (i > 0) out += "; ";
    out += render_canonical(entities[i]);
  }
  return out;
}

std::string render_canonical(const Triplet& t) {
  std::string out;
  render_into(t, out);
  return out;
}

std::string render_canonical(const std::vector<Triplet>& triplets, char separator) {
  ReplyList<Triplet> list{triplets, separator};
  return render_list(list, [](const Triplet& t) { return render_canonical(t); });
}

std::string render_canonical(const ReplyList<SnippetTriplet>& list) {
  return render_list(list, [](const SnippetTriplet& item) {
    std::string out = render_canonical(item.triplet);
    if (item.snippet) out += " `" + *item.snippet + "`";
    return out;
  });
}

std::string render_canonical(const ReplyList<TaggedTriplet>& list) {
  return render_list(list, [](const TaggedTriplet& item) {
    return render_canonical(item.triplet) + " <" + std::string(to_string(item.tag.kind)) + "> `" +
           item.tag.time_ref.value_or("none") + "`";
  });
}

std::string render_canonical(const TaggedPair& pair) {
  return "(" + render_canonical(pair.first) + ", " + render_canonical(pair.second) + ") -> <" +
         std::string(to_string(pair.tag)) + ">";
}

std::string render_canonical(const ReplyList<TaggedPair>& list) {
  return render_list(list, [](const TaggedPair& p) { return render_canonical(p); });
}

std::string render_entity_names(const std::vector<Entity>& entities) {
  std::string out = "[";
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (i > 0) out += ", ";
    out += entities[i].name;
  }
  out += ']';
  return out;
}

std::vector<LintFinding> lint_triplet(const Triplet& t, const std::vector<Entity>& entities, bool implicit) {
  std::vector<LintFinding> out;
  lint_relations(t, out);
  std::set<std::string> known;
  for (const Entity& e : entities) known.insert(normalize_whitespace(e.name));
  lint_names(t, known, implicit, out);
  return out;
}

}  // namespace iie
