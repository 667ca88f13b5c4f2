#include "iie/verbalizer.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace iie {

namespace {

bool upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string predicate_text(const std::string& relation, const VerbalizerConfig& config) {
  auto it = config.predicate_rewrites.find(relation);
  return split_tokens(it == config.predicate_rewrites.end() ? relation : it->second);
}

// Body of a clause without sentence casing.
std::string clause(const Triplet& t, const VerbalizerConfig& config, bool drop_subject) {
  std::string out = drop_subject ? "" : split_tokens(t.subject);
  out += ' ';
  out += predicate_text(t.relation, config);
  if (const std::string* name = t.object_name()) {
    out += ' ';
    out += split_tokens(*name);
  } else if (const Triplet* inner = t.nested()) {
    auto conn = config.same_subject_connectors.find(t.relation);
    bool same = inner->subject == t.subject && conn != config.same_subject_connectors.end();
    out += ' ';
    out += same ? conn->second : config.default_connector;
    out += ' ';
    out += clause(*inner, config, same);
  }
  return out;
}

}  // namespace

void VerbalizerConfig::validate() const {
  for (const auto& [key, value] : predicate_rewrites) {
    if (key.empty() || !lower(key.front()) || key.find_first_of(" \t") != std::string::npos) {
      throw std::invalid_argument("rewrite key is not a camelCase predicate: '" + key + "'");
    }
    if (trim(value).empty()) throw std::invalid_argument("empty rewrite for '" + key + "'");
  }
  auto one_word = [](const std::string& w) {
    if (w.empty()) return false;
    for (char c : w) {
      if (!lower(c)) return false;
    }
    return true;
  };
  for (const auto& [key, value] : same_subject_connectors) {
    if (!one_word(value)) throw std::invalid_argument("connector for '" + key + "' must be one lowercase word");
  }
  if (!one_word(default_connector)) throw std::invalid_argument("default connector must be one lowercase word");
}

VerbalizerConfig parse_verbalizer_config(std::string_view text) {
  VerbalizerConfig config;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("rewrite.", 0) == 0) {
      config.predicate_rewrites[key.substr(8)] = value;
    } else if (key.rfind("connector.", 0) == 0) {
      config.same_subject_connectors[key.substr(10)] = value;
    } else if (key == "default_connector") {
      config.default_connector = value;
    } else {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

VerbalizerConfig load_verbalizer_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read verbalizer config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_verbalizer_config(ss.str());
}

std::string split_tokens(std::string_view identifier) {
  std::string spaced;
  for (std::size_t i = 0; i < identifier.size(); ++i) {
    char c = identifier[i];
    if (c == '_') c = ' ';
    if (i > 0 && upper(c)) {
      char prev = identifier[i - 1];
      bool next_lower = i + 1 < identifier.size() && lower(identifier[i + 1]);
      if (lower(prev) || digit(prev) || (upper(prev) && next_lower)) spaced += ' ';
    }
    spaced += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return normalize_whitespace(spaced);
}

std::string verbalize(const Triplet& t, const VerbalizerConfig& config) {
  std::string out = normalize_whitespace(clause(t, config, false));
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

}  // namespace iie
