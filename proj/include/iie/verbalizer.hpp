#pragma once

// Deterministic triplet-to-sentence rendering for NLI hypotheses.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "iie/triplet.hpp"

namespace iie {

struct VerbalizerConfig {
  std::map<std::string, std::string> predicate_rewrites{{"hasAttribute", "has"}};
  // Nested triplets sharing the outer subject drop it and use this connector.
  std::map<std::string, std::string> same_subject_connectors{{"want", "to"}};
  std::string default_connector = "that";

  // Throws std::invalid_argument naming the offending entry.
  void validate() const;
};

// Key-value file, one entry per line, '#' starts a comment:
//   rewrite.hasAttribute = has
//   connector.want = to
//   default_connector = that
// Entries are merged over the defaults.
VerbalizerConfig load_verbalizer_config(const std::filesystem::path& path);
VerbalizerConfig parse_verbalizer_config(std::string_view text);

// "strangeLooks" -> "strange looks"; output is lowercase.
std::string split_tokens(std::string_view identifier);

std::string verbalize(const Triplet& t, const VerbalizerConfig& config = {});

}  // namespace iie
