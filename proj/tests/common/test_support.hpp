#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace iie::test {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string prompt_asset(const std::string& id) {
  return slurp(std::string(IIE_ASSET_DIR) + "/prompts/" + id + ".txt");
}

// Lines of a prompt asset starting with `label`, label stripped.
inline std::vector<std::string> example_lines(const std::string& id, const std::string& label) {
  std::istringstream in(prompt_asset(id));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(label, 0) != 0) continue;
    std::string rest = line.substr(label.size());
    if (rest.empty() || rest.find("[extracted") != std::string::npos || rest.find("[pairs of") != std::string::npos ||
        rest.find("[context") != std::string::npos) {
      continue;
    }
    out.push_back(rest);
  }
  return out;
}

}  // namespace iie::test
