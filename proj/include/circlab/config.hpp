#pragma once

#include <string>
#include <utility>
#include <vector>

namespace circlab {

struct ConfigAxis {
  std::string name;
  std::vector<std::string> values;
};

// Parsed `key = value` text. Axis entries (`axis.<name> = v1, v2, ...`) are
// kept apart and in file order; everything else stays in `entries`.
struct ConfigText {
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<ConfigAxis> axes;
};

// `#` starts a comment; blank lines are skipped. Throws FormatError with the
// line number on malformed lines or duplicate keys.
ConfigText parse_config_text(const std::string& text);
ConfigText read_config_file(const std::string& path);

std::vector<std::string> split_list(const std::string& value);
std::string trim_copy(const std::string& s);

}  // namespace circlab
