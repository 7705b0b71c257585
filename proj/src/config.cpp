#include "circlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "circlab/errors.hpp"

namespace circlab {

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim_copy(item);
    if (item.empty()) throw FormatError("empty item in list '" + value + "'");
    out.push_back(item);
  }
  if (out.empty()) throw FormatError("empty list");
  return out;
}

ConfigText parse_config_text(const std::string& text) {
  ConfigText cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim_copy(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim_copy(line.substr(0, eq));
    const std::string value = trim_copy(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw FormatError("config line " + std::to_string(lineno) +
                        ": empty key or value");
    }
    if (!seen.insert(key).second) {
      throw FormatError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
    if (key.rfind("axis.", 0) == 0) {
      const std::string name = key.substr(5);
      if (name.empty()) {
        throw FormatError("config line " + std::to_string(lineno) +
                          ": axis needs a name");
      }
      cfg.axes.push_back({name, split_list(value)});
    } else {
      cfg.entries.emplace_back(key, value);
    }
  }
  return cfg;
}

ConfigText read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace circlab
