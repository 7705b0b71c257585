#include "circlab/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "circlab/errors.hpp"

namespace circlab {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, int line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    std::ostringstream msg;
    msg << "line " << line << ": expected a number, got '" << text << "'";
    throw FormatError(msg.str());
  }
  return v;
}

long long to_int(const std::string& text, int line) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    std::ostringstream msg;
    msg << "line " << line << ": expected an integer, got '" << text << "'";
    throw FormatError(msg.str());
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string model_name(ModelId model) {
  switch (model) {
    case ModelId::FlatHard: return "flat-hard";
    case ModelId::FlatVonMises: return "flat-vm";
    case ModelId::CommunityHard: return "comm-hard";
    case ModelId::CommunityVonMises: return "comm-vm";
  }
  return "?";
}

ModelId parse_model(const std::string& name) {
  if (name == "flat-hard") return ModelId::FlatHard;
  if (name == "flat-vm") return ModelId::FlatVonMises;
  if (name == "comm-hard") return ModelId::CommunityHard;
  if (name == "comm-vm") return ModelId::CommunityVonMises;
  throw FormatError("unknown model '" + name +
                    "' (expected flat-hard, flat-vm, comm-hard or comm-vm)");
}

bool is_community(ModelId model) {
  return model == ModelId::CommunityHard || model == ModelId::CommunityVonMises;
}

std::string format_signal(const SignalKind& signal) {
  if (const auto* hard = std::get_if<HardCluster>(&signal)) {
    return "hard:tau=" + fmt17(hard->tau.value());
  }
  return "vonmises:kappa=" + fmt17(std::get<VonMises>(signal).kappa.value());
}

SignalKind parse_signal(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("hard:tau=", 0) == 0) {
    return HardCluster{ArcFraction(to_double(t.substr(9), 0))};
  }
  if (t.rfind("vonmises:kappa=", 0) == 0) {
    return VonMises{Concentration(to_double(t.substr(15), 0))};
  }
  throw FormatError("unrecognized signal '" + text + "'");
}

void write_dataset(std::ostream& out, const Dataset& ds, bool reveal_truth) {
  out << "#model=" << model_name(ds.model) << "\n";
  out << "#N=" << ds.N << "\n";
  out << "#K=" << ds.K << "\n";
  if (ds.signal) out << "#signal=" << format_signal(*ds.signal) << "\n";
  if (ds.seed) out << "#seed=" << *ds.seed << "\n";
  if (const auto* flat = std::get_if<FlatSample>(&ds.data)) {
    if (reveal_truth && flat->truth) {
      out << "#truth=" << join(flat->truth->subset) << "\n";
      out << "#theta_star=" << fmt17(flat->truth->theta_star.value()) << "\n";
    }
    for (const Angle& a : flat->angles) out << fmt17(a.value()) << "\n";
    return;
  }
  const auto& edges = std::get<EdgeSample>(ds.data);
  if (reveal_truth && edges.truth()) {
    out << "#truth=" << join(edges.truth()->community) << "\n";
    out << "#theta_star=" << fmt17(edges.truth()->theta_star.value()) << "\n";
  }
  const int n = edges.vertices();
  std::size_t e = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out << i << ',' << j << ',' << fmt17(edges.edge_angles()[e++].value())
          << "\n";
    }
  }
}

Dataset read_dataset(std::istream& in) {
  std::map<std::string, std::string> header;
  std::vector<std::string> body;
  std::vector<int> body_lines;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;  // plain comment
      header[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
      continue;
    }
    body.push_back(line);
    body_lines.push_back(lineno);
  }
  for (const char* key : {"model", "N", "K"}) {
    if (!header.count(key)) {
      throw FormatError(std::string("dataset header is missing '#") + key + "='");
    }
  }

  Dataset ds;
  ds.model = parse_model(header["model"]);
  ds.N = static_cast<int>(to_int(header["N"], 0));
  ds.K = static_cast<int>(to_int(header["K"], 0));
  if (header.count("signal")) ds.signal = parse_signal(header["signal"]);
  if (header.count("seed")) {
    ds.seed = static_cast<std::uint64_t>(std::stoull(header["seed"]));
  }
  std::optional<std::vector<int>> truth;
  std::optional<Angle> theta_star;
  if (header.count("truth")) {
    truth.emplace();
    for (const auto& p : split(header["truth"], ',')) {
      truth->push_back(static_cast<int>(to_int(p, 0)));
    }
  }
  if (header.count("theta_star")) {
    theta_star = Angle(to_double(header["theta_star"], 0));
  }

  if (!is_community(ds.model)) {
    if (static_cast<int>(body.size()) != ds.N) {
      std::ostringstream msg;
      msg << "header declares N=" << ds.N << " but found " << body.size()
          << " angle lines";
      throw FormatError(msg.str());
    }
    FlatSample flat;
    for (std::size_t i = 0; i < body.size(); ++i) {
      flat.angles.emplace_back(to_double(body[i], body_lines[i]));
    }
    if (truth && theta_star) flat.truth = PlantedFlat{*truth, *theta_star};
    ds.data = std::move(flat);
    return ds;
  }

  const int n = ds.N;
  if (n < 2 || body.size() != edge_count(n)) {
    std::ostringstream msg;
    msg << "header declares n=" << n << " but found " << body.size()
        << " edge lines";
    throw FormatError(msg.str());
  }
  std::vector<Angle> angles(body.size());
  std::vector<char> seen(body.size(), 0);
  for (std::size_t r = 0; r < body.size(); ++r) {
    const auto parts = split(body[r], ',');
    if (parts.size() != 3) {
      throw FormatError("line " + std::to_string(body_lines[r]) +
                        ": expected i,j,angle");
    }
    const auto i = to_int(parts[0], body_lines[r]);
    const auto j = to_int(parts[1], body_lines[r]);
    if (i < 0 || j <= i || j >= n) {
      throw FormatError("line " + std::to_string(body_lines[r]) +
                        ": need 0 <= i < j < n");
    }
    const auto e = edge_index(n, static_cast<int>(i), static_cast<int>(j));
    if (seen[e]) {
      throw FormatError("line " + std::to_string(body_lines[r]) +
                        ": duplicate edge");
    }
    seen[e] = 1;
    angles[e] = Angle(to_double(parts[2], body_lines[r]));
  }
  std::optional<PlantedCommunity> planted;
  if (truth && theta_star) planted = PlantedCommunity{*truth, *theta_star};
  ds.data = EdgeSample(n, std::move(angles), std::move(planted));
  return ds;
}

}  // namespace circlab
