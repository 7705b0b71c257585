#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "circlab/errors.hpp"
#include "circlab/lab.hpp"

namespace circlab {
namespace {

const std::set<std::string> kIntegerKeys = {"N", "n", "K", "k"};
const std::set<std::string> kRealKeys = {"tau", "kappa", "regime_epsilon"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string int_text(long long v) { return std::to_string(v); }

void require_two_axes(const SweepGrid& grid) {
  if (grid.axes.size() != 2) {
    throw ParameterError("phase diagram needs exactly two axes, got " +
                         std::to_string(grid.axes.size()));
  }
  const std::string& y = grid.axes[1].name;
  if (!kIntegerKeys.count(y) && !kRealKeys.count(y)) {
    throw ParameterError("vertical axis '" + y +
                         "' must be one of N, n, K, k, tau, kappa, regime_epsilon");
  }
}

// Verdict at y, or nullopt when the parameters are invalid there.
std::optional<Verdict> verdict_at(const ExperimentConfig& base, const std::string& y_name,
                                  const std::string& y_text, std::string* citation) {
  ExperimentConfig cfg = base;
  try {
    apply_key(cfg, y_name, y_text);
    const RegimeVerdict v = cell_verdict(cfg);
    if (citation) *citation = v.citation;
    return v.verdict;
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool is_side(std::optional<Verdict> v, Verdict target) { return v && *v == target; }

}  // namespace

std::vector<BoundaryRow> theory_boundaries(const SweepGrid& grid,
                                           const ExperimentConfig& base) {
  require_two_axes(grid);
  const ConfigAxis& xa = grid.axes[0];
  const ConfigAxis& ya = grid.axes[1];
  const bool integer = kIntegerKeys.count(ya.name) > 0;
  std::vector<double> ys;
  for (const auto& v : ya.values) {
    try {
      ys.push_back(std::stod(v));
    } catch (const std::exception&) {
      throw FormatError("vertical axis value '" + v + "' is not numeric");
    }
  }
  const double y_lo = *std::min_element(ys.begin(), ys.end());
  const double y_hi = *std::max_element(ys.begin(), ys.end());
  const bool log_scale = !integer && y_lo > 0.0;
  const auto text = [&](double y) {
    return integer ? int_text(std::llround(y)) : num(y);
  };

  std::vector<BoundaryRow> rows;
  for (const auto& xv : xa.values) {
    ExperimentConfig cfg = base;
    apply_key(cfg, xa.name, xv);
    for (const Verdict target : {Verdict::Achievable, Verdict::Impossible}) {
      const bool lo_side = is_side(verdict_at(cfg, ya.name, text(y_lo), nullptr), target);
      const bool hi_side = is_side(verdict_at(cfg, ya.name, text(y_hi), nullptr), target);
      if (lo_side == hi_side) continue;  // not bracketed: boundary absent
      double a = y_lo;
      double b = y_hi;
      if (integer) {
        long long ia = std::llround(a);
        long long ib = std::llround(b);
        while (ib - ia > 1) {
          const long long mid = ia + (ib - ia) / 2;
          const bool side = is_side(verdict_at(cfg, ya.name, int_text(mid), nullptr), target);
          (side == lo_side ? ia : ib) = mid;
        }
        a = static_cast<double>(ia);
        b = static_cast<double>(ib);
      } else {
        for (int it = 0; it < 200; ++it) {
          const double mid = log_scale ? std::sqrt(a * b) : 0.5 * (a + b);
          if (!(mid > a && mid < b)) break;
          const bool side = is_side(verdict_at(cfg, ya.name, num(mid), nullptr), target);
          (side == lo_side ? a : b) = mid;
        }
      }
      // Report the last parameter value on the target's side.
      const double y = lo_side ? a : b;
      rows.push_back({xa.name, xv, verdict_name(target), ya.name, y});
    }
  }
  return rows;
}

std::string heatmap_svg(const SweepGrid& grid, const std::vector<PhasePoint>& rows) {
  require_two_axes(grid);
  const std::size_t nx = grid.axes[0].values.size();
  const std::size_t ny = grid.axes[1].values.size();
  if (rows.size() != nx * ny) throw ParameterError("heatmap needs one row per grid cell");
  constexpr int cell = 40;
  constexpr int margin = 80;
  const int width = margin + static_cast<int>(nx) * cell + 20;
  const int height = margin + static_cast<int>(ny) * cell + 20;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\">\n";
  s << "<text x=\"" << margin << "\" y=\"16\" font-size=\"12\">pfa_hat+pmiss_hat</text>\n";
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const PhasePoint& p = rows[i * ny + j];
      const int x = margin + static_cast<int>(i) * cell;
      // Larger vertical-axis index drawn higher.
      const int y = 30 + static_cast<int>(ny - 1 - j) * cell;
      std::string fill = "#bbbbbb";
      if (!p.failed) {
        const double t = std::clamp(p.total_error(), 0.0, 1.0);
        const int g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#ff%02x%02x", g, g);
        fill = buf;
      }
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
        << cell << "\" fill=\"" << fill << "\" stroke=\"#444444\"/>\n";
      if (!p.failed) {
        s << "<text x=\"" << x + 4 << "\" y=\"" << y + 24 << "\" font-size=\"10\">"
          << num(std::round(p.total_error() * 100.0) / 100.0) << "</text>\n";
      }
    }
  }
  const int base_y = 30 + static_cast<int>(ny) * cell;
  for (std::size_t i = 0; i < nx; ++i) {
    s << "<text x=\"" << margin + static_cast<int>(i) * cell + 4 << "\" y=\"" << base_y + 14
      << "\" font-size=\"10\">" << grid.axes[0].values[i] << "</text>\n";
  }
  for (std::size_t j = 0; j < ny; ++j) {
    s << "<text x=\"4\" y=\"" << 30 + static_cast<int>(ny - 1 - j) * cell + 24
      << "\" font-size=\"10\">" << grid.axes[1].values[j] << "</text>\n";
  }
  s << "<text x=\"" << margin << "\" y=\"" << base_y + 34 << "\" font-size=\"12\">"
    << grid.axes[0].name << "</text>\n";
  s << "<text x=\"4\" y=\"24\" font-size=\"12\">" << grid.axes[1].name << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

PhaseDiagramFiles phase_diagram(const SweepGrid& grid, const ExperimentConfig& base,
                                const std::string& prefix) {
  require_two_axes(grid);
  const auto boundaries = theory_boundaries(grid, base);
  const auto rows = sweep(grid, base);
  PhaseDiagramFiles files{prefix + "_sweep.csv", prefix + "_boundary.csv",
                          prefix + "_heatmap.svg"};
  const auto open = [](const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    return out;
  };
  {
    auto out = open(files.sweep_csv);
    write_csv(out, rows);
  }
  {
    auto out = open(files.boundary_csv);
    out << "x_name,x_value,boundary,y_name,y_value\n";
    for (const auto& b : boundaries) {
      out << b.x_name << ',' << b.x_value << ',' << b.boundary << ',' << b.y_name << ','
          << num(b.y_value) << '\n';
    }
  }
  {
    auto out = open(files.svg);
    out << heatmap_svg(grid, rows);
  }
  return files;
}

}  // namespace circlab
