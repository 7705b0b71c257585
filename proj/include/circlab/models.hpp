#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "circlab/random.hpp"
#include "circlab/types.hpp"

namespace circlab {

struct PlantedFlat {
  std::vector<int> subset;  // sorted, distinct
  Angle theta_star;
};

struct PlantedCommunity {
  std::vector<int> community;  // sorted, distinct, size >= 2
  Angle theta_star;
};

struct FlatSample {
  std::vector<Angle> angles;
  std::optional<PlantedFlat> truth;

  int size() const { return static_cast<int>(angles.size()); }
};

// Position of edge {i, j}, i < j, in lexicographic order.
inline std::size_t edge_index(int n, int i, int j) {
  const auto ii = static_cast<std::size_t>(i);
  return ii * static_cast<std::size_t>(n) - ii * (ii + 1) / 2 +
         static_cast<std::size_t>(j - i - 1);
}

inline std::size_t edge_count(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

// Angles on the edges of the complete graph K_n, stored in lexicographic
// order of (i, j) with i < j.
class EdgeSample {
 public:
  EdgeSample() = default;
  EdgeSample(int n, std::vector<Angle> edge_angles,
             std::optional<PlantedCommunity> truth = std::nullopt);

  int vertices() const { return n_; }
  const std::vector<Angle>& edge_angles() const { return angles_; }
  const std::optional<PlantedCommunity>& truth() const { return truth_; }

  // Symmetric access; i != j.
  Angle at(int i, int j) const;

 private:
  int n_ = 0;
  std::vector<Angle> angles_;
  std::optional<PlantedCommunity> truth_;
};

Angle sample_von_mises(Angle theta, Concentration kappa, Rng& rng);
// Uniform on the half-open arc [theta, theta + 2 pi tau).
Angle sample_arc_uniform(Angle theta, ArcFraction tau, Rng& rng);
Angle sample_uniform_angle(Rng& rng);
// One draw from the planted distribution anchored at theta.
Angle sample_signal(const SignalKind& signal, Angle theta, Rng& rng);

// Draw order: subset, then Theta*, then angles by index (H1); angles only (H0).
FlatSample gen_flat(int N, int K, const SignalKind& signal, bool under_h1,
                    Rng& rng);
// Draw order: community, then Theta*, then edges in lexicographic order.
EdgeSample gen_community(int n, int k, const SignalKind& signal, bool under_h1,
                         Rng& rng);

}  // namespace circlab
