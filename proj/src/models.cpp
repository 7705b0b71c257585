#include "circlab/models.hpp"

#include <cmath>
#include <sstream>

#include "circlab/errors.hpp"

namespace circlab {

EdgeSample::EdgeSample(int n, std::vector<Angle> edge_angles,
                       std::optional<PlantedCommunity> truth)
    : n_(n), angles_(std::move(edge_angles)), truth_(std::move(truth)) {
  if (n < 2) throw ParameterError("edge sample needs n >= 2");
  if (angles_.size() != edge_count(n)) {
    std::ostringstream msg;
    msg << "edge sample for n=" << n << " needs " << edge_count(n)
        << " angles, got " << angles_.size();
    throw ParameterError(msg.str());
  }
  if (truth_) {
    const auto& c = truth_->community;
    if (c.size() < 2) throw ParameterError("planted community needs k >= 2");
    for (std::size_t a = 0; a < c.size(); ++a) {
      if (c[a] < 0 || c[a] >= n || (a > 0 && c[a] <= c[a - 1])) {
        throw ParameterError("planted community must be sorted, distinct, in range");
      }
    }
  }
}

Angle EdgeSample::at(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw ParameterError("edge endpoints must be distinct vertices in range");
  }
  if (i > j) std::swap(i, j);
  return angles_[edge_index(n_, i, j)];
}

Angle sample_uniform_angle(Rng& rng) { return Angle(kTwoPi * uniform01(rng)); }

Angle sample_arc_uniform(Angle theta, ArcFraction tau, Rng& rng) {
  return Angle(theta.value() + tau.radians() * uniform01(rng));
}

Angle sample_von_mises(Angle theta, Concentration kappa, Rng& rng) {
  const double k = kappa.value();
  if (k < 1e-6) return sample_uniform_angle(rng);
  // Best and Fisher (1979). b = (a - sqrt(2a)) / (2k) rewritten to avoid
  // cancellation for small k.
  const double s = std::sqrt(1.0 + 4.0 * k * k);
  const double a = 1.0 + s;
  const double b = 2.0 * k * a / ((s + 1.0) * (a + std::sqrt(2.0 * a)));
  const double r = (1.0 + b * b) / (2.0 * b);
  while (true) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double u3 = uniform01(rng);
    const double z = std::cos(std::numbers::pi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = k * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double w = std::acos(std::clamp(f, -1.0, 1.0));
      return Angle(theta.value() + (u3 > 0.5 ? w : -w));
    }
  }
}

Angle sample_signal(const SignalKind& signal, Angle theta, Rng& rng) {
  if (const auto* hard = std::get_if<HardCluster>(&signal)) {
    return sample_arc_uniform(theta, hard->tau, rng);
  }
  return sample_von_mises(theta, std::get<VonMises>(signal).kappa, rng);
}

FlatSample gen_flat(int N, int K, const SignalKind& signal, bool under_h1,
                    Rng& rng) {
  if (N < 1) throw ParameterError("gen_flat: N must be >= 1");
  if (K < 1 || K > N) {
    std::ostringstream msg;
    msg << "gen_flat: need 1 <= K <= N, got K=" << K << " N=" << N;
    throw ParameterError(msg.str());
  }
  FlatSample out;
  out.angles.reserve(static_cast<std::size_t>(N));
  if (!under_h1) {
    for (int i = 0; i < N; ++i) out.angles.push_back(sample_uniform_angle(rng));
    return out;
  }
  PlantedFlat truth{sample_subset(N, K, rng), sample_uniform_angle(rng)};
  std::size_t next = 0;
  for (int i = 0; i < N; ++i) {
    if (next < truth.subset.size() && truth.subset[next] == i) {
      out.angles.push_back(sample_signal(signal, truth.theta_star, rng));
      ++next;
    } else {
      out.angles.push_back(sample_uniform_angle(rng));
    }
  }
  out.truth = std::move(truth);
  return out;
}

EdgeSample gen_community(int n, int k, const SignalKind& signal, bool under_h1,
                         Rng& rng) {
  if (k < 2 || k > n) {
    std::ostringstream msg;
    msg << "gen_community: need 2 <= k <= n, got k=" << k << " n=" << n;
    throw ParameterError(msg.str());
  }
  std::vector<Angle> angles;
  angles.reserve(edge_count(n));
  if (!under_h1) {
    for (std::size_t e = 0; e < edge_count(n); ++e) {
      angles.push_back(sample_uniform_angle(rng));
    }
    return EdgeSample(n, std::move(angles));
  }
  PlantedCommunity truth{sample_subset(n, k, rng), sample_uniform_angle(rng)};
  std::vector<char> member(static_cast<std::size_t>(n), 0);
  for (int v : truth.community) member[static_cast<std::size_t>(v)] = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (member[static_cast<std::size_t>(i)] && member[static_cast<std::size_t>(j)]) {
        angles.push_back(sample_signal(signal, truth.theta_star, rng));
      } else {
        angles.push_back(sample_uniform_angle(rng));
      }
    }
  }
  return EdgeSample(n, std::move(angles), std::move(truth));
}

}  // namespace circlab
