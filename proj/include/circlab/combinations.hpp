#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace circlab {

inline double log_binomial(double n, double k) {
  if (k < 0 || k > n) return -INFINITY;
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// C(n, k) as a double; exact for results below 2^53.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// k-subsets of {0, ..., n-1} in revolving-door order (Knuth, TAOCP 7.2.1.3,
// Algorithm R): consecutive subsets differ by exactly one element swapped
// out and one swapped in.
class RevolvingDoor {
 public:
  RevolvingDoor(int n, int k) : n_(n), t_(k), c_(static_cast<std::size_t>(k) + 2) {
    for (int j = 1; j <= t_; ++j) c_[j] = j - 1;
    c_[t_ + 1] = n_;
  }

  // Current subset, ascending.
  std::vector<int> current() const {
    return std::vector<int>(c_.begin() + 1, c_.begin() + 1 + t_);
  }
  const int* data() const { return c_.data() + 1; }
  int size() const { return t_; }

  // Advances to the next subset; returns false after the last one. When it
  // returns true, `out` left the set and `in` joined it.
  bool next(int& out, int& in) {
    if (t_ == 0 || t_ >= n_) return false;
    std::vector<int>& c = c_;
    int j;
    if (t_ % 2 == 1) {
      if (c[1] + 1 < c[2]) {
        out = c[1];
        in = ++c[1];
        return true;
      }
      if (t_ == 1) return false;
      j = 2;
      goto r4;
    }
    if (c[1] > 0) {
      out = c[1];
      in = --c[1];
      return true;
    }
    j = 2;
    goto r5;
  r4:
    // Here c[j] == c[j-1] + 1.
    if (c[j] >= j) {
      out = c[j];
      in = j - 2;
      c[j] = c[j - 1];
      c[j - 1] = j - 2;
      return true;
    }
    ++j;
  r5:
    // Here c[j-1] == j - 2.
    if (c[j] + 1 < c[j + 1]) {
      out = c[j - 1];
      in = c[j] + 1;
      c[j - 1] = c[j];
      c[j] = c[j] + 1;
      return true;
    }
    ++j;
    if (j <= t_) goto r4;
    return false;
  }

 private:
  int n_;
  int t_;
  std::vector<int> c_;  // 1-based, c_[t+1] = n sentinel
};

}  // namespace circlab
