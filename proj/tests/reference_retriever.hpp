#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

// Straight-line scoring over plain vectors, written from the formulas.
namespace ref {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cos(const Vec& a, const Vec& b) {
  double na = std::sqrt(dot(a, a)), nb = std::sqrt(dot(b, b));
  if (na == 0 || nb == 0) return 0;
  return dot(a, b) / (na * nb);
}

inline double sim_count(int a, int b) {
  if (a == 0 && b == 0) return 1;
  return 1.0 - std::abs(a - b) / double(std::max(a, b));
}

inline double sim_s(const std::vector<Vec>& q1, const std::vector<Vec>& q2, double threshold) {
  std::vector<bool> gone1(q1.size()), gone2(q2.size());
  double inter = 0;
  for (std::size_t m = 0; m < q1.size(); ++m) {
    int best = -1;
    double best_sim = 0;
    for (std::size_t n = 0; n < q2.size(); ++n) {
      if (gone2[n]) continue;
      double s = cos(q1[m], q2[n]);
      if (best < 0 || s > best_sim) best = int(n), best_sim = s;
    }
    if (best >= 0 && best_sim > threshold) {
      inter += best_sim;
      gone1[m] = true;
      gone2[std::size_t(best)] = true;
    }
  }
  std::size_t dim = q1.empty() ? (q2.empty() ? 0 : q2[0].size()) : q1[0].size();
  Vec r1(dim, 0.0), r2(dim, 0.0);
  std::size_t c1 = 0, c2 = 0;
  for (std::size_t m = 0; m < q1.size(); ++m)
    if (!gone1[m]) {
      for (std::size_t k = 0; k < dim; ++k) r1[k] += q1[m][k];
      ++c1;
    }
  for (std::size_t n = 0; n < q2.size(); ++n)
    if (!gone2[n]) {
      for (std::size_t k = 0; k < dim; ++k) r2[k] += q2[n][k];
      ++c2;
    }
  double diff = (c1 == 0 && c2 == 0) ? 0.0 : double(std::max(c1, c2)) * (1.0 - cos(r1, r2));
  return inter + diff == 0 ? 0.0 : inter / (inter + diff);
}

}  // namespace ref
