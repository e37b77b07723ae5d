#pragma once

#include "polydiv/core.hpp"
#include "polydiv/polyhedra.hpp"

#include <random>
#include <vector>

namespace polydiv::testing {

class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  Rational rational(long lo, long hi, long max_den = 3) {
    long d = integer(1, max_den);
    return Rational(integer(lo * d, hi * d), d);
  }

  QVector int_vector(int n, long lo, long hi) {
    QVector v(n);
    for (int i = 0; i < n; ++i) v[i] = integer(lo, hi);
    return v;
  }

  QVector nonzero_int_vector(int n, long lo, long hi) {
    for (;;) {
      QVector v = int_vector(n, lo, hi);
      if (!is_zero(v)) return v;
    }
  }

  QVector rational_vector(int n, long lo, long hi, long max_den = 3) {
    QVector v(n);
    for (int i = 0; i < n; ++i) v[i] = rational(lo, hi, max_den);
    return v;
  }

  ZMatrix int_matrix(int rows, int cols, long lo, long hi) {
    ZMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = integer(lo, hi);
    return m;
  }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<size_t>(integer(0, static_cast<long>(xs.size()) - 1))];
  }

  // a pointed cone spanned by a few integer vectors inside an open halfspace
  Cone pointed_cone(int n, int gens) {
    QVector h = nonzero_int_vector(n, -2, 2);
    std::vector<QVector> rs;
    while (static_cast<int>(rs.size()) < gens) {
      QVector v = nonzero_int_vector(n, -3, 3);
      if (v.dot(h) > 0) rs.push_back(v);
    }
    return Cone::from_rays(n, rs);
  }

  Polyhedron polytope(int n, int verts, long lo = -3, long hi = 3, long max_den = 2) {
    std::vector<QVector> vs;
    for (int i = 0; i < verts; ++i) vs.push_back(rational_vector(n, lo, hi, max_den));
    return Polyhedron::hull(n, vs);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace polydiv::testing
