#include "polydiv/lattice.hpp"

#include <numeric>

namespace polydiv {

namespace {

using boost::multiprecision::abs;

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

void swap_rows(ZMatrix& a, Eigen::Index i, Eigen::Index j) {
  if (i != j) a.row(i).swap(a.row(j));
}
void swap_cols(ZMatrix& a, Eigen::Index i, Eigen::Index j) {
  if (i != j) a.col(i).swap(a.col(j));
}

}  // namespace

SmithForm smith_form(const ZMatrix& input, const std::vector<int>& column_order) {
  const Eigen::Index m = input.rows(), n = input.cols();
  ZMatrix a = input;
  ZMatrix u = ZMatrix::Identity(m, m);
  ZMatrix v = ZMatrix::Identity(n, n);
  if (!column_order.empty()) {
    if (static_cast<Eigen::Index>(column_order.size()) != n)
      throw Error(ErrorCode::InvalidInput, "pivot order has wrong length");
    ZMatrix p = ZMatrix::Zero(n, n);
    std::vector<bool> seen(n, false);
    for (Eigen::Index j = 0; j < n; ++j) {
      int c = column_order[j];
      if (c < 0 || c >= n || seen[c]) throw Error(ErrorCode::InvalidInput, "pivot order is not a permutation");
      seen[c] = true;
      p(c, j) = 1;
    }
    a = a * p;
    v = p;
  }

  Eigen::Index t = 0;
  while (t < std::min(m, n)) {
    // smallest nonzero entry of the trailing block, column-major scan
    Eigen::Index pi = -1, pj = -1;
    for (Eigen::Index j = t; j < n; ++j)
      for (Eigen::Index i = t; i < m; ++i)
        if (a(i, j) != 0 && (pi < 0 || abs(a(i, j)) < abs(a(pi, pj)))) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    swap_rows(a, t, pi);
    swap_rows(u, t, pi);
    swap_cols(a, t, pj);
    swap_cols(v, t, pj);

    for (;;) {
      bool clean = true;
      for (Eigen::Index i = t + 1; i < m; ++i) {
        if (a(i, t) == 0) continue;
        Integer q = floor_div(a(i, t), a(t, t));
        a.row(i) -= q * a.row(t);
        u.row(i) -= q * u.row(t);
        if (a(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        if (a(t, j) == 0) continue;
        Integer q = floor_div(a(t, j), a(t, t));
        a.col(j) -= q * a.col(t);
        v.col(j) -= q * v.col(t);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) {
        // bring a smaller remainder into the pivot position
        Eigen::Index bi = -1, bj = -1;
        for (Eigen::Index i = t + 1; i < m; ++i)
          if (a(i, t) != 0 && (bi < 0 || abs(a(i, t)) < abs(a(bi, bj)))) { bi = i; bj = t; }
        for (Eigen::Index j = t + 1; j < n; ++j)
          if (a(t, j) != 0 && (bi < 0 || abs(a(t, j)) < abs(a(bi, bj)))) { bi = t; bj = j; }
        if (bj == t) {
          swap_rows(a, t, bi);
          swap_rows(u, t, bi);
        } else {
          swap_cols(a, t, bj);
          swap_cols(v, t, bj);
        }
        continue;
      }
      // divisibility of the remaining block
      Eigen::Index bad = -1;
      for (Eigen::Index i = t + 1; i < m && bad < 0; ++i)
        for (Eigen::Index j = t + 1; j < n; ++j)
          if (a(i, j) % a(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      a.row(t) += a.row(bad);
      u.row(t) += u.row(bad);
    }
    if (a(t, t) < 0) {
      a.row(t) *= -1;
      u.row(t) *= -1;
    }
    ++t;
  }

  SmithForm sf{u, v, a, {}};
  for (Eigen::Index i = 0; i < std::min(m, n); ++i)
    if (a(i, i) != 0) sf.invariant_factors.push_back(a(i, i));
  return sf;
}

ZMatrix hermite_rows(const ZMatrix& input) {
  ZMatrix h = input;
  const Eigen::Index k = h.rows(), n = h.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < n && r < k; ++c) {
    for (;;) {
      Eigen::Index best = -1;
      for (Eigen::Index i = r; i < k; ++i)
        if (h(i, c) != 0 && (best < 0 || abs(h(i, c)) < abs(h(best, c)))) best = i;
      if (best < 0) break;
      swap_rows(h, r, best);
      bool clean = true;
      for (Eigen::Index i = r + 1; i < k; ++i) {
        if (h(i, c) == 0) continue;
        Integer q = floor_div(h(i, c), h(r, c));
        h.row(i) -= q * h.row(r);
        if (h(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (h(r, c) == 0) continue;
    if (h(r, c) < 0) h.row(r) *= -1;
    for (Eigen::Index i = 0; i < r; ++i) {
      Integer q = floor_div(h(i, c), h(r, c));
      if (q != 0) h.row(i) -= q * h.row(r);
    }
    ++r;
  }
  return h.topRows(r);
}

ZVector reduce_modulo(const ZVector& x, const ZMatrix& hnf) {
  ZVector y = x;
  for (Eigen::Index i = 0; i < hnf.rows(); ++i) {
    Eigen::Index c = 0;
    while (hnf(i, c) == 0) ++c;
    Integer q = floor_div(y[c], hnf(i, c));
    if (q != 0) y -= q * hnf.row(i).transpose();
  }
  return y;
}

std::vector<QVector> SmithSplit::kernel_basis() const {
  std::vector<QVector> out;
  for (Eigen::Index j = 0; j < kernel.cols(); ++j) out.push_back(to_q(ZVector(kernel.col(j))));
  return out;
}

SmithSplit smith_split(const LatticeMap& pr, const SplitOptions& options) {
  const Eigen::Index m = pr.matrix.rows(), n = pr.matrix.cols();
  SmithForm sf = smith_form(pr.matrix, options.pivot_order);
  if (static_cast<Eigen::Index>(sf.invariant_factors.size()) != m)
    throw Error(ErrorCode::NotSurjective, "map has rank below its target rank");
  for (const auto& d : sf.invariant_factors)
    if (d != 1) throw Error(ErrorCode::NotSurjective, "invariant factor " + d.str());

  ZMatrix section = sf.v.leftCols(m) * sf.u;
  ZMatrix kernel = sf.v.rightCols(n - m);
  if (options.canonicalize && n > m) {
    ZMatrix h = hermite_rows(ZMatrix(kernel.transpose()));
    kernel = h.transpose();
    for (Eigen::Index j = 0; j < m; ++j) section.col(j) = reduce_modulo(ZVector(section.col(j)), h);
  }
  ZMatrix full(n, n);
  full << section, kernel;
  auto inv = inverse<Rational>(to_q(full));
  if (!inv) throw Error(ErrorCode::NotSurjective, "splitting matrix is singular");
  ZMatrix cos = to_z(QMatrix(inv->bottomRows(n - m)));
  return SmithSplit{LatticeMap(section), LatticeMap(cos), kernel};
}

ZMatrix integer_kernel(const ZMatrix& a) {
  SmithForm sf = smith_form(a);
  Eigen::Index r = static_cast<Eigen::Index>(sf.invariant_factors.size());
  ZMatrix k = sf.v.rightCols(a.cols() - r);
  if (k.cols() == 0) return k;
  return hermite_rows(ZMatrix(k.transpose())).transpose();
}

std::optional<ZVector> solve_integer(const ZMatrix& a, const ZVector& b) {
  SmithForm sf = smith_form(a);
  ZVector ub = sf.u * b;
  Eigen::Index r = static_cast<Eigen::Index>(sf.invariant_factors.size());
  ZVector y = ZVector::Zero(a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (i < r) {
      if (ub[i] % sf.diagonal(i, i) != 0) return std::nullopt;
      y[i] = ub[i] / sf.diagonal(i, i);
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  return ZVector(sf.v * y);
}

PrimitiveMultiplicity primitive_and_multiplicity(const QVector& v, bool want_direction) {
  PrimitiveMultiplicity out;
  out.multiplicity = denominator_lcm(v);
  if (want_direction) out.direction = primitive(v);
  return out;
}

bool is_unimodular(const ZMatrix& a) {
  if (a.rows() != a.cols()) return false;
  Rational d = determinant(a);
  return d == 1 || d == -1;
}

}  // namespace polydiv
