#pragma once

#include "polydiv/core.hpp"

#include <optional>
#include <vector>

namespace polydiv {

template <typename Scalar>
struct RowEchelon {
  Mat<Scalar> matrix;
  std::vector<Eigen::Index> pivots;
};

// reduced row echelon form over a field
template <typename Scalar>
RowEchelon<Scalar> rref(Mat<Scalar> a) {
  RowEchelon<Scalar> out;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Eigen::Index p = row;
    while (p < a.rows() && a(p, col) == 0) ++p;
    if (p == a.rows()) continue;
    if (p != row) a.row(p).swap(a.row(row));
    Scalar inv = Scalar(1) / a(row, col);
    for (Eigen::Index j = col; j < a.cols(); ++j) a(row, j) *= inv;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col) == 0) continue;
      Scalar f = a(i, col);
      for (Eigen::Index j = col; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.matrix = a.topRows(row);
  return out;
}

template <typename Scalar>
Eigen::Index rank(const Mat<Scalar>& a) {
  return static_cast<Eigen::Index>(rref<Scalar>(a).pivots.size());
}

// columns span {x : a x = 0}
template <typename Scalar>
Mat<Scalar> nullspace(const Mat<Scalar>& a) {
  auto e = rref<Scalar>(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  Mat<Scalar> basis(a.cols(), a.cols() - static_cast<Eigen::Index>(e.pivots.size()));
  basis.setZero();
  Eigen::Index k = 0;
  for (Eigen::Index free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    basis(free, k) = 1;
    for (size_t r = 0; r < e.pivots.size(); ++r) basis(e.pivots[r], k) = -e.matrix(r, free);
    ++k;
  }
  return basis;
}

// some x with a x = b, if one exists
template <typename Scalar>
std::optional<Vec<Scalar>> solve(const Mat<Scalar>& a, const Vec<Scalar>& b) {
  Mat<Scalar> aug(a.rows(), a.cols() + 1);
  aug << a, b;
  auto e = rref<Scalar>(aug);
  Vec<Scalar> x(a.cols());
  x.setZero();
  for (size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] == a.cols()) return std::nullopt;
    x[e.pivots[r]] = e.matrix(r, a.cols());
  }
  return x;
}

template <typename Scalar>
std::optional<Mat<Scalar>> inverse(const Mat<Scalar>& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  Eigen::Index n = a.rows();
  Mat<Scalar> aug(n, 2 * n);
  aug << a, Mat<Scalar>::Identity(n, n);
  auto e = rref<Scalar>(aug);
  if (static_cast<Eigen::Index>(e.pivots.size()) < n || (n > 0 && e.pivots[n - 1] >= n)) return std::nullopt;
  return Mat<Scalar>(e.matrix.rightCols(n));
}

template <typename Scalar>
Scalar determinant(Mat<Scalar> a) {
  Eigen::Index n = a.rows();
  Scalar det = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return Scalar(0);
    if (p != c) {
      a.row(p).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index i = c + 1; i < n; ++i) {
      if (a(i, c) == 0) continue;
      Scalar f = a(i, c) / a(c, c);
      for (Eigen::Index j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

inline Rational determinant(const ZMatrix& a) { return determinant<Rational>(to_q(a)); }

inline QMatrix rows_of(const std::vector<QVector>& vs, Eigen::Index width) {
  QMatrix m(static_cast<Eigen::Index>(vs.size()), width);
  for (size_t i = 0; i < vs.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = vs[i].transpose();
  return m;
}

inline QMatrix cols_of(const std::vector<QVector>& vs, Eigen::Index height) {
  return rows_of(vs, height).transpose();
}

inline std::vector<QVector> rows_to_vectors(const QMatrix& m) {
  std::vector<QVector> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).transpose());
  return out;
}

inline std::vector<QVector> cols_to_vectors(const QMatrix& m) {
  std::vector<QVector> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j));
  return out;
}

// rref basis of span(vs)
inline std::vector<QVector> span_basis(const std::vector<QVector>& vs, Eigen::Index width) {
  if (vs.empty()) return {};
  return rows_to_vectors(rref<Rational>(rows_of(vs, width)).matrix);
}

inline Eigen::Index rank_of(const std::vector<QVector>& vs, Eigen::Index width) {
  if (vs.empty()) return 0;
  return rank<Rational>(rows_of(vs, width));
}

// basis of the orthogonal complement of span(vs)
inline std::vector<QVector> orthogonal_complement(const std::vector<QVector>& vs, Eigen::Index width) {
  if (vs.empty()) {
    std::vector<QVector> out;
    for (Eigen::Index i = 0; i < width; ++i) out.push_back(unit(static_cast<int>(width), static_cast<int>(i)));
    return out;
  }
  return cols_to_vectors(nullspace<Rational>(rows_of(vs, width)));
}

// orthogonal projection onto span(basis)^perp
class ComplementProjector {
 public:
  ComplementProjector(const std::vector<QVector>& basis, Eigen::Index width) : width_(width) {
    auto b = span_basis(basis, width);
    if (!b.empty()) {
      QMatrix l = rows_of(b, width);
      QMatrix gram = l * l.transpose();
      proj_ = l.transpose() * (*inverse<Rational>(gram)) * l;
      trivial_ = false;
    }
  }
  QVector operator()(const QVector& v) const {
    if (trivial_) return v;
    return v - proj_ * v;
  }

 private:
  Eigen::Index width_;
  bool trivial_ = true;
  QMatrix proj_;
};

}  // namespace polydiv
