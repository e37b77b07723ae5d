#pragma once

#include "polydiv/core.hpp"
#include "polydiv/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polydiv {

struct Lattice {
  int rank = 0;
  std::string name;
};

inline Lattice dual(const Lattice& l) {
  if (l.name.size() > 1 && l.name.back() == '*') return {l.rank, l.name.substr(0, l.name.size() - 1)};
  return {l.rank, l.name + "*"};
}

// integer matrix, target.rank rows by source.rank columns
struct LatticeMap {
  ZMatrix matrix;

  LatticeMap() = default;
  explicit LatticeMap(ZMatrix m) : matrix(std::move(m)) {}
  static LatticeMap identity(int n) { return LatticeMap(ZMatrix::Identity(n, n)); }

  int source_rank() const { return static_cast<int>(matrix.cols()); }
  int target_rank() const { return static_cast<int>(matrix.rows()); }
  QVector operator()(const QVector& v) const { return to_q(matrix) * v; }
  LatticeMap transpose() const { return LatticeMap(matrix.transpose()); }
};

inline LatticeMap compose(const LatticeMap& outer, const LatticeMap& inner) {
  return LatticeMap(outer.matrix * inner.matrix);
}

// U * a * V = diagonal, U and V unimodular
struct SmithForm {
  ZMatrix u, v, diagonal;
  std::vector<Integer> invariant_factors;  // nonzero diagonal entries, each dividing the next
};

// column_order permutes the columns visited by the pivot search; empty means natural order
SmithForm smith_form(const ZMatrix& a, const std::vector<int>& column_order = {});

// row-style Hermite normal form of the lattice spanned by the rows of a (zero rows dropped)
ZMatrix hermite_rows(const ZMatrix& a);

// reduce x modulo the row lattice of an HNF matrix
ZVector reduce_modulo(const ZVector& x, const ZMatrix& hnf);

struct SplitOptions {
  std::vector<int> pivot_order;
  bool canonicalize = true;
};

// for a surjection pr: Z^n -> Z^m
struct SmithSplit {
  LatticeMap section;     // s*: target -> source, pr * s* = id
  LatticeMap cosection;   // t: source -> Z^(n-m), t * K = id, t * s* = 0
  ZMatrix kernel;         // columns are a basis of ker(pr)
  std::vector<QVector> kernel_basis() const;
};

SmithSplit smith_split(const LatticeMap& pr, const SplitOptions& options = {});

// columns span the saturated integer kernel, in canonical Hermite order
ZMatrix integer_kernel(const ZMatrix& a);

// some integer x with a x = b
std::optional<ZVector> solve_integer(const ZMatrix& a, const ZVector& b);

struct PrimitiveMultiplicity {
  ZVector direction;  // primitive, or empty for the zero vector
  Integer multiplicity;
};

// multiplicity: least mu > 0 with mu * v integral. direction requires v != 0
PrimitiveMultiplicity primitive_and_multiplicity(const QVector& v, bool want_direction = true);

bool is_unimodular(const ZMatrix& a);

}  // namespace polydiv
