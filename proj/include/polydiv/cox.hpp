#pragma once

#include "polydiv/lattice.hpp"
#include "polydiv/pdivisor.hpp"
#include "polydiv/tvariety.hpp"
#include "polydiv/upgrade.hpp"

#include <string>
#include <vector>

namespace polydiv {

// assumptions on X(S) that are taken on trust and recorded
struct CoxHypotheses {
  bool complete = false;
  bool q_factorial = false;
  bool class_group_free = false;
};

// 0 -> Cl(X)^* -> Z^(V u R) -> Z^P/Z + N -> 0, split by smith_split
struct CoxData {
  FanPtr fan;
  std::vector<std::string> primes;  // P
  std::vector<VertexId> vertices;   // V, in the order of the first basis vectors
  std::vector<Integer> mu;          // mu(v) for every element of V
  std::vector<QVector> rays;        // R, after V
  ZMatrix quotient;                 // Z^P -> Z^P/Z
  LatticeMap pi;
  SmithSplit split;                 // section t^*, cosection s, kernel Cl(X)^*
  CoxHypotheses hypotheses;

  int basis_size() const { return static_cast<int>(vertices.size() + rays.size()); }
  int class_rank() const { return static_cast<int>(split.kernel.cols()); }
  int rank() const { return fan->rank(); }
  // the coordinates of Cl(X)^* + N inside Z^(V u R)
  QMatrix embedding() const;
  // s(e(i))
  QVector cosection(int i) const;
  int index_of(const VertexId& v) const;
  int index_of_ray(const QVector& r) const;
};

CoxData cox_sequence(const FanPtr& fan, const std::vector<std::string>& primes, const SplitOptions& options = {},
                     const CoxHypotheses& hypotheses = {});

// prime labels of X(S) for the raw Cox divisor
std::string vertex_label(const VertexId& v);
std::string ray_prime_label(const QVector& r);

// sum s(e(P,v)) (x) D_{P,v} + sum s(e(rho)) (x) D_rho on the primes of X, tail 0
PolyhedralDivisor cox_raw(const CoxData& cd);

// the raw divisor as an invariant p-divisor on X(S), ready for the upgrade
InvariantPDivisorOnFan cox_invariant(const CoxData& cd);

struct CoxUpgrade {
  PolyhedralDivisor divisor;                 // on Y, in Cl(X)^* + N
  std::map<std::string, Polyhedron> second;  // conv{e(P,v)/mu} + Q_{>=0}^R - t^*(e(P)) in Z^(V u R)
};

CoxUpgrade cox_upgrade(const CoxData& cd);
CorrectionResult cox_correct(const CoxData& cd);

// the class of the invariant divisor with coefficient vector x in Z^(V u R)^*, and a representative of a class
QVector divisor_class(const CoxData& cd, const QVector& x);
TInvariantDivisor class_representative(const CoxData& cd, const QVector& c);

// x_to = A x_from between the Cl(X)^* + N coordinates of two splittings of the same sequence
QMatrix coordinate_change(const CoxData& from, const CoxData& to);

}  // namespace polydiv
