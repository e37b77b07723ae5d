#pragma once

#include "polydiv/lattice.hpp"
#include "polydiv/pdivisor.hpp"
#include "polydiv/tvariety.hpp"
#include "polydiv/upgrade.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polydiv {

// a concave map Box -> CDiv_Q(Y) on a curve; unlisted primes are 0
using DivisorialPolyhedron = PLDivisorMap;

// 0 -> M' -> M -> M-bar -> 0 split by s*, t, together with the dual maps on N
struct DowngradeContext {
  LatticeMap pr;  // M -> M-bar
  SmithSplit split;
  QMatrix pi;     // N -> N'
  QMatrix s;      // N -> N-bar

  static DowngradeContext make(const LatticeMap& pr, const SplitOptions& options = {});
  int rank() const { return pr.source_rank(); }
  int fiber_rank() const { return static_cast<int>(pi.rows()); }
  // the isomorphism N -> N-bar + N', x -> (s x, pi x)
  QMatrix splitting() const;
  // weight of M for u' in M' over u-bar in M-bar
  QVector lift(const QVector& ubar, const QVector& uprime) const;
};

bool is_identically_zero(const DivisorialPolyhedron& psi, const std::string& label);

// lim Psi_P(u + lambda w) / lambda for w in tail(Box)
Rational linear_part(const DivisorialPolyhedron& psi, const std::string& label, const QVector& w);

struct DualFunction {
  Polyhedron box;           // Box_P^*
  PLFunction psi;           // Psi_P^*, on Box_P^*
  PolyhedralComplex cells;  // linearity regions of Psi_P^*; left empty unless Box is full-dimensional
};

DualFunction dualize(const DivisorialPolyhedron& psi, const std::string& label);

struct FanFromResult {
  FanPtr fan;
  // the invariant divisor on X(S) whose support function is Psi^*
  TInvariantDivisor support;
  std::map<std::string, DualFunction> duals;
};

// members Delta (x) P + empty (x) (marks - P) for the cells Delta of every slice
FanFromResult fan_from(const DivisorialPolyhedron& psi, const std::vector<std::string>& marks);

DivisorialPolyhedron downgrade_box_psi(const PolyhedralDivisor& d, const DowngradeContext& ctx, const QVector& ubar);

// one integral weight in the relative interior of pr of every weight chamber
std::vector<QVector> representative_weights(const PolyhedralDivisor& d, const DowngradeContext& ctx);
// marked points of d and inf, padded with 0 or 1 to two points on P^1
std::vector<std::string> downgrade_marks(const PolyhedralDivisor& d);
// coarsest subdivision of pi(D_P) refining the images of the faces of D_P
PolyhedralComplex direct_slice(const PolyhedralDivisor& d, const DowngradeContext& ctx, const std::string& label);

struct DowngradeResult {
  FanPtr fan;
  InvariantPDivisorOnFan divisor;
  DivisorialPolyhedron psi;  // sum of psi[u-bar] over the representative weights
  std::vector<QVector> weights;
  std::vector<std::string> marks;
  std::optional<ProperReport> report;  // through the toric form, when X(S) is toric
  std::vector<std::string> notes;
};

DowngradeResult downgrade(const PolyhedralDivisor& d, const DowngradeContext& ctx);

// drop coefficients equal to the tail
InvariantPDivisorOnFan canonical(const InvariantPDivisorOnFan& d);
bool same_fan(const DivisorialFan& a, const DivisorialFan& b);
bool operator==(const InvariantPDivisorOnFan& a, const InvariantPDivisorOnFan& b);

// the polyhedral divisor on the toric model of a fan over P^1, D_{P,v} being the ray (mu v, +-mu)
std::optional<PolyhedralDivisor> toric_form(const InvariantPDivisorOnFan& d);

// d with N replaced by N-bar + N' through the splitting
PolyhedralDivisor split_coordinates(const PolyhedralDivisor& d, const DowngradeContext& ctx);

}  // namespace polydiv
