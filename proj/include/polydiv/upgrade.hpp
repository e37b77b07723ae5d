#pragma once

#include "polydiv/pdivisor.hpp"
#include "polydiv/tvariety.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polydiv {

// sum Delta_rho (x) D_rho + sum Delta_{P,v} (x) mu(v) D_{P,v} on X(S); unlisted coefficients equal the tail
struct InvariantPDivisorOnFan {
  FanPtr fan;
  Cone tail;
  std::map<QVector, Polyhedron, QVectorLess> ray_coeffs;
  std::map<VertexId, Polyhedron> vertex_coeffs;

  int rank() const { return tail.ambient_dim(); }
  Polyhedron ray_coefficient(const QVector& ray) const;
  Polyhedron vertex_coefficient(const std::string& label, const QVector& v) const;
};

// throws InvalidInput on keys outside ray(S) / vert_P(S) or coefficients with another tail
void validate(const InvariantPDivisorOnFan& d);

// the invariant divisor D(u) on X(S)
TInvariantDivisor evaluate(const InvariantPDivisorOnFan& d, const QVector& u);

// cones and coefficients live in N + N', N coordinates first
Cone upgrade_tailcone(const InvariantPDivisorOnFan& d);
PolyhedralDivisor upgrade_coefficients(const InvariantPDivisorOnFan& d);

struct UpgradeResult {
  PolyhedralDivisor divisor;
  ProperReport report;
  bool contraction_free = false;
  std::optional<bool> smooth_base;  // unknown for label-only bases
  std::vector<std::string> notes;

  bool hypotheses_hold() const { return contraction_free && smooth_base.value_or(false); }
};

UpgradeResult upgrade(const InvariantPDivisorOnFan& d);
// members of a divisorial fan on X(S), upgraded one by one; gluing is not rechecked
std::vector<UpgradeResult> upgrade_all(const std::vector<InvariantPDivisorOnFan>& ds);

struct CorrectionResult {
  PolyhedralDivisor divisor;
  Cone sigma_hat;
  ProperReport report;
};

// enlarge the tail to pos(deg D) on a base with Picard group Z
CorrectionResult correct_pic_z(const PolyhedralDivisor& d);

// smooth refinement by stellar subdivisions, always at the lexicographically first singular cone;
// the original rays keep their indices
Fan resolve_fan(const Fan& f);
// pull a fan over a toric base back to the resolution of the base; new rays are labelled by ray_label.
// Declared primes keep their labels, with classes pulled back; this assumes they avoid the blown-up centres.
DivisorialFan resolve_base(const DivisorialFan& s);

}  // namespace polydiv
