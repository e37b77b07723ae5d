#pragma once

#include "polydiv/pdivisor.hpp"
#include "polydiv/tvariety.hpp"
#include "polydiv/upgrade.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polydiv {

// a decomposition (Delta_0, 1/k) + (Delta_1, 0) + ... + (Delta_l, 0) of delta cap [r = 1] in N + Z, with r = k r_0 and
// r_0 the last coordinate. With multiplicities the decomposition reads Delta^+ = Delta_0 + k_1 Delta_1 + ... + k_l Delta_l.
struct DeformationInput {
  Cone delta;
  QVector r;
  std::vector<Polyhedron> parts;
  std::vector<Integer> multiplicities;  // empty unless mixed

  Integer k = 1;
  Cone sigma;      // delta cap (N, 0)
  Coefficient plus, minus;  // the slices of delta at heights 1 and -1

  static DeformationInput make(Cone delta, QVector r, std::vector<Polyhedron> parts,
                               std::vector<Integer> multiplicities = {});

  int rank() const { return sigma.ambient_dim(); }
  int length() const { return static_cast<int>(parts.size()) - 1; }
  bool mixed() const { return !multiplicities.empty(); }
  // exponent of x_1/x_0 in the equation of D_i
  Integer multiplicity(int i) const;
  // gcd of the multiplicities
  Integer common() const;
  // the coefficient of D_0 in the family divisor
  Polyhedron first() const;
};

struct Admissibility {
  bool admissible = true;
  std::string reason;
  std::optional<QVector> witness;  // a weight with two lattice-free faces
  std::vector<int> lattice_free;   // summands whose witness face has no lattice point
};

// throws SumMismatch when the parts do not add up
Admissibility check_admissible(const DeformationInput& din);

// k Delta_0 (x) D_0 + sum Delta_i (x) D_i + Delta^- (x) D_inf on P^1 x A^l, or on P^1 when l = 0
PolyhedralDivisor family_pdivisor(const DeformationInput& din);

// Y-tilde as a contraction-free T'-variety over Z together with the multiplicities of the pulled back divisors
struct PulledBack {
  std::map<QVector, Integer, QVectorLess> rays;
  std::map<VertexId, Integer> vertices;
};

struct FamilyBase {
  BasePtr z;
  FanPtr fan;
  std::string p0, q;
  std::vector<std::string> p;         // P_1, ..., P_l
  std::map<std::string, ZVector> rays;  // toric primes of Z
  std::map<std::string, PulledBack> pullbacks;  // keyed by the labels of family_pdivisor
};

FamilyBase family_base_fan(const DeformationInput& din);

// the family divisor pulled back to Y-tilde, ready for the upgrade
InvariantPDivisorOnFan family_invariant(const DeformationInput& din, const FamilyBase& fb);

struct DeformationRoutes {
  PolyhedralDivisor direct;
  PolyhedralDivisor upgraded;
  UpgradeResult upgrade;
};

DeformationRoutes deformation_routes(const DeformationInput& din);
// throws RoutesDisagree when the formulas and the upgrade differ
PolyhedralDivisor deformation_upgrade(const DeformationInput& din);

struct StructureMap {
  PolyhedralDivisor target;  // [1, inf) (x) H for A^l
  PullbackTriple triple;
  QDivisor principal;        // P_0 - pi^* H - Q
  bool is_principal = false;
  bool equivariant = false;  // every coefficient lies in the pulled back one
};

StructureMap structure_map(const DeformationInput& din);

}  // namespace polydiv
