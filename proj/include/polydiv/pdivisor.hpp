#pragma once

#include "polydiv/base.hpp"
#include "polydiv/lattice.hpp"
#include "polydiv/polyhedra.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polydiv {

// nullopt stands for the empty coefficient
using Coefficient = std::optional<Polyhedron>;

class PolyhedralDivisor {
 public:
  PolyhedralDivisor() = default;
  PolyhedralDivisor(BasePtr base, Cone tail, std::map<std::string, Coefficient> coefficients);

  const BaseVariety& base() const { return *base_; }
  const BasePtr& base_ptr() const { return base_; }
  int rank() const { return tail_.ambient_dim(); }
  const Cone& tail() const { return tail_; }
  const Cone& weight_cone() const { return omega_; }
  // entries that differ from the tail cone
  const std::map<std::string, Coefficient>& coefficients() const { return coeffs_; }
  Coefficient coefficient(const std::string& label) const;
  // labels with empty coefficient
  std::vector<std::string> off_locus() const;

 private:
  BasePtr base_;
  Cone tail_, omega_;
  std::map<std::string, Coefficient> coeffs_;
};

bool operator==(const PolyhedralDivisor& a, const PolyhedralDivisor& b);
std::string to_string(const PolyhedralDivisor& d);

QDivisor evaluate(const PolyhedralDivisor& d, const QVector& u);

using Evaluation = std::function<QDivisor(const QVector&)>;
// D(u) + D(u') <= D(u + u') for all pairs of the given weights
bool convexity_check(const Evaluation& eval, const std::vector<QVector>& weights);
bool convexity_check(const PolyhedralDivisor& d, uint64_t seed = 1);

// maximal cones of the common refinement of the normal fans of the coefficients, inside the weight cone
PolyhedralComplex weight_chambers(const PolyhedralDivisor& d);

struct ProperReport {
  bool qcartier = false;
  bool semiample = false;
  bool big = false;
  bool loc_semiprojective = false;
  bool fulldim_weightcone = false;
  std::vector<std::string> failures;
  bool proper() const { return qcartier && semiample && big && loc_semiprojective && fulldim_weightcone; }
};

ProperReport is_proper(const PolyhedralDivisor& d);

Polyhedron degree_polyhedron(const PolyhedralDivisor& d);

// sum of v_i (x) f_i
struct PrincipalPDivisor {
  int rank = 0;
  std::vector<std::pair<QVector, RationalFunction>> terms;
};

QDivisor evaluate(const BaseVariety& base, const PrincipalPDivisor& f, const QVector& u);
// label -> sum_i ord_P(f_i) v_i, for the labels where it is nonzero
std::map<std::string, QVector> shifts(const BaseVariety& base, const PrincipalPDivisor& f);
// the polyhedral divisor sum_P ({shift_P} + tail) (x) P
PolyhedralDivisor as_polyhedral(BasePtr base, const PrincipalPDivisor& f, const Cone& tail);

// psi^* P = sum m_Q Q for target primes P
struct BaseMap {
  BasePtr source, target;
  std::map<std::string, std::vector<std::pair<std::string, Rational>>> pullbacks;

  static BaseMap identity(BasePtr base);
  // toric morphism given by a lattice map of the base lattices; target fan must be simplicial.
  // declared primes with equal labels on both sides are matched with multiplicity one.
  static BaseMap toric(BasePtr source, BasePtr target, const LatticeMap& f);
};

struct PullbackTriple {
  BaseMap base_map;
  LatticeMap lattice_map;  // F: N' -> N
  PrincipalPDivisor shift; // in N, with functions on the source base
};

PolyhedralDivisor pullback(const PolyhedralDivisor& d, const PullbackTriple& phi);

struct ToricDowngrade {
  BasePtr base;
  PolyhedralDivisor divisor;
  QMatrix projection;  // N~ -> N_Y
  QMatrix retraction;  // N~ -> N-bar
};

std::string ray_label(const ZVector& r);
ToricDowngrade toric_downgrade(const Cone& delta, const LatticeMap& sub);

}  // namespace polydiv
