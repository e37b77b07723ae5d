#pragma once

#include "polydiv/base.hpp"
#include "polydiv/pdivisor.hpp"
#include "polydiv/polyhedra.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace polydiv {

bool has_affine_locus(const PolyhedralDivisor& d);

class DivisorialFan {
 public:
  DivisorialFan() = default;
  // invariant_rays overrides ray(S); required to use the invariant-divisor machinery on fans with contractions
  DivisorialFan(BasePtr base, std::vector<PolyhedralDivisor> members,
                std::optional<std::vector<QVector>> invariant_rays = std::nullopt);

  const BaseVariety& base() const { return *base_; }
  const BasePtr& base_ptr() const { return base_; }
  int rank() const { return rank_; }
  const std::vector<PolyhedralDivisor>& members() const { return members_; }
  const PolyhedralComplex& tailfan() const { return tailfan_; }
  // labels whose slice is not the tail fan, or which some member lists explicitly
  const std::vector<std::string>& marked() const { return marked_; }
  PolyhedralComplex slice(const std::string& label) const;
  bool contraction_free() const { return contraction_free_; }
  bool has_declared_rays() const { return declared_rays_.has_value(); }
  const std::optional<std::vector<QVector>>& declared_rays() const { return declared_rays_; }

 private:
  BasePtr base_;
  int rank_ = 0;
  std::vector<PolyhedralDivisor> members_;
  PolyhedralComplex tailfan_;
  std::vector<std::string> marked_;
  bool contraction_free_ = false;
  std::optional<std::vector<QVector>> declared_rays_;
};

using FanPtr = std::shared_ptr<const DivisorialFan>;
FanPtr make_fan(DivisorialFan s);

// curve bases: members with complete locus are split into one member per marked point
// (and one for infinity), each with an empty coefficient there; slices are unchanged
DivisorialFan make_contraction_free(const DivisorialFan& s);

// toric model of a fan over P^1 whose slices are nontrivial at two points at most;
// the slice at the first point sits at height 1, the one at the second point at height -1
std::optional<std::pair<std::string, std::string>> toric_model_points(const DivisorialFan& s);
std::optional<Fan> toric_model(const DivisorialFan& s);

struct InvariantPrimes {
  std::vector<QVector> rays;                                // primitive
  std::map<std::string, std::vector<QVector>> vertices;     // marked labels only; others carry the vertex 0
};

InvariantPrimes invariant_prime_divisors(const DivisorialFan& s);

struct VertexId {
  std::string label;
  QVector vertex;
};
bool operator<(const VertexId& a, const VertexId& b);
bool operator==(const VertexId& a, const VertexId& b);

// D = sum a_rho D_rho + sum mu(v) b_{P,v} D_{P,v}; missing keys are zero
struct TInvariantDivisor {
  FanPtr fan;
  std::map<QVector, Rational, QVectorLess> ray_coeffs;
  std::map<VertexId, Rational> vertex_coeffs;

  Rational a(const QVector& ray) const;
  Rational b(const std::string& label, const QVector& v) const;
};

TInvariantDivisor operator+(const TInvariantDivisor& x, const TInvariantDivisor& y);
TInvariantDivisor operator*(const Rational& s, const TInvariantDivisor& x);
bool operator==(const TInvariantDivisor& x, const TInvariantDivisor& y);
bool is_zero(const TInvariantDivisor& d);
std::string to_string(const TInvariantDivisor& d);

// Div(f chi^u)
TInvariantDivisor principal_invariant_divisor(const FanPtr& fan, const RationalFunction& f, const QVector& u);

// concave function, the minimum of its pieces, or identically inf
struct PLFunction {
  bool infinite = false;
  std::vector<AffinePiece> pieces;

  ExtRational operator()(const QVector& u) const;
};

struct PLDivisorMap {
  BasePtr base;
  Polyhedron box;
  std::map<std::string, PLFunction> psi;  // unlisted primes are 0

  QDivisor operator()(const QVector& u) const;
};

Polyhedron hypograph(const Polyhedron& box, const PLFunction& f);
std::vector<QVector> lineality_space(const PLDivisorMap& psi, const std::string& label);
// points u-bar of the box (mod lineality) where the graph of psi_P has a vertex
std::vector<QVector> psi_vertices(const PLDivisorMap& psi, const std::string& label);

Polyhedron box_of(const TInvariantDivisor& d);
PLDivisorMap box_and_psi(const TInvariantDivisor& d);
// the map of the trivial divisor as a polyhedral divisor: tail conv|tail(S)|, coefficients conv|S_P|
PolyhedralDivisor psi_zero(const DivisorialFan& s);

SectionBasis graded_sections(const TInvariantDivisor& d, const QVector& u, const SectionOptions& options = {});

struct CellFunction {
  Polyhedron cell;
  AffinePiece h;
};

struct SupportFunction {
  std::map<std::string, std::vector<CellFunction>> marked;
  std::vector<CellFunction> generic;  // on the tail fan, for every unmarked prime

  const std::vector<CellFunction>& at(const std::string& label) const;
};

SupportFunction support_functions(const TInvariantDivisor& d);
// on every cell, the affine piece of every other cell dominates h
bool is_concave(const std::vector<CellFunction>& h);

// s in L(D) with ord_P s = -D_P; P may be a label of the base or an unlisted point of P^1
std::optional<RationalFunction> section_with_exact_order(const BaseVariety& base, const QDivisor& d,
                                                         const std::string& label);

enum class Verdict { Yes, No, Inconclusive };
std::string to_string(Verdict v);

struct SearchOptions {
  long window = 1;    // lattice steps along tail directions beyond the vertices
  long k_bound = 12;  // multiples tried by sharpness
};

struct BpfWitness {
  size_t member = 0;
  std::string point;  // label, or the generic point
  QVector u;
  RationalFunction s;
};

struct BpfResult {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<BpfWitness> witnesses;
  std::vector<std::string> notes;
};

BpfResult is_basepoint_free(const TInvariantDivisor& d, const SearchOptions& options = {});

PLDivisorMap sum_psi(const PLDivisorMap& a, const PLDivisorMap& b);
bool equal_on(const PLDivisorMap& a, const PLDivisorMap& b, const std::vector<QVector>& samples);

enum class Sharpness { Sharp, AsymptoticallySharp, Inconclusive, Fails };
std::string to_string(Sharpness s);

struct SharpnessResult {
  Sharpness verdict = Sharpness::Inconclusive;
  std::vector<std::string> notes;
};

SharpnessResult sharpness(const PLDivisorMap& psi, const SearchOptions& options = {});

}  // namespace polydiv
