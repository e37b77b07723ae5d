#pragma once

#include "polydiv/core.hpp"
#include "polydiv/lattice.hpp"

#include <compare>
#include <optional>
#include <vector>

namespace polydiv {

// <normal, x> >= offset, or = offset when used as an equation
struct Halfspace {
  QVector normal;
  Rational offset;
};

// generators and lineality of {x : <a,x> >= 0 for a in ineqs, <e,x> = 0 for e in eqs}
struct ConeGenerators {
  std::vector<QVector> rays;
  std::vector<QVector> lineality;
};
ConeGenerators double_description(int dim, const std::vector<QVector>& ineqs,
                                  const std::vector<QVector>& eqs = {});

class Polyhedron {
 public:
  Polyhedron() = default;

  static Polyhedron empty(int dim);
  static Polyhedron whole_space(int dim);
  static Polyhedron point(const QVector& p);
  static Polyhedron hull(int dim, const std::vector<QVector>& vertices, const std::vector<QVector>& rays = {},
                         const std::vector<QVector>& lineality = {});
  static Polyhedron from_inequalities(int dim, const std::vector<Halfspace>& ineqs,
                                      const std::vector<Halfspace>& eqs = {});

  int ambient_dim() const { return ambient_; }
  bool is_empty() const { return empty_; }
  int dim() const;
  bool is_bounded() const { return rays_.empty() && lineality_.empty(); }
  bool is_pointed() const { return lineality_.empty(); }
  bool is_cone() const;

  const std::vector<QVector>& vertices() const { return vertices_; }
  const std::vector<QVector>& rays() const { return rays_; }
  const std::vector<QVector>& lineality() const { return lineality_; }
  const std::vector<Halfspace>& inequalities() const { return facets_; }
  const std::vector<Halfspace>& equations() const { return equations_; }

  bool contains(const QVector& x) const;
  bool contains(const Polyhedron& other) const;
  bool contains_in_relative_interior(const QVector& x) const;
  QVector relative_interior_point() const;
  // min over the polyhedron of <u, .>; nullopt when unbounded below
  std::optional<Rational> min_pairing(const QVector& u) const;

 private:
  static Polyhedron from_cone(int dim, const ConeGenerators& g);
  void canonicalize_generators();

  int ambient_ = 0;
  bool empty_ = true;
  std::vector<QVector> vertices_, rays_, lineality_;
  std::vector<Halfspace> facets_, equations_;
};

std::strong_ordering compare(const Polyhedron& a, const Polyhedron& b);
inline bool operator==(const Polyhedron& a, const Polyhedron& b) { return compare(a, b) == 0; }
struct PolyhedronLess {
  bool operator()(const Polyhedron& a, const Polyhedron& b) const { return compare(a, b) < 0; }
};
std::string to_string(const Polyhedron& p);

class Cone {
 public:
  Cone() : Cone(zero(0)) {}
  explicit Cone(const Polyhedron& p);

  static Cone zero(int dim);
  static Cone whole_space(int dim);
  static Cone from_rays(int dim, const std::vector<QVector>& rays, const std::vector<QVector>& lineality = {});
  static Cone from_halfspaces(int dim, const std::vector<QVector>& normals, const std::vector<QVector>& eqs = {});

  int ambient_dim() const { return p_.ambient_dim(); }
  int dim() const { return p_.dim(); }
  bool is_pointed() const { return p_.is_pointed(); }
  const std::vector<QVector>& rays() const { return p_.rays(); }
  const std::vector<QVector>& lineality() const { return p_.lineality(); }
  std::vector<QVector> facet_normals() const;
  std::vector<QVector> equation_normals() const;
  // rays together with +-lineality generators
  std::vector<QVector> generators() const;
  bool contains(const QVector& x) const { return p_.contains(x); }
  bool contains(const Cone& c) const { return p_.contains(c.p_); }
  const Polyhedron& polyhedron() const { return p_; }

 private:
  Polyhedron p_;
};

inline bool operator==(const Cone& a, const Cone& b) { return a.polyhedron() == b.polyhedron(); }

Cone dual_cone(const Cone& c);
Cone tail_cone(const Polyhedron& p);  // requires nonempty
Cone positive_hull(int dim, const std::vector<QVector>& gens);

Polyhedron minkowski_sum(const Polyhedron& a, const Polyhedron& b);
Polyhedron operator+(const Polyhedron& a, const Polyhedron& b);
Polyhedron intersect(const Polyhedron& a, const Polyhedron& b);
// lambda > 0 scales, lambda = 0 gives the tail cone
Polyhedron scale(const Rational& lambda, const Polyhedron& p);
Polyhedron translate(const Polyhedron& p, const QVector& v);
// image under x -> a x + b
Polyhedron map_image(const Polyhedron& p, const QMatrix& a, const std::optional<QVector>& b = std::nullopt);
Polyhedron map_image(const Polyhedron& p, const LatticeMap& f);
// {x : a x + b in p}
Polyhedron preimage(const Polyhedron& p, const QMatrix& a, const std::optional<QVector>& b = std::nullopt);
Polyhedron map_fiber_slice(const Polyhedron& p, const QMatrix& f, const QVector& target, const QMatrix& retraction);
Polyhedron cross_section(const Polyhedron& p, const QVector& r, const Rational& h);
// product p x q in the direct sum
Polyhedron product(const Polyhedron& p, const Polyhedron& q);
Polyhedron embed_at_height(const Polyhedron& p, const QVector& height);  // p x {height}

// face where <u, .> is minimal; throws WeightOutsideCone when unbounded
Polyhedron face(const Polyhedron& p, const QVector& u);
// every nonempty face, including p
std::vector<Polyhedron> all_faces(const Polyhedron& p);
// integer points of a bounded polyhedron
std::vector<ZVector> lattice_points(const Polyhedron& p);
bool is_lattice_polyhedron(const Polyhedron& p);

struct PolyhedralComplex {
  std::vector<Polyhedron> cells;  // maximal cells, canonical order
  void normalize();               // sort, dedupe, drop cells inside other cells
  std::vector<QVector> vertices() const;
  std::vector<QVector> rays() const;  // primitive, of all tail cones
};
bool operator==(const PolyhedralComplex& a, const PolyhedralComplex& b);

struct AffinePiece {
  QVector slope;
  Rational constant;
  Rational operator()(const QVector& x) const { return slope.dot(x) + constant; }
};

PolyhedralComplex common_refinement(const std::vector<PolyhedralComplex>& complexes);
// regions of the domain on which a single piece attains the minimum
PolyhedralComplex linearity_regions(const std::vector<AffinePiece>& pieces, const Polyhedron& domain);
// coarsest subdivision of a(p) refining the images of all faces of p
PolyhedralComplex chamber_complex(const Polyhedron& p, const QMatrix& a);
// check that pairwise intersections are common faces
bool is_polyhedral_complex(const std::vector<Polyhedron>& cells);
bool is_face_of(const Polyhedron& f, const Polyhedron& p);

}  // namespace polydiv
