#include "doctest.h"
#include "polydiv/polyhedra.hpp"
#include "support.hpp"

#include <functional>

using namespace polydiv;
using polydiv::testing::Gen;

namespace {

Polyhedron segment(Rational a, Rational b) { return Polyhedron::hull(1, {qvec({a}), qvec({b})}); }

// Caratheodory: p in conv(pts) iff p lies in a simplex on at most n+1 of them
bool in_convex_hull(const QVector& p, const std::vector<QVector>& pts) {
  const int n = static_cast<int>(p.size());
  const int m = static_cast<int>(pts.size());
  std::vector<int> pick;
  std::function<bool(int)> rec = [&](int start) {
    if (!pick.empty()) {
      int k = static_cast<int>(pick.size());
      QMatrix a(n + 1, k);
      QVector b(n + 1);
      for (int j = 0; j < k; ++j) {
        a.block(0, j, n, 1) = pts[pick[j]];
        a(n, j) = 1;
      }
      b << p, 1;
      if (rank<Rational>(a) == k) {
        auto x = solve<Rational>(a, b);
        if (x) {
          bool ok = true;
          for (int j = 0; j < k; ++j) ok = ok && (*x)[j] >= 0;
          if (ok) return true;
        }
      }
    }
    if (static_cast<int>(pick.size()) == n + 1) return false;
    for (int i = start; i < m; ++i) {
      pick.push_back(i);
      if (rec(i + 1)) return true;
      pick.pop_back();
    }
    return false;
  };
  return rec(0);
}

}  // namespace

TEST_SUITE("polyhedra") {
  TEST_CASE("dual cones") {
    Cone orthant = Cone::from_rays(2, {qvec({1, 0}), qvec({0, 1})});
    CHECK(dual_cone(orthant) == orthant);
    Cone delta = Cone::from_rays(2, {qvec({1, 1}), qvec({-1, 1})});
    CHECK(dual_cone(delta) == delta);
    CHECK(dual_cone(Cone::whole_space(2)) == Cone::zero(2));
    CHECK(dual_cone(Cone::zero(2)) == Cone::whole_space(2));
  }

  TEST_CASE("dual cone is an involution on random cones") {
    Gen g(21);
    for (int t = 0; t < 100; ++t) {
      int n = static_cast<int>(g.integer(1, 4));
      std::vector<QVector> gens;
      int k = static_cast<int>(g.integer(0, 5));
      for (int i = 0; i < k; ++i) gens.push_back(g.int_vector(n, -3, 3));
      Cone c = Cone::from_rays(n, gens);
      Cone d = dual_cone(c);
      CHECK(dual_cone(d) == c);
      for (const auto& x : c.generators())
        for (const auto& y : d.generators()) CHECK(x.dot(y) >= 0);
    }
  }

  TEST_CASE("hull of simple vertex sets") {
    Polyhedron s = Polyhedron::hull(2, {qvec({0, 0}), qvec({0, 1})});
    CHECK(s.vertices().size() == 2);
    CHECK(s.dim() == 1);
    Polyhedron p = Polyhedron::hull(2, {qvec({Rational(1, 2), 3})});
    CHECK(p.vertices().size() == 1);
    CHECK(p.dim() == 0);
    CHECK(Polyhedron::hull(3, {}).is_empty());
  }

  TEST_CASE("hull vertices match a convex-combination oracle") {
    Gen g(4);
    for (int t = 0; t < 40; ++t) {
      std::vector<QVector> pts;
      for (int i = 0; i < 6; ++i) pts.push_back(g.rational_vector(3, -3, 3, 2));
      Polyhedron h = Polyhedron::hull(3, pts);
      for (size_t i = 0; i < pts.size(); ++i) {
        std::vector<QVector> others;
        for (size_t j = 0; j < pts.size(); ++j)
          if (j != i && !equal(pts[j], pts[i])) others.push_back(pts[j]);
        bool is_vertex = !in_convex_hull(pts[i], others);
        bool listed = false;
        for (const auto& v : h.vertices()) listed = listed || equal(v, pts[i]);
        CHECK(is_vertex == listed);
      }
    }
  }

  TEST_CASE("Minkowski sums") {
    CHECK(minkowski_sum(Polyhedron::point(qvec({Rational(-1, 2)})), segment(0, 1)) ==
          segment(Rational(-1, 2), Rational(1, 2)));
    Gen g(9);
    for (int t = 0; t < 30; ++t) {
      Polyhedron a = g.polytope(2, 3, -3, 3, 1), b = g.polytope(2, 3, -3, 3, 1);
      CHECK(a + Polyhedron::point(zeros(2)) == a);
      std::vector<QVector> sums;
      for (const auto& x : a.vertices())
        for (const auto& y : b.vertices()) sums.push_back(x + y);
      CHECK(a + b == Polyhedron::hull(2, sums));
      CHECK((a + Polyhedron::empty(2)).is_empty());
    }
  }

  TEST_CASE("Minkowski identities on random polyhedra") {
    Gen g(31);
    for (int t = 0; t < 40; ++t) {
      int n = static_cast<int>(g.integer(1, 3));
      Cone c = g.pointed_cone(n, 2);
      Polyhedron a = g.polytope(n, 3) + c.polyhedron();
      Polyhedron b = g.polytope(n, 2) + g.pointed_cone(n, 2).polyhedron();
      Polyhedron d = g.polytope(n, 2);
      CHECK(a + b == b + a);
      CHECK((a + b) + d == a + (b + d));
      CHECK(tail_cone(a + b).polyhedron() == tail_cone(a).polyhedron() + tail_cone(b).polyhedron());
    }
  }

  TEST_CASE("intersections") {
    Polyhedron delta = Cone::from_rays(2, {qvec({1, 1}), qvec({-1, 1})}).polyhedron();
    Polyhedron height0 = Polyhedron::from_inequalities(2, {}, {{qvec({0, 1}), 0}});
    CHECK(intersect(delta, height0) == Polyhedron::point(zeros(2)));
    CHECK(intersect(delta, delta) == delta);
    Gen g(17);
    for (int t = 0; t < 30; ++t) {
      auto box = [&](Rational a0, Rational a1, Rational b0, Rational b1) {
        return Polyhedron::hull(2, {qvec({a0, b0}), qvec({a1, b0}), qvec({a0, b1}), qvec({a1, b1})});
      };
      Rational x0 = g.rational(-3, 0), x1 = g.rational(0, 3), y0 = g.rational(-3, 0), y1 = g.rational(0, 3);
      Rational u0 = g.rational(-3, 0), u1 = g.rational(0, 3), w0 = g.rational(-3, 0), w1 = g.rational(0, 3);
      Polyhedron i = intersect(box(x0, x1, y0, y1), box(u0, u1, w0, w1));
      CHECK(i == box(std::max(x0, u0), std::min(x1, u1), std::max(y0, w0), std::min(y1, w1)));
    }
  }

  TEST_CASE("images, fibers and sections") {
    QMatrix kill_first(1, 2);
    kill_first << 0, 1;
    CHECK(map_image(Polyhedron::hull(2, {qvec({0, 0}), qvec({1, 1})}), kill_first) == segment(0, 1));
    QMatrix first(1, 2);
    first << 1, 0;
    Polyhedron p = Polyhedron::hull(2, {qvec({0, 0}), qvec({0, 1})});
    CHECK(map_fiber_slice(p, kill_first, qvec({0}), first) == Polyhedron::point(qvec({0})));
    CHECK(map_fiber_slice(p, first, qvec({5}), kill_first).is_empty());
    Polyhedron delta = Cone::from_rays(2, {qvec({1, 1}), qvec({-1, 1})}).polyhedron();
    CHECK(cross_section(delta, qvec({0, 2}), 1) ==
          Polyhedron::hull(2, {qvec({Rational(-1, 2), Rational(1, 2)}), qvec({Rational(1, 2), Rational(1, 2)})}));
    CHECK(map_image(delta, QMatrix(QMatrix::Identity(2, 2))) == delta);
  }

  TEST_CASE("image of the A4 cone shows the extra ray") {
    std::vector<QVector> rays{qvec({0, 0, 1, 0}), qvec({0, 1, 1, 0}), qvec({0, 0, 0, 1}), qvec({1, 1, 0, 1})};
    Polyhedron c = Cone::from_rays(4, rays).polyhedron();
    QMatrix pi(3, 4);
    pi << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
    PolyhedralComplex fan = chamber_complex(c, pi);
    CHECK(fan.cells.size() == 4);
    auto rs = fan.rays();
    bool has_v0 = false;
    for (const auto& r : rs) has_v0 = has_v0 || equal(r, qvec({1, 1, 1}));
    CHECK(has_v0);
    CHECK(rs.size() == 5);
    CHECK(is_polyhedral_complex(fan.cells));
  }

  TEST_CASE("refinements and linearity regions") {
    PolyhedralComplex a{{Cone::from_rays(1, {qvec({1})}).polyhedron()}};
    PolyhedralComplex b{{segment(Rational(-1, 2), 0), Cone::from_rays(1, {qvec({1})}).polyhedron()}};
    PolyhedralComplex r = common_refinement({a, b});
    PolyhedralComplex expect = b;
    expect.normalize();
    CHECK(r == expect);
    CHECK(common_refinement({b, b}) == expect);

    std::vector<AffinePiece> kink{{qvec({1}), 0}, {qvec({-1}), 1}};
    PolyhedralComplex lr = linearity_regions(kink, segment(0, 1));
    PolyhedralComplex want{{segment(0, Rational(1, 2)), segment(Rational(1, 2), 1)}};
    want.normalize();
    CHECK(lr == want);
    CHECK(linearity_regions({{qvec({2}), 3}}, segment(0, 1)).cells.size() == 1);
  }

  TEST_CASE("linearity regions match grid argmin") {
    Gen g(44);
    for (int t = 0; t < 20; ++t) {
      std::vector<AffinePiece> pieces;
      for (int i = 0; i < 3; ++i) pieces.push_back({g.int_vector(2, -2, 2), g.rational(-2, 2)});
      Polyhedron dom = Polyhedron::hull(2, {qvec({-2, -2}), qvec({2, -2}), qvec({-2, 2}), qvec({2, 2})});
      PolyhedralComplex lr = linearity_regions(pieces, dom);
      for (long x = -8; x <= 8; ++x)
        for (long y = -8; y <= 8; ++y) {
          QVector p = qvec({Rational(x, 4), Rational(y, 4)});
          Rational best = pieces[0](p);
          for (const auto& q : pieces) best = std::min(best, q(p));
          bool found = false;
          for (const auto& c : lr.cells)
            if (c.contains(p)) {
              found = true;
              // some piece attaining the min is affine on the cell containing p
              bool ok = false;
              for (const auto& q : pieces)
                if (q(p) == best) {
                  bool exact = true;
                  for (const auto& v : c.vertices()) {
                    Rational m = pieces[0](v);
                    for (const auto& w : pieces) m = std::min(m, w(v));
                    exact = exact && q(v) == m;
                  }
                  ok = ok || exact;
                }
              CHECK(ok);
            }
          CHECK(found);
        }
    }
  }

  TEST_CASE("canonical forms and face incidences") {
    Gen g(12);
    for (int t = 0; t < 40; ++t) {
      int n = static_cast<int>(g.integer(1, 3));
      Polyhedron p = g.polytope(n, 4) + g.pointed_cone(n, 2).polyhedron();
      Polyhedron q = Polyhedron::hull(n, p.vertices(), p.rays(), p.lineality());
      CHECK(p == q);
      Polyhedron h = Polyhedron::from_inequalities(n, p.inequalities(), p.equations());
      CHECK(h == p);
      for (const auto& v : p.vertices()) {
        int tight = static_cast<int>(p.equations().size());
        for (const auto& f : p.inequalities())
          if (f.normal.dot(v) == f.offset) ++tight;
        CHECK(tight >= n);
      }
      for (const auto& f : all_faces(p)) CHECK(is_face_of(f, p));
    }
  }

  TEST_CASE("lattice points of a triangle") {
    Polyhedron t = Polyhedron::hull(2, {qvec({0, 0}), qvec({2, 0}), qvec({0, 2})});
    CHECK(lattice_points(t).size() == 6);
    CHECK(lattice_points(segment(Rational(1, 3), Rational(2, 3))).empty());
  }
}
