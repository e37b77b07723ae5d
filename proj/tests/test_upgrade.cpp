#include "doctest.h"
#include "examples.hpp"
#include "generators.hpp"
#include "polydiv/upgrade.hpp"
#include "support.hpp"

using namespace polydiv;
using namespace polydiv::examples;
using polydiv::testing::Gen;

namespace {

InvariantPDivisorOnFan plane_divisor(const DivisorialFan& s) {
  InvariantPDivisorOnFan d;
  d.fan = make_fan(s);
  d.tail = Cone::from_rays(1, {qvec({1})});
  d.ray_coeffs[qvec({1})] = half_line_from(Rational(1, 2));
  return d;
}

// random coefficients with a common tail on the invariant primes of a random curve fan
InvariantPDivisorOnFan random_on_fan(Gen& g, const RandomCurveFan& f, int n) {
  InvariantPDivisorOnFan d;
  d.fan = f.fan;
  d.tail = g.pointed_cone(n, static_cast<int>(g.integer(1, n)));
  auto coefficient = [&] {
    return minkowski_sum(g.polytope(n, static_cast<int>(g.integer(1, 3)), -2, 2, 2), d.tail.polyhedron());
  };
  for (const auto& r : invariant_prime_divisors(*f.fan).rays)
    if (g.coin()) d.ray_coeffs[r] = coefficient();
  for (const auto& [p, cs] : f.cuts)
    for (const auto& c : cs)
      if (g.coin()) d.vertex_coeffs[VertexId{p, qvec({c})}] = coefficient();
  return d;
}

std::vector<QVector> integer_cube(int dim, long r) {
  std::vector<QVector> out;
  QVector lo = QVector::Constant(dim, Rational(-r)), hi = QVector::Constant(dim, Rational(r));
  std::vector<QVector> corners;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    QVector c(dim);
    for (int i = 0; i < dim; ++i) c[i] = (mask & (1 << i)) ? hi[i] : lo[i];
    corners.push_back(c);
  }
  for (const auto& z : lattice_points(Polyhedron::hull(dim, corners))) out.push_back(to_q(z));
  return out;
}

QVector head(const QVector& v, int n) { return QVector(v.head(n)); }
QVector tail_part(const QVector& v, int n) { return QVector(v.tail(v.size() - n)); }

}  // namespace

TEST_SUITE("upgrade") {
  TEST_CASE("plane with a contracted curve") {
    InvariantPDivisorOnFan d = plane_divisor(projective_plane_with_contraction());
    Cone tilde = upgrade_tailcone(d);
    CHECK(tilde == Cone::from_rays(2, {qvec({1, 0}), qvec({1, 2})}));
    UpgradeResult up = upgrade(d);
    CHECK(up.divisor.tail() == tilde);
    CHECK(up.divisor.coefficients().size() == 1);
    CHECK(*up.divisor.coefficient("inf") == translate(tilde.polyhedron(), qvec({0, -1})));
    CHECK_FALSE(up.report.proper());
    CHECK_FALSE(up.contraction_free);
    CHECK_FALSE(up.hypotheses_hold());

    InvariantPDivisorOnFan cf = plane_divisor(projective_plane_contraction_free());
    UpgradeResult upcf = upgrade(cf);
    Cone wide = Cone::from_rays(2, {qvec({1, 2}), qvec({0, -1})});
    CHECK(upcf.divisor.tail() == wide);
    CHECK(*upcf.divisor.coefficient("inf") == translate(wide.polyhedron(), qvec({0, -1})));
    CHECK(upcf.report.proper());
    CHECK(upcf.hypotheses_hold());

    CorrectionResult fixed = correct_pic_z(up.divisor);
    CHECK(fixed.sigma_hat == wide);
    CHECK(fixed.divisor == upcf.divisor);
    CHECK(fixed.report.proper());
  }

  TEST_CASE("a fan without rays leaves the tail in the first factor") {
    BasePtr p1 = make_base(BaseVariety::projective_line());
    PolyhedralDivisor m(p1, Cone::zero(1), {{"0", segment(0, 1)}, {"inf", std::nullopt}});
    InvariantPDivisorOnFan d;
    d.fan = make_fan(DivisorialFan(p1, {m}));
    d.tail = Cone::from_rays(1, {qvec({1})});
    CHECK(invariant_prime_divisors(*d.fan).rays.empty());
    CHECK(upgrade_tailcone(d) == Cone::from_rays(2, {qvec({1, 0})}));
    PolyhedralDivisor up = upgrade_coefficients(d);
    CHECK_FALSE(up.coefficient("inf").has_value());
    CHECK(*up.coefficient("0") == Polyhedron::hull(2, {qvec({0, 0}), qvec({0, 1})}, {qvec({1, 0})}));
  }

  TEST_CASE("default vertex coefficients give the tail") {
    InvariantPDivisorOnFan d = plane_divisor(projective_plane_contraction_free());
    d.ray_coeffs.clear();
    Cone tilde = upgrade_tailcone(d);
    PolyhedralDivisor up = upgrade_coefficients(d);
    CHECK(*up.coefficient("0") == tilde.polyhedron());
    CHECK(up.coefficients().count("0") == 0);
  }

  TEST_CASE("invalid keys are rejected") {
    InvariantPDivisorOnFan d = plane_divisor(projective_plane_with_contraction());
    d.ray_coeffs[qvec({-1})] = half_line_from(0);
    CHECK_THROWS_AS(validate(d), Error);
    InvariantPDivisorOnFan e = plane_divisor(projective_plane_with_contraction());
    e.vertex_coeffs[VertexId{"inf", qvec({5})}] = half_line_from(0);
    CHECK_THROWS_AS(validate(e), Error);
    InvariantPDivisorOnFan f = plane_divisor(projective_plane_with_contraction());
    f.ray_coeffs[qvec({1})] = segment(0, 1);
    CHECK_THROWS_AS(validate(f), Error);
  }

  TEST_CASE("weight cone duality and coefficient formula on random data") {
    Gen g(301);
    for (int trial = 0; trial < 40; ++trial) {
      RandomCurveFan f = random_curve_fan(g);
      const int n = static_cast<int>(g.integer(1, 2));
      InvariantPDivisorOnFan d = random_on_fan(g, f, n);
      validate(d);
      PolyhedralDivisor up = upgrade_coefficients(d);
      Cone weights = dual_cone(up.tail());
      Cone omega = dual_cone(d.tail);
      for (const auto& w : integer_cube(n + 1, 3)) {
        QVector u = head(w, n), u1 = tail_part(w, n);
        bool inside = omega.contains(u) && box_of(evaluate(d, u)).contains(u1);
        CHECK(weights.contains(w) == inside);
        if (!inside) continue;
        QDivisor lhs = evaluate(up, w);
        PLDivisorMap psi = box_and_psi(evaluate(d, u));
        CHECK(lhs == psi(u1));
        CHECK(global_sections(up.base(), lhs).dimension() == graded_sections(evaluate(d, u), u1).dimension());
      }
    }
  }

  TEST_CASE("correction keeps graded dimensions") {
    Gen g(302);
    int negative = 0;
    for (int trial = 0; trial < 30; ++trial) {
      RandomCurveFan f = random_curve_fan(g);
      InvariantPDivisorOnFan d = random_on_fan(g, f, 1);
      PolyhedralDivisor up = upgrade_coefficients(d);
      CorrectionResult fixed = correct_pic_z(up);
      CHECK(fixed.sigma_hat.contains(up.tail()));
      bool nonempty = true;
      for (const auto& [k, c] : up.coefficients()) nonempty = nonempty && c.has_value();
      if (nonempty) {
        Polyhedron deg = degree_polyhedron(up);
        for (const auto& v : deg.vertices()) CHECK(fixed.sigma_hat.contains(v));
      }
      Cone before = dual_cone(up.tail()), after = dual_cone(fixed.divisor.tail());
      for (const auto& w : integer_cube(2, 3)) {
        if (!before.contains(w)) {
          CHECK_FALSE(after.contains(w));
          continue;
        }
        auto dim = global_sections(up.base(), evaluate(up, w)).dimension();
        if (after.contains(w)) {
          CHECK(global_sections(up.base(), evaluate(fixed.divisor, w)).dimension() == dim);
        } else {
          ++negative;
          CHECK(dim == 0);
        }
      }
    }
    CHECK(negative > 0);
  }

  TEST_CASE("an already semiample divisor is left alone") {
    InvariantPDivisorOnFan cf = plane_divisor(projective_plane_contraction_free());
    PolyhedralDivisor up = upgrade_coefficients(cf);
    CorrectionResult fixed = correct_pic_z(up);
    CHECK(fixed.divisor == up);
  }

  TEST_CASE("stellar resolution of toric fans") {
    Fan f;
    f.rank = 2;
    f.rays = {zv({1, 0}), zv({1, 2})};
    f.cones = {{0, 1}};
    Fan r = resolve_fan(f);
    CHECK(r.is_smooth());
    CHECK(r.rays.size() == 3);
    CHECK(r.rays[2] == zv({1, 1}));

    Fan p112;
    p112.rank = 2;
    p112.rays = {zv({1, 0}), zv({0, 1}), zv({-1, -2})};
    p112.cones = {{0, 1}, {1, 2}, {0, 2}};
    Fan s = resolve_fan(p112);
    CHECK(s.is_smooth());
    CHECK(s.is_complete());
    CHECK(s.rays.size() == 4);

    Fan square;
    square.rank = 3;
    square.rays = {zv({1, 0, 1}), zv({0, 1, 1}), zv({-1, 0, 1}), zv({0, -1, 1})};
    square.cones = {{0, 1, 2, 3}};
    Fan q = resolve_fan(square);
    CHECK(q.is_smooth());
    Gen g(303);
    for (int i = 0; i < 50; ++i) {
      QVector x = g.int_vector(3, -4, 4);
      CHECK(q.carrier(x).has_value() == square.carrier(x).has_value());
    }
  }

  TEST_CASE("pulling a fan back to the resolved base") {
    Fan f;
    f.rank = 2;
    f.rays = {zv({1, 0}), zv({1, 2})};
    f.cones = {{0, 1}};
    BasePtr y = make_base(BaseVariety::toric(f, {"A", "B"}));
    PolyhedralDivisor m(y, Cone::from_rays(1, {qvec({1})}), {{"A", half_line_from(1)}, {"B", half_line_from(0)}});
    DivisorialFan s(y, {m});
    DivisorialFan r = resolve_base(s);
    CHECK(r.base().fan().is_smooth());
    CHECK(r.base().has_label("D(1,1)"));
    // (1,1) = 1/2 (1,0) + 1/2 (1,2)
    CHECK(*r.members().front().coefficient("D(1,1)") == half_line_from(Rational(1, 2)));
    CHECK(*r.members().front().coefficient("A") == half_line_from(1));
  }
}
