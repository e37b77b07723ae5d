#include "doctest.h"
#include "examples.hpp"
#include "polydiv/deform.hpp"
#include "support.hpp"

using namespace polydiv;
using namespace polydiv::examples;
using polydiv::testing::Gen;

namespace {

Polyhedron interval(const Rational& a, const Rational& b) { return segment(a, b); }

// quadric cone with Delta_0 = {-1/2}, Delta_1 = [0, 1] in degree r = [0, 2]
DeformationInput a1(std::vector<Polyhedron> parts = {Polyhedron::point(qvec({Rational(-1, 2)})), interval(0, 1)}) {
  Cone delta = Cone::from_rays(2, {qvec({1, 1}), qvec({-1, 1})});
  return DeformationInput::make(delta, qvec({0, 2}), std::move(parts));
}

// delta = pos{(0,1), (1,-1)}: Delta^+ = [0, inf), Delta^- = [1, inf), sigma = [0, inf)
DeformationInput two_sided(long k, std::vector<Polyhedron> parts, std::vector<Integer> mult = {}) {
  Cone delta = Cone::from_rays(2, {qvec({0, 1}), qvec({1, -1})});
  return DeformationInput::make(delta, qvec({0, Rational(k)}), std::move(parts), std::move(mult));
}

// cone over a triangle with the opposite ray (-1,-1,-1): Delta^+ = {x <= 1, y <= 1, x + y <= 1}
DeformationInput triangle() {
  Cone delta = Cone::from_rays(3, {qvec({0, 0, 1}), qvec({1, 0, 1}), qvec({0, 1, 1}), qvec({-1, -1, -1})});
  Cone sigma = Cone::from_rays(2, {qvec({-1, 0}), qvec({0, -1})});
  Polyhedron d0 = Polyhedron::hull(2, {qvec({0, 1})}, sigma.rays());
  Polyhedron d1 = Polyhedron::hull(2, {qvec({0, 0}), qvec({1, -1})}, sigma.rays());
  return DeformationInput::make(delta, qvec({0, 0, 1}), {d0, d1});
}

Polyhedron at_height(const Polyhedron& p, const Rational& h) { return embed_at_height(p, qvec({h})); }

Polyhedron halfspace(const QVector& r, const Rational& h) {
  return Polyhedron::from_inequalities(static_cast<int>(r.size()), {{r, h}});
}

// Minkowski identities of the upgraded coefficients
void check_identities(const DeformationInput& din, const PolyhedralDivisor& up, const FamilyBase& fb) {
  Polyhedron sum = *up.coefficient(fb.p0);
  for (const auto& p : fb.p) sum = sum + *up.coefficient(p);
  CHECK(sum == intersect(din.delta.polyhedron(), halfspace(din.r, 1)));
  CHECK(*up.coefficient(fb.q) == intersect(din.delta.polyhedron(), halfspace(din.r, -1)));
  CHECK(up.tail() == Cone(intersect(din.delta.polyhedron(), halfspace(din.r, 0))));
}

size_t h0(const QDivisor& d) { return global_sections(BaseVariety::projective_line(), d).dimension(); }

QDivisor on_line(const std::vector<std::pair<std::string, Rational>>& terms) {
  QDivisor d;
  for (const auto& [p, c] : terms) d.set(p, ExtRational(c) + d[p]);
  return d;
}

}  // namespace

TEST_SUITE("deform") {
  TEST_CASE("the quadric cone deforms to A^3") {
    DeformationInput din = a1();
    CHECK(din.k == 2);
    CHECK(din.sigma == Cone::zero(1));
    CHECK(*din.plus == interval(-1, 1));
    CHECK(!din.minus);
    CHECK(check_admissible(din).admissible);

    PolyhedralDivisor e = family_pdivisor(din);
    CHECK(*e.coefficient("D0") == Polyhedron::point(qvec({-1})));
    CHECK(*e.coefficient("D1") == interval(0, 1));
    CHECK(!e.coefficient("Dinf"));

    Cone delta = din.delta;
    PolyhedralDivisor expected(make_base(BaseVariety::projective_line()), delta,
                               {{"0", at_height(Polyhedron::point(qvec({Rational(-1, 2)})), Rational(1, 2)) + delta.polyhedron()},
                                {"1", at_height(interval(0, 1), 0) + delta.polyhedron()}});
    PolyhedralDivisor up = deformation_upgrade(din);
    CHECK(up == expected);
    DeformationRoutes routes = deformation_routes(din);
    CHECK(routes.direct == routes.upgraded);
    CHECK(routes.upgrade.contraction_free);
    CHECK(routes.upgrade.hypotheses_hold());
    // the coefficient of Q is the tail: X is toric itself
    CHECK(!up.coefficients().count("inf"));
    check_identities(din, up, family_base_fan(din));
  }

  TEST_CASE("admissibility") {
    // two lattice-free faces
    Cone ray = Cone::from_rays(2, {qvec({1, 1})});
    Polyhedron half = Polyhedron::point(qvec({Rational(1, 2)}));
    DeformationInput bad = DeformationInput::make(ray, qvec({0, 1}), {half, half});
    Admissibility a = check_admissible(bad);
    CHECK(!a.admissible);
    REQUIRE(a.witness);
    CHECK(a.lattice_free == std::vector<int>{0, 1});
    for (size_t i = 0; i < bad.parts.size(); ++i) CHECK(lattice_points(face(bad.parts[i], *a.witness)).empty());
    CHECK_THROWS_AS(family_pdivisor(bad), Error);
    try {
      deformation_upgrade(bad);
      FAIL("expected NotAdmissible");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotAdmissible);
    }

    DeformationInput ok = DeformationInput::make(ray, qvec({0, 1}), {Polyhedron::point(qvec({0})), Polyhedron::point(qvec({1}))});
    CHECK(check_admissible(ok).admissible);

    // k > 1 needs lattice summands
    Admissibility lat = check_admissible(a1({Polyhedron::point(qvec({0})), interval(Rational(-1, 2), Rational(1, 2))}));
    CHECK(!lat.admissible);
    CHECK(lat.reason.find("lattice") != std::string::npos);

    try {
      check_admissible(a1({Polyhedron::point(qvec({Rational(-1, 2)})), interval(0, 2)}));
      FAIL("expected SumMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SumMismatch);
    }

    // l = 0: the fiberwise divisor of X itself
    DeformationInput trivial = a1({interval(Rational(-1, 2), Rational(1, 2))});
    CHECK(check_admissible(trivial).admissible);
    PolyhedralDivisor x = family_pdivisor(trivial);
    CHECK(*x.coefficient("0") == *trivial.plus);
    CHECK(!x.coefficient("inf"));
    CHECK_THROWS_AS(deformation_upgrade(trivial), Error);

    CHECK_THROWS_AS(DeformationInput::make(ray, qvec({1, 1}), {half}), Error);
    CHECK_THROWS_AS(DeformationInput::make(ray, qvec({0, -1}), {half}), Error);
  }

  TEST_CASE("base fan and pullbacks") {
    for (long k : {1L, 2L, 3L})
      for (int l : {1, 2}) {
        // k (Delta_0 + ... + Delta_l) = [0, inf)
        std::vector<Polyhedron> parts{half_line_from(-1), half_line_from(1)};
        for (int i = 2; i <= l; ++i) parts.push_back(half_line_from(0));
        DeformationInput din = two_sided(k, parts);
        REQUIRE(check_admissible(din).admissible);
        CHECK(*din.minus == half_line_from(1));

        FamilyBase fb = family_base_fan(din);
        CHECK(fb.fan->contraction_free());
        CHECK(fb.z->is_curve() == (l == 1));
        const Rational step = Rational(1) / k;
        PolyhedralComplex s0, sq, tail;
        s0.cells = {half_line_from(step)};
        sq.cells = {segment(-step, 0), half_line_from(0)};
        tail.cells = {half_line_from(0)};
        s0.normalize();
        sq.normalize();
        tail.normalize();
        CHECK(fb.fan->slice(fb.p0) == s0);
        CHECK(fb.fan->slice(fb.q) == sq);
        for (const auto& p : fb.p) CHECK(fb.fan->slice(p) == tail);
        CHECK(invariant_prime_divisors(*fb.fan).rays.size() == 1);

        const QVector e = qvec({1});
        PulledBack d0 = fb.pullbacks.at("D0"), dinf = fb.pullbacks.at("Dinf");
        CHECK(d0.rays.at(e) == 1);
        CHECK(d0.vertices.size() == 1);
        CHECK(d0.vertices.at(VertexId{fb.p0, qvec({step})}) == 1);
        CHECK(dinf.rays.empty());
        CHECK(dinf.vertices.size() == 1);
        CHECK(dinf.vertices.at(VertexId{fb.q, qvec({-step})}) == 1);
        for (int i = 1; i <= l; ++i) {
          PulledBack di = fb.pullbacks.at("D" + std::to_string(i));
          CHECK(di.vertices.size() == 1);
          CHECK(di.vertices.at(VertexId{fb.p[static_cast<size_t>(i) - 1], qvec({0})}) == 1);
          // V(t^k - y) vanishes to order k along the weighted blowup
          CHECK(di.rays.at(e) == k);
        }

        DeformationRoutes routes = deformation_routes(din);
        CHECK(routes.direct == routes.upgraded);
        CHECK(routes.upgrade.hypotheses_hold());
        CHECK(routes.upgrade.report.proper());
        check_identities(din, routes.direct, fb);
        Polyhedron q = *routes.direct.coefficient(fb.q);
        CHECK(q.contains(zeros(2)));
        CHECK(q.contains(qvec({step, -step})));
      }
  }

  TEST_CASE("structure map") {
    for (int l : {1, 2, 3}) {
      std::vector<Polyhedron> parts{half_line_from(-1), half_line_from(1)};
      for (int i = 2; i <= l; ++i) parts.push_back(half_line_from(0));
      DeformationInput din = two_sided(1, parts);
      StructureMap sm = structure_map(din);
      CHECK(sm.is_principal);
      CHECK(sm.equivariant);
      FamilyBase fb = family_base_fan(din);
      CHECK(sm.principal[fb.p0] == ExtRational(1));
      CHECK(sm.principal[fb.q] == ExtRational(-1));
      CHECK(sm.triple.lattice_map.matrix == to_z(QMatrix(din.r.transpose())));
      if (l > 1) CHECK(sm.principal["H" + std::to_string(l)] == ExtRational(-1));
    }
    CHECK_THROWS_AS(structure_map(two_sided(1, {half_line_from(-3), half_line_from(1), half_line_from(1)}, {1, 2})), Error);
  }

  TEST_CASE("a generic fiber has the graded dimensions of X") {
    DeformationInput din = triangle();
    REQUIRE(check_admissible(din).admissible);
    DeformationRoutes routes = deformation_routes(din);
    CHECK(routes.direct == routes.upgraded);
    check_identities(din, routes.direct, family_base_fan(din));
    // on P^1 only degrees matter, so the roots of t^k = c may be any distinct points
    for (long a = -4; a <= 0; ++a)
      for (long b = -4; b <= 0; ++b) {
        QVector u = qvec({a, b});
        QDivisor x = on_line({{"0", *din.plus->min_pairing(u)}, {"inf", *din.minus->min_pairing(u)}});
        std::vector<std::pair<std::string, Rational>> fiber{{"0", *din.first().min_pairing(u)},
                                                            {"inf", *din.minus->min_pairing(u)}};
        for (int i = 1; i <= din.length(); ++i)
          for (long j = 0; j < din.multiplicity(i); ++j)
            fiber.push_back({std::to_string(10 * i + j + 1), *din.parts[static_cast<size_t>(i)].min_pairing(u)});
        CHECK(h0(on_line(fiber)) == h0(x));
      }
  }

  TEST_CASE("mixed multiplicities") {
    // gcd one: the stated coefficients agree with the upgrade
    DeformationInput coprime = two_sided(1, {half_line_from(-3), half_line_from(1), half_line_from(1)}, {1, 2});
    REQUIRE(check_admissible(coprime).admissible);
    DeformationRoutes routes = deformation_routes(coprime);
    CHECK(routes.direct == routes.upgraded);
    CHECK(routes.upgrade.smooth_base == false);

    // gcd two: the upgrade puts Delta_0 / 2 over P_0, which is what the uniform case with k = 2 gives
    DeformationInput even = two_sided(1, {half_line_from(-4), half_line_from(1), half_line_from(1)}, {2, 2});
    REQUIRE(check_admissible(even).admissible);
    DeformationRoutes mixed = deformation_routes(even);
    CHECK(!(mixed.direct == mixed.upgraded));
    try {
      deformation_upgrade(even);
      FAIL("expected RoutesDisagree");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::RoutesDisagree);
    }
    FamilyBase fb = family_base_fan(even);
    Cone tilde = mixed.upgraded.tail();
    CHECK(*mixed.upgraded.coefficient(fb.p0) == at_height(half_line_from(-2), Rational(1, 2)) + tilde.polyhedron());
    PolyhedralDivisor uniform = deformation_upgrade(two_sided(2, {half_line_from(-2), half_line_from(1), half_line_from(1)}));
    CHECK(uniform == mixed.upgraded);
  }

  TEST_CASE("random decompositions") {
    Gen g(733);
    int tested = 0, rejected = 0, two_sided_inputs = 0;
    for (int trial = 0; trial < 400 && tested < 24; ++trial) {
      const long k = g.integer(1, 2);
      const int l = static_cast<int>(g.integer(1, 2));
      Cone delta;
      std::vector<Polyhedron> parts;
      if (g.coin()) {
        // delta over a sum of polytopes with a common tail, lattice summands when k > 1
        Cone sigma = g.coin() ? Cone::zero(2) : g.pointed_cone(2, 2);
        Polyhedron p0 = g.polytope(2, static_cast<int>(g.integer(1, 3)), -2, 2, k);
        parts.push_back(Polyhedron::hull(2, p0.vertices(), sigma.rays()));
        for (int i = 1; i <= l; ++i) {
          Polyhedron pi = g.polytope(2, static_cast<int>(g.integer(1, 3)), -2, 2, k == 1 ? 2 : 1);
          parts.push_back(Polyhedron::hull(2, pi.vertices(), sigma.rays()));
        }
        Polyhedron sum = parts[0];
        for (int i = 1; i <= l; ++i) sum = sum + parts[static_cast<size_t>(i)];
        std::vector<QVector> gens;
        for (const auto& v : sum.vertices()) gens.push_back(extend(v, Rational(1, k)));
        for (const auto& r : sigma.rays()) gens.push_back(extend(r, 0));
        delta = positive_hull(3, gens);
      } else {
        // an arbitrary delta reaching below height zero, split off lattice translates
        std::vector<QVector> gens{extend(g.int_vector(2, -2, 2), 1), extend(g.int_vector(2, -2, 2), -1)};
        for (long extra = g.integer(1, 2); extra > 0; --extra) gens.push_back(extend(g.int_vector(2, -2, 2), g.integer(-1, 2)));
        delta = positive_hull(3, gens);
        if (!delta.is_pointed() || delta.dim() < 3) continue;
        Coefficient plus = map_fiber_slice(delta.polyhedron(), QMatrix(qvec({0, 0, 1}).transpose()), qvec({1}),
                                           QMatrix(QMatrix::Identity(2, 3)));
        Cone sigma(map_fiber_slice(delta.polyhedron(), QMatrix(qvec({0, 0, 1}).transpose()), qvec({0}),
                                   QMatrix(QMatrix::Identity(2, 3))));
        QVector shift = zeros(2);
        std::vector<Polyhedron> rest;
        for (int i = 1; i <= l; ++i) {
          QVector t = g.int_vector(2, -1, 1);
          shift += t;
          rest.push_back(Polyhedron::hull(2, {t}, sigma.rays()));
        }
        parts.push_back(translate(scale(Rational(1, k), *plus), QVector(-shift)));
        parts.insert(parts.end(), rest.begin(), rest.end());
      }
      if (!delta.is_pointed()) continue;
      DeformationInput din;
      try {
        din = DeformationInput::make(delta, qvec({0, 0, Rational(k)}), parts);
        if (!check_admissible(din).admissible) {
          ++rejected;
          continue;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SumMismatch && e.code() != ErrorCode::InvalidInput) throw;
        continue;
      }
      ++tested;
      if (din.minus) ++two_sided_inputs;
      DeformationRoutes routes = deformation_routes(din);
      CHECK(routes.direct == routes.upgraded);
      CHECK(routes.upgrade.contraction_free);
      check_identities(din, routes.direct, family_base_fan(din));
    }
    CHECK(tested == 24);
    CHECK(rejected > 0);
    CHECK(two_sided_inputs > 0);
  }
}
