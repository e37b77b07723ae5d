#include "examples.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "polydiv/cox.hpp"
#include "polydiv/deform.hpp"
#include "polydiv/downgrade.hpp"
#include "polydiv/upgrade.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>

using namespace polydiv;
using namespace polydiv::examples;
using polydiv::testing::Gen;

namespace {

// counts checks and keeps the first few failures
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ << (failures_ > 1 ? "; " : "") << what;
  }
  void note(const std::string& s) { summary_ += (summary_.empty() ? "" : ", ") + s; }
  bool ok() const { return failures_ == 0; }
  std::string detail() const {
    std::ostringstream out;
    if (!summary_.empty()) out << summary_ << ", ";
    out << checks_ << " checks";
    if (failures_) out << ", " << failures_ << " failed: " << notes_.str();
    return out.str();
  }

 private:
  long checks_ = 0, failures_ = 0;
  std::ostringstream notes_;
  std::string summary_;
};

size_t sections_at(const PolyhedralDivisor& d, const QVector& w) {
  if (!d.weight_cone().contains(w)) return 0;
  return global_sections(d.base(), evaluate(d, w)).dimension();
}

std::string flags(const ProperReport& r) {
  std::ostringstream out;
  out << "qcartier=" << r.qcartier << " semiample=" << r.semiample << " big=" << r.big;
  for (const auto& f : r.failures) out << "; " << f;
  return out.str();
}

void upgrade_golden(Tally& t) {
  InvariantPDivisorOnFan d;
  d.fan = make_fan(projective_plane_with_contraction());
  d.tail = Cone::from_rays(1, {qvec({1})});
  d.ray_coeffs[qvec({1})] = half_line_from(Rational(1, 2));
  Cone tilde = Cone::from_rays(2, {qvec({1, 0}), qvec({1, 2})});
  t.expect(upgrade_tailcone(d) == tilde, "tail cone is not pos{(1,0),(1,2)}");
  UpgradeResult up = upgrade(d);
  t.expect(up.divisor.tail() == tilde, "upgraded tail");
  t.expect(up.divisor.coefficients().size() == 1 && up.divisor.coefficient("inf") &&
               *up.divisor.coefficient("inf") == translate(tilde.polyhedron(), qvec({0, -1})),
           "coefficient at inf is not (0,-1) + tail");
  t.expect(!up.report.proper(), "non-contraction-free output reported proper");

  InvariantPDivisorOnFan cf = d;
  cf.fan = make_fan(projective_plane_contraction_free());
  UpgradeResult upcf = upgrade(cf);
  t.expect(upcf.report.proper(), "contraction-free output not proper");
  CorrectionResult fixed = correct_pic_z(up.divisor);
  t.expect(fixed.divisor == upcf.divisor, "correction differs from the contraction-free upgrade");
}

void toric_downgrade_golden(Tally& t) {
  std::vector<QVector> rays{qvec({0, 0, 1, 0}), qvec({0, 1, 1, 0}), qvec({0, 0, 0, 1}), qvec({1, 1, 0, 1})};
  ZMatrix m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = to_z(rays[static_cast<size_t>(i)])[j];
  t.expect(is_unimodular(m), "ray matrix is not unimodular");
  Cone delta = Cone::from_rays(4, rays);
  t.expect(delta.rays().size() == 4, "the cone is not simplicial");

  ZMatrix sub = ZMatrix::Zero(4, 1);
  sub(0, 0) = 1;
  ToricDowngrade td = toric_downgrade(delta, LatticeMap(sub));
  const Fan& fan = td.base->fan();
  t.expect(fan.rays.size() == 5, "image fan has " + std::to_string(fan.rays.size()) + " rays");
  auto idx = [&](std::initializer_list<long> r) { return fan.ray_index(zv(r)).value_or(-1); };
  int v0 = idx({1, 1, 1}), v1 = idx({0, 1, 0}), v2 = idx({1, 1, 0}), v3 = idx({0, 0, 1}), v4 = idx({1, 0, 1});
  std::set<std::set<int>> cones, expect{{v0, v1, v2}, {v0, v1, v3}, {v0, v3, v4}, {v0, v2, v4}};
  for (const auto& c : fan.cones) cones.insert(std::set<int>(c.begin(), c.end()));
  t.expect(cones == expect, "maximal cones differ");

  const PolyhedralDivisor& d = td.divisor;
  auto coefficient = [&](std::initializer_list<long> r) { return d.coefficient(ray_label(zv(r))); };
  t.expect(d.tail() == Cone::zero(1), "tail is not zero");
  t.expect(coefficient({1, 0, 1}) && *coefficient({1, 0, 1}) == Polyhedron::point(qvec({1})), "D(1,0,1) is not {1}");
  t.expect(coefficient({1, 1, 1}) && *coefficient({1, 1, 1}) == segment(0, 1), "D(1,1,1) is not [0,1]");
  for (const auto& r : {zv({0, 1, 0}), zv({1, 1, 0}), zv({0, 0, 1})}) {
    Coefficient c = d.coefficient(ray_label(r));
    t.expect(!c || *c == Polyhedron::point(qvec({0})), "nonzero coefficient at " + ray_label(r));
  }
}

void deformation_golden(Tally& t) {
  Cone delta = Cone::from_rays(2, {qvec({1, 1}), qvec({-1, 1})});
  DeformationInput din =
      DeformationInput::make(delta, qvec({0, 2}), {Polyhedron::point(qvec({Rational(-1, 2)})), segment(0, 1)});
  t.expect(check_admissible(din).admissible, "not admissible");
  PolyhedralDivisor family = family_pdivisor(din);
  t.expect(family.coefficient("D0") && *family.coefficient("D0") == Polyhedron::point(qvec({-1})), "P0 coefficient");
  t.expect(family.coefficient("D1") && *family.coefficient("D1") == segment(0, 1), "P1 coefficient");
  PolyhedralDivisor expected(
      line(), delta,
      {{"0", embed_at_height(Polyhedron::point(qvec({Rational(-1, 2)})), qvec({Rational(1, 2)})) + delta.polyhedron()},
       {"1", embed_at_height(segment(0, 1), qvec({0})) + delta.polyhedron()}});
  t.expect(deformation_upgrade(din) == expected, "upgraded divisor differs");
  DeformationRoutes routes = deformation_routes(din);
  t.expect(routes.direct == routes.upgraded, "routes disagree");
}

void trivial_map_golden(Tally& t) {
  DivisorialFan s = big_not_semiample_fan();
  PolyhedralDivisor psi0 = psi_zero(s);
  PolyhedralDivisor expected(s.base_ptr(), Cone::from_rays(1, {qvec({1})}),
                             {{"D1", half_line_from(0)}, {"E", half_line_from(1)}, {"D2", half_line_from(0)}});
  t.expect(psi0 == expected, "Psi0 = " + to_string(psi0));
  QDivisor at1 = evaluate(psi0, qvec({1}));
  t.expect(at1 == QDivisor{{{"E", ExtRational(1)}}}, "Psi0(1) = " + to_string(at1));
  Positivity p = positivity(s.base(), at1);
  t.expect(p.big, "Psi0(1) not big");
  t.expect(!p.semiample, "Psi0(1) semiample");
}

void threefold_proper(Tally& t) {
  auto threefold = [](const Rational& e) {
    return PolyhedralDivisor(make_base(blowup_plane()), Cone::zero(1),
                             {{"D1", Polyhedron::point(qvec({Rational(1, 2)}))},
                              {"D2", Polyhedron::point(qvec({Rational(1, 3)}))},
                              {"E", segment(0, e)}});
  };
  ProperReport r = is_proper(threefold(Rational(1, 6)));
  t.expect(r.proper(), "reported not proper (" + flags(r) + "); with D1 ~ D2 ~ -E, D(-6) = -3 D1 - 2 D2 - E ~ 4E has "
                       "negative degree on E");
  t.note(std::string("[0,5/6] on E gives proper=") + (is_proper(threefold(Rational(5, 6))).proper() ? "yes" : "no"));
}

void round_trips(Tally& t) {
  Gen g(6001);
  const std::vector<QVector> weights = window(2, 2);
  ZMatrix first(1, 2);
  first << 1, 0;
  const DowngradeContext onto_first = DowngradeContext::make(LatticeMap(first));
  int n = 0;
  for (; n < 200; ++n) {
    PolyhedralDivisor d = random_proper(g);
    DowngradeContext ctx = DowngradeContext::make(random_projection(g));
    DowngradeResult r = downgrade(d, ctx);
    UpgradeResult up = upgrade(r.divisor);
    bool same = true;
    for (const auto& w : weights)
      same = same && sections_at(up.divisor, w) == sections_at(d, ctx.lift(w.head(1), w.tail(1)));
    t.expect(same, "section dimensions differ for " + to_string(d));

    const PolyhedralDivisor& e = up.divisor;
    DowngradeResult again = downgrade(e, onto_first);
    t.expect(again.divisor == r.divisor, "second downgrade differs for " + to_string(e));
    t.expect(upgrade(again.divisor).divisor == e, "upgrade output does not round trip: " + to_string(e));
  }
  t.note(std::to_string(n) + " divisors");
}

void sections_oracle(Tally& t) {
  Gen g(7001);
  int n = 0;
  for (; n < 100; ++n) {
    RandomCurveFan f = random_curve_fan(g, g.coin());
    t.expect(f.fan->contraction_free(), "fan not contraction-free");
    TInvariantDivisor d = random_invariant_divisor(g, f);
    for (long w = -4; w <= 4; ++w) {
      QVector u = qvec({w});
      long fast = box_of(d).contains(u) ? static_cast<long>(graded_sections(d, u).dimension()) : 0;
      t.expect(fast == oracles::weight_space_dimension(d, u), "weight " + std::to_string(w));
    }
  }
  t.note(std::to_string(n) + " divisors");
}

void dual_involution(Tally& t, Gen& g) {
  int n = static_cast<int>(g.integer(1, 4));
  std::vector<QVector> gens;
  for (long k = g.integer(0, 5); k > 0; --k) gens.push_back(g.int_vector(n, -3, 3));
  Cone c = Cone::from_rays(n, gens);
  Cone d = dual_cone(c);
  t.expect(dual_cone(d) == c, "dual of dual");
  bool pairs = true;
  for (const auto& x : c.generators())
    for (const auto& y : d.generators()) pairs = pairs && x.dot(y) >= 0;
  t.expect(pairs, "negative pairing with the dual");
}

void minkowski(Tally& t, Gen& g) {
  int n = static_cast<int>(g.integer(1, 3));
  Polyhedron a = g.polytope(n, 3) + g.pointed_cone(n, 2).polyhedron();
  Polyhedron b = g.polytope(n, 2) + g.pointed_cone(n, 2).polyhedron();
  Polyhedron p = g.polytope(n, 3, -3, 3, 1), q = g.polytope(n, 2);
  t.expect(a + b == b + a, "commutativity");
  t.expect((a + b) + p == a + (b + p), "associativity");
  t.expect(a + Polyhedron::point(zeros(n)) == a, "neutral element");
  t.expect(tail_cone(a + b).polyhedron() == tail_cone(a).polyhedron() + tail_cone(b).polyhedron(), "tail cones add");
  std::vector<QVector> sums;
  for (const auto& x : p.vertices())
    for (const auto& y : q.vertices()) sums.push_back(x + y);
  t.expect(p + q == Polyhedron::hull(n, sums), "sum of polytopes is the hull of vertex sums");
  QVector w = random_weight(g, dual_cone(tail_cone(a + b)));
  t.expect(*(a + b).min_pairing(w) == *a.min_pairing(w) + *b.min_pairing(w), "support functions add");
}

void convexity(Tally& t, Gen& g) {
  const int n = static_cast<int>(g.integer(1, 3));
  PolyhedralDivisor d = random_curve_pdivisor(g, line(), n);
  QVector u = random_weight(g, d.weight_cone()), v = random_weight(g, d.weight_cone());
  QDivisor sum = evaluate(d, u) + evaluate(d, v), joint = evaluate(d, QVector(u + v));
  std::set<std::string> labels;
  for (const auto& [k, c] : sum.coefficients) labels.insert(k);
  for (const auto& [k, c] : joint.coefficients) labels.insert(k);
  bool below = true;
  for (const auto& k : labels) below = below && sum[k] <= joint[k];
  t.expect(below, "D(u) + D(u') > D(u + u') for " + to_string(d));
}

void property_suites(Tally& t) {
  Gen g(8001);
  const int each = 100;
  for (int i = 0; i < each; ++i) dual_involution(t, g);
  for (int i = 0; i < each; ++i) minkowski(t, g);
  for (int i = 0; i < each; ++i) convexity(t, g);
  int pairs = 0, tried = 0;
  for (; pairs < each && tried < 20000; ++tried) {
    RandomCurveFan f = random_curve_fan(g, true);
    TInvariantDivisor d = random_concave_divisor(g, f), e = random_concave_divisor(g, f);
    if (is_basepoint_free(d).verdict != Verdict::Yes || is_basepoint_free(e).verdict != Verdict::Yes) continue;
    PLDivisorMap lhs = sum_psi(box_and_psi(d), box_and_psi(e));
    PLDivisorMap rhs = box_and_psi(d + e);
    std::vector<QVector> samples = box_samples(rhs.box);
    samples.push_back(rhs.box.relative_interior_point());
    t.expect(lhs.box == rhs.box && equal_on(lhs, rhs, samples), "Box sum differs");
    ++pairs;
  }
  t.expect(pairs == each, "only " + std::to_string(pairs) + " semiample pairs");
  t.note(std::to_string(each) + " cones, " + std::to_string(each) + " Minkowski, " + std::to_string(each) +
         " evaluations, " + std::to_string(pairs) + " semiample pairs");
}

void cox_pivots(Tally& t) {
  Gen g(9001);
  int fans = 0, permuted = 0;
  auto check = [&](const FanPtr& fan, const std::vector<std::string>& primes) {
    std::optional<CoxData> first;
    try {
      first = cox_sequence(fan, primes, SplitOptions{{}, false});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TorsionCokernel) throw;
      return;
    }
    const CoxData& base = *first;
    std::vector<int> order(static_cast<size_t>(base.basis_size()));
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> identity = order;
    if (order.size() > 1)
      while (order == identity) std::shuffle(order.begin(), order.end(), g.engine());
    CoxData other = cox_sequence(fan, primes, SplitOptions{order, false});
    PolyhedralDivisor fixed = cox_correct(base).divisor, moved = cox_correct(other).divisor;
    QMatrix dual = inverse<Rational>(coordinate_change(base, other))->transpose();
    bool same = true;
    for (const auto& w : window(base.class_rank() + 1, 1)) same = same && sections_at(fixed, w) == sections_at(moved, QVector(dual * w));
    t.expect(same, "dimensions change with the pivot order");
    ++fans;
    if (order != identity) ++permuted;
  };
  for (long a = 0; a <= 3; ++a) check(hirzebruch(a), {"0", "inf"});
  for (int trial = 0; fans < 24 && trial < 400; ++trial) {
    RandomCurveFan f = random_curve_fan(g, g.coin());
    check(f.fan, primes_of(f));
  }
  t.expect(fans >= 20, "only " + std::to_string(fans) + " fans");
  t.note(std::to_string(fans) + " fans, " + std::to_string(permuted) + " with a nontrivial order");
}

struct Criterion {
  const char* name;
  std::function<void(Tally&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"upgrade of the plane with a contracted curve", upgrade_golden},
      {"toric downgrade of the A^4 cone", toric_downgrade_golden},
      {"deformation of the quadric cone", deformation_golden},
      {"trivial divisor map on the blown up plane", trivial_map_golden},
      {"properness of the threefold divisor", threefold_proper},
      {"downgrade and upgrade round trips", round_trips},
      {"graded sections against enumeration", sections_oracle},
      {"convexity and duality properties", property_suites},
      {"Cox dimensions under pivot permutations", cox_pivots},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<size_t> selected;
  for (int i = 1; i < argc; ++i) {
    size_t k = std::strtoul(argv[i], nullptr, 10);
    if (k < 1 || k > criteria().size()) {
      std::cerr << "usage: acceptance [criterion 1-" << criteria().size() << "]...\n";
      return 2;
    }
    selected.push_back(k);
  }
  if (selected.empty())
    for (size_t k = 1; k <= criteria().size(); ++k) selected.push_back(k);

  int failed = 0;
  for (size_t k : selected) {
    const Criterion& c = criteria()[k - 1];
    Tally t;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(t);
    } catch (const std::exception& e) {
      t.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!t.ok()) ++failed;
    std::printf("%s %zu %s: %s (%.1fs)\n", t.ok() ? "PASS" : "FAIL", k, c.name, t.detail().c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
