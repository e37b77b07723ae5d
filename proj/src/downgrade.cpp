#include "polydiv/downgrade.hpp"

#include "polydiv/linalg.hpp"

#include <algorithm>
#include <set>

namespace polydiv {

DowngradeContext DowngradeContext::make(const LatticeMap& pr, const SplitOptions& options) {
  DowngradeContext c;
  c.pr = pr;
  try {
    c.split = smith_split(pr, options);
  } catch (const Error& e) {
    throw Error(ErrorCode::NotSplit, e.what());
  }
  c.pi = to_q(c.split.kernel).transpose();
  c.s = to_q(c.split.section.matrix).transpose();
  return c;
}

QMatrix DowngradeContext::splitting() const {
  QMatrix out(s.rows() + pi.rows(), rank());
  out << s, pi;
  return out;
}

QVector DowngradeContext::lift(const QVector& ubar, const QVector& uprime) const {
  return QVector(to_q(split.section.matrix) * ubar + to_q(split.kernel) * uprime);
}

namespace {

PLFunction function_at(const DivisorialPolyhedron& psi, const std::string& label) {
  auto it = psi.psi.find(label);
  if (it != psi.psi.end()) return it->second;
  return PLFunction{false, {AffinePiece{zeros(psi.box.ambient_dim()), Rational(0)}}};
}

Rational min_piece(const std::vector<AffinePiece>& pieces, const QVector& v) {
  Rational best = pieces.front()(v);
  for (const auto& p : pieces) best = std::min(best, p(v));
  return best;
}

// drop the last coordinate
QMatrix drop_last(int n) {
  QMatrix m = QMatrix::Zero(n, n + 1);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix last_coordinate(int n) {
  QMatrix m = QMatrix::Zero(1, n + 1);
  m(0, n) = 1;
  return m;
}

PolyhedralComplex tail_complex(const PolyhedralComplex& c) {
  PolyhedralComplex out;
  for (const auto& cell : c.cells) out.cells.push_back(tail_cone(cell).polyhedron());
  out.normalize();
  return out;
}

}  // namespace

bool is_identically_zero(const DivisorialPolyhedron& psi, const std::string& label) {
  PLFunction f = function_at(psi, label);
  if (f.infinite) return false;
  Polyhedron below = Polyhedron::hull(1, {zeros(1)}, {qvec({-1})});
  return hypograph(psi.box, f) == product(psi.box, below);
}

Rational linear_part(const DivisorialPolyhedron& psi, const std::string& label, const QVector& w) {
  const int n = psi.box.ambient_dim();
  if (psi.box.is_empty() || !tail_cone(psi.box).contains(w))
    throw Error(ErrorCode::WeightOutsideBox, to_string(w) + " is not a tail direction of the box");
  PLFunction f = function_at(psi, label);
  if (f.infinite) throw Error(ErrorCode::InvalidInput, "linear part of the constant inf");
  // the largest c with (w, c) in the tail cone of the hypograph
  Cone t = tail_cone(hypograph(psi.box, f));
  Polyhedron fiber = map_fiber_slice(t.polyhedron(), drop_last(n), w, last_coordinate(n));
  return -*fiber.min_pairing(qvec({-1}));
}

DualFunction dualize(const DivisorialPolyhedron& psi, const std::string& label) {
  const int n = psi.box.ambient_dim();
  if (psi.box.is_empty()) throw Error(ErrorCode::InvalidInput, "dual of a map on the empty box");
  PLFunction f = function_at(psi, label);
  if (f.infinite) throw Error(ErrorCode::InvalidInput, "dual of the constant inf");
  Polyhedron h = hypograph(psi.box, f);
  DualFunction out;
  // v with <v, w> >= c for all (w, c) in the tail of the hypograph
  Cone t = dual_cone(tail_cone(h));
  out.box = map_fiber_slice(t.polyhedron(), last_coordinate(n), qvec({-1}), drop_last(n));
  for (const auto& x : h.vertices())
    out.psi.pieces.push_back(AffinePiece{QVector(x.head(n)), Rational(-x[n])});
  if (psi.box.dim() == n) out.cells = linearity_regions(out.psi.pieces, out.box);
  return out;
}

FanFromResult fan_from(const DivisorialPolyhedron& psi, const std::vector<std::string>& marks) {
  const int n = psi.box.ambient_dim();
  if (marks.empty()) throw Error(ErrorCode::InvalidInput, "no marked points");
  for (const auto& [label, f] : psi.psi)
    if (std::find(marks.begin(), marks.end(), label) == marks.end() && !is_identically_zero(psi, label))
      throw Error(ErrorCode::MarksMissingSupport, label + " carries a nonzero function but is not marked");
  if (psi.box.is_empty() || psi.box.dim() != n)
    throw Error(ErrorCode::BoxNotFullDimensional, "box of dimension " + std::to_string(psi.box.dim()));
  for (const auto& label : marks) psi.base->require_label(label);

  FanFromResult out;
  std::optional<PolyhedralComplex> tails;
  std::vector<PolyhedralDivisor> members;
  for (const auto& label : marks) {
    DualFunction dual = dualize(psi, label);
    PolyhedralComplex t = tail_complex(dual.cells);
    if (tails && !(*tails == t)) throw Error(ErrorCode::SlicesDisagree, "tail fan at " + label + " differs");
    tails = t;
    for (const auto& cell : dual.cells.cells) {
      std::map<std::string, Coefficient> coeffs;
      for (const auto& other : marks) coeffs[other] = std::nullopt;
      coeffs[label] = cell;
      members.emplace_back(psi.base, tail_cone(cell), coeffs);
    }
    out.duals.emplace(label, std::move(dual));
  }
  out.fan = make_fan(DivisorialFan(psi.base, std::move(members)));

  out.support.fan = out.fan;
  InvariantPrimes primes = invariant_prime_divisors(*out.fan);
  for (const auto& r : primes.rays) out.support.ray_coeffs[r] = -*psi.box.min_pairing(r);
  for (const auto& [label, vs] : primes.vertices) {
    auto it = out.duals.find(label);
    if (it == out.duals.end()) continue;
    for (const auto& v : vs) out.support.vertex_coeffs[VertexId{label, v}] = -min_piece(it->second.psi.pieces, v);
  }
  out.support = Rational(1) * out.support;
  return out;
}

DivisorialPolyhedron downgrade_box_psi(const PolyhedralDivisor& d, const DowngradeContext& ctx, const QVector& ubar) {
  if (d.rank() != ctx.rank() || ubar.size() != ctx.pr.target_rank())
    throw Error(ErrorCode::AmbientMismatch, "weight and divisor do not fit the split");
  const Polyhedron& omega = d.weight_cone().polyhedron();
  if (!map_image(omega, ctx.pr).contains(ubar))
    throw Error(ErrorCode::WeightOutsideCone, to_string(ubar) + " is not in pr(omega)");
  DivisorialPolyhedron out;
  out.base = d.base_ptr();
  out.box = map_fiber_slice(omega, to_q(ctx.pr.matrix), ubar, to_q(ctx.split.cosection.matrix));
  for (const auto& [label, c] : d.coefficients()) {
    PLFunction f;
    if (!c) {
      f.infinite = true;
    } else {
      for (const auto& x : c->vertices())
        f.pieces.push_back(AffinePiece{QVector(ctx.pi * x), Rational(QVector(ctx.s * x).dot(ubar))});
    }
    out.psi[label] = f;
  }
  return out;
}

std::vector<QVector> representative_weights(const PolyhedralDivisor& d, const DowngradeContext& ctx) {
  std::vector<QVector> out;
  for (const auto& cell : weight_chambers(d).cells) {
    QVector q = map_image(cell, ctx.pr).relative_interior_point();
    out.push_back(QVector(q * Rational(denominator_lcm(q))));
  }
  sort_unique(out);
  return out;
}

std::vector<std::string> downgrade_marks(const PolyhedralDivisor& d) {
  std::vector<std::string> out;
  for (const auto& [label, c] : d.coefficients()) out.push_back(label);
  if (d.base().kind() == BaseKind::ProjectiveLine) {
    if (std::find(out.begin(), out.end(), "inf") == out.end()) out.push_back("inf");
    for (const char* extra : {"0", "1"})
      if (out.size() < 2 && std::find(out.begin(), out.end(), extra) == out.end()) out.push_back(extra);
  }
  if (out.empty())
    for (const char* extra : {"0", "1", "-1"})
      if (out.empty() && d.base().has_label(extra)) out.push_back(extra);
  return out;
}

PolyhedralComplex direct_slice(const PolyhedralDivisor& d, const DowngradeContext& ctx, const std::string& label) {
  Coefficient c = d.coefficient(label);
  if (!c) throw Error(ErrorCode::EmptyCoefficient, "no slice at " + label);
  return chamber_complex(*c, ctx.pi);
}

DowngradeResult downgrade(const PolyhedralDivisor& d, const DowngradeContext& ctx) {
  if (!d.base().is_curve()) throw Error(ErrorCode::UnsupportedBase, "downgrades are implemented over curves");
  if (d.rank() != ctx.rank()) throw Error(ErrorCode::AmbientMismatch, "divisor and split of different ranks");
  if (!d.off_locus().empty()) throw Error(ErrorCode::InvalidInput, "the locus must be the whole curve");
  ProperReport report = is_proper(d);
  if (!report.proper()) {
    std::string why;
    for (const auto& f : report.failures) why += (why.empty() ? "" : "; ") + f;
    throw Error(ErrorCode::NotProper, why);
  }

  DowngradeResult out;
  out.weights = representative_weights(d, ctx);
  for (size_t i = 0; i < out.weights.size(); ++i) {
    DivisorialPolyhedron p = downgrade_box_psi(d, ctx, out.weights[i]);
    out.psi = i == 0 ? p : sum_psi(out.psi, p);
  }
  out.marks = downgrade_marks(d);
  FanFromResult ff = fan_from(out.psi, out.marks);
  out.fan = ff.fan;

  for (const auto& label : out.marks)
    if (!(direct_slice(d, ctx, label) == out.fan->slice(label)))
      throw Error(ErrorCode::SlicesDisagree, "the slice at " + label + " differs from the chamber complex");
  if (!(chamber_complex(d.tail().polyhedron(), ctx.pi) == out.fan->tailfan()))
    throw Error(ErrorCode::SlicesDisagree, "the tail fan differs from the image fan of the tail");

  const Polyhedron& sigma = d.tail().polyhedron();
  const QMatrix s = ctx.s;
  InvariantPDivisorOnFan& dbar = out.divisor;
  dbar.fan = out.fan;
  dbar.tail = Cone(map_fiber_slice(sigma, ctx.pi, zeros(ctx.fiber_rank()), s));
  InvariantPrimes primes = invariant_prime_divisors(*out.fan);
  for (const auto& r : primes.rays) dbar.ray_coeffs[r] = map_fiber_slice(sigma, ctx.pi, r, s);
  for (const auto& [label, vs] : primes.vertices) {
    Coefficient c = d.coefficient(label);
    for (const auto& v : vs) dbar.vertex_coeffs[VertexId{label, v}] = map_fiber_slice(*c, ctx.pi, v, s);
  }
  dbar = canonical(dbar);
  validate(dbar);

  if (auto t = toric_form(dbar)) {
    out.report = is_proper(*t);
  } else {
    out.notes.push_back("X(S) has no toric model; properness of the result is not checked");
  }
  return out;
}

InvariantPDivisorOnFan canonical(const InvariantPDivisorOnFan& d) {
  InvariantPDivisorOnFan out;
  out.fan = d.fan;
  out.tail = d.tail;
  const Polyhedron& t = d.tail.polyhedron();
  for (const auto& [r, c] : d.ray_coeffs)
    if (!(c == t)) out.ray_coeffs.emplace(primitive_q(r), c);
  for (const auto& [k, c] : d.vertex_coeffs)
    if (!(c == t)) out.vertex_coeffs.emplace(k, c);
  return out;
}

bool same_fan(const DivisorialFan& a, const DivisorialFan& b) {
  if (a.rank() != b.rank() || !(a.tailfan() == b.tailfan())) return false;
  std::set<std::string> labels(a.marked().begin(), a.marked().end());
  labels.insert(b.marked().begin(), b.marked().end());
  for (const auto& label : labels)
    if (!(a.slice(label) == b.slice(label))) return false;
  return true;
}

bool operator==(const InvariantPDivisorOnFan& a, const InvariantPDivisorOnFan& b) {
  if (!(a.tail == b.tail) || !same_fan(*a.fan, *b.fan)) return false;
  InvariantPDivisorOnFan x = canonical(a), y = canonical(b);
  if (x.ray_coeffs.size() != y.ray_coeffs.size() || x.vertex_coeffs.size() != y.vertex_coeffs.size()) return false;
  for (auto i = x.ray_coeffs.begin(), j = y.ray_coeffs.begin(); i != x.ray_coeffs.end(); ++i, ++j)
    if (!equal(i->first, j->first) || !(i->second == j->second)) return false;
  for (auto i = x.vertex_coeffs.begin(), j = y.vertex_coeffs.begin(); i != x.vertex_coeffs.end(); ++i, ++j)
    if (!(i->first == j->first) || !(i->second == j->second)) return false;
  return true;
}

std::optional<PolyhedralDivisor> toric_form(const InvariantPDivisorOnFan& d) {
  auto points = toric_model_points(*d.fan);
  auto fan = toric_model(*d.fan);
  if (!points || !fan) return std::nullopt;
  for (const auto& [k, c] : canonical(d).vertex_coeffs)
    if (k.label != points->first && k.label != points->second) return std::nullopt;
  const int m = d.fan->rank();
  std::vector<std::string> labels;
  std::map<std::string, Coefficient> coeffs;
  for (const auto& r : fan->rays) {
    QVector x = to_q(ZVector(r.head(m)));
    Rational h(r[m]);
    std::string label;
    Polyhedron c;
    if (h == 0) {
      label = "D" + to_string(x);
      c = d.ray_coefficient(x);
    } else {
      const std::string& p = h > 0 ? points->first : points->second;
      Rational mu = h > 0 ? h : Rational(-h);
      QVector v = x / mu;
      label = "D(" + p + "," + to_string(v) + ")";
      c = scale(mu, d.vertex_coefficient(p, v));
    }
    labels.push_back(label);
    coeffs[label] = c;
  }
  BasePtr base = make_base(BaseVariety::toric(*fan, labels));
  return PolyhedralDivisor(base, d.tail, coeffs);
}

PolyhedralDivisor split_coordinates(const PolyhedralDivisor& d, const DowngradeContext& ctx) {
  QMatrix a = ctx.splitting();
  std::map<std::string, Coefficient> coeffs;
  for (const auto& [label, c] : d.coefficients()) coeffs[label] = c ? Coefficient(map_image(*c, a)) : std::nullopt;
  return PolyhedralDivisor(d.base_ptr(), Cone(map_image(d.tail().polyhedron(), a)), coeffs);
}

}  // namespace polydiv
