#include "polydiv/tvariety.hpp"

#include "polydiv/linalg.hpp"

#include <algorithm>
#include <set>

namespace polydiv {

bool has_affine_locus(const PolyhedralDivisor& d) {
  const BaseVariety& base = d.base();
  switch (base.kind()) {
    case BaseKind::OpenInProjectiveLine:
      return true;
    case BaseKind::ProjectiveLine:
      return !d.off_locus().empty();
    case BaseKind::Labels:
      return false;
    case BaseKind::Toric:
      break;
  }
  QDivisor at0 = evaluate(d, zeros(d.rank()));
  for (const auto& [k, c] : at0.coefficients)
    if (c.infinite && !base.ray_of(k))
      throw Error(ErrorCode::UnsupportedBase, "locus avoiding the non-invariant prime " + k);
  Fan loc = locus_fan(base, at0);
  for (const auto& big : loc.cones) {
    bool all = true;
    for (const auto& c : loc.cones)
      all = all && std::includes(big.begin(), big.end(), c.begin(), c.end());
    if (all) return true;
  }
  return loc.cones.empty();
}

// divisorial fans

namespace {

PolyhedralComplex complex_of(std::vector<Polyhedron> cells) {
  PolyhedralComplex c;
  c.cells = std::move(cells);
  c.normalize();
  return c;
}

}  // namespace

DivisorialFan::DivisorialFan(BasePtr base, std::vector<PolyhedralDivisor> members,
                             std::optional<std::vector<QVector>> invariant_rays)
    : base_(std::move(base)), members_(std::move(members)), declared_rays_(std::move(invariant_rays)) {
  if (!base_) throw Error(ErrorCode::InvalidInput, "divisorial fan without a base");
  if (members_.empty()) throw Error(ErrorCode::InvalidInput, "a divisorial fan needs at least one member");
  rank_ = members_.front().rank();
  std::set<std::string> marked;
  std::vector<Polyhedron> tails;
  for (const auto& m : members_) {
    if (m.rank() != rank_) throw Error(ErrorCode::AmbientMismatch, "members of different rank");
    for (const auto& [k, c] : m.coefficients()) {
      base_->require_label(k);
      marked.insert(k);
    }
    tails.push_back(m.tail().polyhedron());
  }
  marked_.assign(marked.begin(), marked.end());
  tailfan_ = complex_of(tails);
  if (!is_polyhedral_complex(tailfan_.cells)) throw Error(ErrorCode::InvalidInput, "the tail cones do not form a fan");
  for (const auto& label : marked_) {
    PolyhedralComplex s = slice(label);
    if (s.cells.empty()) continue;
    if (!is_polyhedral_complex(s.cells))
      throw Error(ErrorCode::InvalidInput, "the slice at " + label + " is not a polyhedral complex");
    std::vector<Polyhedron> ts;
    for (const auto& c : s.cells) ts.push_back(tail_cone(c).polyhedron());
    if (!(complex_of(ts) == tailfan_))
      throw Error(ErrorCode::InvalidInput, "the slice at " + label + " has a different tail fan");
  }
  contraction_free_ = std::all_of(members_.begin(), members_.end(), has_affine_locus);
  if (declared_rays_)
    for (auto& r : *declared_rays_) r = primitive_q(r);
}

PolyhedralComplex DivisorialFan::slice(const std::string& label) const {
  if (!std::binary_search(marked_.begin(), marked_.end(), label)) return tailfan_;
  std::vector<Polyhedron> cells;
  for (const auto& m : members_)
    if (auto c = m.coefficient(label)) cells.push_back(*c);
  return complex_of(cells);
}

FanPtr make_fan(DivisorialFan s) { return std::make_shared<const DivisorialFan>(std::move(s)); }

DivisorialFan make_contraction_free(const DivisorialFan& s) {
  if (s.base().kind() != BaseKind::ProjectiveLine)
    throw Error(ErrorCode::UnsupportedBase, "contraction-free replacement is implemented over P^1");
  std::vector<std::string> cut = s.marked();
  for (const char* extra : {"inf", "0"})
    if (cut.size() < 2 && std::find(cut.begin(), cut.end(), extra) == cut.end()) cut.push_back(extra);
  std::vector<PolyhedralDivisor> out;
  for (const auto& m : s.members()) {
    if (has_affine_locus(m)) {
      out.push_back(m);
      continue;
    }
    for (const auto& p : cut) {
      auto coeffs = m.coefficients();
      coeffs[p] = std::nullopt;
      out.emplace_back(s.base_ptr(), m.tail(), coeffs);
    }
  }
  return DivisorialFan(s.base_ptr(), out);
}

std::optional<std::pair<std::string, std::string>> toric_model_points(const DivisorialFan& s) {
  if (s.base().kind() != BaseKind::ProjectiveLine) return std::nullopt;
  std::vector<std::string> pts;
  for (const auto& label : s.marked()) {
    bool special = !(s.slice(label) == s.tailfan());
    for (const auto& m : s.members()) special = special || !m.coefficient(label);
    if (special) pts.push_back(label);
  }
  if (pts.size() > 2) return std::nullopt;
  for (const char* extra : {"0", "inf", "1"})
    if (pts.size() < 2 && std::find(pts.begin(), pts.end(), extra) == pts.end()) pts.push_back(extra);
  return std::pair{pts[0], pts[1]};
}

std::optional<Fan> toric_model(const DivisorialFan& s) {
  auto special = toric_model_points(s);
  if (!special) return std::nullopt;
  const std::vector<std::string> pts{special->first, special->second};
  const int n = s.rank();
  std::vector<Polyhedron> cones;
  for (const auto& m : s.members()) {
    std::vector<QVector> gens;
    for (const auto& r : m.tail().generators()) gens.push_back(extend(r, Rational(0)));
    Coefficient lo = m.coefficient(pts[0]), hi = m.coefficient(pts[1]);
    for (const auto& [c, h] : {std::pair{lo, Rational(1)}, std::pair{hi, Rational(-1)}}) {
      if (!c) continue;
      for (const auto& v : c->vertices()) gens.push_back(extend(v, h));
    }
    Cone cone = positive_hull(n + 1, gens);
    if (!cone.is_pointed()) return std::nullopt;
    cones.push_back(cone.polyhedron());
  }
  return Fan::from_complex(complex_of(cones));
}

InvariantPrimes invariant_prime_divisors(const DivisorialFan& s) {
  InvariantPrimes out;
  if (s.declared_rays()) {
    out.rays = *s.declared_rays();
  } else {
    if (!s.contraction_free()) throw Error(ErrorCode::NotContractionFree, "declare ray(S) for fans with contractions");
    out.rays = s.tailfan().rays();
  }
  sort_unique(out.rays);
  for (const auto& label : s.marked()) out.vertices[label] = s.slice(label).vertices();
  return out;
}

// invariant divisors

bool operator<(const VertexId& a, const VertexId& b) {
  if (a.label != b.label) return a.label < b.label;
  return lex_less(a.vertex, b.vertex);
}

bool operator==(const VertexId& a, const VertexId& b) { return a.label == b.label && equal(a.vertex, b.vertex); }

Rational TInvariantDivisor::a(const QVector& ray) const {
  auto it = ray_coeffs.find(primitive_q(ray));
  return it == ray_coeffs.end() ? Rational(0) : it->second;
}

Rational TInvariantDivisor::b(const std::string& label, const QVector& v) const {
  auto it = vertex_coeffs.find(VertexId{label, v});
  return it == vertex_coeffs.end() ? Rational(0) : it->second;
}

namespace {

template <typename Map>
void drop_zeros(Map& m) {
  for (auto it = m.begin(); it != m.end();) {
    if (it->second == 0)
      it = m.erase(it);
    else
      ++it;
  }
}

std::vector<QVector> vertices_at(const DivisorialFan& s, const InvariantPrimes& primes, const std::string& label) {
  auto it = primes.vertices.find(label);
  if (it != primes.vertices.end()) return it->second;
  return s.tailfan().vertices();
}

std::vector<std::string> labels_of(const TInvariantDivisor& d) {
  std::set<std::string> labels(d.fan->marked().begin(), d.fan->marked().end());
  for (const auto& [k, b] : d.vertex_coeffs) labels.insert(k.label);
  return {labels.begin(), labels.end()};
}

}  // namespace

TInvariantDivisor operator+(const TInvariantDivisor& x, const TInvariantDivisor& y) {
  TInvariantDivisor out = x;
  if (!out.fan) out.fan = y.fan;
  for (const auto& [k, a] : y.ray_coeffs) out.ray_coeffs[k] += a;
  for (const auto& [k, b] : y.vertex_coeffs) out.vertex_coeffs[k] += b;
  drop_zeros(out.ray_coeffs);
  drop_zeros(out.vertex_coeffs);
  return out;
}

TInvariantDivisor operator*(const Rational& s, const TInvariantDivisor& x) {
  TInvariantDivisor out = x;
  for (auto& [k, a] : out.ray_coeffs) a *= s;
  for (auto& [k, b] : out.vertex_coeffs) b *= s;
  drop_zeros(out.ray_coeffs);
  drop_zeros(out.vertex_coeffs);
  return out;
}

bool operator==(const TInvariantDivisor& x, const TInvariantDivisor& y) {
  TInvariantDivisor a = Rational(1) * x, b = Rational(1) * y;
  if (a.ray_coeffs.size() != b.ray_coeffs.size() || a.vertex_coeffs.size() != b.vertex_coeffs.size()) return false;
  for (const auto& [k, v] : a.ray_coeffs)
    if (b.a(k) != v) return false;
  for (const auto& [k, v] : a.vertex_coeffs)
    if (b.b(k.label, k.vertex) != v) return false;
  return true;
}

bool is_zero(const TInvariantDivisor& d) { return d == TInvariantDivisor{d.fan, {}, {}}; }

std::string to_string(const TInvariantDivisor& d) {
  std::string s;
  auto add = [&](const std::string& term) { s += (s.empty() ? "" : " + ") + term; };
  for (const auto& [r, a] : d.ray_coeffs)
    if (a != 0) add(to_string(a) + " D_" + to_string(r));
  for (const auto& [k, b] : d.vertex_coeffs) {
    if (b == 0) continue;
    Integer mu = primitive_and_multiplicity(k.vertex, false).multiplicity;
    add(to_string(Rational(mu) * b) + " D_(" + k.label + "," + to_string(k.vertex) + ")");
  }
  return s.empty() ? "0" : s;
}

TInvariantDivisor principal_invariant_divisor(const FanPtr& fan, const RationalFunction& f, const QVector& u) {
  if (u.size() != fan->rank()) throw Error(ErrorCode::AmbientMismatch, "weight of the wrong rank");
  InvariantPrimes primes = invariant_prime_divisors(*fan);
  TInvariantDivisor out;
  out.fan = fan;
  for (const auto& r : primes.rays) out.ray_coeffs[r] = r.dot(u);
  std::set<std::string> labels(fan->marked().begin(), fan->marked().end());
  for (const auto& [k, c] : divisor_of(fan->base(), f).coefficients) labels.insert(k);
  for (const auto& label : labels) {
    Rational ord(order_along(fan->base(), f, label));
    for (const auto& v : vertices_at(*fan, primes, label)) out.vertex_coeffs[VertexId{label, v}] = v.dot(u) + ord;
  }
  drop_zeros(out.ray_coeffs);
  drop_zeros(out.vertex_coeffs);
  return out;
}

// piecewise-affine maps

ExtRational PLFunction::operator()(const QVector& u) const {
  if (infinite) return ExtRational::inf();
  if (pieces.empty()) throw Error(ErrorCode::InvalidInput, "piecewise-affine function without pieces");
  Rational best = pieces.front()(u);
  for (const auto& p : pieces) best = std::min(best, p(u));
  return best;
}

QDivisor PLDivisorMap::operator()(const QVector& u) const {
  if (!box.contains(u)) throw Error(ErrorCode::WeightOutsideBox, to_string(u));
  QDivisor out;
  for (const auto& [k, f] : psi) out.set(k, f(u));
  return out;
}

Polyhedron hypograph(const Polyhedron& box, const PLFunction& f) {
  if (f.infinite) throw Error(ErrorCode::InvalidInput, "hypograph of the constant inf");
  const int n = box.ambient_dim();
  std::vector<Halfspace> ineqs, eqs;
  for (const auto& h : box.inequalities()) ineqs.push_back({extend(h.normal, Rational(0)), h.offset});
  for (const auto& h : box.equations()) eqs.push_back({extend(h.normal, Rational(0)), h.offset});
  for (const auto& p : f.pieces) ineqs.push_back({extend(p.slope, Rational(-1)), Rational(-p.constant)});
  if (box.is_empty()) return Polyhedron::empty(n + 1);
  return Polyhedron::from_inequalities(n + 1, ineqs, eqs);
}

namespace {

PLFunction function_at(const PLDivisorMap& psi, const std::string& label) {
  auto it = psi.psi.find(label);
  if (it != psi.psi.end()) return it->second;
  return PLFunction{false, {AffinePiece{zeros(psi.box.ambient_dim()), Rational(0)}}};
}

QVector head_of(const QVector& v, int n) { return QVector(v.head(n)); }

}  // namespace

std::vector<QVector> lineality_space(const PLDivisorMap& psi, const std::string& label) {
  const int n = psi.box.ambient_dim();
  Polyhedron h = hypograph(psi.box, function_at(psi, label));
  std::vector<QVector> ls;
  for (const auto& l : h.lineality()) ls.push_back(head_of(l, n));
  return span_basis(ls, n);
}

std::vector<QVector> psi_vertices(const PLDivisorMap& psi, const std::string& label) {
  const int n = psi.box.ambient_dim();
  std::vector<QVector> out;
  Polyhedron h = hypograph(psi.box, function_at(psi, label));
  for (const auto& v : h.vertices()) out.push_back(head_of(v, n));
  sort_unique(out);
  return out;
}

Polyhedron box_of(const TInvariantDivisor& d) {
  InvariantPrimes primes = invariant_prime_divisors(*d.fan);
  std::vector<Halfspace> hs;
  for (const auto& r : primes.rays) hs.push_back({r, Rational(-d.a(r))});
  return Polyhedron::from_inequalities(d.fan->rank(), hs);
}

PLDivisorMap box_and_psi(const TInvariantDivisor& d) {
  InvariantPrimes primes = invariant_prime_divisors(*d.fan);
  PLDivisorMap out;
  out.base = d.fan->base_ptr();
  out.box = box_of(d);
  for (const auto& label : labels_of(d)) {
    PLFunction f;
    auto verts = vertices_at(*d.fan, primes, label);
    f.infinite = verts.empty();
    for (const auto& v : verts) f.pieces.push_back({v, d.b(label, v)});
    out.psi[label] = f;
  }
  return out;
}

PolyhedralDivisor psi_zero(const DivisorialFan& s) {
  const int n = s.rank();
  Cone tail = positive_hull(n, s.tailfan().rays());
  std::map<std::string, Coefficient> coeffs;
  for (const auto& label : s.marked()) {
    PolyhedralComplex sl = s.slice(label);
    if (sl.cells.empty()) {
      coeffs[label] = std::nullopt;
      continue;
    }
    coeffs[label] = Polyhedron::hull(n, sl.vertices(), sl.rays());
  }
  return PolyhedralDivisor(s.base_ptr(), tail, coeffs);
}

SectionBasis graded_sections(const TInvariantDivisor& d, const QVector& u, const SectionOptions& options) {
  PLDivisorMap psi = box_and_psi(d);
  bool integral = true;
  for (Eigen::Index i = 0; i < u.size(); ++i) integral = integral && is_integer(u[i]);
  if (!integral || !psi.box.contains(u)) throw Error(ErrorCode::WeightOutsideBox, to_string(u));
  return global_sections(d.fan->base(), psi(u), options);
}

// support functions

const std::vector<CellFunction>& SupportFunction::at(const std::string& label) const {
  auto it = marked.find(label);
  return it == marked.end() ? generic : it->second;
}

namespace {

std::vector<CellFunction> solve_cells(const TInvariantDivisor& d, const std::string& label,
                                      const PolyhedralComplex& slice) {
  const int n = d.fan->rank();
  std::vector<CellFunction> out;
  for (const auto& cell : slice.cells) {
    std::vector<QVector> rows;
    std::vector<Rational> rhs;
    for (const auto& v : cell.vertices()) {
      rows.push_back(extend(v, Rational(1)));
      rhs.push_back(-d.b(label, v));
    }
    for (const auto& r : cell.rays()) {
      rows.push_back(extend(r, Rational(0)));
      rhs.push_back(-d.a(r));
    }
    for (const auto& l : cell.lineality()) {
      rows.push_back(extend(l, Rational(0)));
      rhs.push_back(Rational(0));
    }
    QVector b(static_cast<Eigen::Index>(rhs.size()));
    for (size_t i = 0; i < rhs.size(); ++i) b[static_cast<Eigen::Index>(i)] = rhs[i];
    auto x = solve<Rational>(rows_of(rows, n + 1), b);
    if (!x) throw Error(ErrorCode::NotQCartier, "no affine function on the cell " + to_string(cell) + " at " + label);
    out.push_back({cell, AffinePiece{head_of(*x, n), (*x)[n]}});
  }
  return out;
}

bool dominates_on(const AffinePiece& f, const AffinePiece& g, const Polyhedron& cell) {
  for (const auto& v : cell.vertices())
    if (f(v) < g(v)) return false;
  QVector diff = f.slope - g.slope;
  for (const auto& r : cell.rays())
    if (diff.dot(r) < 0) return false;
  for (const auto& l : cell.lineality())
    if (diff.dot(l) != 0) return false;
  return true;
}

bool support_is_convex(const std::vector<Polyhedron>& cells) {
  if (cells.empty()) return false;
  const int n = cells.front().ambient_dim();
  std::vector<QVector> vs, rs, ls;
  for (const auto& c : cells) {
    vs.insert(vs.end(), c.vertices().begin(), c.vertices().end());
    rs.insert(rs.end(), c.rays().begin(), c.rays().end());
    ls.insert(ls.end(), c.lineality().begin(), c.lineality().end());
  }
  Polyhedron hull = Polyhedron::hull(n, vs, rs, ls);
  for (const auto& c : cells)
    if (c.dim() < hull.dim()) return cells.size() == 1 && c == hull;
  for (const auto& c : cells) {
    for (const auto& facet : c.inequalities()) {
      auto eqs = c.equations();
      eqs.push_back(facet);
      Polyhedron f = Polyhedron::from_inequalities(n, c.inequalities(), eqs);
      if (f.is_empty()) continue;
      QVector x = f.relative_interior_point();
      if (!hull.contains_in_relative_interior(x)) continue;
      bool covered = false;
      for (const auto& other : cells)
        if (&other != &c && other.contains(x)) covered = true;
      if (!covered) return false;
    }
  }
  return true;
}

}  // namespace

SupportFunction support_functions(const TInvariantDivisor& d) {
  SupportFunction out;
  for (const auto& label : labels_of(d)) out.marked[label] = solve_cells(d, label, d.fan->slice(label));
  out.generic = solve_cells(d, "", d.fan->tailfan());
  return out;
}

bool is_concave(const std::vector<CellFunction>& h) {
  for (const auto& f : h)
    for (const auto& g : h)
      if (!dominates_on(f.h, g.h, g.cell)) return false;
  return true;
}

// sections with prescribed order on curves

std::optional<RationalFunction> section_with_exact_order(const BaseVariety& base, const QDivisor& d,
                                                         const std::string& label) {
  if (!base.is_curve()) throw Error(ErrorCode::UnsupportedBase, "exact-order sections are implemented on curves");
  if (!base.has_label(label)) return std::nullopt;
  ExtRational dp = d[label];
  if (dp.infinite || !is_integer(dp.value)) return std::nullopt;
  std::map<std::string, Integer> e;
  std::set<std::string> free, used{label};
  bool inf_free = false;
  for (const auto& r : base.removed_points()) {
    used.insert(point_label(r));
    if (r.infinite)
      inf_free = true;
    else
      free.insert(point_label(r));
  }
  for (const auto& [k, c] : d.coefficients) {
    used.insert(k);
    if (k == "inf") {
      inf_free = inf_free || c.infinite;
      continue;
    }
    if (c.infinite)
      free.insert(k);
    else
      e[k] = -floor(c.value);
  }
  Integer n_inf = d["inf"].infinite ? Integer(0) : floor(d["inf"].value);
  Integer sum = 0;
  for (const auto& [k, x] : e) sum += x;
  auto fix_with_free = [&](const Integer& delta) {
    if (free.empty()) return false;
    e[*free.begin()] += delta;
    return true;
  };
  if (label != "inf") {
    if (!inf_free && sum > n_inf && !fix_with_free(n_inf - sum)) return std::nullopt;
  } else if (sum < n_inf) {
    long c = 1;
    while (used.count(std::to_string(c))) ++c;
    e[std::to_string(c)] = n_inf - sum;
  } else if (sum > n_inf && !fix_with_free(n_inf - sum)) {
    return std::nullopt;
  }
  RationalFunction s;
  for (const auto& [k, x] : e)
    if (x != 0) s.factors[k] = x;
  if (Rational(order_along(base, s, label)) != -dp.value) return std::nullopt;
  for (const auto& [k, c] : d.coefficients)
    if (c.is_finite() && Rational(order_along(base, s, k)) < -c.value) return std::nullopt;
  if (!d.coefficients.count("inf") && !inf_free && base.has_label("inf") && order_along(base, s, "inf") < 0)
    return std::nullopt;
  return s;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return "yes";
    case Verdict::No:
      return "no";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

// base-point freeness on curves

namespace {

std::string fresh_point(const std::set<std::string>& used) {
  long c = 2;
  while (used.count(std::to_string(c))) ++c;
  return std::to_string(c);
}

// lattice points of p near its vertices: the hull of the vertices and window steps along rays and lineality
std::vector<ZVector> search_window(const Polyhedron& p, long window) {
  const int n = p.ambient_dim();
  std::vector<QVector> pts;
  for (const auto& v : p.vertices()) {
    pts.push_back(v);
    for (const auto& r : p.rays()) pts.push_back(QVector(v + Rational(window) * r));
    for (const auto& l : p.lineality()) {
      pts.push_back(QVector(v + Rational(window) * l));
      pts.push_back(QVector(v - Rational(window) * l));
    }
  }
  return lattice_points(intersect(Polyhedron::hull(n, pts), p));
}

const CellFunction* cell_containing(const std::vector<CellFunction>& h, const Polyhedron& c) {
  for (const auto& f : h)
    if (f.cell.contains(c)) return &f;
  return nullptr;
}

}  // namespace

BpfResult is_basepoint_free(const TInvariantDivisor& d, const SearchOptions& options) {
  const DivisorialFan& s = *d.fan;
  const BaseVariety& base = s.base();
  if (!base.is_curve()) throw Error(ErrorCode::UnsupportedBase, "base-point freeness is decided over curves");
  BpfResult out;
  SupportFunction h;
  try {
    h = support_functions(d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotQCartier) throw;
    out.verdict = Verdict::No;
    out.notes.push_back(e.what());
    return out;
  }
  std::vector<std::string> labels = labels_of(d);
  bool convex = support_is_convex(s.tailfan().cells);
  for (const auto& label : labels) convex = convex && support_is_convex(s.slice(label).cells);
  if (convex) {
    bool concave = is_concave(h.generic);
    for (const auto& label : labels)
      if (!is_concave(h.at(label))) {
        concave = false;
        out.notes.push_back("support function at " + label + " is not concave");
      }
    if (!concave) {
      out.verdict = Verdict::No;
      return out;
    }
  }
  PLDivisorMap psi = box_and_psi(d);
  std::set<std::string> used(labels.begin(), labels.end());
  for (const auto& r : base.removed_points()) used.insert(point_label(r));
  used.insert("inf");
  const std::string generic = fresh_point(used);
  bool inconclusive = false;
  for (size_t i = 0; i < s.members().size(); ++i) {
    const PolyhedralDivisor& m = s.members()[i];
    std::vector<std::string> points = labels;
    points.push_back(generic);
    for (const auto& p : points) {
      Coefficient cp = m.coefficient(p);
      if (!cp) continue;
      const CellFunction* hf = cell_containing(h.at(p), *cp);
      if (!hf) throw Error(ErrorCode::InvalidInput, "coefficient outside its slice at " + p);
      const int n = s.rank();
      std::vector<Halfspace> eqs = psi.box.equations();
      const QVector& v0 = cp->vertices().front();
      std::vector<QVector> dirs = cp->rays();
      for (const auto& v : cp->vertices()) dirs.push_back(QVector(v - v0));
      for (const auto& l : cp->lineality()) dirs.push_back(l);
      for (const auto& dir : dirs)
        if (!is_zero(dir)) eqs.push_back({dir, Rational(dir.dot(hf->h.slope))});
      Polyhedron candidates = Polyhedron::from_inequalities(n, psi.box.inequalities(), eqs);
      if (candidates.is_empty()) {
        out.verdict = Verdict::No;
        out.notes.push_back("no weight is tight on member " + std::to_string(i) + " at " + p);
        return out;
      }
      bool found = false;
      for (const auto& uz : search_window(candidates, options.window)) {
        QVector u = to_q(uz);
        QDivisor value = psi(u);
        if (value[p] != ExtRational(v0.dot(u) - hf->h(v0))) continue;
        if (auto sec = section_with_exact_order(base, value, p)) {
          out.witnesses.push_back({i, p == generic ? std::string("generic") : p, u, *sec});
          found = true;
          break;
        }
      }
      if (!found) {
        inconclusive = true;
        out.notes.push_back("no witness in the search window for member " + std::to_string(i) + " at " +
                            (p == generic ? std::string("a generic point") : p));
      }
    }
  }
  out.verdict = inconclusive ? Verdict::Inconclusive : Verdict::Yes;
  return out;
}

// sums

PLDivisorMap sum_psi(const PLDivisorMap& a, const PLDivisorMap& b) {
  const int n = a.box.ambient_dim();
  if (b.box.ambient_dim() != n) throw Error(ErrorCode::AmbientMismatch, "maps on different lattices");
  PLDivisorMap out;
  out.base = a.base;
  out.box = minkowski_sum(a.box, b.box);
  std::set<std::string> labels;
  for (const auto& [k, f] : a.psi) labels.insert(k);
  for (const auto& [k, f] : b.psi) labels.insert(k);
  for (const auto& label : labels) {
    PLFunction fa = function_at(a, label), fb = function_at(b, label);
    PLFunction f;
    if (fa.infinite || fb.infinite) {
      f.infinite = true;
      out.psi[label] = f;
      continue;
    }
    Polyhedron h = minkowski_sum(hypograph(a.box, fa), hypograph(b.box, fb));
    for (const auto& facet : h.inequalities()) {
      const Rational& beta = facet.normal[n];
      if (beta >= 0) continue;
      f.pieces.push_back({QVector(-head_of(facet.normal, n) / beta), Rational(facet.offset / beta)});
    }
    out.psi[label] = f;
  }
  return out;
}

bool equal_on(const PLDivisorMap& a, const PLDivisorMap& b, const std::vector<QVector>& samples) {
  if (!(a.box == b.box)) return false;
  for (const auto& u : samples)
    if (!(a(u) == b(u))) return false;
  return true;
}

// sharpness

std::string to_string(Sharpness s) {
  switch (s) {
    case Sharpness::Sharp:
      return "sharp";
    case Sharpness::AsymptoticallySharp:
      return "asymptotically sharp";
    case Sharpness::Inconclusive:
      return "inconclusive";
    case Sharpness::Fails:
      return "fails";
  }
  return "?";
}

SharpnessResult sharpness(const PLDivisorMap& psi, const SearchOptions& options) {
  if (!psi.base->is_curve()) throw Error(ErrorCode::UnsupportedBase, "sharpness is decided over curves");
  const int n = psi.box.ambient_dim();
  SharpnessResult out;
  std::set<std::string> used;
  for (const auto& [k, f] : psi.psi) used.insert(k);
  for (const auto& r : psi.base->removed_points()) used.insert(point_label(r));
  used.insert("inf");
  std::vector<std::string> labels(used.begin(), used.end());
  labels.erase(std::remove_if(labels.begin(), labels.end(),
                              [&](const std::string& l) { return !psi.base->has_label(l); }),
               labels.end());
  labels.push_back(fresh_point(used));
  bool all_sharp = true, all_asymptotic = true, fails = false;
  for (const auto& label : labels) {
    if (function_at(psi, label).infinite) continue;
    std::vector<QVector> lin = lineality_space(psi, label);
    for (const auto& ubar : psi_vertices(psi, label)) {
      // the part of the box over u-bar, cut to a cube of the window size around it
      std::vector<Halfspace> ineqs = psi.box.inequalities();
      for (int i = 0; i < n; ++i) {
        QVector e = unit(n, i);
        ineqs.push_back({e, Rational(ubar[i] - options.window)});
        ineqs.push_back({QVector(-e), Rational(-ubar[i] - options.window)});
      }
      std::vector<Halfspace> eqs = psi.box.equations();
      for (const auto& c : orthogonal_complement(lin, n)) eqs.push_back({c, Rational(c.dot(ubar))});
      Polyhedron fiber = Polyhedron::from_inequalities(n, ineqs, eqs);
      bool sharp = false, asymptotic = false, negative_everywhere = true;
      for (long k = 1; k <= options.k_bound && !asymptotic; ++k) {
        std::vector<QVector> us;
        if (lin.empty()) {
          us.push_back(ubar);
        } else {
          for (const auto& z : lattice_points(scale(Rational(k), fiber))) us.push_back(QVector(to_q(z) / Rational(k)));
        }
        for (const auto& u : us) {
          QDivisor value = Rational(k) * psi(u);
          if (psi.base->is_projective() && value.is_finite()) {
            if (degree(*psi.base, value).value >= 0) negative_everywhere = false;
          } else {
            negative_everywhere = false;
          }
          if (section_with_exact_order(*psi.base, value, label)) {
            asymptotic = true;
            bool integral = true;
            for (int i = 0; i < n; ++i) integral = integral && is_integer(u[i]);
            if (k == 1 && integral) {
              sharp = true;
              break;
            }
          }
        }
      }
      if (!sharp) all_sharp = false;
      if (!asymptotic) {
        all_asymptotic = false;
        if (negative_everywhere) {
          fails = true;
          out.notes.push_back("negative degree over the vertex " + to_string(ubar) + " of the function at " + label);
        } else {
          out.notes.push_back("no section found over the vertex " + to_string(ubar) + " at " + label);
        }
      }
    }
  }
  if (fails)
    out.verdict = Sharpness::Fails;
  else if (all_sharp)
    out.verdict = Sharpness::Sharp;
  else if (all_asymptotic)
    out.verdict = Sharpness::AsymptoticallySharp;
  else
    out.verdict = Sharpness::Inconclusive;
  return out;
}

}  // namespace polydiv
