#include "polydiv/upgrade.hpp"

#include "polydiv/linalg.hpp"

#include <algorithm>
#include <set>

namespace polydiv {

Polyhedron InvariantPDivisorOnFan::ray_coefficient(const QVector& ray) const {
  auto it = ray_coeffs.find(primitive_q(ray));
  return it == ray_coeffs.end() ? tail.polyhedron() : it->second;
}

Polyhedron InvariantPDivisorOnFan::vertex_coefficient(const std::string& label, const QVector& v) const {
  auto it = vertex_coeffs.find(VertexId{label, v});
  return it == vertex_coeffs.end() ? tail.polyhedron() : it->second;
}

namespace {

std::vector<QVector> vertex_set(const DivisorialFan& s, const InvariantPrimes& primes, const std::string& label) {
  auto it = primes.vertices.find(label);
  if (it != primes.vertices.end()) return it->second;
  return s.tailfan().vertices();
}

std::vector<std::string> upgrade_labels(const InvariantPDivisorOnFan& d) {
  std::set<std::string> labels(d.fan->marked().begin(), d.fan->marked().end());
  for (const auto& [k, c] : d.vertex_coeffs) labels.insert(k.label);
  return {labels.begin(), labels.end()};
}

}  // namespace

void validate(const InvariantPDivisorOnFan& d) {
  if (!d.fan) throw Error(ErrorCode::InvalidInput, "invariant p-divisor without a fan");
  InvariantPrimes primes = invariant_prime_divisors(*d.fan);
  auto check_tail = [&](const Polyhedron& c, const std::string& where) {
    if (c.ambient_dim() != d.rank()) throw Error(ErrorCode::AmbientMismatch, where);
    if (c.is_empty() || !(tail_cone(c) == d.tail)) throw Error(ErrorCode::InvalidInput, where + " has another tail");
  };
  for (const auto& [r, c] : d.ray_coeffs) {
    if (std::none_of(primes.rays.begin(), primes.rays.end(), [&](const QVector& x) { return equal(x, primitive_q(r)); }))
      throw Error(ErrorCode::InvalidInput, to_string(r) + " is not in ray(S)");
    check_tail(c, "coefficient of D_" + to_string(r));
  }
  for (const auto& [k, c] : d.vertex_coeffs) {
    d.fan->base().require_label(k.label);
    auto vs = vertex_set(*d.fan, primes, k.label);
    if (std::none_of(vs.begin(), vs.end(), [&](const QVector& x) { return equal(x, k.vertex); }))
      throw Error(ErrorCode::InvalidInput, to_string(k.vertex) + " is not a vertex of the slice at " + k.label);
    check_tail(c, "coefficient of D_(" + k.label + "," + to_string(k.vertex) + ")");
  }
}

TInvariantDivisor evaluate(const InvariantPDivisorOnFan& d, const QVector& u) {
  if (u.size() != d.rank()) throw Error(ErrorCode::AmbientMismatch, "weight of the wrong rank");
  if (!dual_cone(d.tail).contains(u)) throw Error(ErrorCode::WeightOutsideCone, to_string(u));
  InvariantPrimes primes = invariant_prime_divisors(*d.fan);
  TInvariantDivisor out;
  out.fan = d.fan;
  for (const auto& r : primes.rays) out.ray_coeffs[r] = *d.ray_coefficient(r).min_pairing(u);
  for (const auto& label : upgrade_labels(d))
    for (const auto& v : vertex_set(*d.fan, primes, label))
      out.vertex_coeffs[VertexId{label, v}] = *d.vertex_coefficient(label, v).min_pairing(u);
  return Rational(1) * out;
}

Cone upgrade_tailcone(const InvariantPDivisorOnFan& d) {
  const int n = d.rank(), m = d.fan->rank();
  std::vector<QVector> gens;
  for (const auto& g : d.tail.generators()) gens.push_back(concat(g, zeros(m)));
  for (const auto& r : invariant_prime_divisors(*d.fan).rays) {
    Polyhedron c = d.ray_coefficient(r);
    for (const auto& v : c.vertices()) gens.push_back(concat(v, r));
  }
  return positive_hull(n + m, gens);
}

PolyhedralDivisor upgrade_coefficients(const InvariantPDivisorOnFan& d) {
  const int n = d.rank(), m = d.fan->rank();
  Cone tilde = upgrade_tailcone(d);
  InvariantPrimes primes = invariant_prime_divisors(*d.fan);
  std::map<std::string, Coefficient> coeffs;
  for (const auto& label : upgrade_labels(d)) {
    auto vs = vertex_set(*d.fan, primes, label);
    if (vs.empty()) {
      coeffs[label] = std::nullopt;
      continue;
    }
    std::vector<QVector> verts, rays = tilde.rays(), lin = tilde.lineality();
    for (const auto& v : vs) {
      Polyhedron c = d.vertex_coefficient(label, v);
      for (const auto& x : c.vertices()) verts.push_back(concat(x, v));
    }
    coeffs[label] = Polyhedron::hull(n + m, verts, rays, lin);
  }
  return PolyhedralDivisor(d.fan->base_ptr(), tilde, coeffs);
}

UpgradeResult upgrade(const InvariantPDivisorOnFan& d) {
  validate(d);
  UpgradeResult out;
  out.divisor = upgrade_coefficients(d);
  out.report = is_proper(out.divisor);
  out.contraction_free = d.fan->contraction_free();
  const BaseVariety& base = d.fan->base();
  if (base.is_curve())
    out.smooth_base = true;
  else if (base.kind() == BaseKind::Toric)
    out.smooth_base = base.fan().is_smooth();
  if (!out.contraction_free) out.notes.push_back("the divisorial fan is not contraction-free");
  if (out.smooth_base == false) out.notes.push_back("the base of the divisorial fan is singular");
  if (!out.smooth_base) out.notes.push_back("smoothness of the base is unknown");
  if (!out.report.proper()) out.notes.push_back("not proper");
  return out;
}

std::vector<UpgradeResult> upgrade_all(const std::vector<InvariantPDivisorOnFan>& ds) {
  std::vector<UpgradeResult> out;
  for (const auto& d : ds) out.push_back(upgrade(d));
  return out;
}

CorrectionResult correct_pic_z(const PolyhedralDivisor& d) {
  const BaseVariety& base = d.base();
  if (!base.is_projective()) throw Error(ErrorCode::NoDegreeMap, "the base is not projective");
  Polyhedron deg = d.tail().polyhedron();
  bool empty = false;
  for (const auto& [k, c] : d.coefficients()) {
    auto w = base.degree_of(k);
    if (!w) throw Error(ErrorCode::NoDegreeMap, "no degree declared for " + k);
    if (*w < 0) throw Error(ErrorCode::InvalidInput, "negative degree for " + k);
    if (!c) {
      empty = true;
      continue;
    }
    deg = minkowski_sum(deg, scale(*w, *c));
  }
  CorrectionResult out;
  if (empty) {
    out.sigma_hat = d.tail();
  } else {
    std::vector<QVector> gens = deg.vertices();
    for (const auto& r : deg.rays()) gens.push_back(r);
    for (const auto& l : deg.lineality()) {
      gens.push_back(l);
      gens.push_back(-l);
    }
    out.sigma_hat = positive_hull(d.rank(), gens);
  }
  std::map<std::string, Coefficient> coeffs;
  for (const auto& [k, c] : d.coefficients())
    coeffs[k] = c ? Coefficient(minkowski_sum(*c, out.sigma_hat.polyhedron())) : std::nullopt;
  out.divisor = PolyhedralDivisor(d.base_ptr(), out.sigma_hat, coeffs);
  out.report = is_proper(out.divisor);
  return out;
}

// resolution of toric bases

namespace {

std::vector<QVector> cone_rays(const Fan& f, const std::vector<int>& c) {
  std::vector<QVector> out;
  for (int i : c) out.push_back(to_q(f.rays[static_cast<size_t>(i)]));
  return out;
}

bool cone_is_smooth(const Fan& f, const std::vector<int>& c) {
  auto rs = cone_rays(f, c);
  if (rank_of(rs, f.rank) != static_cast<Eigen::Index>(rs.size())) return false;
  ZMatrix m(f.rank, static_cast<Eigen::Index>(c.size()));
  for (size_t j = 0; j < c.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = f.rays[static_cast<size_t>(c[j])];
  auto sf = smith_form(m);
  return std::all_of(sf.invariant_factors.begin(), sf.invariant_factors.end(),
                     [](const Integer& x) { return abs(x) == 1; });
}

int add_ray(Fan& f, const ZVector& r) {
  if (auto i = f.ray_index(r)) return *i;
  f.rays.push_back(r);
  return static_cast<int>(f.rays.size()) - 1;
}

// non-simplicial cone: star subdivision at the sum of its rays
void subdivide_interior(Fan& f, size_t ci) {
  std::vector<int> c = f.cones[ci];
  Cone cone = f.cone(ci);
  QVector sum = zeros(f.rank);
  for (const auto& r : cone_rays(f, c)) sum += r;
  int w = add_ray(f, primitive(sum));
  std::vector<std::vector<int>> fresh;
  for (const auto& normal : cone.facet_normals()) {
    std::vector<int> face;
    for (int i : c)
      if (normal.dot(to_q(f.rays[static_cast<size_t>(i)])) == 0) face.push_back(i);
    face.push_back(w);
    fresh.push_back(face);
  }
  f.cones.erase(f.cones.begin() + static_cast<std::ptrdiff_t>(ci));
  for (auto& nc : fresh) {
    std::sort(nc.begin(), nc.end());
    f.cones.push_back(nc);
  }
}

// simplicial singular cone: star subdivision at the least nonzero point of the half-open parallelepiped
void subdivide_simplicial(Fan& f, const std::vector<int>& c) {
  auto rs = cone_rays(f, c);
  const int k = static_cast<int>(rs.size());
  std::vector<QVector> corners;
  for (int mask = 0; mask < (1 << k); ++mask) {
    QVector p = zeros(f.rank);
    for (int i = 0; i < k; ++i)
      if (mask & (1 << i)) p += rs[static_cast<size_t>(i)];
    corners.push_back(p);
  }
  QMatrix basis = cols_of(rs, f.rank);
  std::optional<std::pair<QVector, QVector>> best;
  for (const auto& z : lattice_points(Polyhedron::hull(f.rank, corners))) {
    QVector x = to_q(z);
    if (is_zero(x)) continue;
    auto lambda = solve<Rational>(basis, x);
    if (!lambda) continue;
    bool inside = true;
    for (int i = 0; i < k; ++i) inside = inside && (*lambda)[i] >= 0 && (*lambda)[i] < 1;
    if (inside && (!best || lex_less(x, best->first))) best = std::pair{x, *lambda};
  }
  if (!best) throw Error(ErrorCode::InvalidInput, "no interior lattice point in a singular cone");
  std::vector<int> support;
  for (int i = 0; i < k; ++i)
    if (best->second[i] != 0) support.push_back(c[static_cast<size_t>(i)]);
  int w = add_ray(f, to_z(best->first));
  std::vector<std::vector<int>> next;
  for (const auto& cone : f.cones) {
    if (!std::includes(cone.begin(), cone.end(), support.begin(), support.end())) {
      next.push_back(cone);
      continue;
    }
    for (int j : support) {
      std::vector<int> nc;
      for (int i : cone)
        if (i != j) nc.push_back(i);
      nc.push_back(w);
      std::sort(nc.begin(), nc.end());
      next.push_back(nc);
    }
  }
  f.cones = next;
}

bool ray_less(const Fan& f, const std::vector<int>& a, const std::vector<int>& b) {
  auto ra = cone_rays(f, a), rb = cone_rays(f, b);
  std::sort(ra.begin(), ra.end(), lex_less);
  std::sort(rb.begin(), rb.end(), lex_less);
  return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end(), lex_less);
}

}  // namespace

Fan resolve_fan(const Fan& input) {
  Fan f = input;
  for (auto& c : f.cones) std::sort(c.begin(), c.end());
  for (;;) {
    std::optional<size_t> worst;
    for (size_t i = 0; i < f.cones.size(); ++i)
      if (!cone_is_smooth(f, f.cones[i]) && (!worst || ray_less(f, f.cones[i], f.cones[*worst]))) worst = i;
    if (!worst) return f;
    const auto c = f.cones[*worst];
    if (rank_of(cone_rays(f, c), f.rank) != static_cast<Eigen::Index>(c.size()))
      subdivide_interior(f, *worst);
    else
      subdivide_simplicial(f, c);
  }
}

DivisorialFan resolve_base(const DivisorialFan& s) {
  const BaseVariety& base = s.base();
  if (base.kind() != BaseKind::Toric) throw Error(ErrorCode::UnsupportedBase, "resolution of a non-toric base");
  Fan smooth = resolve_fan(base.fan());
  std::vector<std::string> labels = base.ray_labels();
  for (size_t i = labels.size(); i < smooth.rays.size(); ++i) labels.push_back(ray_label(smooth.rays[i]));
  std::map<std::string, Rational> degrees;
  for (const auto& l : base.named_labels())
    if (auto w = base.degree_of(l)) degrees[l] = *w;
  BasePtr bare = make_base(BaseVariety::toric(smooth, labels));
  BaseMap rays_only = BaseMap::toric(bare, s.base_ptr(), LatticeMap::identity(smooth.rank));
  std::vector<DeclaredPrime> declared;
  for (const auto& dp : base.declared()) {
    std::map<std::string, Rational> cls;
    for (const auto& [target, w] : dp.class_rep) {
      auto it = rays_only.pullbacks.find(target);
      if (it == rays_only.pullbacks.end()) continue;
      for (const auto& [src, m] : it->second) cls[src] += Rational(w) * m;
    }
    DeclaredPrime pulled{dp.label, {}};
    for (const auto& [l, c] : cls)
      if (c != 0) pulled.class_rep[l] = Integer(to_z(qvec({c}))[0]);
    declared.push_back(pulled);
  }
  BasePtr resolved = make_base(BaseVariety::toric(smooth, labels, declared, degrees));
  PullbackTriple phi{BaseMap::toric(resolved, s.base_ptr(), LatticeMap::identity(smooth.rank)),
                     LatticeMap::identity(s.rank()), PrincipalPDivisor{s.rank(), {}}};
  std::vector<PolyhedralDivisor> members;
  for (const auto& m : s.members()) members.push_back(pullback(m, phi));
  return DivisorialFan(resolved, members, s.declared_rays());
}

}  // namespace polydiv
