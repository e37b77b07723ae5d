#include "polydiv/deform.hpp"

#include "polydiv/linalg.hpp"

#include <algorithm>

namespace polydiv {

namespace {

QMatrix last_row(int dim) {
  QMatrix m = QMatrix::Zero(1, dim);
  m(0, dim - 1) = 1;
  return m;
}

QMatrix drop_last(int dim) {
  QMatrix m = QMatrix::Zero(dim - 1, dim);
  for (int i = 0; i + 1 < dim; ++i) m(i, i) = 1;
  return m;
}

Coefficient slice_at(const Cone& delta, const Rational& h) {
  const int dim = delta.ambient_dim();
  Polyhedron s = map_fiber_slice(delta.polyhedron(), last_row(dim), qvec({h}), drop_last(dim));
  if (s.is_empty()) return std::nullopt;
  return s;
}

void require_admissible(const DeformationInput& din) {
  Admissibility a = check_admissible(din);
  if (!a.admissible) throw Error(ErrorCode::NotAdmissible, a.reason);
}

Integer max0(const Integer& a) { return a > 0 ? a : Integer(0); }

// order of the pulled back family divisors along the toric prime of Y-tilde with ray eta
std::map<std::string, Integer> orders(const DeformationInput& din, const ZVector& eta) {
  std::map<std::string, Integer> out;
  if (max0(eta[0]) != 0) out["D0"] = max0(eta[0]);
  if (max0(-eta[0]) != 0) out["Dinf"] = max0(-eta[0]);
  if (eta[0] >= 0)
    for (int i = 1; i <= din.length(); ++i) {
      Integer m = std::min(Integer(din.multiplicity(i) * eta[0]), Integer(eta[i]));
      if (m != 0) out["D" + std::to_string(i)] = m;
    }
  return out;
}

struct ZCone {
  Polyhedron cone;
  std::vector<std::string> rays;
};

}  // namespace

DeformationInput DeformationInput::make(Cone delta, QVector r, std::vector<Polyhedron> parts,
                                        std::vector<Integer> multiplicities) {
  DeformationInput din;
  const int dim = delta.ambient_dim();
  if (dim < 2) throw Error(ErrorCode::InvalidInput, "delta must live in N + Z with N of positive rank");
  if (!delta.is_pointed()) throw Error(ErrorCode::InvalidInput, "delta must be pointed");
  if (r.size() != dim) throw Error(ErrorCode::AmbientMismatch, "degree r");
  for (int i = 0; i + 1 < dim; ++i)
    if (r[i] != 0) throw Error(ErrorCode::InvalidInput, "r must be a multiple of the last coordinate");
  if (!is_integer(r[dim - 1]) || r[dim - 1] <= 0)
    throw Error(ErrorCode::InvalidInput, "r must be a positive integral multiple of the last coordinate");
  din.k = numerator(r[dim - 1]);
  if (parts.empty()) throw Error(ErrorCode::InvalidInput, "a decomposition needs at least Delta_0");
  if (!multiplicities.empty()) {
    if (din.k != 1) throw Error(ErrorCode::InvalidInput, "with multiplicities the degree must be primitive");
    if (multiplicities.size() + 1 != parts.size())
      throw Error(ErrorCode::InvalidInput, "one multiplicity per summand Delta_1, ..., Delta_l");
    for (const auto& m : multiplicities)
      if (m <= 0) throw Error(ErrorCode::InvalidInput, "multiplicities must be positive");
  }
  din.delta = std::move(delta);
  din.r = std::move(r);
  din.parts = std::move(parts);
  din.multiplicities = std::move(multiplicities);
  din.sigma = Cone(*slice_at(din.delta, 0));
  din.plus = slice_at(din.delta, 1);
  din.minus = slice_at(din.delta, -1);
  for (size_t i = 0; i < din.parts.size(); ++i) {
    const Polyhedron& p = din.parts[i];
    if (p.ambient_dim() != dim - 1) throw Error(ErrorCode::AmbientMismatch, "Delta_" + std::to_string(i));
    if (p.is_empty()) throw Error(ErrorCode::EmptyCoefficient, "Delta_" + std::to_string(i) + " is empty");
    if (!(tail_cone(p) == din.sigma))
      throw Error(ErrorCode::InvalidInput, "Delta_" + std::to_string(i) + " does not have the tail cone of delta");
  }
  return din;
}

Integer DeformationInput::multiplicity(int i) const {
  if (i < 1 || i > length()) throw Error(ErrorCode::InvalidInput, "no summand Delta_" + std::to_string(i));
  return mixed() ? multiplicities[static_cast<size_t>(i) - 1] : k;
}

Integer DeformationInput::common() const {
  if (!mixed()) return k;
  Integer g = 0;
  for (const auto& m : multiplicities) g = gcd(g, m);
  return g;
}

Polyhedron DeformationInput::first() const { return mixed() ? parts[0] : scale(Rational(k), parts[0]); }

Admissibility check_admissible(const DeformationInput& din) {
  Polyhedron sum = din.first();
  for (int i = 1; i <= din.length(); ++i)
    sum = sum + scale(Rational(din.multiplicity(i)), din.parts[static_cast<size_t>(i)]);
  if (!din.plus || !(sum == *din.plus))
    throw Error(ErrorCode::SumMismatch, "the summands add up to " + to_string(sum) + ", not to Delta^+");
  if (!din.mixed()) {
    Polyhedron lifted = embed_at_height(din.parts[0], qvec({Rational(1) / Rational(din.k)}));
    for (int i = 1; i <= din.length(); ++i) lifted = lifted + embed_at_height(din.parts[static_cast<size_t>(i)], zeros(1));
    if (!(lifted == cross_section(din.delta.polyhedron(), din.r, Rational(1))))
      throw Error(ErrorCode::SumMismatch, "the lifted summands do not add up to delta cap [r = 1]");
  }

  Admissibility out;
  for (int i = 1; i <= din.length(); ++i)
    if (din.multiplicity(i) > 1 && !is_lattice_polyhedron(din.parts[static_cast<size_t>(i)])) {
      out.admissible = false;
      out.reason = "Delta_" + std::to_string(i) + " must be a lattice polyhedron";
      return out;
    }

  std::vector<std::string> labels;
  std::map<std::string, Coefficient> coeffs;
  for (size_t i = 0; i < din.parts.size(); ++i) {
    labels.push_back(std::to_string(i));
    coeffs[labels.back()] = din.parts[i];
  }
  PolyhedralDivisor summands(make_base(BaseVariety::labels(labels)), din.sigma, coeffs);
  for (const auto& chamber : weight_chambers(summands).cells) {
    QVector u = chamber.relative_interior_point();
    u *= Rational(denominator_lcm(u));
    std::vector<int> bad;
    for (size_t i = 0; i < din.parts.size(); ++i)
      if (lattice_points(face(din.parts[i], u)).empty()) bad.push_back(static_cast<int>(i));
    if (bad.size() > 1) {
      out.admissible = false;
      out.reason = "two u-faces without lattice points at u = " + to_string(u);
      out.witness = u;
      out.lattice_free = bad;
      return out;
    }
  }
  return out;
}

PolyhedralDivisor family_pdivisor(const DeformationInput& din) {
  require_admissible(din);
  const int l = din.length();
  if (l == 0)
    return PolyhedralDivisor(make_base(BaseVariety::projective_line()), din.sigma,
                             {{point_label(Rational(0)), din.first()}, {point_label(ExtRational::inf()), din.minus}});
  Fan f;
  f.rank = l + 1;
  std::vector<std::string> labels{"D0", "Dinf"};
  f.rays.push_back(to_z(unit(l + 1, 0)));
  f.rays.push_back(to_z(QVector(-unit(l + 1, 0))));
  std::vector<int> plus_cone{0}, minus_cone{1};
  std::vector<DeclaredPrime> declared;
  for (int i = 1; i <= l; ++i) {
    f.rays.push_back(to_z(unit(l + 1, i)));
    labels.push_back("Y" + std::to_string(i));
    plus_cone.push_back(i + 1);
    minus_cone.push_back(i + 1);
    declared.push_back(DeclaredPrime{"D" + std::to_string(i), {{"Dinf", din.multiplicity(i)}}});
  }
  f.cones = {plus_cone, minus_cone};
  BasePtr y = make_base(BaseVariety::toric(f, labels, declared));
  std::map<std::string, Coefficient> coeffs{{"D0", din.first()}, {"Dinf", din.minus}};
  for (int i = 1; i <= l; ++i) coeffs["D" + std::to_string(i)] = din.parts[static_cast<size_t>(i)];
  return PolyhedralDivisor(y, din.sigma, coeffs);
}

FamilyBase family_base_fan(const DeformationInput& din) {
  require_admissible(din);
  const int l = din.length();
  if (l < 1) throw Error(ErrorCode::InvalidInput, "the base of the family is a point");
  ZVector kappa(l);
  for (int i = 0; i < l; ++i) kappa[i] = din.multiplicity(i + 1);
  const Integer kb = din.common();
  ZVector h(l);
  for (int i = 0; i < l; ++i) h[i] = kappa[i] / kb;

  FamilyBase fb;
  std::vector<ZCone> zcones;
  if (l == 1) {
    fb.p0 = point_label(Rational(0));
    fb.q = point_label(ExtRational::inf());
    fb.p = {point_label(Rational(1))};
    fb.z = make_base(BaseVariety::projective_line());
    fb.rays[fb.p0] = to_z(qvec({-1}));
    fb.rays[fb.q] = to_z(qvec({1}));
    zcones.push_back({Cone::from_rays(1, {qvec({1})}).polyhedron(), {fb.q}});
    zcones.push_back({Cone::from_rays(1, {qvec({-1})}).polyhedron(), {fb.p0}});
  } else {
    fb.p0 = "P0";
    fb.q = "Q";
    Fan f;
    f.rank = l;
    std::vector<std::string> labels;
    std::vector<DeclaredPrime> declared;
    for (int i = 0; i < l; ++i) {
      f.rays.push_back(to_z(unit(l, i)));
      labels.push_back("H" + std::to_string(i + 1));
      fb.p.push_back("P" + std::to_string(i + 1));
      declared.push_back(DeclaredPrime{fb.p.back(), {{"P0", h[i]}}});
    }
    f.rays.push_back(ZVector(-h));
    labels.push_back(fb.p0);
    f.rays.push_back(h);
    labels.push_back(fb.q);
    for (int skip = 0; skip < l; ++skip)
      for (int apex : {l, l + 1}) {
        std::vector<int> c;
        for (int i = 0; i < l; ++i)
          if (i != skip) c.push_back(i);
        c.push_back(apex);
        f.cones.push_back(c);
      }
    for (size_t i = 0; i < f.rays.size(); ++i) fb.rays[labels[i]] = f.rays[i];
    for (size_t ci = 0; ci < f.cones.size(); ++ci) {
      ZCone zc{f.cone(ci).polyhedron(), {}};
      for (int i : f.cones[ci]) zc.rays.push_back(labels[static_cast<size_t>(i)]);
      zcones.push_back(zc);
    }
    fb.z = make_base(BaseVariety::toric(f, labels, declared));
  }

  // Y = P^1 x A^l in N_Y = Z^(1+l), the quotient by the weight (1, kappa) and a retraction onto it
  QMatrix p = QMatrix::Zero(l, l + 1);
  for (int i = 0; i < l; ++i) {
    p(i, 0) = -Rational(kappa[i]);
    p(i, i + 1) = 1;
  }
  QMatrix s = QMatrix::Zero(1, l + 1);
  s(0, 0) = 1;
  std::vector<Cone> ycones;
  std::vector<QVector> positive;
  for (int i = 1; i <= l; ++i) positive.push_back(unit(l + 1, i));
  for (int sign : {1, -1}) {
    if (sign < 0 && !din.minus) continue;
    std::vector<QVector> gens = positive;
    gens.push_back(QVector(Rational(sign) * unit(l + 1, 0)));
    ycones.push_back(Cone::from_rays(l + 1, gens));
  }

  std::vector<PolyhedralDivisor> members;
  for (const auto& yc : ycones)
    for (const auto& zc : zcones) {
      Polyhedron cell = intersect(yc.polyhedron(), preimage(zc.cone, p));
      if (cell.dim() < l + 1) continue;
      Cone tail(map_fiber_slice(cell, p, zeros(l), s));
      std::map<std::string, Coefficient> coeffs;
      for (const auto& [label, n] : fb.rays) {
        coeffs[label] = std::nullopt;
        if (std::find(zc.rays.begin(), zc.rays.end(), label) == zc.rays.end()) continue;
        Polyhedron c = map_fiber_slice(cell, p, to_q(n), s);
        if (!c.is_empty()) coeffs[label] = c;
      }
      members.emplace_back(fb.z, tail, coeffs);
    }
  fb.fan = make_fan(DivisorialFan(fb.z, members));

  InvariantPrimes primes = invariant_prime_divisors(*fb.fan);
  auto record = [&](const ZVector& eta, auto&& put) {
    for (const auto& [label, m] : orders(din, eta)) put(fb.pullbacks[label], m);
  };
  for (const auto& r : primes.rays) {
    QVector x = concat(r, QVector(to_q(kappa) * r[0]));
    ZVector eta = primitive(x);
    record(eta, [&](PulledBack& pb, const Integer& m) { pb.rays[r] = m; });
  }
  for (const auto& [label, vs] : primes.vertices) {
    auto it = fb.rays.find(label);
    if (it == fb.rays.end()) continue;
    for (const auto& v : vs) {
      QVector x = concat(v, QVector(to_q(it->second) + to_q(kappa) * v[0]));
      ZVector eta = primitive(x);
      record(eta, [&](PulledBack& pb, const Integer& m) { pb.vertices[VertexId{label, v}] = m; });
    }
  }
  for (int i = 1; i <= l; ++i) fb.pullbacks["D" + std::to_string(i)].vertices[VertexId{fb.p[static_cast<size_t>(i) - 1], zeros(1)}] = 1;
  return fb;
}

InvariantPDivisorOnFan family_invariant(const DeformationInput& din, const FamilyBase& fb) {
  PolyhedralDivisor e = family_pdivisor(din);
  InvariantPDivisorOnFan out;
  out.fan = fb.fan;
  out.tail = din.sigma;
  std::map<QVector, Polyhedron, QVectorLess> rays;
  std::map<VertexId, Polyhedron> vertices;
  auto add = [&](auto& into, const auto& key, const std::string& label, const Integer& m) {
    Coefficient c = e.coefficient(label);
    if (!c) throw Error(ErrorCode::EmptyCoefficient, label + " has an empty coefficient but meets Y-tilde");
    auto it = into.find(key);
    if (it == into.end()) it = into.emplace(key, din.sigma.polyhedron()).first;
    it->second = it->second + scale(Rational(m), *c);
  };
  for (const auto& [label, pb] : fb.pullbacks) {
    for (const auto& [r, m] : pb.rays) add(rays, r, label, m);
    for (const auto& [v, m] : pb.vertices) add(vertices, v, label, m);
  }
  out.ray_coeffs = rays;
  for (const auto& [v, c] : vertices) out.vertex_coeffs[v] = scale(Rational(1) / Rational(denominator_lcm(v.vertex)), c);
  return out;
}

DeformationRoutes deformation_routes(const DeformationInput& din) {
  FamilyBase fb = family_base_fan(din);
  const int n = din.rank();
  const Rational step = Rational(1) / Rational(din.common());
  Cone tilde(intersect(din.delta.polyhedron(), Polyhedron::from_inequalities(n + 1, {{din.r, Rational(0)}})));
  std::map<std::string, Coefficient> coeffs;
  coeffs[fb.p0] = embed_at_height(din.parts[0], qvec({step})) + tilde.polyhedron();
  for (int i = 1; i <= din.length(); ++i)
    coeffs[fb.p[static_cast<size_t>(i) - 1]] = embed_at_height(din.parts[static_cast<size_t>(i)], zeros(1)) + tilde.polyhedron();
  std::vector<QVector> verts{zeros(n + 1)};
  if (din.minus)
    for (const auto& v : din.minus->vertices()) verts.push_back(extend(QVector(v * step), -step));
  coeffs[fb.q] = Polyhedron::hull(n + 1, verts, tilde.rays(), tilde.lineality());

  DeformationRoutes out;
  out.direct = PolyhedralDivisor(fb.z, tilde, coeffs);
  out.upgrade = upgrade(family_invariant(din, fb));
  out.upgraded = out.upgrade.divisor;
  return out;
}

PolyhedralDivisor deformation_upgrade(const DeformationInput& din) {
  DeformationRoutes routes = deformation_routes(din);
  if (!(routes.direct == routes.upgraded))
    throw Error(ErrorCode::RoutesDisagree, "the formulas give " + to_string(routes.direct) + " but the upgrade gives " +
                                               to_string(routes.upgraded));
  return routes.direct;
}

StructureMap structure_map(const DeformationInput& din) {
  if (din.mixed()) throw Error(ErrorCode::UnsupportedBase, "the structure map is implemented for a single multiplicity");
  PolyhedralDivisor up = deformation_upgrade(din);
  FamilyBase fb = family_base_fan(din);
  const int l = din.length(), n = din.rank();
  const Cone half = Cone::from_rays(1, {qvec({1})});

  StructureMap out;
  RationalFunction f;
  if (l == 1) {
    BasePtr point = make_base(BaseVariety::labels({}));
    out.target = PolyhedralDivisor(point, half, {});
    out.triple.base_map.source = fb.z;
    out.triple.base_map.target = point;
    f = RationalFunction::x();
  } else {
    Fan pf;
    pf.rank = l - 1;
    std::vector<std::string> labels;
    for (int i = 0; i < l - 1; ++i) pf.rays.push_back(to_z(unit(l - 1, i)));
    pf.rays.push_back(ZVector::Constant(l - 1, Integer(-1)));
    for (int i = 0; i < l; ++i) labels.push_back("W" + std::to_string(i + 1));
    for (int skip = 0; skip < l; ++skip) {
      std::vector<int> c;
      for (int i = 0; i < l; ++i)
        if (i != skip) c.push_back(i);
      pf.cones.push_back(c);
    }
    BasePtr target = make_base(BaseVariety::toric(pf, labels));
    ZMatrix proj = ZMatrix::Zero(l - 1, l);
    for (int i = 0; i < l - 1; ++i) {
      proj(i, i) = 1;
      proj(i, l - 1) = -1;
    }
    out.target = PolyhedralDivisor(target, half, {{labels.back(), Polyhedron::hull(1, {qvec({1})}, {qvec({1})})}});
    out.triple.base_map = BaseMap::toric(fb.z, target, LatticeMap(proj));
    f.character = ZVector::Zero(l);
    f.character[l - 1] = -1;
  }
  ZMatrix r(1, n + 1);
  for (int i = 0; i <= n; ++i) r(0, i) = numerator(din.r[i]);
  out.triple.lattice_map = LatticeMap(r);
  out.triple.shift = PrincipalPDivisor{1, {{qvec({1}), f}}};

  QDivisor principal;
  principal.set(fb.p0, Rational(1));
  principal.set(fb.q, Rational(-1));
  if (l > 1)
    for (const auto& [label, m] : out.triple.base_map.pullbacks.at("W" + std::to_string(l)))
      principal = principal + QDivisor{{{label, ExtRational(Rational(-m))}}};
  out.principal = principal;
  out.is_principal = divisor_of(*fb.z, f) == principal;

  PolyhedralDivisor pb = pullback(out.target, out.triple);
  out.equivariant = pb.tail().contains(up.tail());
  std::vector<std::string> labels;
  for (const auto& [label, c] : up.coefficients()) labels.push_back(label);
  for (const auto& [label, c] : pb.coefficients()) labels.push_back(label);
  for (const auto& label : labels) {
    Coefficient a = up.coefficient(label), b = pb.coefficient(label);
    if (!a) continue;
    out.equivariant = out.equivariant && b && b->contains(*a);
  }
  return out;
}

}  // namespace polydiv
