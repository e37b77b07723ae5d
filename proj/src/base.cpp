#include "polydiv/base.hpp"

#include "polydiv/lattice.hpp"
#include "polydiv/linalg.hpp"

#include <algorithm>
#include <set>

namespace polydiv {

ExtRational QDivisor::operator[](const std::string& label) const {
  auto it = coefficients.find(label);
  return it == coefficients.end() ? ExtRational(0) : it->second;
}

void QDivisor::set(const std::string& label, const ExtRational& c) {
  if (c.is_finite() && c.value == 0)
    coefficients.erase(label);
  else
    coefficients[label] = c;
}

bool QDivisor::is_finite() const {
  return std::all_of(coefficients.begin(), coefficients.end(), [](const auto& kv) { return kv.second.is_finite(); });
}

bool operator==(const QDivisor& a, const QDivisor& b) {
  for (const auto& [k, v] : a.coefficients)
    if (!(b[k] == v)) return false;
  for (const auto& [k, v] : b.coefficients)
    if (!(a[k] == v)) return false;
  return true;
}

QDivisor operator+(const QDivisor& a, const QDivisor& b) {
  QDivisor out = a;
  for (const auto& [k, v] : b.coefficients) out.set(k, a[k] + v);
  return out;
}

QDivisor operator*(const Rational& s, const QDivisor& d) {
  QDivisor out;
  for (const auto& [k, v] : d.coefficients) out.set(k, s * v);
  return out;
}

QDivisor round_down(const QDivisor& d) {
  QDivisor out;
  for (const auto& [k, v] : d.coefficients) out.set(k, v.infinite ? v : ExtRational(Rational(floor(v.value))));
  return out;
}

std::string to_string(const QDivisor& d) {
  if (d.coefficients.empty()) return "0";
  std::string s;
  for (const auto& [k, v] : d.coefficients) {
    if (!s.empty()) s += " + ";
    s += to_string(v) + "*[" + k + "]";
  }
  return s;
}

// fans

Fan Fan::from_complex(const PolyhedralComplex& cones) {
  Fan f;
  if (cones.cells.empty()) return f;
  f.rank = cones.cells.front().ambient_dim();
  for (const auto& r : cones.rays()) f.rays.push_back(primitive(r));
  for (const auto& c : cones.cells) {
    if (!c.is_pointed()) throw Error(ErrorCode::InvalidInput, "fan cones must be pointed");
    std::vector<int> idx;
    for (const auto& r : c.rays()) idx.push_back(*f.ray_index(primitive(r)));
    std::sort(idx.begin(), idx.end());
    f.cones.push_back(idx);
  }
  return f;
}

Cone Fan::cone(size_t i) const {
  std::vector<QVector> gens;
  for (int r : cones.at(i)) gens.push_back(to_q(rays[static_cast<size_t>(r)]));
  return Cone::from_rays(rank, gens);
}

std::optional<int> Fan::ray_index(const ZVector& r) const {
  for (size_t i = 0; i < rays.size(); ++i)
    if (rays[i] == r) return static_cast<int>(i);
  return std::nullopt;
}

namespace {

struct Wall {
  size_t cone;
  QVector interior;
};

std::vector<Wall> walls(const Fan& f) {
  std::vector<Wall> out;
  for (size_t i = 0; i < f.cones.size(); ++i) {
    Cone c = f.cone(i);
    for (const auto& a : c.facet_normals()) {
      QVector p = zeros(f.rank);
      for (int r : f.cones[i]) {
        QVector v = to_q(f.rays[static_cast<size_t>(r)]);
        if (a.dot(v) == 0) p += v;
      }
      out.push_back({i, p});
    }
  }
  return out;
}

bool covered_elsewhere(const Fan& f, const Wall& w) {
  for (size_t j = 0; j < f.cones.size(); ++j)
    if (j != w.cone && f.cone(j).contains(w.interior)) return true;
  return false;
}

}  // namespace

bool Fan::is_complete() const {
  if (cones.empty()) return rank == 0;
  for (size_t i = 0; i < cones.size(); ++i)
    if (cone(i).dim() != rank) return false;
  for (const auto& w : walls(*this))
    if (!covered_elsewhere(*this, w)) return false;
  return true;
}

bool Fan::has_convex_support() const {
  if (cones.empty()) return true;
  std::vector<QVector> all;
  for (const auto& c : cones)
    for (int r : c) all.push_back(to_q(rays[static_cast<size_t>(r)]));
  Cone hull = positive_hull(rank, all);
  for (size_t i = 0; i < cones.size(); ++i)
    if (cone(i).dim() != hull.dim()) return false;
  for (const auto& w : walls(*this)) {
    if (covered_elsewhere(*this, w)) continue;
    if (hull.polyhedron().contains_in_relative_interior(w.interior)) return false;
  }
  return true;
}

bool Fan::is_simplicial() const {
  for (const auto& c : cones) {
    std::vector<QVector> vs;
    for (int r : c) vs.push_back(to_q(rays[static_cast<size_t>(r)]));
    if (rank_of(vs, rank) != static_cast<Eigen::Index>(vs.size())) return false;
  }
  return true;
}

bool Fan::is_smooth() const {
  if (!is_simplicial()) return false;
  for (const auto& c : cones) {
    if (c.empty()) continue;
    ZMatrix m(rank, static_cast<Eigen::Index>(c.size()));
    for (size_t j = 0; j < c.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = rays[static_cast<size_t>(c[j])];
    for (const auto& d : smith_form(m).invariant_factors)
      if (d != 1) return false;
  }
  return true;
}

std::optional<std::vector<int>> Fan::carrier(const QVector& x) const {
  for (size_t i = 0; i < cones.size(); ++i) {
    Cone c = cone(i);
    if (!c.contains(x)) continue;
    std::vector<QVector> tight;
    for (const auto& a : c.facet_normals())
      if (a.dot(x) == 0) tight.push_back(a);
    std::vector<int> out;
    for (int r : cones[i]) {
      QVector v = to_q(rays[static_cast<size_t>(r)]);
      if (std::all_of(tight.begin(), tight.end(), [&](const QVector& a) { return a.dot(v) == 0; })) out.push_back(r);
    }
    return out;
  }
  return std::nullopt;
}

// rational functions

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  RationalFunction out;
  out.zero = a.zero || b.zero;
  if (a.character.size() == 0)
    out.character = b.character;
  else if (b.character.size() == 0)
    out.character = a.character;
  else
    out.character = a.character + b.character;
  out.factors = a.factors;
  for (const auto& [k, e] : b.factors) {
    Integer s = out.factors[k] + e;
    if (s == 0)
      out.factors.erase(k);
    else
      out.factors[k] = s;
  }
  return out;
}

RationalFunction power(const RationalFunction& f, const Integer& e) {
  RationalFunction out = f;
  if (out.character.size() != 0) out.character *= e;
  for (auto it = out.factors.begin(); it != out.factors.end();) {
    it->second *= e;
    if (it->second == 0)
      it = out.factors.erase(it);
    else
      ++it;
  }
  return out;
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
  if (a.zero != b.zero) return false;
  auto ca = a.character, cb = b.character;
  if (ca.size() == 0 && cb.size() != 0) ca = ZVector::Zero(cb.size());
  if (cb.size() == 0 && ca.size() != 0) cb = ZVector::Zero(ca.size());
  return ca == cb && a.factors == b.factors;
}

std::string to_string(const RationalFunction& f) {
  if (f.zero) return "0";
  std::string s;
  if (f.character.size() != 0 && !f.character.isZero()) s = "chi^" + to_string(to_q(f.character));
  for (const auto& [k, e] : f.factors) {
    if (!s.empty()) s += "*";
    s += "f[" + k + "]^" + e.str();
  }
  return s.empty() ? "1" : s;
}

// base varieties

std::string point_label(const ExtRational& p) { return to_string(p); }

namespace {

std::optional<ExtRational> parse_point(const std::string& label) {
  if (label == "inf") return ExtRational::inf();
  try {
    Rational q = parse_rational(label);
    if (to_string(q) != label) return std::nullopt;
    return ExtRational(q);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

BaseVariety BaseVariety::projective_line() { return BaseVariety(); }

BaseVariety BaseVariety::open_in_projective_line(const std::vector<ExtRational>& removed) {
  if (removed.empty()) throw Error(ErrorCode::InvalidInput, "an open subset of P^1 must remove at least one point");
  BaseVariety b;
  b.kind_ = BaseKind::OpenInProjectiveLine;
  b.removed_ = removed;
  std::sort(b.removed_.begin(), b.removed_.end());
  b.removed_.erase(std::unique(b.removed_.begin(), b.removed_.end()), b.removed_.end());
  return b;
}

BaseVariety BaseVariety::toric(Fan fan, std::vector<std::string> ray_labels, std::vector<DeclaredPrime> declared,
                               std::map<std::string, Rational> degrees) {
  if (ray_labels.size() != fan.rays.size()) throw Error(ErrorCode::InvalidInput, "one label per fan ray is required");
  BaseVariety b;
  b.kind_ = BaseKind::Toric;
  b.fan_ = std::move(fan);
  b.ray_labels_ = std::move(ray_labels);
  b.declared_ = std::move(declared);
  b.degrees_ = std::move(degrees);
  std::set<std::string> seen;
  for (const auto& l : b.ray_labels_) b.named_.push_back(l);
  for (const auto& d : b.declared_) {
    b.named_.push_back(d.label);
    for (const auto& [k, w] : d.class_rep)
      if (!b.ray_of(k)) throw Error(ErrorCode::InvalidInput, "class of " + d.label + " uses unknown ray label " + k);
  }
  for (const auto& l : b.named_)
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidInput, "duplicate prime divisor label " + l);
  for (const auto& [k, deg] : b.degrees_) {
    if (!seen.count(k)) throw Error(ErrorCode::InvalidInput, "degree given for unknown label " + k);
    if (deg < 0) throw Error(ErrorCode::InvalidInput, "negative degree for " + k);
  }
  return b;
}

BaseVariety BaseVariety::labels(std::vector<std::string> labels) {
  BaseVariety b;
  b.kind_ = BaseKind::Labels;
  b.named_ = std::move(labels);
  return b;
}

BasePtr make_base(BaseVariety b) { return std::make_shared<const BaseVariety>(std::move(b)); }

bool BaseVariety::is_projective() const {
  switch (kind_) {
    case BaseKind::ProjectiveLine: return true;
    case BaseKind::Toric: return fan_.is_complete();
    default: return false;
  }
}

bool BaseVariety::is_affine() const {
  switch (kind_) {
    case BaseKind::OpenInProjectiveLine: return true;
    case BaseKind::Toric: return fan_.cones.size() <= 1;
    default: return false;
  }
}

bool BaseVariety::has_label(const std::string& label) const {
  if (is_curve()) {
    auto p = parse_point(label);
    if (!p) return false;
    return std::find(removed_.begin(), removed_.end(), *p) == removed_.end();
  }
  return std::find(named_.begin(), named_.end(), label) != named_.end();
}

void BaseVariety::require_label(const std::string& label) const {
  if (!has_label(label)) throw Error(ErrorCode::InvalidInput, "'" + label + "' is not a prime divisor of the base");
}

std::optional<Rational> BaseVariety::degree_of(const std::string& label) const {
  if (kind_ == BaseKind::ProjectiveLine) return has_label(label) ? std::optional<Rational>(1) : std::nullopt;
  auto it = degrees_.find(label);
  if (it == degrees_.end()) return std::nullopt;
  return it->second;
}

std::optional<ExtRational> BaseVariety::point_of(const std::string& label) const {
  if (!is_curve()) return std::nullopt;
  return parse_point(label);
}

std::optional<int> BaseVariety::ray_of(const std::string& label) const {
  for (size_t i = 0; i < ray_labels_.size(); ++i)
    if (ray_labels_[i] == label) return static_cast<int>(i);
  return std::nullopt;
}

const DeclaredPrime* BaseVariety::declared_prime(const std::string& label) const {
  for (const auto& d : declared_)
    if (d.label == label) return &d;
  return nullptr;
}

// operations

ExtRational degree(const BaseVariety& base, const QDivisor& d) {
  if (!base.is_projective()) throw Error(ErrorCode::NoDegreeMap, "the base is not projective");
  ExtRational total(0);
  for (const auto& [k, c] : d.coefficients) {
    base.require_label(k);
    auto deg = base.degree_of(k);
    if (!deg) throw Error(ErrorCode::NoDegreeMap, "no degree declared for " + k);
    if (c.infinite) {
      if (*deg != 0) total = ExtRational::inf();
      continue;
    }
    total = total + ExtRational(c.value * *deg);
  }
  return total;
}

Integer order_along(const BaseVariety& base, const RationalFunction& f, const std::string& label) {
  if (f.zero) throw Error(ErrorCode::ZeroFunction, "order of the zero function");
  base.require_label(label);
  if (base.is_curve()) {
    auto p = *base.point_of(label);
    if (p.is_finite()) {
      auto it = f.factors.find(label);
      return it == f.factors.end() ? Integer(0) : it->second;
    }
    Integer s = 0;
    for (const auto& [k, e] : f.factors) s += e;
    return -s;
  }
  if (base.kind() != BaseKind::Toric) throw Error(ErrorCode::UnsupportedBase, "orders need a curve or toric base");
  if (auto r = base.ray_of(label)) {
    Integer ord = 0;
    if (f.character.size() != 0) ord = base.fan().rays[static_cast<size_t>(*r)].dot(f.character);
    for (const auto& [k, e] : f.factors) {
      const DeclaredPrime* dp = base.declared_prime(k);
      if (!dp) throw Error(ErrorCode::InvalidInput, "factor " + k + " is not a declared prime");
      auto w = dp->class_rep.find(label);
      if (w != dp->class_rep.end()) ord -= e * w->second;
    }
    return ord;
  }
  auto it = f.factors.find(label);
  return it == f.factors.end() ? Integer(0) : it->second;
}

QDivisor divisor_of(const BaseVariety& base, const RationalFunction& f) {
  QDivisor out;
  std::vector<std::string> labels;
  if (base.is_curve()) {
    for (const auto& [k, e] : f.factors) labels.push_back(k);
    labels.push_back("inf");
  } else {
    labels = base.named_labels();
  }
  for (const auto& l : labels) {
    if (!base.has_label(l)) continue;
    out.set(l, ExtRational(Rational(order_along(base, f, l))));
  }
  return out;
}

QDivisor invariant_representative(const BaseVariety& base, const QDivisor& d) {
  if (base.kind() != BaseKind::Toric) return d;
  QDivisor out;
  for (const auto& [k, c] : d.coefficients) {
    base.require_label(k);
    if (base.ray_of(k)) {
      out.set(k, out[k] + c);
      continue;
    }
    if (c.infinite) throw Error(ErrorCode::UnsupportedBase, "inf coefficient on the non-invariant prime " + k);
    for (const auto& [r, w] : base.declared_prime(k)->class_rep) out.set(r, out[r] + ExtRational(c.value * w));
  }
  return out;
}

namespace {

SectionBasis curve_sections(const BaseVariety& base, const QDivisor& d, const SectionOptions& options) {
  SectionBasis out;
  std::map<std::string, Integer> bound;  // n_P: allowed pole order
  for (const auto& [k, c] : d.coefficients) {
    base.require_label(k);
    if (c.infinite) {
      bound[k] = options.pole_bound;
      out.truncated = true;
    } else {
      bound[k] = floor(c.value);
    }
  }
  for (const auto& p : base.removed_points()) {
    bound[point_label(p)] = options.pole_bound;
    out.truncated = true;
  }
  Integer deg = 0;
  for (const auto& [k, n] : bound) deg += n;
  if (deg < 0) return out;
  RationalFunction g;
  for (const auto& [k, n] : bound)
    if (k != "inf" && n != 0) g.factors[k] = -n;
  for (Integer j = 0; j <= deg; ++j) out.basis.push_back(g * power(RationalFunction::x(), j));
  return out;
}

std::vector<Halfspace> section_inequalities(const BaseVariety& base, const QDivisor& inv, const Fan& fan) {
  std::vector<Halfspace> hs;
  for (size_t i = 0; i < fan.rays.size(); ++i) {
    const auto& label = base.ray_label(static_cast<int>(i));
    ExtRational c = inv[label];
    if (c.infinite) continue;
    hs.push_back({to_q(fan.rays[i]), Rational(-c.value)});
  }
  return hs;
}

}  // namespace

SectionBasis global_sections(const BaseVariety& base, const QDivisor& d, const SectionOptions& options) {
  if (base.is_curve()) return curve_sections(base, d, options);
  if (base.kind() != BaseKind::Toric) throw Error(ErrorCode::UnsupportedBase, "sections need a curve or toric base");
  for (const auto& [k, c] : d.coefficients) {
    base.require_label(k);
    if (!base.ray_of(k)) throw Error(ErrorCode::UnsupportedBase, "sections of a non-invariant divisor on a toric base");
  }
  const int n = base.fan().rank;
  Polyhedron p = Polyhedron::from_inequalities(n, section_inequalities(base, d, base.fan()));
  SectionBasis out;
  if (!p.is_bounded()) {
    out.truncated = true;
    std::vector<Halfspace> box;
    for (int i = 0; i < n; ++i) {
      box.push_back({unit(n, i), Rational(-options.box)});
      box.push_back({QVector(-unit(n, i)), Rational(-options.box)});
    }
    p = intersect(p, Polyhedron::from_inequalities(n, box));
  }
  for (const auto& m : lattice_points(p)) out.basis.push_back(RationalFunction{m, {}, false});
  return out;
}

std::optional<RationalFunction> is_principal(const BaseVariety& base, const QDivisor& d) {
  for (const auto& [k, c] : d.coefficients) {
    base.require_label(k);
    if (c.infinite) throw Error(ErrorCode::InvalidInput, "principality of a divisor with an inf coefficient");
    if (!is_integer(c.value)) throw Error(ErrorCode::NonIntegral, "coefficient of " + k + " is not an integer");
  }
  if (base.is_curve()) {
    RationalFunction f;
    Integer total = 0;
    for (const auto& [k, c] : d.coefficients) {
      Integer e = boost::multiprecision::numerator(c.value);
      total += e;
      if (k != "inf") f.factors[k] = e;
    }
    if (total == 0) return f;
    if (base.kind() == BaseKind::ProjectiveLine) return std::nullopt;
    const auto& removed = base.removed_points();
    // the balancing order goes to a removed point
    if (std::find(removed.begin(), removed.end(), ExtRational::inf()) != removed.end()) return f;
    f.factors[point_label(removed.front())] -= total;
    return f;
  }
  if (base.kind() != BaseKind::Toric) throw Error(ErrorCode::UnsupportedBase, "principality needs a curve or toric base");
  const Fan& fan = base.fan();
  QDivisor inv = invariant_representative(base, d);
  ZMatrix v(static_cast<Eigen::Index>(fan.rays.size()), fan.rank);
  ZVector c(static_cast<Eigen::Index>(fan.rays.size()));
  for (size_t i = 0; i < fan.rays.size(); ++i) {
    v.row(static_cast<Eigen::Index>(i)) = fan.rays[i].transpose();
    c[static_cast<Eigen::Index>(i)] = boost::multiprecision::numerator(inv[base.ray_label(static_cast<int>(i))].value);
  }
  auto m = solve_integer(v, c);
  if (!m) return std::nullopt;
  RationalFunction f{*m, {}, false};
  for (const auto& [k, e] : d.coefficients)
    if (!base.ray_of(k)) f.factors[k] = boost::multiprecision::numerator(e.value);
  return f;
}

Fan locus_fan(const BaseVariety& base, const QDivisor& d) {
  if (base.kind() != BaseKind::Toric) throw Error(ErrorCode::UnsupportedBase, "locus fan of a non-toric base");
  const Fan& fan = base.fan();
  QDivisor inv = invariant_representative(base, d);
  std::set<int> bad;
  for (size_t i = 0; i < fan.rays.size(); ++i)
    if (inv[base.ray_label(static_cast<int>(i))].infinite) bad.insert(static_cast<int>(i));
  Fan out;
  out.rank = fan.rank;
  out.rays = fan.rays;
  std::set<std::vector<int>> cones;
  for (size_t i = 0; i < fan.cones.size(); ++i) {
    const auto& c = fan.cones[i];
    if (std::none_of(c.begin(), c.end(), [&](int r) { return bad.count(r); })) {
      cones.insert(c);
      continue;
    }
    for (const auto& face : all_faces(fan.cone(i).polyhedron())) {
      std::vector<int> idx;
      bool ok = true;
      for (const auto& r : face.rays()) {
        int j = *fan.ray_index(primitive(r));
        if (bad.count(j)) ok = false;
        idx.push_back(j);
      }
      std::sort(idx.begin(), idx.end());
      if (ok) cones.insert(idx);
    }
  }
  // keep maximal cones only
  for (const auto& c : cones) {
    bool maximal = true;
    for (const auto& other : cones)
      if (other != c && std::includes(other.begin(), other.end(), c.begin(), c.end())) maximal = false;
    if (maximal) out.cones.push_back(c);
  }
  return out;
}

bool is_semiprojective(const BaseVariety& base) {
  if (base.is_curve()) return true;
  if (base.kind() == BaseKind::Toric) return base.fan().has_convex_support();
  return false;
}

bool locus_semiprojective(const BaseVariety& base, const QDivisor& d) {
  if (base.is_curve()) return true;
  if (base.kind() == BaseKind::Toric) return locus_fan(base, d).has_convex_support();
  throw Error(ErrorCode::UnsupportedBase, "semiprojectivity of a labels-only base");
}

Positivity positivity(const BaseVariety& base, const QDivisor& d) {
  for (const auto& [k, c] : d.coefficients) base.require_label(k);
  if (base.kind() == BaseKind::OpenInProjectiveLine) return {true, true, true};
  if (base.kind() == BaseKind::ProjectiveLine) {
    if (!d.is_finite()) return {true, true, true};
    Rational deg = degree(base, d).value;
    return {true, deg >= 0, deg > 0};
  }
  if (base.kind() != BaseKind::Toric) throw Error(ErrorCode::UnsupportedBase, "positivity on a labels-only base");
  QDivisor inv = invariant_representative(base, d);
  Fan fan = locus_fan(base, inv);
  std::vector<Halfspace> all;
  for (size_t i = 0; i < fan.rays.size(); ++i) {
    ExtRational c = inv[base.ray_label(static_cast<int>(i))];
    if (c.infinite) continue;
    all.push_back({to_q(fan.rays[i]), Rational(-c.value)});
  }
  Positivity out{true, true, true};
  for (const auto& cone : fan.cones) {
    std::vector<Halfspace> eqs;
    for (int r : cone) eqs.push_back({to_q(fan.rays[static_cast<size_t>(r)]), Rational(-inv[base.ray_label(r)].value)});
    if (Polyhedron::from_inequalities(fan.rank, {}, eqs).is_empty()) {
      out.qcartier = false;
      out.semiample = false;
    } else if (Polyhedron::from_inequalities(fan.rank, all, eqs).is_empty()) {
      out.semiample = false;
    }
  }
  out.big = Polyhedron::from_inequalities(fan.rank, all).dim() == fan.rank;
  return out;
}

}  // namespace polydiv
