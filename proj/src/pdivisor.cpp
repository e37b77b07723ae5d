#include "polydiv/pdivisor.hpp"

#include "polydiv/linalg.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace polydiv {

PolyhedralDivisor::PolyhedralDivisor(BasePtr base, Cone tail, std::map<std::string, Coefficient> coefficients)
    : base_(std::move(base)), tail_(std::move(tail)) {
  if (!base_) throw Error(ErrorCode::InvalidInput, "polyhedral divisor without a base");
  omega_ = dual_cone(tail_);
  for (auto& [label, c] : coefficients) {
    base_->require_label(label);
    if (c) {
      if (c->ambient_dim() != rank()) throw Error(ErrorCode::AmbientMismatch, "coefficient of " + label);
      if (c->is_empty()) {
        c.reset();
      } else if (!(tail_cone(*c) == tail_)) {
        throw Error(ErrorCode::InvalidInput, "coefficient of " + label + " has tail " +
                                                 to_string(tail_cone(*c).polyhedron()) + ", expected " +
                                                 to_string(tail_.polyhedron()));
      } else if (*c == tail_.polyhedron()) {
        continue;
      }
    }
    coeffs_.emplace(label, std::move(c));
  }
}

Coefficient PolyhedralDivisor::coefficient(const std::string& label) const {
  auto it = coeffs_.find(label);
  if (it == coeffs_.end()) return tail_.polyhedron();
  return it->second;
}

std::vector<std::string> PolyhedralDivisor::off_locus() const {
  std::vector<std::string> out;
  for (const auto& [k, c] : coeffs_)
    if (!c) out.push_back(k);
  return out;
}

bool operator==(const PolyhedralDivisor& a, const PolyhedralDivisor& b) {
  if (!(a.tail() == b.tail())) return false;
  if (a.coefficients().size() != b.coefficients().size()) return false;
  for (const auto& [k, c] : a.coefficients()) {
    auto it = b.coefficients().find(k);
    if (it == b.coefficients().end()) return false;
    if (c.has_value() != it->second.has_value()) return false;
    if (c && !(*c == *it->second)) return false;
  }
  return true;
}

std::string to_string(const PolyhedralDivisor& d) {
  std::string s;
  for (const auto& [k, c] : d.coefficients()) {
    if (!s.empty()) s += " + ";
    s += (c ? to_string(*c) : std::string("empty")) + " (x) [" + k + "]";
  }
  return s.empty() ? "tail " + to_string(d.tail().polyhedron()) : s;
}

QDivisor evaluate(const PolyhedralDivisor& d, const QVector& u) {
  if (u.size() != d.rank()) throw Error(ErrorCode::AmbientMismatch, "weight of the wrong rank");
  if (!d.weight_cone().contains(u)) throw Error(ErrorCode::WeightOutsideCone, to_string(u));
  QDivisor out;
  for (const auto& [k, c] : d.coefficients()) {
    if (!c) {
      out.set(k, ExtRational::inf());
      continue;
    }
    auto m = c->min_pairing(u);
    out.set(k, ExtRational(*m));
  }
  return out;
}

namespace {

bool dominated(const QDivisor& lhs, const QDivisor& rhs) {
  std::set<std::string> labels;
  for (const auto& [k, v] : lhs.coefficients) labels.insert(k);
  for (const auto& [k, v] : rhs.coefficients) labels.insert(k);
  for (const auto& k : labels)
    if (!(lhs[k] <= rhs[k])) return false;
  return true;
}

}  // namespace

bool convexity_check(const Evaluation& eval, const std::vector<QVector>& weights) {
  std::vector<QDivisor> values;
  for (const auto& w : weights) values.push_back(eval(w));
  for (size_t i = 0; i < weights.size(); ++i)
    for (size_t j = i; j < weights.size(); ++j)
      if (!dominated(values[i] + values[j], eval(QVector(weights[i] + weights[j])))) return false;
  return true;
}

PolyhedralComplex weight_chambers(const PolyhedralDivisor& d) {
  const Polyhedron& omega = d.weight_cone().polyhedron();
  std::vector<PolyhedralComplex> fans;
  for (const auto& [k, c] : d.coefficients()) {
    if (!c) continue;
    std::vector<AffinePiece> pieces;
    for (const auto& v : c->vertices()) pieces.push_back({v, Rational(0)});
    fans.push_back(linearity_regions(pieces, omega));
  }
  if (fans.empty()) {
    PolyhedralComplex whole;
    whole.cells.push_back(omega);
    return whole;
  }
  return common_refinement(fans);
}

bool convexity_check(const PolyhedralDivisor& d, uint64_t seed) {
  std::vector<QVector> weights = d.weight_cone().generators();
  for (const auto& cell : weight_chambers(d).cells) {
    Cone c(cell);
    for (const auto& g : c.generators()) weights.push_back(g);
  }
  sort_unique(weights);
  std::vector<QVector> gens = d.weight_cone().generators();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(0, 4);
  for (int t = 0; t < 8 && !gens.empty(); ++t) {
    QVector u = zeros(d.rank());
    for (const auto& g : gens) u += Rational(coef(rng), 1 + coef(rng)) * g;
    weights.push_back(u);
  }
  return convexity_check([&](const QVector& u) { return evaluate(d, u); }, weights);
}

ProperReport is_proper(const PolyhedralDivisor& d) {
  const BaseVariety& base = d.base();
  if (base.kind() == BaseKind::Labels) throw Error(ErrorCode::UnsupportedBase, "properness over a labels-only base");
  ProperReport r;
  r.fulldim_weightcone = d.tail().is_pointed();
  if (!r.fulldim_weightcone) r.failures.push_back("weight cone is not full-dimensional");
  r.loc_semiprojective = locus_semiprojective(base, evaluate(d, zeros(d.rank())));
  if (!r.loc_semiprojective) r.failures.push_back("locus is not semiprojective");
  r.qcartier = r.semiample = r.big = true;
  for (const auto& cell : weight_chambers(d).cells) {
    Cone c(cell);
    for (const auto& u : c.generators()) {
      Positivity p = positivity(base, evaluate(d, u));
      if (!p.qcartier) {
        r.qcartier = false;
        r.failures.push_back("not Q-Cartier at u = " + to_string(u));
      }
      if (!p.semiample) {
        r.semiample = false;
        r.failures.push_back("not semiample at u = " + to_string(u));
      }
    }
    QVector inner = cell.relative_interior_point();
    if (!positivity(base, evaluate(d, inner)).big) {
      r.big = false;
      r.failures.push_back("not big at u = " + to_string(inner));
    }
  }
  return r;
}

Polyhedron degree_polyhedron(const PolyhedralDivisor& d) {
  if (!d.base().is_projective()) throw Error(ErrorCode::NoDegreeMap, "the base is not projective");
  Polyhedron sum = d.tail().polyhedron();
  for (const auto& [k, c] : d.coefficients()) {
    if (!c) throw Error(ErrorCode::EmptyCoefficient, k);
    auto deg = d.base().degree_of(k);
    if (!deg) throw Error(ErrorCode::NoDegreeMap, "no degree declared for " + k);
    sum = minkowski_sum(sum, scale(*deg, *c));
  }
  return sum;
}

QDivisor evaluate(const BaseVariety& base, const PrincipalPDivisor& f, const QVector& u) {
  QDivisor out;
  for (const auto& [v, fn] : f.terms) {
    Rational s = v.dot(u);
    for (const auto& [k, c] : divisor_of(base, fn).coefficients) out.set(k, ExtRational(out[k].value + s * c.value));
  }
  return out;
}

std::map<std::string, QVector> shifts(const BaseVariety& base, const PrincipalPDivisor& f) {
  std::map<std::string, QVector> out;
  for (const auto& [v, fn] : f.terms) {
    for (const auto& [k, c] : divisor_of(base, fn).coefficients) {
      auto it = out.find(k);
      if (it == out.end()) it = out.emplace(k, zeros(f.rank)).first;
      it->second += c.value * v;
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    if (is_zero(it->second))
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

PolyhedralDivisor as_polyhedral(BasePtr base, const PrincipalPDivisor& f, const Cone& tail) {
  std::map<std::string, Coefficient> coeffs;
  for (const auto& [k, v] : shifts(*base, f)) coeffs[k] = translate(tail.polyhedron(), v);
  return PolyhedralDivisor(std::move(base), tail, coeffs);
}

BaseMap BaseMap::identity(BasePtr base) {
  BaseMap m;
  m.source = m.target = base;
  for (const auto& l : base->named_labels()) m.pullbacks[l] = {{l, Rational(1)}};
  return m;
}

BaseMap BaseMap::toric(BasePtr source, BasePtr target, const LatticeMap& f) {
  if (source->kind() != BaseKind::Toric || target->kind() != BaseKind::Toric)
    throw Error(ErrorCode::UnsupportedBase, "toric base map between non-toric bases");
  const Fan& sf = source->fan();
  const Fan& tf = target->fan();
  if (f.source_rank() != sf.rank || f.target_rank() != tf.rank)
    throw Error(ErrorCode::AmbientMismatch, "base lattice map");
  BaseMap m;
  m.source = source;
  m.target = target;
  for (size_t i = 0; i < sf.rays.size(); ++i) {
    QVector w = f(to_q(sf.rays[i]));
    if (is_zero(w)) continue;
    auto carrier = tf.carrier(w);
    if (!carrier) throw Error(ErrorCode::IndeterminateBaseMap, "ray image " + to_string(w) + " outside the target fan");
    std::vector<QVector> gens;
    for (int j : *carrier) gens.push_back(to_q(tf.rays[static_cast<size_t>(j)]));
    if (rank_of(gens, tf.rank) != static_cast<Eigen::Index>(gens.size()))
      throw Error(ErrorCode::IndeterminateBaseMap, "non-simplicial target cone");
    auto lambda = solve<Rational>(cols_of(gens, tf.rank), w);
    for (size_t j = 0; j < carrier->size(); ++j) {
      Rational l = (*lambda)[static_cast<Eigen::Index>(j)];
      if (l != 0) m.pullbacks[target->ray_label((*carrier)[j])].push_back({source->ray_label(static_cast<int>(i)), l});
    }
  }
  for (const auto& dp : target->declared())
    if (source->declared_prime(dp.label)) m.pullbacks[dp.label].push_back({dp.label, Rational(1)});
  return m;
}

PolyhedralDivisor pullback(const PolyhedralDivisor& d, const PullbackTriple& phi) {
  const BaseMap& psi = phi.base_map;
  if (!psi.source || !psi.target) throw Error(ErrorCode::InvalidInput, "incomplete base map");
  if (phi.lattice_map.target_rank() != d.rank()) throw Error(ErrorCode::AmbientMismatch, "lattice map target");
  const QMatrix f = to_q(phi.lattice_map.matrix);
  // psi^*(D) + Div(f) at every source prime that receives something
  std::map<std::string, Coefficient> upstairs;
  for (const auto& [p, images] : psi.pullbacks) {
    Coefficient dp = d.coefficient(p);
    for (const auto& [q, m] : images) {
      psi.source->require_label(q);
      auto it = upstairs.find(q);
      if (it == upstairs.end()) it = upstairs.emplace(q, d.tail().polyhedron()).first;
      if (!it->second) continue;
      if (!dp) {
        it->second.reset();
        continue;
      }
      it->second = minkowski_sum(*it->second, scale(m, *dp));
    }
  }
  for (const auto& [q, v] : shifts(*psi.source, phi.shift)) {
    auto it = upstairs.find(q);
    if (it == upstairs.end()) it = upstairs.emplace(q, d.tail().polyhedron()).first;
    if (it->second) it->second = translate(*it->second, v);
  }
  Cone tail(preimage(d.tail().polyhedron(), f));
  std::map<std::string, Coefficient> coeffs;
  for (const auto& [q, c] : upstairs) {
    if (!c) {
      coeffs[q] = std::nullopt;
      continue;
    }
    Polyhedron pre = preimage(*c, f);
    if (pre.is_empty())
      coeffs[q] = std::nullopt;
    else
      coeffs[q] = pre;
  }
  return PolyhedralDivisor(psi.source, tail, coeffs);
}

std::string ray_label(const ZVector& r) { return "D" + to_string(to_q(r)); }

ToricDowngrade toric_downgrade(const Cone& delta, const LatticeMap& sub) {
  if (!delta.is_pointed()) throw Error(ErrorCode::InvalidInput, "toric downgrade needs a pointed cone");
  if (sub.target_rank() != delta.ambient_dim()) throw Error(ErrorCode::AmbientMismatch, "subtorus lattice map");
  SmithSplit split;
  try {
    split = smith_split(sub.transpose());
  } catch (const Error& e) {
    throw Error(ErrorCode::NotSplit, "the subtorus lattice is not a direct summand");
  }
  ToricDowngrade out;
  out.projection = to_q(split.kernel).transpose();
  out.retraction = to_q(split.section.matrix).transpose();
  const int base_rank = static_cast<int>(out.projection.rows());
  PolyhedralComplex image = chamber_complex(delta.polyhedron(), out.projection);
  Fan fan;
  if (base_rank == 0) {
    fan.rank = 0;
    fan.cones = {{}};
  } else {
    fan = Fan::from_complex(image);
  }
  std::vector<std::string> labels;
  for (const auto& r : fan.rays) labels.push_back(ray_label(r));
  out.base = make_base(BaseVariety::toric(fan, labels));
  Cone tail(map_fiber_slice(delta.polyhedron(), out.projection, zeros(base_rank), out.retraction));
  std::map<std::string, Coefficient> coeffs;
  for (size_t i = 0; i < fan.rays.size(); ++i) {
    Polyhedron c = map_fiber_slice(delta.polyhedron(), out.projection, to_q(fan.rays[i]), out.retraction);
    coeffs[labels[i]] = c.is_empty() ? Coefficient() : Coefficient(c);
  }
  out.divisor = PolyhedralDivisor(out.base, tail, coeffs);
  return out;
}

}  // namespace polydiv
