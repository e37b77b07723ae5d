#include "polydiv/cox.hpp"

#include "polydiv/linalg.hpp"

#include <algorithm>
#include <set>

namespace polydiv {

QMatrix CoxData::embedding() const {
  const int k = class_rank(), n = rank();
  QMatrix out(basis_size(), k + n);
  out << to_q(split.kernel), to_q(ZMatrix(split.section.matrix.rightCols(n)));
  return out;
}

QVector CoxData::cosection(int i) const { return to_q(ZVector(split.cosection.matrix.col(i))); }

int CoxData::index_of(const VertexId& v) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == v) return static_cast<int>(i);
  throw Error(ErrorCode::InvalidInput, "(" + v.label + "," + to_string(v.vertex) + ") is not in V");
}

int CoxData::index_of_ray(const QVector& r) const {
  for (size_t i = 0; i < rays.size(); ++i)
    if (equal(rays[i], primitive_q(r))) return static_cast<int>(vertices.size() + i);
  throw Error(ErrorCode::InvalidInput, to_string(r) + " is not in R");
}

CoxData cox_sequence(const FanPtr& fan, const std::vector<std::string>& primes, const SplitOptions& options,
                     const CoxHypotheses& hypotheses) {
  if (!fan) throw Error(ErrorCode::InvalidInput, "no fan");
  const DivisorialFan& s = *fan;
  if (!s.contraction_free()) throw Error(ErrorCode::NotContractionFree, "the Cox sequence needs a contraction-free fan");
  if (primes.empty()) throw Error(ErrorCode::InvalidInput, "the set of primes is empty");
  std::set<std::string> distinct(primes.begin(), primes.end());
  if (distinct.size() != primes.size()) throw Error(ErrorCode::InvalidInput, "repeated prime");
  for (const auto& label : s.marked())
    if (!(s.slice(label) == s.tailfan()) && !distinct.count(label))
      throw Error(ErrorCode::InvalidInput, "the slice at " + label + " is nontrivial but " + label + " is not listed");

  CoxData cd;
  cd.fan = fan;
  cd.primes = primes;
  cd.hypotheses = hypotheses;
  const int p = static_cast<int>(primes.size()), n = s.rank();

  ZMatrix degrees(1, p);
  for (int i = 0; i < p; ++i) {
    s.base().require_label(primes[static_cast<size_t>(i)]);
    auto deg = s.base().degree_of(primes[static_cast<size_t>(i)]);
    if (!deg) throw Error(ErrorCode::NoDegreeMap, "no degree for " + primes[static_cast<size_t>(i)]);
    if (!is_integer(*deg) || *deg <= 0) throw Error(ErrorCode::InvalidInput, "degree of a prime must be a positive integer");
    degrees(0, i) = numerator(*deg);
  }
  Integer g = 0;
  for (int i = 0; i < p; ++i) g = gcd(g, degrees(0, i));
  if (g != 1) throw Error(ErrorCode::TorsionCokernel, "the degrees of the primes are not coprime");
  cd.quotient = ZMatrix(integer_kernel(degrees).transpose());

  InvariantPrimes ip = invariant_prime_divisors(s);
  for (const auto& label : primes) {
    auto it = ip.vertices.find(label);
    std::vector<QVector> vs = it != ip.vertices.end() ? it->second : s.tailfan().vertices();
    for (const auto& v : vs) {
      cd.vertices.push_back(VertexId{label, v});
      cd.mu.push_back(denominator_lcm(v));
    }
  }
  cd.rays = ip.rays;

  const int q = p - 1;
  ZMatrix m = ZMatrix::Zero(q + n, cd.basis_size());
  for (size_t j = 0; j < cd.vertices.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    auto at = std::find(primes.begin(), primes.end(), cd.vertices[j].label) - primes.begin();
    const Integer& mu = cd.mu[j];
    for (int i = 0; i < q; ++i) m(i, col) = mu * cd.quotient(i, at);
    ZVector v = to_z(QVector(cd.vertices[j].vertex * Rational(mu)));
    for (int i = 0; i < n; ++i) m(q + i, col) = v[i];
  }
  for (size_t j = 0; j < cd.rays.size(); ++j) {
    ZVector r = to_z(cd.rays[j]);
    for (int i = 0; i < n; ++i) m(q + i, static_cast<Eigen::Index>(cd.vertices.size() + j)) = r[i];
  }
  cd.pi = LatticeMap(m);

  SmithForm sf = smith_form(m);
  if (static_cast<int>(sf.invariant_factors.size()) < q + n)
    throw Error(ErrorCode::InvalidInput, "pi is not surjective over Q");
  for (const auto& f : sf.invariant_factors)
    if (f != 1) throw Error(ErrorCode::TorsionCokernel, "Cl(X) has torsion (invariant factor " + f.str() + ")");
  cd.split = smith_split(cd.pi, options);
  if (cd.class_rank() != cd.basis_size() - q - n)
    throw Error(ErrorCode::InvalidInput, "rank of Cl(X) does not match the sequence");
  return cd;
}

std::string vertex_label(const VertexId& v) { return "D(" + v.label + "," + to_string(v.vertex) + ")"; }
std::string ray_prime_label(const QVector& r) { return "D" + to_string(primitive_q(r)); }

PolyhedralDivisor cox_raw(const CoxData& cd) {
  std::vector<std::string> labels;
  std::map<std::string, Coefficient> coeffs;
  for (size_t i = 0; i < cd.vertices.size(); ++i) {
    labels.push_back(vertex_label(cd.vertices[i]));
    coeffs[labels.back()] = Polyhedron::point(cd.cosection(static_cast<int>(i)));
  }
  for (size_t j = 0; j < cd.rays.size(); ++j) {
    labels.push_back(ray_prime_label(cd.rays[j]));
    coeffs[labels.back()] = Polyhedron::point(cd.cosection(static_cast<int>(cd.vertices.size() + j)));
  }
  return PolyhedralDivisor(make_base(BaseVariety::labels(labels)), Cone::zero(cd.class_rank()), coeffs);
}

InvariantPDivisorOnFan cox_invariant(const CoxData& cd) {
  InvariantPDivisorOnFan d;
  d.fan = cd.fan;
  d.tail = Cone::zero(cd.class_rank());
  for (size_t i = 0; i < cd.vertices.size(); ++i)
    d.vertex_coeffs[cd.vertices[i]] = Polyhedron::point(QVector(cd.cosection(static_cast<int>(i)) / Rational(cd.mu[i])));
  for (size_t j = 0; j < cd.rays.size(); ++j)
    d.ray_coeffs[cd.rays[j]] = Polyhedron::point(cd.cosection(static_cast<int>(cd.vertices.size() + j)));
  return d;
}

CoxUpgrade cox_upgrade(const CoxData& cd) {
  CoxUpgrade out;
  out.divisor = upgrade_coefficients(cox_invariant(cd));

  const int b = cd.basis_size(), n = cd.rank();
  std::vector<QVector> positive;
  for (size_t j = 0; j < cd.rays.size(); ++j) positive.push_back(unit(b, static_cast<int>(cd.vertices.size() + j)));
  const QMatrix section = to_q(cd.split.section.matrix);
  for (size_t i = 0; i < cd.primes.size(); ++i) {
    QVector ebar = concat(to_q(ZVector(cd.quotient.col(static_cast<Eigen::Index>(i)))), zeros(n));
    QVector shift = section * ebar;
    std::vector<QVector> verts;
    for (size_t j = 0; j < cd.vertices.size(); ++j)
      if (cd.vertices[j].label == cd.primes[i])
        verts.push_back(QVector(unit(b, static_cast<int>(j)) / Rational(cd.mu[j]) - shift));
    out.second[cd.primes[i]] = Polyhedron::hull(b, verts, positive);
  }

  const QMatrix iota = cd.embedding();
  if (!(map_image(out.divisor.tail().polyhedron(), iota) == Polyhedron::hull(b, {zeros(b)}, positive)))
    throw Error(ErrorCode::FormsDisagree, "the two descriptions of the tail cone differ");
  for (const auto& [label, c] : out.second)
    if (!(map_image(*out.divisor.coefficient(label), iota) == c))
      throw Error(ErrorCode::FormsDisagree, "the two descriptions of the coefficient at " + label + " differ");
  return out;
}

CorrectionResult cox_correct(const CoxData& cd) { return correct_pic_z(cox_upgrade(cd).divisor); }

QVector divisor_class(const CoxData& cd, const QVector& x) {
  return QVector(to_q(cd.split.kernel).transpose() * x);
}

TInvariantDivisor class_representative(const CoxData& cd, const QVector& c) {
  QVector x = to_q(cd.split.cosection.matrix).transpose() * c;
  TInvariantDivisor d;
  d.fan = cd.fan;
  for (size_t i = 0; i < cd.vertices.size(); ++i)
    d.vertex_coeffs[cd.vertices[i]] = x[static_cast<Eigen::Index>(i)] / Rational(cd.mu[i]);
  for (size_t j = 0; j < cd.rays.size(); ++j) d.ray_coeffs[cd.rays[j]] = x[static_cast<Eigen::Index>(cd.vertices.size() + j)];
  return Rational(1) * d;
}

QMatrix coordinate_change(const CoxData& from, const CoxData& to) {
  if (from.pi.matrix != to.pi.matrix) throw Error(ErrorCode::InvalidInput, "splittings of different sequences");
  const int n = to.rank();
  QMatrix back(to.class_rank() + n, to.basis_size());
  back << to_q(to.split.cosection.matrix), to_q(ZMatrix(to.pi.matrix.bottomRows(n)));
  return back * from.embedding();
}

}  // namespace polydiv
