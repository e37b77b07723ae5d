#include "polydiv/polyhedra.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace polydiv {

namespace {

using Bits = boost::dynamic_bitset<>;

Rational dot(const QVector& a, const QVector& b) { return a.dot(b); }

QVector head(const QVector& v, int n) { return v.head(n); }

struct DDRay {
  QVector v;
  Bits tight;
};

Eigen::Index rank_of_rows(const std::vector<QVector>& cons, const Bits& sel, Eigen::Index width) {
  std::vector<QVector> rows;
  for (size_t i = sel.find_first(); i != Bits::npos; i = sel.find_next(i)) rows.push_back(cons[i]);
  return rank_of(rows, width);
}

}  // namespace

ConeGenerators double_description(int d, const std::vector<QVector>& ineqs, const std::vector<QVector>& eqs) {
  std::vector<QVector> cons;
  for (const auto& a : ineqs) cons.push_back(a);
  for (const auto& e : eqs) {
    cons.push_back(e);
    cons.push_back(-e);
  }
  const size_t k = cons.size();
  std::vector<QVector> lin;
  for (int i = 0; i < d; ++i) lin.push_back(unit(d, i));
  std::vector<DDRay> rays;

  for (size_t i = 0; i < k; ++i) {
    const QVector& a = cons[i];
    if (is_zero(a)) {
      for (auto& r : rays) r.tight.set(i);
      continue;
    }
    int p = -1;
    for (size_t j = 0; j < lin.size(); ++j)
      if (dot(a, lin[j]) != 0) {
        p = static_cast<int>(j);
        break;
      }
    if (p >= 0) {
      QVector lp = lin[p];
      Rational ap = dot(a, lp);
      if (ap < 0) {
        lp = -lp;
        ap = -ap;
      }
      std::vector<QVector> next;
      for (size_t j = 0; j < lin.size(); ++j) {
        if (static_cast<int>(j) == p) continue;
        QVector l = lin[j] - (dot(a, lin[j]) / ap) * lp;
        next.push_back(primitive_q(l));
      }
      for (auto& r : rays) {
        r.v = primitive_q(QVector(r.v - (dot(a, r.v) / ap) * lp));
        r.tight.set(i);
      }
      DDRay nr{primitive_q(lp), Bits(k)};
      for (size_t j = 0; j < i; ++j) nr.tight.set(j);
      lin = std::move(next);
      rays.push_back(std::move(nr));
      continue;
    }

    std::vector<Rational> s(rays.size());
    std::vector<size_t> pos, neg;
    std::vector<DDRay> kept;
    for (size_t j = 0; j < rays.size(); ++j) {
      s[j] = dot(a, rays[j].v);
      if (s[j] > 0) pos.push_back(j);
      if (s[j] < 0) neg.push_back(j);
    }
    if (neg.empty()) {
      for (size_t j = 0; j < rays.size(); ++j)
        if (s[j] == 0) rays[j].tight.set(i);
      continue;
    }
    const Eigen::Index target_rank = d - static_cast<Eigen::Index>(lin.size()) - 2;
    std::vector<DDRay> created;
    for (size_t pi : pos)
      for (size_t ni : neg) {
        Bits common = rays[pi].tight & rays[ni].tight;
        if (static_cast<Eigen::Index>(common.count()) < target_rank) continue;
        bool adjacent = true;
        for (size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r == pi || r == ni) continue;
          if (common.is_subset_of(rays[r].tight)) adjacent = false;
        }
        if (!adjacent) continue;
        if (rank_of_rows(cons, common, d) != target_rank) continue;
        QVector v = s[pi] * rays[ni].v - s[ni] * rays[pi].v;
        Bits t = common;
        t.set(i);
        created.push_back(DDRay{primitive_q(v), t});
      }
    for (size_t j = 0; j < rays.size(); ++j) {
      if (s[j] > 0) kept.push_back(rays[j]);
      if (s[j] == 0) {
        kept.push_back(rays[j]);
        kept.back().tight.set(i);
      }
    }
    for (auto& c : created) kept.push_back(std::move(c));
    rays = std::move(kept);
  }

  ConeGenerators out;
  for (auto& r : rays) out.rays.push_back(r.v);
  out.lineality = lin;
  return out;
}

// ---------------------------------------------------------------- Polyhedron

Polyhedron Polyhedron::empty(int dim) {
  Polyhedron p;
  p.ambient_ = dim;
  p.empty_ = true;
  p.vertices_.clear();
  p.rays_.clear();
  p.lineality_.clear();
  p.facets_.clear();
  p.equations_.clear();
  return p;
}

Polyhedron Polyhedron::whole_space(int dim) {
  std::vector<QVector> lin;
  for (int i = 0; i < dim; ++i) lin.push_back(unit(dim, i));
  return hull(dim, {zeros(dim)}, {}, lin);
}

Polyhedron Polyhedron::point(const QVector& p) { return hull(static_cast<int>(p.size()), {p}); }

Polyhedron Polyhedron::hull(int n, const std::vector<QVector>& vertices, const std::vector<QVector>& rays,
                            const std::vector<QVector>& lineality) {
  for (const auto& v : vertices)
    if (v.size() != n) throw Error(ErrorCode::AmbientMismatch, "vertex of wrong length");
  for (const auto& v : rays)
    if (v.size() != n) throw Error(ErrorCode::AmbientMismatch, "ray of wrong length");
  for (const auto& v : lineality)
    if (v.size() != n) throw Error(ErrorCode::AmbientMismatch, "lineality vector of wrong length");
  if (vertices.empty()) return empty(n);

  Polyhedron p;
  p.ambient_ = n;
  p.empty_ = false;
  p.vertices_ = vertices;
  for (const auto& r : rays)
    if (!is_zero(r)) p.rays_.push_back(r);
  p.lineality_ = lineality;
  p.canonicalize_generators();

  // facets from the dual cone of the homogenization
  std::vector<QVector> dual_ineqs, dual_eqs;
  for (const auto& v : p.vertices_) dual_ineqs.push_back(extend(v, 1));
  for (const auto& r : p.rays_) dual_ineqs.push_back(extend(r, 0));
  for (const auto& l : p.lineality_) dual_eqs.push_back(extend(l, 0));
  ConeGenerators dual = double_description(n + 1, dual_ineqs, dual_eqs);

  // equations a.x = -c, in rref then scaled to primitive integer normals
  std::vector<QVector> eq_rows;
  for (const auto& y : dual.lineality) eq_rows.push_back(y);
  if (!eq_rows.empty()) {
    QMatrix e = rref<Rational>(rows_of(eq_rows, n + 1)).matrix;
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      QVector row = e.row(i).transpose();
      QVector a = head(row, n);
      if (is_zero(a)) throw Error(ErrorCode::InvalidInput, "inconsistent equations in hull");
      ZVector z = primitive(a);
      Eigen::Index nz = 0;
      while (a[nz] == 0) ++nz;
      Rational factor = Rational(z[nz]) / a[nz];
      p.equations_.push_back(Halfspace{to_q(z), -row[n] * factor});
    }
  }
  std::vector<QVector> eq_normals;
  for (const auto& h : p.equations_) eq_normals.push_back(h.normal);
  QMatrix gram_inv;
  QMatrix emat;
  if (!eq_normals.empty()) {
    emat = rows_of(eq_normals, n);
    gram_inv = *inverse<Rational>(QMatrix(emat * emat.transpose()));
  }
  for (const auto& y : dual.rays) {
    QVector a = head(y, n);
    Rational b = -y[n];
    if (!eq_normals.empty()) {
      QVector lambda = gram_inv * (emat * a);
      a = a - emat.transpose() * lambda;
      for (size_t i = 0; i < p.equations_.size(); ++i) b -= lambda[static_cast<Eigen::Index>(i)] * p.equations_[i].offset;
    }
    if (is_zero(a)) continue;
    ZVector z = primitive(a);
    // positive factor mapping a onto z
    Eigen::Index nz = 0;
    while (a[nz] == 0) ++nz;
    Rational factor = Rational(z[nz]) / a[nz];
    p.facets_.push_back(Halfspace{to_q(z), b * factor});
  }
  std::sort(p.facets_.begin(), p.facets_.end(), [](const Halfspace& x, const Halfspace& y) {
    auto c = lex_compare(x.normal, y.normal);
    if (c != 0) return c < 0;
    return x.offset < y.offset;
  });
  p.facets_.erase(std::unique(p.facets_.begin(), p.facets_.end(),
                              [](const Halfspace& x, const Halfspace& y) {
                                return equal(x.normal, y.normal) && x.offset == y.offset;
                              }),
                  p.facets_.end());

  // rays may hide lineality, e.g. r and -r
  {
    std::vector<QVector> normals = eq_normals;
    for (const auto& h : p.facets_) normals.push_back(h.normal);
    std::vector<QVector> true_lin = cols_to_vectors(nullspace<Rational>(rows_of(normals, n)));
    if (true_lin.size() != p.lineality_.size()) {
      p.lineality_ = true_lin;
      p.canonicalize_generators();
    }
  }

  // drop redundant generators using the facet description
  const Eigen::Index lin_dim = static_cast<Eigen::Index>(p.lineality_.size());
  auto tight_rank = [&](const QVector& x, bool is_ray) {
    std::vector<QVector> rows = eq_normals;
    for (const auto& h : p.facets_)
      if (dot(h.normal, x) == (is_ray ? Rational(0) : h.offset)) rows.push_back(h.normal);
    return rank_of(rows, n);
  };
  std::vector<QVector> vs, rs;
  for (const auto& v : p.vertices_)
    if (tight_rank(v, false) == n - lin_dim) vs.push_back(v);
  for (const auto& r : p.rays_)
    if (tight_rank(r, true) == n - lin_dim - 1) rs.push_back(r);
  p.vertices_ = std::move(vs);
  p.rays_ = std::move(rs);
  return p;
}

void Polyhedron::canonicalize_generators() {
  const int n = ambient_;
  std::vector<QVector> lin;
  for (const auto& l : span_basis(lineality_, n)) lin.push_back(primitive_q(l));
  lineality_ = lin;
  ComplementProjector proj(lineality_, n);
  std::vector<QVector> vs, rs;
  for (const auto& v : vertices_) vs.push_back(proj(v));
  for (const auto& r : rays_) {
    QVector pr = proj(r);
    if (!is_zero(pr)) rs.push_back(primitive_q(pr));
  }
  sort_unique(vs);
  sort_unique(rs);
  vertices_ = std::move(vs);
  rays_ = std::move(rs);
}

Polyhedron Polyhedron::from_cone(int n, const ConeGenerators& g) {
  std::vector<QVector> vs, rs, ls;
  for (const auto& r : g.rays) {
    const Rational& t = r[n];
    if (t > 0)
      vs.push_back(QVector(head(r, n) / t));
    else
      rs.push_back(head(r, n));
  }
  for (const auto& l : g.lineality) ls.push_back(head(l, n));
  if (vs.empty()) return empty(n);
  return hull(n, vs, rs, ls);
}

Polyhedron Polyhedron::from_inequalities(int n, const std::vector<Halfspace>& ineqs,
                                         const std::vector<Halfspace>& eqs) {
  std::vector<QVector> hi, he;
  for (const auto& h : ineqs) {
    if (h.normal.size() != n) throw Error(ErrorCode::AmbientMismatch, "halfspace of wrong length");
    hi.push_back(extend(h.normal, -h.offset));
  }
  for (const auto& h : eqs) {
    if (h.normal.size() != n) throw Error(ErrorCode::AmbientMismatch, "equation of wrong length");
    he.push_back(extend(h.normal, -h.offset));
  }
  hi.push_back(unit(n + 1, n));
  return from_cone(n, double_description(n + 1, hi, he));
}

int Polyhedron::dim() const {
  if (empty_) return -1;
  return ambient_ - static_cast<int>(equations_.size());
}

bool Polyhedron::is_cone() const {
  return !empty_ && vertices_.size() == 1 && is_zero(vertices_[0]);
}

bool Polyhedron::contains(const QVector& x) const {
  if (empty_) return false;
  if (x.size() != ambient_) throw Error(ErrorCode::AmbientMismatch, "point of wrong length");
  for (const auto& h : equations_)
    if (dot(h.normal, x) != h.offset) return false;
  for (const auto& h : facets_)
    if (dot(h.normal, x) < h.offset) return false;
  return true;
}

bool Polyhedron::contains_in_relative_interior(const QVector& x) const {
  if (!contains(x)) return false;
  for (const auto& h : facets_)
    if (dot(h.normal, x) == h.offset) return false;
  return true;
}

bool Polyhedron::contains(const Polyhedron& other) const {
  if (other.empty_) return true;
  if (empty_) return false;
  if (other.ambient_ != ambient_) throw Error(ErrorCode::AmbientMismatch, "containment across ambients");
  for (const auto& v : other.vertices_)
    if (!contains(v)) return false;
  auto in_tail = [&](const QVector& r, bool both) {
    for (const auto& h : equations_)
      if (dot(h.normal, r) != 0) return false;
    for (const auto& h : facets_) {
      Rational s = dot(h.normal, r);
      if (s < 0 || (both && s != 0)) return false;
    }
    return true;
  };
  for (const auto& r : other.rays_)
    if (!in_tail(r, false)) return false;
  for (const auto& l : other.lineality_)
    if (!in_tail(l, true)) return false;
  return true;
}

QVector Polyhedron::relative_interior_point() const {
  if (empty_) throw Error(ErrorCode::InvalidInput, "relative interior of the empty polyhedron");
  QVector x = zeros(ambient_);
  for (const auto& v : vertices_) x += v;
  x /= Rational(static_cast<long>(vertices_.size()));
  for (const auto& r : rays_) x += r;
  return x;
}

std::optional<Rational> Polyhedron::min_pairing(const QVector& u) const {
  if (empty_) throw Error(ErrorCode::InvalidInput, "pairing with the empty polyhedron");
  for (const auto& r : rays_)
    if (dot(u, r) < 0) return std::nullopt;
  for (const auto& l : lineality_)
    if (dot(u, l) != 0) return std::nullopt;
  Rational best = dot(u, vertices_[0]);
  for (const auto& v : vertices_) best = std::min(best, dot(u, v));
  return best;
}

std::strong_ordering compare(const Polyhedron& a, const Polyhedron& b) {
  if (auto c = a.ambient_dim() <=> b.ambient_dim(); c != 0) return c;
  if (a.is_empty() != b.is_empty()) return a.is_empty() ? std::strong_ordering::less : std::strong_ordering::greater;
  auto list_cmp = [](const std::vector<QVector>& x, const std::vector<QVector>& y) {
    for (size_t i = 0; i < std::min(x.size(), y.size()); ++i)
      if (auto c = lex_compare(x[i], y[i]); c != 0) return c;
    return x.size() <=> y.size();
  };
  if (auto c = list_cmp(a.vertices(), b.vertices()); c != 0) return c;
  if (auto c = list_cmp(a.rays(), b.rays()); c != 0) return c;
  return list_cmp(a.lineality(), b.lineality());
}

std::string to_string(const Polyhedron& p) {
  if (p.is_empty()) return "empty";
  std::string s = "conv{";
  for (size_t i = 0; i < p.vertices().size(); ++i) s += (i ? "," : "") + to_string(p.vertices()[i]);
  s += "}";
  if (!p.rays().empty()) {
    s += "+pos{";
    for (size_t i = 0; i < p.rays().size(); ++i) s += (i ? "," : "") + to_string(p.rays()[i]);
    s += "}";
  }
  if (!p.lineality().empty()) {
    s += "+lin{";
    for (size_t i = 0; i < p.lineality().size(); ++i) s += (i ? "," : "") + to_string(p.lineality()[i]);
    s += "}";
  }
  return s;
}

// ---------------------------------------------------------------- Cone

Cone::Cone(const Polyhedron& p) : p_(p) {
  if (!p.is_cone()) throw Error(ErrorCode::InvalidInput, "polyhedron is not a cone: " + to_string(p));
}

Cone Cone::zero(int dim) { return Cone(Polyhedron::point(zeros(dim))); }
Cone Cone::whole_space(int dim) { return Cone(Polyhedron::whole_space(dim)); }

Cone Cone::from_rays(int dim, const std::vector<QVector>& rays, const std::vector<QVector>& lineality) {
  return Cone(Polyhedron::hull(dim, {zeros(dim)}, rays, lineality));
}

Cone Cone::from_halfspaces(int dim, const std::vector<QVector>& normals, const std::vector<QVector>& eqs) {
  std::vector<Halfspace> hs, es;
  for (const auto& a : normals) hs.push_back({a, 0});
  for (const auto& e : eqs) es.push_back({e, 0});
  return Cone(Polyhedron::from_inequalities(dim, hs, es));
}

std::vector<QVector> Cone::facet_normals() const {
  std::vector<QVector> out;
  for (const auto& h : p_.inequalities()) out.push_back(h.normal);
  return out;
}

std::vector<QVector> Cone::equation_normals() const {
  std::vector<QVector> out;
  for (const auto& h : p_.equations()) out.push_back(h.normal);
  return out;
}

std::vector<QVector> Cone::generators() const {
  std::vector<QVector> out = p_.rays();
  for (const auto& l : p_.lineality()) {
    out.push_back(l);
    out.push_back(-l);
  }
  return out;
}

Cone dual_cone(const Cone& c) { return Cone::from_halfspaces(c.ambient_dim(), c.rays(), c.lineality()); }

Cone tail_cone(const Polyhedron& p) {
  if (p.is_empty()) throw Error(ErrorCode::InvalidInput, "tail cone of the empty polyhedron");
  return Cone::from_rays(p.ambient_dim(), p.rays(), p.lineality());
}

Cone positive_hull(int dim, const std::vector<QVector>& gens) { return Cone::from_rays(dim, gens); }

// ---------------------------------------------------------------- operations

Polyhedron minkowski_sum(const Polyhedron& a, const Polyhedron& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw Error(ErrorCode::AmbientMismatch, "Minkowski sum");
  if (a.is_empty() || b.is_empty()) return Polyhedron::empty(a.ambient_dim());
  std::vector<QVector> vs, rs = a.rays(), ls = a.lineality();
  for (const auto& x : a.vertices())
    for (const auto& y : b.vertices()) vs.push_back(x + y);
  rs.insert(rs.end(), b.rays().begin(), b.rays().end());
  ls.insert(ls.end(), b.lineality().begin(), b.lineality().end());
  return Polyhedron::hull(a.ambient_dim(), vs, rs, ls);
}

Polyhedron operator+(const Polyhedron& a, const Polyhedron& b) { return minkowski_sum(a, b); }

Polyhedron intersect(const Polyhedron& a, const Polyhedron& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw Error(ErrorCode::AmbientMismatch, "intersection");
  if (a.is_empty() || b.is_empty()) return Polyhedron::empty(a.ambient_dim());
  std::vector<Halfspace> hs = a.inequalities(), es = a.equations();
  hs.insert(hs.end(), b.inequalities().begin(), b.inequalities().end());
  es.insert(es.end(), b.equations().begin(), b.equations().end());
  return Polyhedron::from_inequalities(a.ambient_dim(), hs, es);
}

Polyhedron scale(const Rational& lambda, const Polyhedron& p) {
  if (lambda < 0) throw Error(ErrorCode::InvalidInput, "negative scaling");
  if (p.is_empty()) return p;
  if (lambda == 0) return tail_cone(p).polyhedron();
  std::vector<QVector> vs;
  for (const auto& v : p.vertices()) vs.push_back(lambda * v);
  return Polyhedron::hull(p.ambient_dim(), vs, p.rays(), p.lineality());
}

Polyhedron translate(const Polyhedron& p, const QVector& t) {
  if (p.is_empty()) return p;
  std::vector<QVector> vs;
  for (const auto& v : p.vertices()) vs.push_back(v + t);
  return Polyhedron::hull(p.ambient_dim(), vs, p.rays(), p.lineality());
}

Polyhedron map_image(const Polyhedron& p, const QMatrix& a, const std::optional<QVector>& b) {
  if (a.cols() != p.ambient_dim()) throw Error(ErrorCode::AmbientMismatch, "map source");
  const int m = static_cast<int>(a.rows());
  if (p.is_empty()) return Polyhedron::empty(m);
  std::vector<QVector> vs, rs, ls;
  for (const auto& v : p.vertices()) vs.push_back(b ? QVector(a * v + *b) : QVector(a * v));
  for (const auto& r : p.rays()) rs.push_back(a * r);
  for (const auto& l : p.lineality()) ls.push_back(a * l);
  return Polyhedron::hull(m, vs, rs, ls);
}

Polyhedron map_image(const Polyhedron& p, const LatticeMap& f) { return map_image(p, to_q(f.matrix)); }

Polyhedron preimage(const Polyhedron& p, const QMatrix& a, const std::optional<QVector>& b) {
  if (a.rows() != p.ambient_dim()) throw Error(ErrorCode::AmbientMismatch, "map target");
  const int n = static_cast<int>(a.cols());
  if (p.is_empty()) return Polyhedron::empty(n);
  std::vector<Halfspace> hs, es;
  auto pull = [&](const Halfspace& h) {
    Rational off = h.offset;
    if (b) off -= dot(h.normal, *b);
    return Halfspace{QVector(a.transpose() * h.normal), off};
  };
  for (const auto& h : p.inequalities()) hs.push_back(pull(h));
  for (const auto& h : p.equations()) es.push_back(pull(h));
  return Polyhedron::from_inequalities(n, hs, es);
}

Polyhedron map_fiber_slice(const Polyhedron& p, const QMatrix& f, const QVector& target, const QMatrix& retraction) {
  if (p.is_empty()) return Polyhedron::empty(static_cast<int>(retraction.rows()));
  std::vector<Halfspace> es;
  for (Eigen::Index i = 0; i < f.rows(); ++i) es.push_back({QVector(f.row(i).transpose()), target[i]});
  Polyhedron fiber = intersect(p, Polyhedron::from_inequalities(p.ambient_dim(), {}, es));
  return map_image(fiber, retraction);
}

Polyhedron cross_section(const Polyhedron& p, const QVector& r, const Rational& h) {
  return intersect(p, Polyhedron::from_inequalities(p.ambient_dim(), {}, {{r, h}}));
}

Polyhedron product(const Polyhedron& p, const Polyhedron& q) {
  const int n = p.ambient_dim(), m = q.ambient_dim();
  if (p.is_empty() || q.is_empty()) return Polyhedron::empty(n + m);
  auto join = [&](const QVector& x, const QVector& y) {
    QVector r(n + m);
    r << x, y;
    return r;
  };
  std::vector<QVector> vs, rs, ls;
  for (const auto& x : p.vertices())
    for (const auto& y : q.vertices()) vs.push_back(join(x, y));
  for (const auto& r : p.rays()) rs.push_back(join(r, zeros(m)));
  for (const auto& r : q.rays()) rs.push_back(join(zeros(n), r));
  for (const auto& l : p.lineality()) ls.push_back(join(l, zeros(m)));
  for (const auto& l : q.lineality()) ls.push_back(join(zeros(n), l));
  return Polyhedron::hull(n + m, vs, rs, ls);
}

Polyhedron embed_at_height(const Polyhedron& p, const QVector& height) {
  return product(p, Polyhedron::point(height));
}

Polyhedron face(const Polyhedron& p, const QVector& u) {
  if (p.is_empty()) return p;
  auto m = p.min_pairing(u);
  if (!m) throw Error(ErrorCode::WeightOutsideCone, "functional unbounded below on polyhedron");
  std::vector<QVector> vs, rs;
  for (const auto& v : p.vertices())
    if (dot(u, v) == *m) vs.push_back(v);
  for (const auto& r : p.rays())
    if (dot(u, r) == 0) rs.push_back(r);
  return Polyhedron::hull(p.ambient_dim(), vs, rs, p.lineality());
}

namespace {

Polyhedron tight_face(const Polyhedron& p, const std::vector<const Halfspace*>& hs) {
  std::vector<QVector> vs, rs;
  for (const auto& v : p.vertices()) {
    bool ok = true;
    for (auto* h : hs)
      if (dot(h->normal, v) != h->offset) ok = false;
    if (ok) vs.push_back(v);
  }
  for (const auto& r : p.rays()) {
    bool ok = true;
    for (auto* h : hs)
      if (dot(h->normal, r) != 0) ok = false;
    if (ok) rs.push_back(r);
  }
  return Polyhedron::hull(p.ambient_dim(), vs, rs, p.lineality());
}

}  // namespace

std::vector<Polyhedron> all_faces(const Polyhedron& p) {
  std::set<Polyhedron, PolyhedronLess> seen;
  if (p.is_empty()) return {};
  std::vector<Polyhedron> queue{p};
  seen.insert(p);
  for (size_t i = 0; i < queue.size(); ++i) {
    Polyhedron f = queue[i];
    for (const auto& h : f.inequalities()) {
      Polyhedron g = tight_face(f, {&h});
      if (g.is_empty()) continue;
      if (seen.insert(g).second) queue.push_back(g);
    }
  }
  return std::vector<Polyhedron>(seen.begin(), seen.end());
}

bool is_face_of(const Polyhedron& f, const Polyhedron& p) {
  if (f.is_empty()) return true;
  if (!p.contains(f)) return false;
  std::vector<const Halfspace*> tight;
  for (const auto& h : p.inequalities()) {
    bool all = true;
    for (const auto& v : f.vertices())
      if (dot(h.normal, v) != h.offset) all = false;
    for (const auto& r : f.rays())
      if (dot(h.normal, r) != 0) all = false;
    for (const auto& l : f.lineality())
      if (dot(h.normal, l) != 0) all = false;
    if (all) tight.push_back(&h);
  }
  return tight_face(p, tight) == f;
}

std::vector<ZVector> lattice_points(const Polyhedron& p) {
  if (p.is_empty()) return {};
  if (!p.is_bounded()) throw Error(ErrorCode::InvalidInput, "lattice points of an unbounded polyhedron");
  const int n = p.ambient_dim();
  std::vector<Integer> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    Rational mn = p.vertices()[0][i], mx = mn;
    for (const auto& v : p.vertices()) {
      mn = std::min(mn, Rational(v[i]));
      mx = std::max(mx, Rational(v[i]));
    }
    lo[i] = ceil(mn);
    hi[i] = floor(mx);
    if (lo[i] > hi[i]) return {};
  }
  std::vector<ZVector> out;
  ZVector x(n);
  QVector q(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      if (p.contains(q)) out.push_back(x);
      return;
    }
    for (Integer c = lo[i]; c <= hi[i]; ++c) {
      x[i] = c;
      q[i] = Rational(c);
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

bool is_lattice_polyhedron(const Polyhedron& p) {
  for (const auto& v : p.vertices())
    if (denominator_lcm(v) != 1) return false;
  return true;
}

// ---------------------------------------------------------------- complexes

void PolyhedralComplex::normalize() {
  std::vector<Polyhedron> cs;
  for (auto& c : cells)
    if (!c.is_empty()) cs.push_back(c);
  std::sort(cs.begin(), cs.end(), PolyhedronLess{});
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::vector<Polyhedron> out;
  for (size_t i = 0; i < cs.size(); ++i) {
    bool inside = false;
    for (size_t j = 0; j < cs.size() && !inside; ++j)
      if (i != j && cs[j].contains(cs[i])) inside = true;
    if (!inside) out.push_back(cs[i]);
  }
  cells = std::move(out);
}

std::vector<QVector> PolyhedralComplex::vertices() const {
  std::vector<QVector> out;
  for (const auto& c : cells) out.insert(out.end(), c.vertices().begin(), c.vertices().end());
  sort_unique(out);
  return out;
}

std::vector<QVector> PolyhedralComplex::rays() const {
  std::vector<QVector> out;
  for (const auto& c : cells) out.insert(out.end(), c.rays().begin(), c.rays().end());
  sort_unique(out);
  return out;
}

bool operator==(const PolyhedralComplex& a, const PolyhedralComplex& b) {
  if (a.cells.size() != b.cells.size()) return false;
  for (size_t i = 0; i < a.cells.size(); ++i)
    if (!(a.cells[i] == b.cells[i])) return false;
  return true;
}

PolyhedralComplex common_refinement(const std::vector<PolyhedralComplex>& complexes) {
  if (complexes.empty()) return {};
  PolyhedralComplex acc = complexes[0];
  acc.normalize();
  for (size_t k = 1; k < complexes.size(); ++k) {
    const auto& other = complexes[k];
    PolyhedralComplex next;
    auto overlaps = [](const Polyhedron& c, const PolyhedralComplex& cx) {
      for (const auto& d : cx.cells) {
        Polyhedron i = intersect(c, d);
        if (!i.is_empty() && i.dim() == c.dim()) return true;
      }
      return false;
    };
    for (const auto& a : acc.cells)
      for (const auto& b : other.cells) {
        Polyhedron i = intersect(a, b);
        if (!i.is_empty()) next.cells.push_back(i);
      }
    // cells lying outside the other support are carried over unchanged
    for (const auto& a : acc.cells)
      if (!overlaps(a, other)) next.cells.push_back(a);
    for (const auto& b : other.cells)
      if (!overlaps(b, acc)) next.cells.push_back(b);
    next.normalize();
    acc = std::move(next);
  }
  return acc;
}

PolyhedralComplex linearity_regions(const std::vector<AffinePiece>& input, const Polyhedron& domain) {
  PolyhedralComplex out;
  if (domain.is_empty()) return out;
  std::vector<AffinePiece> pieces;
  for (const auto& p : input) {
    bool dup = false;
    for (const auto& q : pieces)
      if (equal(p.slope, q.slope) && p.constant == q.constant) dup = true;
    if (!dup) pieces.push_back(p);
  }
  const int n = domain.ambient_dim();
  for (size_t i = 0; i < pieces.size(); ++i) {
    std::vector<Halfspace> hs = domain.inequalities();
    bool possible = true;
    for (size_t j = 0; j < pieces.size(); ++j) {
      if (i == j) continue;
      QVector a = pieces[j].slope - pieces[i].slope;
      Rational b = pieces[i].constant - pieces[j].constant;
      if (is_zero(a)) {
        if (b > 0) possible = false;
        continue;
      }
      hs.push_back({a, b});
    }
    if (!possible) continue;
    Polyhedron r = Polyhedron::from_inequalities(n, hs, domain.equations());
    if (!r.is_empty() && r.dim() == domain.dim()) out.cells.push_back(r);
  }
  out.normalize();
  return out;
}

PolyhedralComplex chamber_complex(const Polyhedron& p, const QMatrix& a) {
  PolyhedralComplex out;
  if (p.is_empty()) return out;
  Polyhedron q = map_image(p, a);
  const int k = q.dim();
  std::set<Polyhedron, PolyhedronLess> images;
  for (const auto& f : all_faces(p)) {
    Polyhedron g = map_image(f, a);
    if (g.dim() == k) images.insert(g);
  }
  std::vector<Halfspace> hyperplanes;
  for (const auto& g : images)
    for (const auto& h : g.inequalities()) {
      bool dup = false;
      for (const auto& e : hyperplanes)
        if (equal(e.normal, h.normal) && e.offset == h.offset) dup = true;
      if (!dup) hyperplanes.push_back(h);
    }
  std::vector<Polyhedron> cells{q};
  for (const auto& h : hyperplanes) {
    std::vector<Polyhedron> next;
    for (const auto& c : cells) {
      Polyhedron plus = intersect(c, Polyhedron::from_inequalities(q.ambient_dim(), {h}));
      Polyhedron minus = intersect(c, Polyhedron::from_inequalities(q.ambient_dim(), {{-h.normal, -h.offset}}));
      if (!plus.is_empty() && plus.dim() == k && !minus.is_empty() && minus.dim() == k) {
        next.push_back(plus);
        next.push_back(minus);
      } else {
        next.push_back(c);
      }
    }
    cells = std::move(next);
  }
  for (const auto& c : cells) {
    QVector x = c.relative_interior_point();
    Polyhedron chamber;
    bool first = true;
    for (const auto& g : images)
      if (g.contains(x)) {
        chamber = first ? g : intersect(chamber, g);
        first = false;
      }
    if (!first) out.cells.push_back(chamber);
  }
  out.normalize();
  return out;
}

bool is_polyhedral_complex(const std::vector<Polyhedron>& cells) {
  for (size_t i = 0; i < cells.size(); ++i)
    for (size_t j = i + 1; j < cells.size(); ++j) {
      Polyhedron x = intersect(cells[i], cells[j]);
      if (x.is_empty()) continue;
      if (!is_face_of(x, cells[i]) || !is_face_of(x, cells[j])) return false;
    }
  return true;
}

}  // namespace polydiv
