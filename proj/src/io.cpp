#include "polydiv/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace polydiv::io {

namespace {

std::pair<int, int> line_column(const std::string& text, size_t offset) {
  int line = 1, col = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// walks a text that nlohmann has already accepted
class PositionWalker {
 public:
  explicit PositionWalker(const std::string& text) : text_(text) {}

  Positions run() {
    value("");
    return std::move(out_);
  }

 private:
  void skip_ws() {
    while (i_ < text_.size() && (text_[i_] == ' ' || text_[i_] == '\t' || text_[i_] == '\n' || text_[i_] == '\r')) ++i_;
  }

  std::string string_token() {
    size_t start = i_++;
    while (i_ < text_.size() && text_[i_] != '"') i_ += text_[i_] == '\\' ? 2 : 1;
    ++i_;
    return Json::parse(text_.substr(start, i_ - start)).get<std::string>();
  }

  void value(const std::string& pointer) {
    skip_ws();
    out_[pointer] = line_column(text_, i_);
    if (i_ >= text_.size()) return;
    char c = text_[i_];
    if (c == '{') {
      ++i_;
      skip_ws();
      if (text_[i_] == '}') {
        ++i_;
        return;
      }
      for (;;) {
        skip_ws();
        std::string key = string_token();
        skip_ws();
        ++i_;  // ':'
        value(pointer + "/" + escape_pointer(key));
        skip_ws();
        if (text_[i_++] == '}') return;
      }
    } else if (c == '[') {
      ++i_;
      skip_ws();
      if (text_[i_] == ']') {
        ++i_;
        return;
      }
      for (size_t k = 0;; ++k) {
        value(pointer + "/" + std::to_string(k));
        skip_ws();
        if (text_[i_++] == ']') return;
      }
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < text_.size() && std::string(",]} \t\r\n").find(text_[i_]) == std::string::npos) ++i_;
    }
  }

  const std::string& text_;
  size_t i_ = 0;
  Positions out_;
};

template <typename F>
auto guarded(const Node& n, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError || e.code() == ErrorCode::VersionMismatch) throw;
    n.fail(e.what());
  }
}

std::vector<QVector> qvectors_from(const Node& n, int dim) {
  std::vector<QVector> out;
  for (const auto& item : n.items()) out.push_back(qvector_from(item, dim));
  return out;
}

Json vectors(const std::vector<QVector>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

Json members_json(const PolyhedralDivisor& d) {
  Json coeffs = Json::object();
  for (const auto& [label, c] : d.coefficients()) coeffs[label] = to_json(c);
  return Json{{"tail", to_json(d.tail())}, {"coefficients", coeffs}};
}

PolyhedralDivisor member_from(const Node& n, const BasePtr& base, int dim) {
  Cone tail = cone_from(n["tail"], dim);
  std::map<std::string, Coefficient> coeffs;
  if (n.has("coefficients"))
    for (const auto& [label, c] : n["coefficients"].members()) {
      if (!base->has_label(label)) n["coefficients"][label].fail("'" + label + "' is not a prime divisor of the base");
      coeffs[label] = coefficient_from(c, tail.ambient_dim());
    }
  return guarded(n, [&] { return PolyhedralDivisor(base, tail, coeffs); });
}

}  // namespace

Positions index_positions(const std::string& text) { return PositionWalker(text).run(); }

void Node::fail(const std::string& message) const {
  static const std::string own = std::string(error_name(ErrorCode::SchemaError)) + ": ";
  std::string text = message.rfind(own, 0) == 0 ? message.substr(own.size()) : message;
  std::string where = source_;
  if (positions_) {
    auto it = positions_->find(pointer_);
    if (it != positions_->end())
      where += ":" + std::to_string(it->second.first) + ":" + std::to_string(it->second.second);
  }
  throw Error(ErrorCode::SchemaError, where + ": " + (pointer_.empty() ? "/" : pointer_) + ": " + text);
}

bool Node::has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

Node Node::operator[](const std::string& key) const {
  if (!value_->is_object()) fail("expected an object");
  auto it = value_->find(key);
  if (it == value_->end()) fail("missing key '" + key + "'");
  return Node(*it, pointer_ + "/" + escape_pointer(key), positions_, source_);
}

Node Node::operator[](size_t i) const {
  if (!value_->is_array()) fail("expected an array");
  if (i >= value_->size()) fail("index " + std::to_string(i) + " out of range");
  return Node((*value_)[i], pointer_ + "/" + std::to_string(i), positions_, source_);
}

std::vector<Node> Node::items() const {
  if (!value_->is_array()) fail("expected an array");
  std::vector<Node> out;
  for (size_t i = 0; i < value_->size(); ++i) out.push_back((*this)[i]);
  return out;
}

std::vector<std::pair<std::string, Node>> Node::members() const {
  if (!value_->is_object()) fail("expected an object");
  std::vector<std::pair<std::string, Node>> out;
  for (auto it = value_->begin(); it != value_->end(); ++it) out.emplace_back(it.key(), (*this)[it.key()]);
  return out;
}

void Node::only(std::initializer_list<const char*> keys) const {
  if (!value_->is_object()) fail("expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = value_->begin(); it != value_->end(); ++it)
    if (!allowed.count(it.key())) (*this)[it.key()].fail("unknown key '" + it.key() + "'");
}

std::string Node::str() const {
  if (!value_->is_string()) fail("expected a string");
  return value_->get<std::string>();
}

long Node::integer_small() const {
  if (value_->is_number_integer()) return value_->get<long>();
  fail("expected a small integer");
}

bool Node::boolean() const {
  if (!value_->is_boolean()) fail("expected true or false");
  return value_->get<bool>();
}

Json to_json(const Rational& q) { return to_string(q); }
Json to_json(const Integer& z) { return z.str(); }
Json to_json(const ExtRational& q) { return to_string(q); }

Json to_json(const QVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
  return out;
}

Json to_json(const ZVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
  return out;
}

Json to_json(const ZMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(ZVector(m.row(i).transpose())));
  return out;
}

Json to_json(const Polyhedron& p) {
  return Json{{"ambient", p.ambient_dim()},
              {"vertices", vectors(p.vertices())},
              {"rays", vectors(p.rays())},
              {"lineality", vectors(p.lineality())}};
}

Json to_json(const Cone& c) {
  return Json{{"ambient", c.ambient_dim()}, {"rays", vectors(c.rays())}, {"lineality", vectors(c.lineality())}};
}

Json to_json(const Coefficient& c) { return c ? to_json(*c) : Json("empty"); }

Json to_json(const PolyhedralComplex& c) {
  Json out = Json::array();
  for (const auto& cell : c.cells) out.push_back(to_json(cell));
  return out;
}

Json to_json(const Fan& f) {
  Json rays = Json::array();
  for (const auto& r : f.rays) rays.push_back(to_json(r));
  return Json{{"rank", f.rank}, {"rays", rays}, {"cones", f.cones}};
}

Json to_json(const BaseVariety& b) {
  switch (b.kind()) {
    case BaseKind::ProjectiveLine: return Json{{"type", "projective_line"}};
    case BaseKind::OpenInProjectiveLine: {
      Json removed = Json::array();
      for (const auto& p : b.removed_points()) removed.push_back(to_json(p));
      return Json{{"type", "open_projective_line"}, {"removed", removed}};
    }
    case BaseKind::Toric: {
      Json declared = Json::array();
      for (const auto& d : b.declared()) {
        Json cls = Json::object();
        for (const auto& [k, w] : d.class_rep) cls[k] = to_json(w);
        declared.push_back(Json{{"label", d.label}, {"class", cls}});
      }
      Json degrees = Json::object();
      for (const auto& label : b.named_labels())
        if (auto deg = b.degree_of(label)) degrees[label] = to_json(*deg);
      return Json{{"type", "toric"},
                  {"fan", to_json(b.fan())},
                  {"ray_labels", b.ray_labels()},
                  {"declared", declared},
                  {"degrees", degrees}};
    }
    case BaseKind::Labels: return Json{{"type", "labels"}, {"labels", b.named_labels()}};
  }
  return Json();
}

Json to_json(const QDivisor& d) {
  Json out = Json::object();
  for (const auto& [label, c] : d.coefficients) out[label] = to_json(c);
  return out;
}

Json to_json(const PolyhedralDivisor& d) {
  Json out = members_json(d);
  out["base"] = to_json(d.base());
  return out;
}

Json to_json(const DivisorialFan& s) {
  Json members = Json::array();
  for (const auto& m : s.members()) members.push_back(members_json(m));
  Json out{{"base", to_json(s.base())}, {"members", members}};
  if (s.declared_rays()) out["invariant_rays"] = vectors(*s.declared_rays());
  return out;
}

Json to_json(const InvariantPDivisorOnFan& d) {
  Json rays = Json::array(), verts = Json::array();
  for (const auto& [r, c] : d.ray_coeffs) rays.push_back(Json{{"ray", to_json(r)}, {"coefficient", to_json(c)}});
  for (const auto& [v, c] : d.vertex_coeffs)
    verts.push_back(Json{{"label", v.label}, {"vertex", to_json(v.vertex)}, {"coefficient", to_json(c)}});
  return Json{{"fan", to_json(*d.fan)}, {"tail", to_json(d.tail)}, {"rays", rays}, {"vertices", verts}};
}

Json to_json(const TInvariantDivisor& d) {
  Json rays = Json::array(), verts = Json::array();
  for (const auto& [r, c] : d.ray_coeffs) rays.push_back(Json{{"ray", to_json(r)}, {"value", to_json(c)}});
  for (const auto& [v, c] : d.vertex_coeffs)
    verts.push_back(Json{{"label", v.label}, {"vertex", to_json(v.vertex)}, {"value", to_json(c)}});
  return Json{{"fan", to_json(*d.fan)}, {"rays", rays}, {"vertices", verts}};
}

Json to_json(const ProperReport& r) {
  return Json{{"proper", r.proper()},
              {"qcartier", r.qcartier},
              {"semiample", r.semiample},
              {"big", r.big},
              {"loc_semiprojective", r.loc_semiprojective},
              {"fulldim_weightcone", r.fulldim_weightcone},
              {"failures", r.failures}};
}

Json to_json(const RationalFunction& f) {
  if (f.zero) return Json{{"zero", true}};
  Json factors = Json::object();
  for (const auto& [k, e] : f.factors) factors[k] = to_json(e);
  return Json{{"character", to_json(f.character)}, {"factors", factors}};
}

Rational rational_from(const Node& n) {
  const Json& j = n.json();
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (!j.is_string()) n.fail("expected a rational as a string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

Integer integer_from(const Node& n) {
  Rational q = rational_from(n);
  if (!is_integer(q)) n.fail("expected an integer");
  return numerator(q);
}

QVector qvector_from(const Node& n, int dim) {
  auto items = n.items();
  if (dim >= 0 && static_cast<int>(items.size()) != dim)
    n.fail("expected a vector of length " + std::to_string(dim) + ", found " + std::to_string(items.size()));
  QVector v(static_cast<Eigen::Index>(items.size()));
  for (size_t i = 0; i < items.size(); ++i) v[static_cast<Eigen::Index>(i)] = rational_from(items[i]);
  return v;
}

ZVector zvector_from(const Node& n, int dim) {
  auto items = n.items();
  if (dim >= 0 && static_cast<int>(items.size()) != dim)
    n.fail("expected a vector of length " + std::to_string(dim) + ", found " + std::to_string(items.size()));
  ZVector v(static_cast<Eigen::Index>(items.size()));
  for (size_t i = 0; i < items.size(); ++i) v[static_cast<Eigen::Index>(i)] = integer_from(items[i]);
  return v;
}

ZMatrix zmatrix_from(const Node& n) {
  auto rows = n.items();
  if (rows.empty()) n.fail("expected a nonempty list of rows");
  const int cols = static_cast<int>(rows.front().items().size());
  ZMatrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = zvector_from(rows[i], cols).transpose();
  return m;
}

Polyhedron polyhedron_from(const Node& n, int dim) {
  n.only({"ambient", "vertices", "rays", "lineality"});
  const int amb = static_cast<int>(n["ambient"].integer_small());
  if (amb < 0) n["ambient"].fail("negative dimension");
  if (dim >= 0 && amb != dim) n["ambient"].fail("expected ambient dimension " + std::to_string(dim));
  auto vs = n.has("vertices") ? qvectors_from(n["vertices"], amb) : std::vector<QVector>{};
  auto rs = n.has("rays") ? qvectors_from(n["rays"], amb) : std::vector<QVector>{};
  auto ls = n.has("lineality") ? qvectors_from(n["lineality"], amb) : std::vector<QVector>{};
  if (vs.empty() && (!rs.empty() || !ls.empty())) n.fail("a polyhedron with rays needs a vertex");
  return guarded(n, [&] { return Polyhedron::hull(amb, vs, rs, ls); });
}

Cone cone_from(const Node& n, int dim) {
  n.only({"ambient", "rays", "lineality"});
  const int amb = static_cast<int>(n["ambient"].integer_small());
  if (amb < 0) n["ambient"].fail("negative dimension");
  if (dim >= 0 && amb != dim) n["ambient"].fail("expected ambient dimension " + std::to_string(dim));
  auto rs = n.has("rays") ? qvectors_from(n["rays"], amb) : std::vector<QVector>{};
  auto ls = n.has("lineality") ? qvectors_from(n["lineality"], amb) : std::vector<QVector>{};
  return guarded(n, [&] { return Cone::from_rays(amb, rs, ls); });
}

Coefficient coefficient_from(const Node& n, int dim) {
  if (n.json().is_string()) {
    if (n.str() != "empty") n.fail("expected a polyhedron or \"empty\"");
    return std::nullopt;
  }
  Polyhedron p = polyhedron_from(n, dim);
  if (p.is_empty()) return std::nullopt;
  return p;
}

PolyhedralComplex complex_from(const Node& n) {
  PolyhedralComplex c;
  int dim = -1;
  for (const auto& cell : n.items()) {
    c.cells.push_back(polyhedron_from(cell, dim));
    dim = c.cells.back().ambient_dim();
    if (c.cells.back().is_empty()) cell.fail("cells of a complex must be nonempty");
  }
  if (!is_polyhedral_complex(c.cells)) n.fail("the cells do not form a polyhedral complex");
  c.normalize();
  return c;
}

Fan fan_from_json(const Node& n) {
  n.only({"rank", "rays", "cones"});
  Fan f;
  f.rank = static_cast<int>(n["rank"].integer_small());
  for (const auto& r : n["rays"].items()) f.rays.push_back(zvector_from(r, f.rank));
  for (const auto& c : n["cones"].items()) {
    std::vector<int> cone;
    for (const auto& i : c.items()) {
      long k = i.integer_small();
      if (k < 0 || k >= static_cast<long>(f.rays.size())) i.fail("ray index out of range");
      cone.push_back(static_cast<int>(k));
    }
    f.cones.push_back(cone);
  }
  return f;
}

BasePtr base_from(const Node& n) {
  std::string type = n["type"].str();
  if (type == "projective_line") {
    n.only({"type"});
    return make_base(BaseVariety::projective_line());
  }
  if (type == "open_projective_line") {
    n.only({"type", "removed"});
    std::vector<ExtRational> removed;
    for (const auto& p : n["removed"].items())
      removed.push_back(p.json() == "inf" ? ExtRational::inf() : ExtRational(rational_from(p)));
    return guarded(n, [&] { return make_base(BaseVariety::open_in_projective_line(removed)); });
  }
  if (type == "toric") {
    n.only({"type", "fan", "ray_labels", "declared", "degrees"});
    Fan f = fan_from_json(n["fan"]);
    std::vector<std::string> labels;
    for (const auto& l : n["ray_labels"].items()) labels.push_back(l.str());
    std::vector<DeclaredPrime> declared;
    if (n.has("declared"))
      for (const auto& d : n["declared"].items()) {
        d.only({"label", "class"});
        DeclaredPrime p{d["label"].str(), {}};
        for (const auto& [k, w] : d["class"].members()) p.class_rep[k] = integer_from(w);
        declared.push_back(p);
      }
    std::map<std::string, Rational> degrees;
    if (n.has("degrees"))
      for (const auto& [k, w] : n["degrees"].members()) degrees[k] = rational_from(w);
    return guarded(n, [&] { return make_base(BaseVariety::toric(f, labels, declared, degrees)); });
  }
  if (type == "labels") {
    n.only({"type", "labels"});
    std::vector<std::string> labels;
    for (const auto& l : n["labels"].items()) labels.push_back(l.str());
    return make_base(BaseVariety::labels(labels));
  }
  n["type"].fail("unknown base type '" + type + "'");
}

PolyhedralDivisor pdivisor_from(const Node& n) {
  n.only({"base", "tail", "coefficients"});
  return member_from(n, base_from(n["base"]), -1);
}

FanPtr divisorial_fan_from(const Node& n) {
  n.only({"base", "members", "invariant_rays"});
  BasePtr base = base_from(n["base"]);
  std::vector<PolyhedralDivisor> members;
  int dim = -1;
  for (const auto& m : n["members"].items()) {
    m.only({"tail", "coefficients"});
    members.push_back(member_from(m, base, dim));
    dim = members.back().rank();
  }
  if (members.empty()) n["members"].fail("a divisorial fan needs at least one member");
  std::optional<std::vector<QVector>> rays;
  if (n.has("invariant_rays")) rays = qvectors_from(n["invariant_rays"], dim);
  return guarded(n, [&] { return make_fan(DivisorialFan(base, members, rays)); });
}

InvariantPDivisorOnFan invariant_pdivisor_from(const Node& n) {
  n.only({"fan", "tail", "rays", "vertices"});
  InvariantPDivisorOnFan d;
  d.fan = divisorial_fan_from(n["fan"]);
  d.tail = cone_from(n["tail"]);
  const int dim = d.tail.ambient_dim(), rank = d.fan->rank();
  if (n.has("rays"))
    for (const auto& r : n["rays"].items()) {
      r.only({"ray", "coefficient"});
      d.ray_coeffs[qvector_from(r["ray"], rank)] = polyhedron_from(r["coefficient"], dim);
    }
  if (n.has("vertices"))
    for (const auto& v : n["vertices"].items()) {
      v.only({"label", "vertex", "coefficient"});
      d.vertex_coeffs[VertexId{v["label"].str(), qvector_from(v["vertex"], rank)}] =
          polyhedron_from(v["coefficient"], dim);
    }
  guarded(n, [&] {
    validate(d);
    return 0;
  });
  return d;
}

TInvariantDivisor invariant_divisor_from(const Node& n) {
  n.only({"fan", "rays", "vertices"});
  TInvariantDivisor d;
  d.fan = divisorial_fan_from(n["fan"]);
  const int rank = d.fan->rank();
  InvariantPrimes ip = invariant_prime_divisors(*d.fan);
  if (n.has("rays"))
    for (const auto& r : n["rays"].items()) {
      r.only({"ray", "value"});
      QVector ray = qvector_from(r["ray"], rank);
      bool known = false;
      for (const auto& x : ip.rays) known = known || equal(x, ray);
      if (!known) r["ray"].fail(to_string(ray) + " is not an invariant ray of the fan");
      d.ray_coeffs[ray] = rational_from(r["value"]);
    }
  if (n.has("vertices"))
    for (const auto& v : n["vertices"].items()) {
      v.only({"label", "vertex", "value"});
      d.vertex_coeffs[VertexId{v["label"].str(), qvector_from(v["vertex"], rank)}] = rational_from(v["value"]);
    }
  return Rational(1) * d;
}

DeformationInput deformation_from(const Node& n) {
  n.only({"delta", "r", "parts", "multiplicities"});
  Cone delta = cone_from(n["delta"]);
  const int dim = delta.ambient_dim();
  if (dim < 1) n["delta"].fail("delta lives in N + Z and needs dimension at least 1");
  QVector r = qvector_from(n["r"], dim);
  std::vector<Polyhedron> parts;
  for (const auto& p : n["parts"].items()) parts.push_back(polyhedron_from(p, dim - 1));
  std::vector<Integer> mult;
  if (n.has("multiplicities"))
    for (const auto& m : n["multiplicities"].items()) mult.push_back(integer_from(m));
  return guarded(n, [&] { return DeformationInput::make(delta, r, parts, mult); });
}

Json to_json(const DeformationInput& d) {
  Json parts = Json::array();
  for (const auto& p : d.parts) parts.push_back(to_json(p));
  Json out{{"delta", to_json(d.delta)}, {"r", to_json(d.r)}, {"parts", parts}};
  if (d.mixed()) {
    Json m = Json::array();
    for (const auto& k : d.multiplicities) m.push_back(to_json(k));
    out["multiplicities"] = m;
  }
  return out;
}

DowngradeInput downgrade_input_from(const Node& n) {
  n.only({"divisor", "projection"});
  DowngradeInput d{pdivisor_from(n["divisor"]), zmatrix_from(n["projection"])};
  if (d.projection.cols() != d.divisor.rank()) n["projection"].fail("the projection must have one column per weight coordinate");
  return d;
}

Json to_json(const DowngradeInput& d) {
  return Json{{"divisor", to_json(d.divisor)}, {"projection", to_json(d.projection)}};
}

ToricDowngradeInput toric_downgrade_input_from(const Node& n) {
  n.only({"delta", "sublattice"});
  ToricDowngradeInput d{cone_from(n["delta"]), zmatrix_from(n["sublattice"])};
  if (d.sublattice.rows() != d.delta.ambient_dim()) n["sublattice"].fail("the sublattice must have one row per coordinate");
  return d;
}

Json to_json(const ToricDowngradeInput& d) {
  return Json{{"delta", to_json(d.delta)}, {"sublattice", to_json(d.sublattice)}};
}

CoxInput cox_input_from(const Node& n) {
  n.only({"fan", "primes", "pivot_order", "hypotheses"});
  CoxInput c;
  c.fan = divisorial_fan_from(n["fan"]);
  for (const auto& p : n["primes"].items()) c.primes.push_back(p.str());
  if (n.has("pivot_order"))
    for (const auto& i : n["pivot_order"].items()) c.pivot_order.push_back(static_cast<int>(i.integer_small()));
  if (n.has("hypotheses")) {
    Node h = n["hypotheses"];
    h.only({"complete", "q_factorial", "class_group_free"});
    if (h.has("complete")) c.hypotheses.complete = h["complete"].boolean();
    if (h.has("q_factorial")) c.hypotheses.q_factorial = h["q_factorial"].boolean();
    if (h.has("class_group_free")) c.hypotheses.class_group_free = h["class_group_free"].boolean();
  }
  return c;
}

Json to_json(const CoxInput& c) {
  Json out{{"fan", to_json(*c.fan)},
           {"primes", c.primes},
           {"hypotheses",
            Json{{"complete", c.hypotheses.complete},
                 {"q_factorial", c.hypotheses.q_factorial},
                 {"class_group_free", c.hypotheses.class_group_free}}}};
  if (!c.pivot_order.empty()) out["pivot_order"] = c.pivot_order;
  return out;
}

Node Loaded::payload() const { return Node(doc.payload, "/payload", &positions, source); }

Loaded load(const std::string& text, const std::string& source) {
  Loaded out;
  out.source = source;
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorCode::SchemaError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
  out.positions = index_positions(text);
  Node top(root, "", &out.positions, source);
  top.only({"schema_version", "kind", "payload", "provenance"});
  std::string version = top["schema_version"].str();
  if (version != schema_version)
    throw Error(ErrorCode::VersionMismatch, source + ": schema_version " + version + ", expected " + schema_version);
  out.doc.kind = top["kind"].str();
  top["payload"];
  out.doc.payload = root["payload"];
  if (top.has("provenance")) out.doc.provenance = root["provenance"];
  return out;
}

Loaded load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load(buf.str(), path);
}

std::string emit(const Document& doc) {
  Json root{{"schema_version", schema_version}, {"kind", doc.kind}, {"payload", doc.payload}};
  if (!doc.provenance.is_null()) root["provenance"] = doc.provenance;
  return root.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + tmp.string());
    out << bytes;
    out.flush();
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::InvalidInput, "cannot replace " + path + ": " + ec.message());
  }
}

}  // namespace polydiv::io
