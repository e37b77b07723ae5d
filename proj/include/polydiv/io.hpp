#pragma once

#include "polydiv/cox.hpp"
#include "polydiv/deform.hpp"
#include "polydiv/downgrade.hpp"
#include "polydiv/pdivisor.hpp"
#include "polydiv/tvariety.hpp"
#include "polydiv/upgrade.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace polydiv::io {

using Json = nlohmann::json;

inline constexpr const char* schema_version = "1";

// where every value of a JSON text starts, keyed by JSON pointer
using Positions = std::map<std::string, std::pair<int, int>>;
Positions index_positions(const std::string& text);

struct Document {
  std::string kind;
  Json payload;
  Json provenance;
};

std::string emit(const Document& doc);
// replace path through a temporary file in the same directory
void write_atomically(const std::string& path, const std::string& bytes);

// a view of a JSON value that knows where it came from, for error messages
class Node {
 public:
  Node(const Json& value, std::string pointer, const Positions* positions, std::string source)
      : value_(&value), pointer_(std::move(pointer)), positions_(positions), source_(std::move(source)) {}

  const Json& json() const { return *value_; }
  const std::string& pointer() const { return pointer_; }
  [[noreturn]] void fail(const std::string& message) const;

  bool has(const std::string& key) const;
  Node operator[](const std::string& key) const;  // required member of an object
  Node operator[](size_t i) const;
  std::vector<Node> items() const;                 // array elements
  std::vector<std::pair<std::string, Node>> members() const;
  void only(std::initializer_list<const char*> keys) const;

  std::string str() const;
  long integer_small() const;
  bool boolean() const;

 private:
  const Json* value_;
  std::string pointer_;
  const Positions* positions_;
  std::string source_;
};

// values
Json to_json(const Rational& q);
Json to_json(const Integer& z);
Json to_json(const ExtRational& q);
Json to_json(const QVector& v);
Json to_json(const ZVector& v);
Json to_json(const ZMatrix& m);  // list of rows
Json to_json(const Polyhedron& p);
Json to_json(const Cone& c);
Json to_json(const Coefficient& c);
Json to_json(const PolyhedralComplex& c);
Json to_json(const Fan& f);
Json to_json(const BaseVariety& b);
Json to_json(const QDivisor& d);
Json to_json(const PolyhedralDivisor& d);
Json to_json(const DivisorialFan& s);
Json to_json(const InvariantPDivisorOnFan& d);
Json to_json(const TInvariantDivisor& d);
Json to_json(const ProperReport& r);
Json to_json(const RationalFunction& f);

Rational rational_from(const Node& n);
Integer integer_from(const Node& n);
QVector qvector_from(const Node& n, int dim = -1);
ZVector zvector_from(const Node& n, int dim = -1);
ZMatrix zmatrix_from(const Node& n);
Polyhedron polyhedron_from(const Node& n, int dim = -1);
Cone cone_from(const Node& n, int dim = -1);
Coefficient coefficient_from(const Node& n, int dim);
PolyhedralComplex complex_from(const Node& n);
Fan fan_from_json(const Node& n);
BasePtr base_from(const Node& n);
PolyhedralDivisor pdivisor_from(const Node& n);
FanPtr divisorial_fan_from(const Node& n);
InvariantPDivisorOnFan invariant_pdivisor_from(const Node& n);
TInvariantDivisor invariant_divisor_from(const Node& n);
DeformationInput deformation_from(const Node& n);

struct DowngradeInput {
  PolyhedralDivisor divisor;
  ZMatrix projection;  // M -> M-bar
};
DowngradeInput downgrade_input_from(const Node& n);
Json to_json(const DowngradeInput& d);

struct ToricDowngradeInput {
  Cone delta;
  ZMatrix sublattice;  // N-bar -> N, as columns
};
ToricDowngradeInput toric_downgrade_input_from(const Node& n);
Json to_json(const ToricDowngradeInput& d);

struct CoxInput {
  FanPtr fan;
  std::vector<std::string> primes;
  std::vector<int> pivot_order;
  CoxHypotheses hypotheses;
};
CoxInput cox_input_from(const Node& n);
Json to_json(const CoxInput& c);

Json to_json(const DeformationInput& d);

// SchemaError carries source:line:column; VersionMismatch on a foreign schema_version
struct Loaded {
  Document doc;
  Positions positions;
  std::string source;
  Node payload() const;
};
Loaded load(const std::string& text, const std::string& source = "<input>");
Loaded load_file(const std::string& path);

}  // namespace polydiv::io
