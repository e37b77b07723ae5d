#pragma once

#include "polydiv/core.hpp"
#include "polydiv/polyhedra.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace polydiv {

// Weil divisor with coefficients in Q ∪ {inf}; missing labels have coefficient 0
struct QDivisor {
  std::map<std::string, ExtRational> coefficients;

  ExtRational operator[](const std::string& label) const;
  void set(const std::string& label, const ExtRational& c);  // zero entries are dropped
  bool is_finite() const;
};

bool operator==(const QDivisor& a, const QDivisor& b);
QDivisor operator+(const QDivisor& a, const QDivisor& b);
QDivisor operator*(const Rational& s, const QDivisor& d);  // s >= 0
QDivisor round_down(const QDivisor& d);
std::string to_string(const QDivisor& d);

// fan of pointed cones, given by primitive rays and maximal cones
struct Fan {
  int rank = 0;
  std::vector<ZVector> rays;
  std::vector<std::vector<int>> cones;

  static Fan from_complex(const PolyhedralComplex& cones);
  Cone cone(size_t i) const;
  std::optional<int> ray_index(const ZVector& r) const;
  bool is_complete() const;
  bool has_convex_support() const;
  bool is_simplicial() const;
  bool is_smooth() const;
  // smallest cone containing x, as ray indices; nullopt outside the support
  std::optional<std::vector<int>> carrier(const QVector& x) const;
};

// a prime divisor that is not torus invariant, recorded through its class:
// P ~ sum w_rho D_rho, with a defining function f_P whose divisor is P - sum w_rho D_rho
struct DeclaredPrime {
  std::string label;
  std::map<std::string, Integer> class_rep;
};

// curve case: factors are finite points a with exponents of (x - a).
// toric case: x^character times defining functions of declared primes.
struct RationalFunction {
  ZVector character;
  std::map<std::string, Integer> factors;
  bool zero = false;

  static RationalFunction x() { return RationalFunction{{}, {{"0", 1}}, false}; }
};

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
RationalFunction power(const RationalFunction& f, const Integer& e);
bool operator==(const RationalFunction& a, const RationalFunction& b);
std::string to_string(const RationalFunction& f);

enum class BaseKind { ProjectiveLine, OpenInProjectiveLine, Toric, Labels };

struct Positivity {
  bool qcartier = false;
  bool semiample = false;
  bool big = false;
};

struct SectionOptions {
  long pole_bound = 12;  // pole order allowed at removed points and inf-coefficients
  long box = 12;         // toric: coordinates are searched in [-box, box]
};

struct SectionBasis {
  std::vector<RationalFunction> basis;
  bool truncated = false;
  size_t dimension() const { return basis.size(); }
};

class BaseVariety {
 public:
  static BaseVariety projective_line();
  static BaseVariety open_in_projective_line(const std::vector<ExtRational>& removed);
  static BaseVariety toric(Fan fan, std::vector<std::string> ray_labels, std::vector<DeclaredPrime> declared = {},
                           std::map<std::string, Rational> degrees = {});
  static BaseVariety labels(std::vector<std::string> labels);

  BaseKind kind() const { return kind_; }
  bool is_curve() const { return kind_ == BaseKind::ProjectiveLine || kind_ == BaseKind::OpenInProjectiveLine; }
  bool is_projective() const;
  bool is_affine() const;

  bool has_label(const std::string& label) const;
  // labels of prime divisors that are named up front (toric rays and declared primes, removed points, ...)
  const std::vector<std::string>& named_labels() const { return named_; }
  std::optional<Rational> degree_of(const std::string& label) const;

  // curve bases
  std::optional<ExtRational> point_of(const std::string& label) const;
  const std::vector<ExtRational>& removed_points() const { return removed_; }

  // toric bases
  const Fan& fan() const { return fan_; }
  const std::vector<std::string>& ray_labels() const { return ray_labels_; }
  const std::vector<DeclaredPrime>& declared() const { return declared_; }
  std::optional<int> ray_of(const std::string& label) const;
  const DeclaredPrime* declared_prime(const std::string& label) const;
  const std::string& ray_label(int i) const { return ray_labels_.at(static_cast<size_t>(i)); }

  void require_label(const std::string& label) const;

 private:
  BaseKind kind_ = BaseKind::ProjectiveLine;
  std::vector<std::string> named_;
  std::vector<ExtRational> removed_;
  Fan fan_;
  std::vector<std::string> ray_labels_;
  std::vector<DeclaredPrime> declared_;
  std::map<std::string, Rational> degrees_;
};

using BasePtr = std::shared_ptr<const BaseVariety>;
BasePtr make_base(BaseVariety b);

// canonical label of a point of P^1
std::string point_label(const ExtRational& p);

ExtRational degree(const BaseVariety& base, const QDivisor& d);
Integer order_along(const BaseVariety& base, const RationalFunction& f, const std::string& label);
QDivisor divisor_of(const BaseVariety& base, const RationalFunction& f);
SectionBasis global_sections(const BaseVariety& base, const QDivisor& d, const SectionOptions& options = {});
std::optional<RationalFunction> is_principal(const BaseVariety& base, const QDivisor& d);
Positivity positivity(const BaseVariety& base, const QDivisor& d);
// projective over an affine variety: P^1, open subsets of P^1, toric with convex support
bool is_semiprojective(const BaseVariety& base);
// the same question for the complement of the inf-coefficient primes of d
bool locus_semiprojective(const BaseVariety& base, const QDivisor& d);
// toric: the subfan of cones avoiding rays with coefficient inf (not necessarily pure)
Fan locus_fan(const BaseVariety& base, const QDivisor& d);

// rewrite declared primes through their classes; result is supported on toric rays
QDivisor invariant_representative(const BaseVariety& base, const QDivisor& d);

}  // namespace polydiv
