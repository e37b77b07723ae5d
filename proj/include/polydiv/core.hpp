#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Dense>

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace polydiv {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using QVector = Vec<Rational>;
using QMatrix = Mat<Rational>;
using ZVector = Vec<Integer>;
using ZMatrix = Mat<Integer>;

enum class ErrorCode {
  InvalidInput,
  NotSurjective,
  ZeroVector,
  AmbientMismatch,
  NotConcave,
  NoDegreeMap,
  UnsupportedBase,
  ZeroFunction,
  NonIntegral,
  WeightOutsideCone,
  IndeterminateBaseMap,
  NotSplit,
  EmptyCoefficient,
  NotContractionFree,
  NotQCartier,
  WeightOutsideBox,
  BoxNotFullDimensional,
  MarksMissingSupport,
  NotProper,
  TorsionCokernel,
  FormsDisagree,
  SumMismatch,
  NotAdmissible,
  RoutesDisagree,
  SlicesDisagree,
  SchemaError,
  VersionMismatch,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// element of Q ∪ {+inf}
struct ExtRational {
  bool infinite = false;
  Rational value;

  ExtRational() = default;
  ExtRational(Rational v) : value(std::move(v)) {}
  ExtRational(long v) : value(v) {}
  static ExtRational inf() {
    ExtRational e;
    e.infinite = true;
    return e;
  }
  bool is_finite() const { return !infinite; }
};

bool operator==(const ExtRational& a, const ExtRational& b);
bool operator<(const ExtRational& a, const ExtRational& b);
inline bool operator<=(const ExtRational& a, const ExtRational& b) { return !(b < a); }
ExtRational operator+(const ExtRational& a, const ExtRational& b);
ExtRational operator*(const Rational& s, const ExtRational& a);  // s >= 0, 0*inf = 0

Integer floor(const Rational& q);
Integer ceil(const Rational& q);
bool is_integer(const Rational& q);
Integer lcm(const Integer& a, const Integer& b);
Integer gcd(const Integer& a, const Integer& b);

std::string to_string(const Rational& q);
std::string to_string(const ExtRational& q);
std::string to_string(const QVector& v);
Rational parse_rational(const std::string& text);  // throws on malformed input

QVector qvec(std::initializer_list<Rational> xs);
QVector zeros(int n);
QVector unit(int n, int i);
QVector to_q(const ZVector& v);
QVector extend(const QVector& v, const Rational& last);
QVector concat(const QVector& a, const QVector& b);
QMatrix to_q(const ZMatrix& m);
// throws NonIntegral if an entry is not an integer
ZVector to_z(const QVector& v);
ZMatrix to_z(const QMatrix& m);

std::strong_ordering lex_compare(const QVector& a, const QVector& b);
inline bool lex_less(const QVector& a, const QVector& b) { return lex_compare(a, b) < 0; }
bool equal(const QVector& a, const QVector& b);
bool is_zero(const QVector& v);

struct QVectorLess {
  bool operator()(const QVector& a, const QVector& b) const { return lex_less(a, b); }
};

// the smallest positive integer making v integral
Integer denominator_lcm(const QVector& v);
// integer vector on the same ray with coprime entries; v must be nonzero
ZVector primitive(const QVector& v);
QVector primitive_q(const QVector& v);

void sort_unique(std::vector<QVector>& vs);

}  // namespace polydiv
