#include "polydiv/core.hpp"

#include <algorithm>
#include <cctype>

namespace polydiv {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotSurjective: return "NotSurjective";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::AmbientMismatch: return "AmbientMismatch";
    case ErrorCode::NotConcave: return "NotConcave";
    case ErrorCode::NoDegreeMap: return "NoDegreeMap";
    case ErrorCode::UnsupportedBase: return "UnsupportedBase";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::NonIntegral: return "NonIntegral";
    case ErrorCode::WeightOutsideCone: return "WeightOutsideCone";
    case ErrorCode::IndeterminateBaseMap: return "IndeterminateBaseMap";
    case ErrorCode::NotSplit: return "NotSplit";
    case ErrorCode::EmptyCoefficient: return "EmptyCoefficient";
    case ErrorCode::NotContractionFree: return "NotContractionFree";
    case ErrorCode::NotQCartier: return "NotQCartier";
    case ErrorCode::WeightOutsideBox: return "WeightOutsideBox";
    case ErrorCode::BoxNotFullDimensional: return "BoxNotFullDimensional";
    case ErrorCode::MarksMissingSupport: return "MarksMissingSupport";
    case ErrorCode::NotProper: return "NotProper";
    case ErrorCode::TorsionCokernel: return "TorsionCokernel";
    case ErrorCode::FormsDisagree: return "FormsDisagree";
    case ErrorCode::SumMismatch: return "SumMismatch";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::RoutesDisagree: return "RoutesDisagree";
    case ErrorCode::SlicesDisagree: return "SlicesDisagree";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
  }
  return "Unknown";
}

bool operator==(const ExtRational& a, const ExtRational& b) {
  if (a.infinite || b.infinite) return a.infinite == b.infinite;
  return a.value == b.value;
}

bool operator<(const ExtRational& a, const ExtRational& b) {
  if (a.infinite) return false;
  if (b.infinite) return true;
  return a.value < b.value;
}

ExtRational operator+(const ExtRational& a, const ExtRational& b) {
  if (a.infinite || b.infinite) return ExtRational::inf();
  return ExtRational(a.value + b.value);
}

ExtRational operator*(const Rational& s, const ExtRational& a) {
  if (s < 0) throw Error(ErrorCode::InvalidInput, "negative multiple of an extended rational");
  if (a.infinite) return s == 0 ? ExtRational(0) : ExtRational::inf();
  return ExtRational(s * a.value);
}

Integer floor(const Rational& q) {
  Integer n = boost::multiprecision::numerator(q);
  Integer d = boost::multiprecision::denominator(q);
  Integer r = n / d;
  if (n % d != 0 && n < 0) r -= 1;
  return r;
}

Integer ceil(const Rational& q) { return -floor(Rational(-q)); }

bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

Integer gcd(const Integer& a, const Integer& b) { return boost::multiprecision::gcd(a, b); }

Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::abs(a / gcd(a, b) * b);
}

std::string to_string(const Rational& q) {
  if (is_integer(q)) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

std::string to_string(const ExtRational& q) { return q.infinite ? "inf" : to_string(q.value); }

std::string to_string(const QVector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += to_string(v[i]);
  }
  return s + ")";
}

namespace {
bool parse_int(const std::string& t, Integer& out) {
  if (t.empty()) return false;
  size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i == t.size()) return false;
  for (size_t j = i; j < t.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(t[j]))) return false;
  out = Integer(t[0] == '+' ? t.substr(1) : t);
  return true;
}
}  // namespace

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  Integer n, d = 1;
  if (slash == std::string::npos) {
    if (!parse_int(text, n)) throw Error(ErrorCode::SchemaError, "malformed rational '" + text + "'");
  } else {
    std::string den = text.substr(slash + 1);
    if (!parse_int(text.substr(0, slash), n) || den.empty() || den[0] == '-' || den[0] == '+' ||
        !parse_int(den, d))
      throw Error(ErrorCode::SchemaError, "malformed rational '" + text + "'");
    if (d == 0) throw Error(ErrorCode::SchemaError, "zero denominator in '" + text + "'");
  }
  return Rational(n, d);
}

QVector qvec(std::initializer_list<Rational> xs) {
  QVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const auto& x : xs) v[i++] = x;
  return v;
}

QVector zeros(int n) {
  QVector v(n);
  for (int i = 0; i < n; ++i) v[i] = 0;
  return v;
}

QVector unit(int n, int i) {
  QVector v = zeros(n);
  v[i] = 1;
  return v;
}

QVector to_q(const ZVector& v) {
  QVector r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r[i] = Rational(v[i]);
  return r;
}

QMatrix to_q(const ZMatrix& m) {
  QMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

ZVector to_z(const QVector& v) {
  ZVector r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!is_integer(v[i])) throw Error(ErrorCode::NonIntegral, "entry " + to_string(v[i]));
    r[i] = boost::multiprecision::numerator(v[i]);
  }
  return r;
}

ZMatrix to_z(const QMatrix& m) {
  ZMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!is_integer(m(i, j))) throw Error(ErrorCode::NonIntegral, "entry " + to_string(m(i, j)));
      r(i, j) = boost::multiprecision::numerator(m(i, j));
    }
  return r;
}

std::strong_ordering lex_compare(const QVector& a, const QVector& b) {
  Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] < b[i]) return std::strong_ordering::less;
    if (b[i] < a[i]) return std::strong_ordering::greater;
  }
  return a.size() <=> b.size();
}

bool equal(const QVector& a, const QVector& b) { return lex_compare(a, b) == 0; }

bool is_zero(const QVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0) return false;
  return true;
}

Integer denominator_lcm(const QVector& v) {
  Integer m = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = lcm(m, boost::multiprecision::denominator(v[i]));
  return m;
}

ZVector primitive(const QVector& v) {
  if (is_zero(v)) throw Error(ErrorCode::ZeroVector, "primitive direction of the zero vector");
  Integer m = denominator_lcm(v);
  ZVector z(v.size());
  Integer g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    z[i] = boost::multiprecision::numerator(Rational(v[i] * m));
    g = gcd(g, z[i]);
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) z[i] /= g;
  return z;
}

QVector primitive_q(const QVector& v) { return to_q(primitive(v)); }

void sort_unique(std::vector<QVector>& vs) {
  std::sort(vs.begin(), vs.end(), QVectorLess{});
  vs.erase(std::unique(vs.begin(), vs.end(), [](const QVector& a, const QVector& b) { return equal(a, b); }),
           vs.end());
}

QVector extend(const QVector& v, const Rational& last) {
  QVector r(v.size() + 1);
  r << v, last;
  return r;
}

QVector concat(const QVector& a, const QVector& b) {
  QVector r(a.size() + b.size());
  r << a, b;
  return r;
}

}  // namespace polydiv
