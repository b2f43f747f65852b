#pragma once

#include "wmt/matrix.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace wmt {

class RatPoly;

/// Univariate integer polynomial, coefficients low degree first, no trailing zeros.
class IntPoly {
public:
  IntPoly() = default;
  explicit IntPoly(std::vector<Integer> coeffs);
  IntPoly(std::initializer_list<long> coeffs);

  static IntPoly monomial(const Integer& c, std::size_t degree);
  /// x - root
  static IntPoly linear(const Integer& root);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  const std::vector<Integer>& coeffs() const { return c_; }
  Integer coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Integer(0); }
  const Integer& lead() const { return c_.back(); }

  Integer eval(const Integer& x) const;
  Rational eval(const Rational& x) const;
  IntPoly derivative() const;
  Integer content() const;
  /// Divides by the content and makes the leading coefficient positive.
  IntPoly primitive_part() const;
  /// T^deg * p(c / T) with denominators cleared: sum_i a_i c^i T^(deg - i).
  IntPoly reciprocal_scaled(const Integer& c) const;
  /// p(T^k)
  IntPoly substitute_power(unsigned k) const;

  friend bool operator==(const IntPoly&, const IntPoly&) = default;

private:
  void normalize();
  std::vector<Integer> c_;
};

IntPoly operator+(const IntPoly& a, const IntPoly& b);
IntPoly operator-(const IntPoly& a, const IntPoly& b);
IntPoly operator-(const IntPoly& a);
IntPoly operator*(const IntPoly& a, const IntPoly& b);
IntPoly operator*(const Integer& k, const IntPoly& a);
IntPoly pow(const IntPoly& a, unsigned e);

/// Exact division over Z; std::nullopt-like failure is reported through the bool.
bool divides_exactly(const IntPoly& divisor, const IntPoly& dividend, IntPoly* quotient = nullptr);

/// Univariate rational polynomial, low degree first.
class RatPoly {
public:
  RatPoly() = default;
  explicit RatPoly(std::vector<Rational> coeffs);
  explicit RatPoly(const IntPoly& p);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& lead() const { return c_.back(); }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
  Rational eval(const Rational& x) const;
  int sign_at(const Rational& x) const;
  RatPoly monic() const;
  RatPoly derivative() const;
  /// Scales to a primitive integer polynomial with positive leading coefficient.
  IntPoly to_primitive_int() const;

  friend bool operator==(const RatPoly&, const RatPoly&) = default;

private:
  void normalize();
  std::vector<Rational> c_;
};

RatPoly operator+(const RatPoly& a, const RatPoly& b);
RatPoly operator-(const RatPoly& a, const RatPoly& b);
RatPoly operator*(const RatPoly& a, const RatPoly& b);
RatPoly operator*(const Rational& k, const RatPoly& a);
void divmod(const RatPoly& a, const RatPoly& b, RatPoly& q, RatPoly& r);
/// Monic gcd; gcd(0, 0) = 0.
RatPoly gcd(const RatPoly& a, const RatPoly& b);
/// s a + t b = g with g = gcd(a, b) monic.
void extended_gcd(const RatPoly& a, const RatPoly& b, RatPoly& g, RatPoly& s, RatPoly& t);

/// gcd over Q returned as a primitive integer polynomial with positive leading coefficient.
IntPoly gcd_primitive(const IntPoly& a, const IntPoly& b);
/// p / gcd(p, p') as a primitive integer polynomial.
IntPoly square_free_part(const IntPoly& p);

/// Res(a, b) via the Sylvester determinant.
Integer resultant(const IntPoly& a, const IntPoly& b);

/// Res_x(p(x), h_t(x)) as a polynomial in t, where `h(t)` returns the x-polynomial at the
/// integer t. Requires deg_x h_t and its leading coefficient to be independent of t and the
/// t-degree of the result to be at most `degree_bound`; evaluated at t = 0..bound and interpolated.
IntPoly parametric_resultant(const IntPoly& p, const std::function<IntPoly(const Integer&)>& h,
                             std::size_t degree_bound);

/// Sturm chain p, p', -rem(...), ... of a nonzero polynomial.
class SturmSequence {
public:
  explicit SturmSequence(const IntPoly& p);
  /// Sign variations at x.
  std::size_t variations(const Rational& x) const;
  std::size_t variations_at_pos_infinity() const;
  std::size_t variations_at_neg_infinity() const;
  /// Number of distinct real roots in (a, b], a < b.
  std::size_t count_half_open(const Rational& a, const Rational& b) const;
  std::size_t count_real() const;
  std::size_t length() const { return chain_.size(); }

private:
  std::vector<RatPoly> chain_;
};

/// Bound B with every complex root of p of absolute value < B.
Integer cauchy_root_bound(const IntPoly& p);

/// Formats as e.g. "T^2 - T + 2".
std::string to_string(const IntPoly& p, std::string_view var = "T");
/// Parses polynomial text in one variable (e.g. "T^2-T+2", "3*T^4 - 1"). Throws std::invalid_argument.
IntPoly parse_polynomial(std::string_view text);

/// Characteristic polynomial det(T I - A), division-free (Berkowitz).
IntPoly characteristic_polynomial(const IntMatrix& a);
/// p(A) by Horner's rule.
IntMatrix evaluate_at_matrix(const IntPoly& p, const IntMatrix& a);
/// Companion matrix of a monic polynomial.
IntMatrix companion_matrix(const IntPoly& p);

}  // namespace wmt
