#include "wmt/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace wmt {

IntPoly::IntPoly(std::vector<Integer> coeffs) : c_(std::move(coeffs)) { normalize(); }

IntPoly::IntPoly(std::initializer_list<long> coeffs) {
  for (long v : coeffs) c_.emplace_back(v);
  normalize();
}

IntPoly IntPoly::monomial(const Integer& c, std::size_t degree) {
  std::vector<Integer> v(degree + 1);
  v[degree] = c;
  return IntPoly(std::move(v));
}

IntPoly IntPoly::linear(const Integer& root) { return IntPoly(std::vector<Integer>{-root, Integer(1)}); }

void IntPoly::normalize() {
  while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
}

Integer IntPoly::eval(const Integer& x) const {
  Integer r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

Rational IntPoly::eval(const Rational& x) const {
  Rational r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + Rational(*it);
  return r;
}

IntPoly IntPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Integer> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<unsigned long>(i);
  return IntPoly(std::move(d));
}

Integer IntPoly::content() const {
  Integer g = 0;
  for (const auto& x : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

IntPoly IntPoly::primitive_part() const {
  if (c_.empty()) return {};
  Integer g = content();
  if (sgn(c_.back()) < 0) g = -g;
  std::vector<Integer> v(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) mpz_divexact(v[i].get_mpz_t(), c_[i].get_mpz_t(), g.get_mpz_t());
  return IntPoly(std::move(v));
}

IntPoly IntPoly::reciprocal_scaled(const Integer& c) const {
  if (c_.empty()) return {};
  const std::size_t n = c_.size() - 1;
  std::vector<Integer> v(n + 1);
  Integer power = 1;
  for (std::size_t i = 0; i <= n; ++i) {
    v[n - i] = c_[i] * power;
    power *= c;
  }
  return IntPoly(std::move(v));
}

IntPoly IntPoly::substitute_power(unsigned k) const {
  if (k == 0) throw std::invalid_argument("substitute_power(0)");
  if (c_.empty()) return {};
  std::vector<Integer> v((c_.size() - 1) * k + 1);
  for (std::size_t i = 0; i < c_.size(); ++i) v[i * k] = c_[i];
  return IntPoly(std::move(v));
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<Integer> v(std::max(a.coeffs().size(), b.coeffs().size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) + b.coeff(i);
  return IntPoly(std::move(v));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
  std::vector<Integer> v(std::max(a.coeffs().size(), b.coeffs().size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) - b.coeff(i);
  return IntPoly(std::move(v));
}

IntPoly operator-(const IntPoly& a) { return Integer(-1) * a; }

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Integer> v(a.coeffs().size() + b.coeffs().size() - 1);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i)
    for (std::size_t j = 0; j < b.coeffs().size(); ++j) v[i + j] += a.coeffs()[i] * b.coeffs()[j];
  return IntPoly(std::move(v));
}

IntPoly operator*(const Integer& k, const IntPoly& a) {
  std::vector<Integer> v(a.coeffs());
  for (auto& x : v) x *= k;
  return IntPoly(std::move(v));
}

IntPoly pow(const IntPoly& a, unsigned e) {
  IntPoly r{1};
  for (unsigned i = 0; i < e; ++i) r = r * a;
  return r;
}

bool divides_exactly(const IntPoly& divisor, const IntPoly& dividend, IntPoly* quotient) {
  if (divisor.is_zero()) throw std::invalid_argument("division by zero polynomial");
  std::vector<Integer> rem = dividend.coeffs();
  const int db = divisor.degree();
  if (dividend.degree() < db) {
    if (quotient) *quotient = IntPoly();
    return dividend.is_zero();
  }
  std::vector<Integer> q(static_cast<std::size_t>(dividend.degree() - db + 1));
  for (int k = dividend.degree() - db; k >= 0; --k) {
    Integer& top = rem[static_cast<std::size_t>(k + db)];
    if (sgn(top) == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), divisor.lead().get_mpz_t())) return false;
    Integer f;
    mpz_divexact(f.get_mpz_t(), top.get_mpz_t(), divisor.lead().get_mpz_t());
    q[static_cast<std::size_t>(k)] = f;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(k + j)] -= f * divisor.coeffs()[static_cast<std::size_t>(j)];
  }
  for (const auto& x : rem)
    if (sgn(x) != 0) return false;
  if (quotient) *quotient = IntPoly(std::move(q));
  return true;
}

RatPoly::RatPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) {
  for (auto& x : c_) x.canonicalize();
  normalize();
}

RatPoly::RatPoly(const IntPoly& p) {
  for (const auto& x : p.coeffs()) c_.emplace_back(x);
}

void RatPoly::normalize() {
  while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
}

Rational RatPoly::eval(const Rational& x) const {
  Rational r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

int RatPoly::sign_at(const Rational& x) const { return sgn(eval(x)); }

RatPoly RatPoly::monic() const {
  if (c_.empty()) return {};
  std::vector<Rational> v(c_);
  Rational l = c_.back();
  for (auto& x : v) x /= l;
  return RatPoly(std::move(v));
}

RatPoly RatPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<unsigned long>(i);
  return RatPoly(std::move(d));
}

IntPoly RatPoly::to_primitive_int() const {
  Integer l = 1;
  for (const auto& x : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  std::vector<Integer> v(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) {
    Rational s = c_[i] * Rational(l);
    v[i] = s.get_num();
  }
  return IntPoly(std::move(v)).primitive_part();
}

RatPoly operator+(const RatPoly& a, const RatPoly& b) {
  std::vector<Rational> v(std::max(a.coeffs().size(), b.coeffs().size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) + b.coeff(i);
  return RatPoly(std::move(v));
}

RatPoly operator-(const RatPoly& a, const RatPoly& b) {
  std::vector<Rational> v(std::max(a.coeffs().size(), b.coeffs().size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) - b.coeff(i);
  return RatPoly(std::move(v));
}

RatPoly operator*(const RatPoly& a, const RatPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> v(a.coeffs().size() + b.coeffs().size() - 1);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i)
    for (std::size_t j = 0; j < b.coeffs().size(); ++j) v[i + j] += a.coeffs()[i] * b.coeffs()[j];
  return RatPoly(std::move(v));
}

RatPoly operator*(const Rational& k, const RatPoly& a) {
  std::vector<Rational> v(a.coeffs());
  for (auto& x : v) x *= k;
  return RatPoly(std::move(v));
}

void divmod(const RatPoly& a, const RatPoly& b, RatPoly& q, RatPoly& r) {
  if (b.is_zero()) throw std::invalid_argument("division by zero polynomial");
  std::vector<Rational> rem = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) {
    q = RatPoly();
    r = a;
    return;
  }
  std::vector<Rational> quo(static_cast<std::size_t>(a.degree() - db + 1));
  for (int k = a.degree() - db; k >= 0; --k) {
    Rational f = rem[static_cast<std::size_t>(k + db)] / b.lead();
    quo[static_cast<std::size_t>(k)] = f;
    if (sgn(f) == 0) continue;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(k + j)] -= f * b.coeffs()[static_cast<std::size_t>(j)];
  }
  rem.resize(static_cast<std::size_t>(db));
  q = RatPoly(std::move(quo));
  r = RatPoly(std::move(rem));
}

RatPoly gcd(const RatPoly& a, const RatPoly& b) {
  RatPoly x = a, y = b;
  while (!y.is_zero()) {
    RatPoly q, r;
    divmod(x, y, q, r);
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

void extended_gcd(const RatPoly& a, const RatPoly& b, RatPoly& g, RatPoly& s, RatPoly& t) {
  RatPoly r0 = a, r1 = b;
  RatPoly s0(std::vector<Rational>{Rational(1)}), s1;
  RatPoly t0, t1(std::vector<Rational>{Rational(1)});
  while (!r1.is_zero()) {
    RatPoly q, r;
    divmod(r0, r1, q, r);
    RatPoly s2 = s0 - q * s1, t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) {
    g = r0;
    s = s0;
    t = t0;
    return;
  }
  Rational inv = 1 / r0.lead();
  g = inv * r0;
  s = inv * s0;
  t = inv * t0;
}

IntPoly gcd_primitive(const IntPoly& a, const IntPoly& b) {
  RatPoly g = gcd(RatPoly(a), RatPoly(b));
  return g.to_primitive_int();
}

IntPoly square_free_part(const IntPoly& p) {
  if (p.degree() <= 0) return p.primitive_part();
  IntPoly g = gcd_primitive(p, p.derivative());
  IntPoly q;
  IntPoly pp = p.primitive_part();
  if (!divides_exactly(g, pp, &q)) throw std::logic_error("square_free_part: gcd does not divide");
  return q.primitive_part();
}

Integer resultant(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return 0;
  const std::size_t m = static_cast<std::size_t>(a.degree()), n = static_cast<std::size_t>(b.degree());
  IntMatrix s(m + n, m + n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j <= m; ++j) s(r, r + j) = a.coeffs()[m - j];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t j = 0; j <= n; ++j) s(n + r, r + j) = b.coeffs()[n - j];
  return determinant(s);
}

IntPoly parametric_resultant(const IntPoly& p, const std::function<IntPoly(const Integer&)>& h,
                             std::size_t degree_bound) {
  const std::size_t points = degree_bound + 1;
  std::vector<Rational> xs(points), ys(points);
  for (std::size_t k = 0; k < points; ++k) {
    Integer t(static_cast<unsigned long>(k));
    xs[k] = Rational(t);
    ys[k] = Rational(resultant(p, h(t)));
  }
  // Newton divided differences, then expand the Newton form.
  std::vector<Rational> coef = ys;
  for (std::size_t j = 1; j < points; ++j)
    for (std::size_t k = points - 1; k >= j; --k) {
      coef[k] = (coef[k] - coef[k - 1]) / (xs[k] - xs[k - j]);
      if (k == j) break;
    }
  RatPoly result;
  for (std::size_t j = points; j-- > 0;) {
    // result = result * (x - xs[j]) + coef[j]
    result = result * RatPoly(std::vector<Rational>{-xs[j], Rational(1)}) +
             RatPoly(std::vector<Rational>{coef[j]});
  }
  std::vector<Integer> out(result.coeffs().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (result.coeffs()[i].get_den() != 1) throw std::logic_error("parametric_resultant: non-integral interpolant");
    out[i] = result.coeffs()[i].get_num();
  }
  return IntPoly(std::move(out));
}

SturmSequence::SturmSequence(const IntPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("Sturm sequence of zero polynomial");
  chain_.emplace_back(p);
  RatPoly d = chain_.back().derivative();
  if (d.is_zero()) return;
  chain_.push_back(d);
  for (;;) {
    RatPoly q, r;
    divmod(chain_[chain_.size() - 2], chain_.back(), q, r);
    if (r.is_zero()) break;
    // Positive rescaling keeps the sign pattern and tames coefficient growth.
    IntPoly prim = (Rational(-1) * r).to_primitive_int();
    Rational lead_sign = sgn((Rational(-1) * r).lead()) > 0 ? 1 : -1;
    chain_.push_back(lead_sign * RatPoly(prim));
  }
}

namespace {
std::size_t count_changes(const std::vector<int>& signs) {
  std::size_t changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}
}  // namespace

std::size_t SturmSequence::variations(const Rational& x) const {
  std::vector<int> s;
  for (const auto& p : chain_) s.push_back(p.sign_at(x));
  return count_changes(s);
}

std::size_t SturmSequence::variations_at_pos_infinity() const {
  std::vector<int> s;
  for (const auto& p : chain_) s.push_back(sgn(p.lead()));
  return count_changes(s);
}

std::size_t SturmSequence::variations_at_neg_infinity() const {
  std::vector<int> s;
  for (const auto& p : chain_) s.push_back(p.degree() % 2 == 0 ? sgn(p.lead()) : -sgn(p.lead()));
  return count_changes(s);
}

std::size_t SturmSequence::count_half_open(const Rational& a, const Rational& b) const {
  return variations(a) - variations(b);
}

std::size_t SturmSequence::count_real() const {
  return variations_at_neg_infinity() - variations_at_pos_infinity();
}

Integer cauchy_root_bound(const IntPoly& p) {
  // 1 + max |a_i / a_n|, rounded up.
  Integer best = 0;
  for (int i = 0; i < p.degree(); ++i) {
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), Integer(abs(p.coeffs()[static_cast<std::size_t>(i)])).get_mpz_t(),
               Integer(abs(p.lead())).get_mpz_t());
    if (q > best) best = q;
  }
  return best + 1;
}

std::string to_string(const IntPoly& p, std::string_view var) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    Integer c = p.coeffs()[static_cast<std::size_t>(i)];
    if (sgn(c) == 0) continue;
    if (first) {
      if (sgn(c) < 0) os << '-';
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    Integer a = abs(c);
    if (i == 0 || a != 1) os << a;
    if (i > 0) {
      if (a != 1) os << '*';
      os << var;
      if (i > 1) os << '^' << i;
    }
    first = false;
  }
  return os.str();
}

IntPoly parse_polynomial(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty polynomial text");
  std::vector<Integer> coeffs;
  const auto add = [&](std::size_t deg, const Integer& c) {
    if (coeffs.size() <= deg) coeffs.resize(deg + 1);
    coeffs[deg] += c;
  };
  std::size_t i = 0;
  char var = 0;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (i != 0) {
      throw std::invalid_argument("expected '+' or '-' in polynomial text");
    }
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    Integer c = 1;
    bool has_number = i > start;
    if (has_number) c = Integer(s.substr(start, i - start));
    std::size_t deg = 0;
    if (i < s.size() && s[i] == '*') {
      if (!has_number) throw std::invalid_argument("dangling '*' in polynomial text");
      ++i;
    }
    if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) {
      if (var != 0 && s[i] != var) throw std::invalid_argument("polynomial text uses two variables");
      var = s[i];
      ++i;
      deg = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::size_t e0 = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (e0 == i) throw std::invalid_argument("missing exponent in polynomial text");
        deg = std::stoul(s.substr(e0, i - e0));
      }
    } else if (!has_number) {
      throw std::invalid_argument("malformed term in polynomial text");
    }
    add(deg, sign * c);
  }
  return IntPoly(std::move(coeffs));
}

IntPoly characteristic_polynomial(const IntMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("characteristic polynomial of non-square matrix");
  const std::size_t n = a.rows();
  // Berkowitz: v holds coefficients from the top degree down.
  std::vector<Integer> v{Integer(1)};
  for (std::size_t r = 1; r <= n; ++r) {
    const std::size_t m = r - 1;  // size of the leading block A_{r-1}
    std::vector<Integer> col(r + 1);
    col[0] = 1;
    col[1] = -a(m, m);
    // vec = A_{r-1}^k S, starting from S = a(0..m-1, m)
    std::vector<Integer> vec(m);
    for (std::size_t i = 0; i < m; ++i) vec[i] = a(i, m);
    for (std::size_t k = 2; k <= r; ++k) {
      Integer dot = 0;
      for (std::size_t i = 0; i < m; ++i) dot += a(m, i) * vec[i];
      col[k] = -dot;
      std::vector<Integer> next(m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) next[i] += a(i, j) * vec[j];
      vec = std::move(next);
    }
    std::vector<Integer> nv(r + 1);
    for (std::size_t i = 0; i <= r; ++i)
      for (std::size_t j = 0; j < v.size() && j <= i; ++j) nv[i] += col[i - j] * v[j];
    v = std::move(nv);
  }
  std::vector<Integer> coeffs(v.rbegin(), v.rend());
  return IntPoly(std::move(coeffs));
}

IntMatrix evaluate_at_matrix(const IntPoly& p, const IntMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("polynomial evaluation at non-square matrix");
  const std::size_t n = a.rows();
  IntMatrix r(n, n);
  for (int i = p.degree(); i >= 0; --i) {
    r = r * a;
    const Integer& c = p.coeffs()[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < n; ++k) r(k, k) += c;
  }
  return r;
}

IntMatrix companion_matrix(const IntPoly& p) {
  if (!p.is_monic()) throw std::invalid_argument("companion matrix needs a monic polynomial");
  const std::size_t n = static_cast<std::size_t>(p.degree());
  IntMatrix c(n, n);
  for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = 1;
  for (std::size_t i = 0; i < n; ++i) c(i, n - 1) = -p.coeffs()[i];
  return c;
}

}  // namespace wmt
