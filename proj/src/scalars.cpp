#include "heightdyn/scalars.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

namespace heightdyn {

const char* to_string(ClassificationError::Kind kind) {
  switch (kind) {
    case ClassificationError::Kind::invalid_row: return "invalid_row";
    case ClassificationError::Kind::not_block_diagonal: return "not_block_diagonal";
    case ClassificationError::Kind::not_dominant: return "not_dominant";
    case ClassificationError::Kind::internal: return "internal";
  }
  return "unknown";
}

namespace {

std::optional<SquarefreeSplit> split_impl(const Integer& n, unsigned long max_trial) {
  if (sgn(n) < 0) throw DomainError("squarefree_split: negative input " + n.get_str());
  if (sgn(n) == 0) return SquarefreeSplit{Integer(0), Integer(1)};

  Integer rest = n;
  Integer root = 1;
  Integer squarefree = 1;
  Integer cube;
  // Once p³ > rest, every prime factor left is ≥ p, so rest has at most two
  // prime factors: it is 1, a prime, a product of two primes, or a square.
  for (unsigned long p = 2;; p += (p == 2 ? 1 : 2)) {
    mpz_ui_pow_ui(cube.get_mpz_t(), p, 3);
    if (cube > rest) break;
    if (p > max_trial) return std::nullopt;
    unsigned count = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++count;
    }
    for (unsigned i = 0; i < count / 2; ++i) root *= p;
    if (count % 2 == 1) squarefree *= p;
  }
  if (rest != 1) {
    if (mpz_perfect_square_p(rest.get_mpz_t())) {
      Integer s;
      mpz_sqrt(s.get_mpz_t(), rest.get_mpz_t());
      root *= s;
    } else {
      squarefree *= rest;
    }
  }
  return SquarefreeSplit{root, squarefree};
}

// Brent's variant of Pollard rho; n odd, composite and not a perfect power.
Integer rho_divisor(const Integer& n) {
  mpz_srcptr N = n.get_mpz_t();
  Integer x, y, ys, q, g, diff;
  for (unsigned long c = 1;; ++c) {
    auto step = [&](Integer& v) {
      mpz_mul(v.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
      mpz_add_ui(v.get_mpz_t(), v.get_mpz_t(), c);
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), N);
    };
    y = 2;
    q = 1;
    g = 1;
    const unsigned long m = 128;
    for (unsigned long r = 1; g == 1; r *= 2) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) step(y);
      for (unsigned long k = 0; k < r && g == 1; k += m) {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          step(y);
          mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
          mpz_mul(q.get_mpz_t(), q.get_mpz_t(), diff.get_mpz_t());
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), N);
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), N);
      }
    }
    if (g == n) {
      do {
        step(ys);
        mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), ys.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), N);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void prime_factors(const Integer& n, std::vector<Integer>& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
    out.push_back(n);
    return;
  }
  if (mpz_perfect_power_p(n.get_mpz_t())) {
    Integer root;
    for (unsigned long k = 2;; ++k) {
      if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) {
        for (unsigned long i = 0; i < k; ++i) prime_factors(root, out);
        return;
      }
    }
  }
  const Integer d = rho_divisor(n);
  prime_factors(d, out);
  prime_factors(n / d, out);
}

}  // namespace

SquarefreeSplit squarefree_split(const Integer& n) {
  constexpr unsigned long kTrial = 1UL << 16;
  if (auto split = split_impl(n, kTrial)) return *split;
  // Trial division gave up; factor the rest completely.
  Integer rest = n;
  std::vector<Integer> primes;
  for (unsigned long p = 2; p <= kTrial; p += (p == 2 ? 1 : 2)) {
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      primes.emplace_back(p);
    }
  }
  prime_factors(rest, primes);
  std::sort(primes.begin(), primes.end());
  Integer root = 1, squarefree = 1;
  for (std::size_t i = 0; i < primes.size();) {
    std::size_t j = i;
    while (j < primes.size() && primes[j] == primes[i]) ++j;
    for (std::size_t k = 0; k < (j - i) / 2; ++k) root *= primes[i];
    if ((j - i) % 2 == 1) squarefree *= primes[i];
    i = j;
  }
  return {root, squarefree};
}

std::optional<SquarefreeSplit> try_squarefree_split(const Integer& n, unsigned long max_trial) {
  return split_impl(n, max_trial);
}

SurdDecomposition sqrt_decompose(const Rational& r) {
  if (sgn(r) < 0) throw DomainError("sqrt_decompose: negative input " + r.get_str());
  if (sgn(r) == 0) return {Rational(0), Integer(1)};
  // √(p/q) = √(pq) / q
  Integer pq = r.get_num() * r.get_den();
  SquarefreeSplit split = squarefree_split(pq);
  Rational coefficient(split.square_root, r.get_den());
  coefficient.canonicalize();
  return {coefficient, split.squarefree};
}

Integer common_field(const Integer& d1, const Integer& d2) {
  if (sgn(d1) == 0) return d2;
  if (sgn(d2) == 0 || d1 == d2) return d1;
  throw IncompatibleFieldError("incompatible quadratic fields Q(√" + d1.get_str() + ") and Q(√" +
                               d2.get_str() + ")");
}

QuadraticNumber::QuadraticNumber(Rational value) : a_(std::move(value)) { a_.canonicalize(); }

QuadraticNumber::QuadraticNumber(Rational a, Rational b, Integer d)
    : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)) {
  if (sgn(d_) < 0) throw DomainError("radicand must be non-negative, got " + d_.get_str());
  a_.canonicalize();
  b_.canonicalize();
  if (sgn(b_) == 0) {
    d_ = 0;
    return;
  }
  SquarefreeSplit split = squarefree_split(d_);
  b_ *= split.square_root;
  d_ = split.squarefree;
  canonicalize();
}

void QuadraticNumber::canonicalize() {
  if (d_ == 1) {
    a_ += b_;
    b_ = 0;
  }
  if (sgn(d_) == 0) b_ = 0;
  if (sgn(b_) == 0) d_ = 0;
}

QuadraticNumber QuadraticNumber::conjugate() const {
  QuadraticNumber out = *this;
  out.b_ = -out.b_;
  return out;
}

Rational QuadraticNumber::norm() const {
  Rational out = a_ * a_ - b_ * b_ * Rational(d_);
  return out;
}

QuadraticNumber QuadraticNumber::inverse() const {
  if (is_zero()) throw DomainError("division by zero");
  Rational n = norm();
  QuadraticNumber out;
  out.a_ = a_ / n;
  out.b_ = -b_ / n;
  out.d_ = d_;
  out.canonicalize();
  return out;
}

int QuadraticNumber::sign() const {
  const int sa = sgn(a_);
  const int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare a² against b²d.
  Rational lhs = a_ * a_;
  Rational rhs = b_ * b_ * Rational(d_);
  const int c = cmp(lhs, rhs);
  if (c == 0) return 0;
  return c > 0 ? sa : sb;
}

QuadraticNumber& QuadraticNumber::operator+=(const QuadraticNumber& rhs) {
  d_ = common_field(d_, rhs.d_);
  a_ += rhs.a_;
  b_ += rhs.b_;
  canonicalize();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator-=(const QuadraticNumber& rhs) {
  d_ = common_field(d_, rhs.d_);
  a_ -= rhs.a_;
  b_ -= rhs.b_;
  canonicalize();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator*=(const QuadraticNumber& rhs) {
  Integer d = common_field(d_, rhs.d_);
  Rational a = a_ * rhs.a_ + b_ * rhs.b_ * Rational(d);
  Rational b = a_ * rhs.b_ + b_ * rhs.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  d_ = std::move(d);
  canonicalize();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator/=(const QuadraticNumber& rhs) {
  if (rhs.is_zero()) throw DomainError("division by zero");
  common_field(d_, rhs.d_);
  return *this *= rhs.inverse();
}

QuadraticNumber QuadraticNumber::operator-() const {
  QuadraticNumber out = *this;
  out.a_ = -out.a_;
  out.b_ = -out.b_;
  return out;
}

bool operator==(const QuadraticNumber& lhs, const QuadraticNumber& rhs) {
  return lhs.a_ == rhs.a_ && lhs.b_ == rhs.b_ && lhs.d_ == rhs.d_;
}

std::strong_ordering operator<=>(const QuadraticNumber& lhs, const QuadraticNumber& rhs) {
  const int s = (lhs - rhs).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

QuadraticNumber arith(const QuadraticNumber& x, const QuadraticNumber& y, ArithOp op) {
  switch (op) {
    case ArithOp::add: return x + y;
    case ArithOp::sub: return x - y;
    case ArithOp::mul: return x * y;
    case ArithOp::div: return x / y;
  }
  throw DomainError("unknown arithmetic operation");
}

std::string QuadraticNumber::to_string() const {
  if (is_rational()) return a_.get_str();
  std::string out;
  if (sgn(a_) != 0) out = a_.get_str();
  Rational magnitude = abs(b_);
  if (sgn(b_) < 0) {
    out += "-";
  } else if (!out.empty()) {
    out += "+";
  }
  if (magnitude != 1) out += magnitude.get_str();
  out += "√";
  out += d_.get_str();
  return out;
}

namespace {

constexpr std::string_view kRadicalUtf8 = "√";

bool consume(std::string_view text, std::size_t& pos, std::string_view token) {
  if (text.substr(pos, token.size()) == token) {
    pos += token.size();
    return true;
  }
  return false;
}

std::optional<Integer> read_digits(std::string_view text, std::size_t& pos) {
  const std::size_t start = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == start) return std::nullopt;
  return Integer(std::string(text.substr(start, pos - start)), 10);
}

[[noreturn]] void bad_scalar(std::string_view text, const std::string& why) {
  throw ParseError("", "bad scalar literal \"" + std::string(text) + "\": " + why);
}

}  // namespace

QuadraticNumber QuadraticNumber::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) bad_scalar(text, "empty");

  QuadraticNumber total;
  std::size_t pos = 0;
  int terms = 0;
  while (pos < text.size()) {
    int term_sign = 1;
    bool has_sign = false;
    if (text[pos] == '+' || text[pos] == '-') {
      term_sign = text[pos] == '-' ? -1 : 1;
      has_sign = true;
      ++pos;
    }
    if (terms > 0 && !has_sign) bad_scalar(text, "expected '+' or '-' between terms");

    std::optional<Rational> coefficient;
    if (auto num = read_digits(text, pos)) {
      Rational value(*num);
      if (consume(text, pos, "/")) {
        auto den = read_digits(text, pos);
        if (!den) bad_scalar(text, "missing denominator");
        if (sgn(*den) == 0) bad_scalar(text, "zero denominator");
        value = Rational(*num, *den);
        value.canonicalize();
      }
      coefficient = value;
      consume(text, pos, "*");
    }

    std::optional<Integer> radicand;
    if (consume(text, pos, kRadicalUtf8) || consume(text, pos, "sqrt")) {
      const bool paren = consume(text, pos, "(");
      radicand = read_digits(text, pos);
      if (!radicand) bad_scalar(text, "missing radicand");
      if (paren && !consume(text, pos, ")")) bad_scalar(text, "unbalanced parenthesis");
    }

    if (!coefficient && !radicand) bad_scalar(text, "unexpected character at offset " + std::to_string(pos));
    Rational c = coefficient.value_or(Rational(1)) * term_sign;
    if (radicand) {
      total += QuadraticNumber(Rational(0), c, *radicand);
    } else {
      total += QuadraticNumber(c);
    }
    ++terms;
  }
  return total;
}

namespace {
constexpr unsigned long kExactSqrtTrialLimit = 2'000'000;

std::optional<Rational> rational_sqrt(const Rational& r) {
  if (sgn(r) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(r.get_num_mpz_t()) || !mpz_perfect_square_p(r.get_den_mpz_t())) return std::nullopt;
  Integer num, den;
  mpz_sqrt(num.get_mpz_t(), r.get_num_mpz_t());
  mpz_sqrt(den.get_mpz_t(), r.get_den_mpz_t());
  return Rational(num, den);
}
}  // namespace

std::optional<QuadraticNumber> exact_sqrt(const QuadraticNumber& x, const Integer& field) {
  const int x_sign = x.sign();
  if (x_sign < 0) return std::nullopt;
  if (x_sign == 0) return QuadraticNumber();
  if (x.is_rational()) {
    const Rational& r = x.rational_part();
    // √(p/q) = √(pq)/q; perfect-square tests decide the two cheap cases.
    Integer pq = r.get_num() * r.get_den();
    if (mpz_perfect_square_p(pq.get_mpz_t())) {
      Integer root;
      mpz_sqrt(root.get_mpz_t(), pq.get_mpz_t());
      return QuadraticNumber(Rational(root, r.get_den()));
    }
    if (sgn(field) != 0) {
      if (!mpz_divisible_p(pq.get_mpz_t(), field.get_mpz_t())) return std::nullopt;
      Integer cofactor = pq / field;
      if (!mpz_perfect_square_p(cofactor.get_mpz_t())) return std::nullopt;
      Integer root;
      mpz_sqrt(root.get_mpz_t(), cofactor.get_mpz_t());
      return QuadraticNumber(Rational(0), Rational(root, r.get_den()), field);
    }
    auto split = try_squarefree_split(pq, kExactSqrtTrialLimit);
    if (!split) return std::nullopt;
    return QuadraticNumber(Rational(0), Rational(split->square_root, r.get_den()), split->squarefree);
  }
  if (sgn(field) != 0 && field != x.radicand()) return std::nullopt;

  // Denesting: (p + q√k)² = a + b√k  ⟺  p² + k q² = a and 2pq = b.
  const Rational& a = x.rational_part();
  const Rational& b = x.surd_coefficient();
  const Integer& k = x.radicand();
  Rational norm = x.norm();
  auto n = rational_sqrt(norm);
  if (!n) return std::nullopt;
  for (int branch : {1, -1}) {
    Rational p_squared = (a + branch * *n) / 2;
    if (sgn(p_squared) <= 0) continue;
    auto p = rational_sqrt(p_squared);
    if (!p) continue;
    Rational q = b / (2 * *p);
    QuadraticNumber y(*p, q, k);
    if (y * y == x) return y.sign() < 0 ? -y : y;
  }
  return std::nullopt;
}

namespace {

struct MpfrScope {
  explicit MpfrScope(mpfr_prec_t prec) {
    mpfr_init2(a, prec);
    mpfr_init2(b, prec);
    mpfr_init2(s, prec);
  }
  ~MpfrScope() {
    mpfr_clear(a);
    mpfr_clear(b);
    mpfr_clear(s);
  }
  MpfrScope(const MpfrScope&) = delete;
  MpfrScope& operator=(const MpfrScope&) = delete;
  mpfr_t a, b, s;
};

long magnitude_bits(const QuadraticNumber& x) {
  auto bits = [](const Integer& v) { return static_cast<long>(mpz_sizeinbase(v.get_mpz_t(), 2)); };
  long out = bits(x.rational_part().get_num());
  if (!x.is_rational()) {
    out = std::max(out, bits(x.surd_coefficient().get_num()) + bits(x.radicand()) / 2 + 1);
  }
  return out;
}

}  // namespace

Approximation to_float(const QuadraticNumber& x, unsigned precision_bits) {
  const unsigned bits = std::max(precision_bits, 53u);
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits) + 64 + magnitude_bits(x);
  MpfrScope m(prec);
  const bool exact_input = mpfr_set_q(m.a, x.rational_part().get_mpq_t(), MPFR_RNDN) == 0 && x.is_rational();
  if (!x.is_rational()) {
    mpfr_set_q(m.b, x.surd_coefficient().get_mpq_t(), MPFR_RNDN);
    mpfr_set_z(m.s, x.radicand().get_mpz_t(), MPFR_RNDN);
    mpfr_sqrt(m.s, m.s, MPFR_RNDN);
    mpfr_mul(m.b, m.b, m.s, MPFR_RNDN);
    mpfr_add(m.a, m.a, m.b, MPFR_RNDN);
  }

  Approximation out{};
  out.value = mpfr_get_d(m.a, MPFR_RNDN);
  if (x.is_zero() || (exact_input && mpfr_cmp_d(m.a, out.value) == 0)) {
    out.error_bound = 0.0;
  } else {
    // Five correctly rounded steps at `prec` bits, then one rounding to double.
    const double scale = std::abs(x.rational_part().get_d()) +
                         std::abs(x.surd_coefficient().get_d()) * std::sqrt(x.radicand().get_d());
    const double working = std::ldexp(scale, static_cast<int>(3 - std::min<mpfr_prec_t>(prec, 1000)));
    const double v = std::abs(out.value);
    const double half_ulp = (std::nextafter(v, std::numeric_limits<double>::infinity()) - v) / 2;
    out.error_bound = (half_ulp + working) * (1 + 1e-12);
  }

  const int decimals = static_cast<int>(std::ceil(bits * 0.30103)) + 2;
  char* buffer = nullptr;
  if (mpfr_asprintf(&buffer, "%.*RNf", decimals, m.a) >= 0 && buffer != nullptr) {
    out.decimal = buffer;
    mpfr_free_str(buffer);
  }
  return out;
}

double QuadraticNumber::to_double() const {
  MpfrScope m(static_cast<mpfr_prec_t>(128 + magnitude_bits(*this)));
  mpfr_set_q(m.a, a_.get_mpq_t(), MPFR_RNDN);
  if (!is_rational()) {
    mpfr_set_q(m.b, b_.get_mpq_t(), MPFR_RNDN);
    mpfr_set_z(m.s, d_.get_mpz_t(), MPFR_RNDN);
    mpfr_sqrt(m.s, m.s, MPFR_RNDN);
    mpfr_mul(m.b, m.b, m.s, MPFR_RNDN);
    mpfr_add(m.a, m.a, m.b, MPFR_RNDN);
  }
  return mpfr_get_d(m.a, MPFR_RNDN);
}

}  // namespace heightdyn
