#pragma once

// Exact element arithmetic for three discrete valuation rings behind one
// compile-time interface:
//
//   PLocalIntegers    integers localized at a prime p, uniformizer p
//   LocalPolynomials  F_p[t] localized at (t), uniformizer t
//   RamifiedQuadratic rank-2 extension of the p-local integers with
//                     pi^2 = c*p for a unit c; uniformizer pi
//
// Elements are exact: rationals, ratios of F_p-polynomials, or pairs of
// rationals. An element value may lie anywhere in the fraction field K;
// membership in the ring itself is "valuation >= 0" and is enforced at the
// parsing boundary and wherever an operation's contract needs it.
//
// Textual grammar (whitespace-insensitive):
//   p-local-int        "-3/4", "7"
//   t-local-poly       "1 + 2*t^1 + 4*t^3", optionally "num/den"
//   ramified-quadratic "3 + 4/3*pi", "-1/2*pi", "2"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "dvrss/error.hpp"

namespace dvrss {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// valuations: a natural number (or any integer, for fraction-field elements)
// together with +infinity for zero
// ---------------------------------------------------------------------------

struct Val {
    bool finite = true;
    long long v = 0;

    static Val inf() { return Val{false, 0}; }
    static Val of(long long k) { return Val{true, k}; }

    friend bool operator==(const Val& a, const Val& b)
    {
        if (!a.finite || !b.finite)
            return a.finite == b.finite;
        return a.v == b.v;
    }
    friend bool operator<(const Val& a, const Val& b)
    {
        if (!a.finite)
            return false;
        if (!b.finite)
            return true;
        return a.v < b.v;
    }
    friend Val operator+(const Val& a, const Val& b)
    {
        if (!a.finite || !b.finite)
            return inf();
        return of(a.v + b.v);
    }
    bool nonneg() const { return !finite || v >= 0; }
};

inline Val val_min(const Val& a, const Val& b) { return a < b ? a : b; }

// v_p of a nonzero integer
inline long long int_valuation(BigInt n, long long p)
{
    long long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline Val rat_valuation(const BigRat& x, long long p)
{
    if (x == 0)
        return Val::inf();
    return Val::of(int_valuation(numerator(x), p) - int_valuation(denominator(x), p));
}

// modular inverse for 0 < a < p, p prime
inline long long mod_inverse(long long a, long long p)
{
    long long t = 0, new_t = 1, r = p, new_r = a % p;
    while (new_r != 0) {
        long long q = r / new_r;
        t -= q * new_t;
        std::swap(t, new_t);
        r -= q * new_r;
        std::swap(r, new_r);
    }
    require(r == 1, "not-a-unit", "element has no inverse modulo p");
    return ((t % p) + p) % p;
}

inline long long rat_residue(const BigRat& x, long long p)
{
    BigInt num = numerator(x) % p;
    BigInt den = denominator(x) % p;
    long long n = ((num.convert_to<long long>() % p) + p) % p;
    long long d = ((den.convert_to<long long>() % p) + p) % p;
    require(d != 0, "not-a-unit", "residue undefined: denominator divisible by p");
    return n * mod_inverse(d, p) % p;
}

// ---------------------------------------------------------------------------
// shared parsing helpers
// ---------------------------------------------------------------------------

namespace detail {

struct Cursor {
    const std::string& s;
    size_t i = 0;

    void skip()
    {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
    }
    bool eat(char c)
    {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    bool eat_word(const char* w)
    {
        skip();
        size_t j = i, k = 0;
        while (w[k] && j < s.size() && s[j] == w[k]) {
            ++j;
            ++k;
        }
        if (w[k])
            return false;
        i = j;
        return true;
    }
    bool done()
    {
        skip();
        return i >= s.size();
    }
    [[noreturn]] void err(const std::string& what)
    {
        fail("syntax", "cannot parse element '" + s + "': " + what);
    }
};

inline BigInt parse_uint(Cursor& c)
{
    c.skip();
    size_t start = c.i;
    while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i])))
        ++c.i;
    if (c.i == start)
        c.err("expected a number");
    return BigInt(c.s.substr(start, c.i - start));
}

// signed rational: [+-] uint [ '/' uint ]
inline BigRat parse_rational(Cursor& c)
{
    c.skip();
    bool neg = false;
    if (c.eat('-'))
        neg = true;
    else
        c.eat('+');
    BigInt num = parse_uint(c);
    BigInt den = 1;
    if (c.eat('/'))
        den = parse_uint(c);
    if (den == 0)
        c.err("zero denominator");
    BigRat q(num, den);
    return neg ? BigRat(-q) : q;
}

inline std::string rat_to_string(const BigRat& q)
{
    std::string s = numerator(q).str();
    if (denominator(q) != 1)
        s += "/" + denominator(q).str();
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PLocalIntegers: Z_(p)
// ---------------------------------------------------------------------------

struct PLocalIntegers {
    using Elem = BigRat;

    long long p;

    explicit PLocalIntegers(long long prime) : p(prime) {}

    static constexpr const char* kind = "p-local-int";
    long long residue_char() const { return p; }
    long long ram_index() const { return 1; }

    Elem zero() const { return BigRat(0); }
    Elem one() const { return BigRat(1); }
    Elem from_int(long long n) const { return BigRat(n); }

    bool is_zero(const Elem& x) const { return x == 0; }
    bool eq(const Elem& x, const Elem& y) const { return x == y; }

    Elem add(const Elem& x, const Elem& y) const { return x + y; }
    Elem sub(const Elem& x, const Elem& y) const { return x - y; }
    Elem mul(const Elem& x, const Elem& y) const { return x * y; }
    Elem neg(const Elem& x) const { return -x; }
    Elem divide(const Elem& x, const Elem& y) const
    {
        require(y != 0, "division-by-zero", "division by zero");
        return x / y;
    }

    Val valuation(const Elem& x) const { return rat_valuation(x, p); }
    bool in_ring(const Elem& x) const { return valuation(x).nonneg(); }
    bool is_unit(const Elem& x) const { return valuation(x) == Val::of(0); }

    Elem unit_inverse(const Elem& x) const
    {
        require(is_unit(x), "not-a-unit", "unit_inverse of a non-unit");
        return 1 / x;
    }

    Elem uniformizer() const { return BigRat(p); }

    Elem pi_pow(long long k) const
    {
        BigRat r = 1;
        for (long long i = 0; i < (k >= 0 ? k : -k); ++i)
            r *= p;
        return k >= 0 ? r : BigRat(1) / r;
    }

    long long residue(const Elem& x) const
    {
        require(valuation(x).nonneg(), "not-integral", "residue of an element with negative valuation");
        return rat_residue(x, p);
    }

    std::string format(const Elem& x) const { return detail::rat_to_string(x); }

    Elem parse(const std::string& s) const
    {
        detail::Cursor c{s};
        BigRat q = detail::parse_rational(c);
        if (!c.done())
            c.err("trailing characters");
        require(rat_valuation(q, p).nonneg(), "semantic",
                "'" + s + "' has the uniformizer in its denominator");
        return q;
    }
};

// ---------------------------------------------------------------------------
// polynomials over F_p (dense, no trailing zeros; empty vector = 0)
// ---------------------------------------------------------------------------

struct FpPoly {
    std::vector<long long> c;

    bool is_zero() const { return c.empty(); }
    long long deg() const { return static_cast<long long>(c.size()) - 1; }
};

namespace fppoly {

inline FpPoly trim(FpPoly a)
{
    while (!a.c.empty() && a.c.back() == 0)
        a.c.pop_back();
    return a;
}

inline FpPoly constant(long long v, long long p)
{
    v = ((v % p) + p) % p;
    FpPoly r;
    if (v != 0)
        r.c = {v};
    return r;
}

inline FpPoly add(const FpPoly& a, const FpPoly& b, long long p)
{
    FpPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.c.size(); ++i) {
        long long v = (i < a.c.size() ? a.c[i] : 0) + (i < b.c.size() ? b.c[i] : 0);
        r.c[i] = v % p;
    }
    return trim(r);
}

inline FpPoly neg(const FpPoly& a, long long p)
{
    FpPoly r = a;
    for (auto& v : r.c)
        v = (p - v) % p;
    return r;
}

inline FpPoly sub(const FpPoly& a, const FpPoly& b, long long p) { return add(a, neg(b, p), p); }

inline FpPoly mul(const FpPoly& a, const FpPoly& b, long long p)
{
    if (a.is_zero() || b.is_zero())
        return {};
    FpPoly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = (r.c[i + j] + a.c[i] * b.c[j]) % p;
    return trim(r);
}

// division with remainder; b != 0
inline std::pair<FpPoly, FpPoly> divmod(const FpPoly& a, const FpPoly& b, long long p)
{
    FpPoly rem = a, quot;
    long long db = b.deg();
    long long inv_lead = mod_inverse(b.c.back(), p);
    if (rem.deg() >= db)
        quot.c.assign(rem.deg() - db + 1, 0);
    while (!rem.is_zero() && rem.deg() >= db) {
        long long shift = rem.deg() - db;
        long long coef = rem.c.back() * inv_lead % p;
        quot.c[shift] = coef;
        for (long long i = 0; i <= db; ++i) {
            long long idx = shift + i;
            rem.c[idx] = ((rem.c[idx] - coef * b.c[i]) % p + p) % p;
        }
        rem = trim(rem);
    }
    return {trim(quot), rem};
}

inline FpPoly gcd(FpPoly a, FpPoly b, long long p)
{
    while (!b.is_zero()) {
        auto [q, r] = divmod(a, b, p);
        a = b;
        b = r;
    }
    return a;
}

inline FpPoly make_monic(const FpPoly& a, long long p)
{
    if (a.is_zero())
        return a;
    long long inv = mod_inverse(a.c.back(), p);
    FpPoly r = a;
    for (auto& v : r.c)
        v = v * inv % p;
    return r;
}

inline long long ord_t(const FpPoly& a)
{
    for (size_t i = 0; i < a.c.size(); ++i)
        if (a.c[i] != 0)
            return static_cast<long long>(i);
    return -1;  // zero polynomial
}

inline bool eq(const FpPoly& a, const FpPoly& b) { return a.c == b.c; }

}  // namespace fppoly

// an element of F_p(t): num/den with den monic, nonzero, gcd(num, den) = 1
struct RatFunc {
    FpPoly num;
    FpPoly den{{1}};
};

// ---------------------------------------------------------------------------
// LocalPolynomials: F_p[t]_(t)
// ---------------------------------------------------------------------------

struct LocalPolynomials {
    using Elem = RatFunc;

    long long p;

    explicit LocalPolynomials(long long prime) : p(prime) {}

    static constexpr const char* kind = "t-local-poly";
    long long residue_char() const { return p; }
    long long ram_index() const { return 1; }

    Elem normalize(FpPoly num, FpPoly den) const
    {
        require(!den.is_zero(), "division-by-zero", "division by zero");
        if (num.is_zero())
            return Elem{};
        FpPoly g = fppoly::gcd(num, den, p);
        if (g.deg() > 0 || (!g.is_zero() && g.c[0] != 1)) {
            num = fppoly::divmod(num, g, p).first;
            den = fppoly::divmod(den, g, p).first;
        }
        long long lead_inv = mod_inverse(den.c.back(), p);
        FpPoly scale = fppoly::constant(lead_inv, p);
        return Elem{fppoly::mul(num, scale, p), fppoly::mul(den, scale, p)};
    }

    Elem zero() const { return Elem{}; }
    Elem one() const { return Elem{{{1}}, {{1}}}; }
    Elem from_int(long long n) const { return Elem{fppoly::constant(n, p), {{1}}}; }
    Elem from_poly(FpPoly f) const { return Elem{fppoly::trim(std::move(f)), {{1}}}; }

    bool is_zero(const Elem& x) const { return x.num.is_zero(); }
    bool eq(const Elem& x, const Elem& y) const
    {
        return fppoly::eq(x.num, y.num) && fppoly::eq(x.den, y.den);
    }

    Elem add(const Elem& x, const Elem& y) const
    {
        FpPoly n = fppoly::add(fppoly::mul(x.num, y.den, p), fppoly::mul(y.num, x.den, p), p);
        return normalize(n, fppoly::mul(x.den, y.den, p));
    }
    Elem sub(const Elem& x, const Elem& y) const { return add(x, neg(y)); }
    Elem mul(const Elem& x, const Elem& y) const
    {
        return normalize(fppoly::mul(x.num, y.num, p), fppoly::mul(x.den, y.den, p));
    }
    Elem neg(const Elem& x) const { return Elem{fppoly::neg(x.num, p), x.den}; }
    Elem divide(const Elem& x, const Elem& y) const
    {
        require(!is_zero(y), "division-by-zero", "division by zero");
        return normalize(fppoly::mul(x.num, y.den, p), fppoly::mul(x.den, y.num, p));
    }

    Val valuation(const Elem& x) const
    {
        if (is_zero(x))
            return Val::inf();
        return Val::of(fppoly::ord_t(x.num) - fppoly::ord_t(x.den));
    }
    bool in_ring(const Elem& x) const { return valuation(x).nonneg(); }
    bool is_unit(const Elem& x) const { return valuation(x) == Val::of(0); }

    Elem unit_inverse(const Elem& x) const
    {
        require(is_unit(x), "not-a-unit", "unit_inverse of a non-unit");
        return divide(one(), x);
    }

    Elem uniformizer() const { return Elem{{{0, 1}}, {{1}}}; }

    Elem pi_pow(long long k) const
    {
        if (k >= 0) {
            FpPoly f;
            f.c.assign(static_cast<size_t>(k) + 1, 0);
            f.c.back() = 1;
            return Elem{f, {{1}}};
        }
        FpPoly f;
        f.c.assign(static_cast<size_t>(-k) + 1, 0);
        f.c.back() = 1;
        return Elem{{{1}}, f};
    }

    long long residue(const Elem& x) const
    {
        require(valuation(x).nonneg(), "not-integral", "residue of an element with negative valuation");
        if (is_zero(x) || x.num.c[0] == 0)
            return 0;
        return x.num.c[0] * mod_inverse(x.den.c[0], p) % p;
    }

    std::string format(const Elem& x) const
    {
        auto poly_str = [&](const FpPoly& f) {
            if (f.is_zero())
                return std::string("0");
            std::string s;
            for (size_t i = 0; i < f.c.size(); ++i) {
                if (f.c[i] == 0)
                    continue;
                if (!s.empty())
                    s += " + ";
                s += std::to_string(f.c[i]);
                if (i > 0)
                    s += "*t^" + std::to_string(i);
            }
            return s;
        };
        std::string s = poly_str(x.num);
        if (!(x.den.deg() == 0 && x.den.c[0] == 1))
            s += " / " + poly_str(x.den);
        return s;
    }

    FpPoly parse_poly(detail::Cursor& c) const
    {
        FpPoly f;
        bool first = true;
        while (true) {
            c.skip();
            bool neg_term = false;
            if (c.eat('-'))
                neg_term = true;
            else if (!c.eat('+') && !first)
                break;
            c.skip();
            if (c.i >= c.s.size())
                break;
            long long coef = 1;
            bool have_coef = false;
            if (std::isdigit(static_cast<unsigned char>(c.s[c.i]))) {
                BigInt n = detail::parse_uint(c);
                coef = (n % p).convert_to<long long>();
                have_coef = true;
            }
            long long expo = 0;
            bool have_t = false;
            if (have_coef)
                c.eat('*');
            if (c.eat_word("t")) {
                have_t = true;
                expo = 1;
                if (c.eat('^'))
                    expo = detail::parse_uint(c).convert_to<long long>();
            }
            if (!have_coef && !have_t) {
                if (first)
                    c.err("expected a polynomial term");
                break;
            }
            if (neg_term)
                coef = (p - coef % p) % p;
            if (static_cast<long long>(f.c.size()) <= expo)
                f.c.resize(expo + 1, 0);
            f.c[expo] = (f.c[expo] + coef) % p;
            first = false;
        }
        return fppoly::trim(f);
    }

    Elem parse(const std::string& s) const
    {
        detail::Cursor c{s};
        FpPoly num = parse_poly(c);
        FpPoly den{{1}};
        if (c.eat('/'))
            den = parse_poly(c);
        if (!c.done())
            c.err("trailing characters");
        require(!den.is_zero(), "syntax", "zero denominator");
        Elem e = normalize(num, den);
        require(valuation(e).nonneg(), "semantic",
                "'" + s + "' has the uniformizer in its denominator");
        return e;
    }
};

// ---------------------------------------------------------------------------
// RamifiedQuadratic: Z_(p)[pi] / (pi^2 - c*p), e = 2
// ---------------------------------------------------------------------------

struct QuadElem {
    BigRat a, b;  // a + b*pi
};

struct RamifiedQuadratic {
    using Elem = QuadElem;

    long long p;
    BigRat unit_multiplier;  // the c in pi^2 = c*p; a p-local unit

    explicit RamifiedQuadratic(long long prime, BigRat c = BigRat(1))
        : p(prime), unit_multiplier(std::move(c))
    {
        require(rat_valuation(unit_multiplier, p) == Val::of(0), "semantic",
                "unit-multiplier must have valuation 0");
    }

    static constexpr const char* kind = "ramified-quadratic";
    long long residue_char() const { return p; }
    long long ram_index() const { return 2; }

    Elem zero() const { return Elem{0, 0}; }
    Elem one() const { return Elem{1, 0}; }
    Elem from_int(long long n) const { return Elem{BigRat(n), 0}; }

    bool is_zero(const Elem& x) const { return x.a == 0 && x.b == 0; }
    bool eq(const Elem& x, const Elem& y) const { return x.a == y.a && x.b == y.b; }

    Elem add(const Elem& x, const Elem& y) const { return Elem{x.a + y.a, x.b + y.b}; }
    Elem sub(const Elem& x, const Elem& y) const { return Elem{x.a - y.a, x.b - y.b}; }
    Elem neg(const Elem& x) const { return Elem{-x.a, -x.b}; }

    Elem mul(const Elem& x, const Elem& y) const
    {
        BigRat pi2 = unit_multiplier * p;
        return Elem{x.a * y.a + x.b * y.b * pi2, x.a * y.b + x.b * y.a};
    }

    Elem divide(const Elem& x, const Elem& y) const
    {
        require(!is_zero(y), "division-by-zero", "division by zero");
        // multiply by the conjugate; a^2 - b^2*c*p is nonzero (odd/even valuations)
        BigRat norm = y.a * y.a - y.b * y.b * unit_multiplier * p;
        Elem num = mul(x, Elem{y.a, -y.b});
        return Elem{num.a / norm, num.b / norm};
    }

    Val valuation(const Elem& x) const
    {
        Val va = rat_valuation(x.a, p);
        Val vb = rat_valuation(x.b, p);
        Val ra = va.finite ? Val::of(2 * va.v) : Val::inf();
        Val rb = vb.finite ? Val::of(2 * vb.v + 1) : Val::inf();
        return val_min(ra, rb);
    }
    bool in_ring(const Elem& x) const { return valuation(x).nonneg(); }
    bool is_unit(const Elem& x) const { return valuation(x) == Val::of(0); }

    Elem unit_inverse(const Elem& x) const
    {
        require(is_unit(x), "not-a-unit", "unit_inverse of a non-unit");
        return divide(one(), x);
    }

    Elem uniformizer() const { return Elem{0, 1}; }

    Elem pi_pow(long long k) const
    {
        BigRat pi2 = unit_multiplier * p;
        bool invert = k < 0;
        long long n = invert ? -k : k;
        BigRat even = 1;
        for (long long i = 0; i < n / 2; ++i)
            even *= pi2;
        Elem r = (n % 2 == 0) ? Elem{even, 0} : Elem{0, even};
        return invert ? divide(one(), r) : r;
    }

    long long residue(const Elem& x) const
    {
        require(valuation(x).nonneg(), "not-integral", "residue of an element with negative valuation");
        return rat_residue(x.a, p);
    }

    std::string format(const Elem& x) const
    {
        if (x.b == 0)
            return detail::rat_to_string(x.a);
        std::string bs = detail::rat_to_string(x.b) + "*pi";
        if (x.a == 0)
            return bs;
        if (x.b < 0)
            return detail::rat_to_string(x.a) + " - " + detail::rat_to_string(-x.b) + "*pi";
        return detail::rat_to_string(x.a) + " + " + bs;
    }

    Elem parse(const std::string& s) const
    {
        detail::Cursor c{s};
        BigRat a = 0, b = 0;
        bool first = true;
        while (true) {
            c.skip();
            bool neg_term = false;
            if (c.eat('-'))
                neg_term = true;
            else if (!c.eat('+') && !first)
                break;
            c.skip();
            if (c.i >= c.s.size()) {
                if (first)
                    c.err("empty element");
                break;
            }
            BigRat coef = 1;
            bool have_coef = false;
            if (std::isdigit(static_cast<unsigned char>(c.s[c.i]))) {
                BigInt num = detail::parse_uint(c);
                BigInt den = 1;
                if (c.eat('/'))
                    den = detail::parse_uint(c);
                if (den == 0)
                    c.err("zero denominator");
                coef = BigRat(num, den);
                have_coef = true;
            }
            bool have_pi = false;
            if (have_coef)
                c.eat('*');
            if (c.eat_word("pi"))
                have_pi = true;
            if (!have_coef && !have_pi)
                c.err("expected a term");
            if (neg_term)
                coef = -coef;
            if (have_pi)
                b += coef;
            else
                a += coef;
            first = false;
        }
        if (!c.done())
            c.err("trailing characters");
        Elem e{a, b};
        require(valuation(e).nonneg(), "semantic",
                "'" + s + "' has the uniformizer in its denominator");
        return e;
    }
};

}  // namespace dvrss
