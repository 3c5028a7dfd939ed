#pragma once

#include <gmpxx.h>

#include <complex>
#include <stdexcept>
#include <string>

namespace pdm {

using Rat = mpq_class;

// Raised for singular or out-of-domain evaluations: division by a zero-valued
// jet, sqrt/ln off their domain, transcendentals requested in rational mode,
// unbound names at evaluation time.
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Parses "p", "-p" or "p/q" with a nonzero q. Used for catalog parameters and
// numeric literals; anything else is a hard error, never a truncation.
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw EvalError("empty rational literal");
    try {
        Rat r(s);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw EvalError("bad rational literal '" + s + "'");
    }
}

// mpq_class(p, q) leaves the fraction unreduced, which silently corrupts
// later comparisons; all integer-pair construction goes through here.
inline Rat rat(long p, long q = 1) {
    Rat r(p, q);
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline double rat_d(const Rat& r) { return r.get_d(); }

// Exact complex rational, used for operator-level scalars such as i and the
// constant prefactors of the conformal generators.
struct CRat {
    Rat re{0}, im{0};

    CRat() = default;
    CRat(long r) : re(r) {}
    CRat(Rat r) : re(std::move(r)) {}
    CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    static CRat i(long k = 1) { return CRat(Rat(0), Rat(k)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }
    bool operator==(const CRat& o) const { return re == o.re && im == o.im; }

    CRat operator-() const { return CRat(-re, -im); }
    CRat operator+(const CRat& o) const { return CRat(re + o.re, im + o.im); }
    CRat operator-(const CRat& o) const { return CRat(re - o.re, im - o.im); }
    CRat operator*(const CRat& o) const {
        return CRat(re * o.re - im * o.im, re * o.im + im * o.re);
    }

    std::complex<double> to_complex() const { return {rat_d(re), rat_d(im)}; }
};

inline CRat conj(const CRat& z) { return CRat(z.re, -z.im); }

}  // namespace pdm
