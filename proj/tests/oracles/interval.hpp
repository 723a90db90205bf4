#pragma once

// Closed integer intervals with exact endpoint arithmetic.

#include <gmpxx.h>

#include <algorithm>
#include <vector>

namespace oracle {

struct Interval {
    mpz_class lo, hi;

    static Interval sym(const mpz_class& b) { return {-b, b}; }
    static Interval point(const mpz_class& v) { return {v, v}; }

    mpz_class mag() const { return std::max(abs(lo), abs(hi)); }

    friend Interval operator+(const Interval& x, const Interval& y) { return {x.lo + y.lo, x.hi + y.hi}; }
    friend Interval operator-(const Interval& x, const Interval& y) { return {x.lo - y.hi, x.hi - y.lo}; }
    friend Interval operator*(const Interval& x, const Interval& y)
    {
        const mpz_class c[] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
        return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
    }
};

// Limb k of the schoolbook product of two limb vectors.
inline std::vector<Interval> product_limbs(const std::vector<Interval>& a, const std::vector<Interval>& b)
{
    std::vector<Interval> out(a.size() + b.size() - 1, Interval::point(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] = out[i + j] + a[i] * b[j];
    return out;
}

}  // namespace oracle
