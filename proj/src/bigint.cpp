#include "cairovm/bigint.hpp"

#include <cctype>
#include <stdexcept>

namespace cairovm {

BigInt parse_bigint(std::string_view text)
{
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.pop_back();

    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negative = s[0] == '-';
        s.erase(0, 1);
    }
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        s.erase(0, 2);
    }
    if (s.empty())
        throw std::invalid_argument("empty integer literal");
    for (char c : s) {
        const bool ok = base == 16 ? std::isxdigit(static_cast<unsigned char>(c)) != 0
                                   : std::isdigit(static_cast<unsigned char>(c)) != 0;
        if (!ok)
            throw std::invalid_argument("malformed integer literal: " + std::string(text));
    }
    BigInt v(s, base);
    return negative ? BigInt(-v) : v;
}

std::string to_hex(const BigInt& v)
{
    if (v < 0)
        return "-0x" + BigInt(-v).get_str(16);
    return "0x" + v.get_str(16);
}

std::string to_dec(const BigInt& v)
{
    return v.get_str(10);
}

BigInt pow2(unsigned k)
{
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
    return r;
}

BigInt mod_floor(const BigInt& a, const BigInt& m)
{
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

std::uint64_t to_u64(const BigInt& v)
{
    if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64)
        throw std::out_of_range("integer does not fit in 64 bits: " + to_hex(v));
    return static_cast<std::uint64_t>(mpz_get_ui(v.get_mpz_t()));
}

std::int64_t to_i64(const BigInt& v)
{
    if (!mpz_fits_slong_p(v.get_mpz_t()))
        throw std::out_of_range("integer does not fit in int64: " + to_hex(v));
    return static_cast<std::int64_t>(mpz_get_si(v.get_mpz_t()));
}

BigInt from_u64(std::uint64_t v)
{
    static_assert(sizeof(unsigned long) == 8, "LP64 expected");
    return BigInt(static_cast<unsigned long>(v));
}

BigInt from_i64(std::int64_t v)
{
    return BigInt(static_cast<long>(v));
}

}  // namespace cairovm
