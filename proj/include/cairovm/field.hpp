#pragma once

#include "cairovm/bigint.hpp"

#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cairovm {

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivisionByZero : public FieldError {
public:
    DivisionByZero() : FieldError("division by zero") {}
};

/// Prime modulus of the VM field plus the range-check bound.
///
/// Felts keep a raw pointer to their config, so a config must outlive every
/// Felt created from it. The two built-in configs are static; configs built
/// with `make` are owned by the returned shared_ptr.
struct FieldConfig {
    BigInt modulus;
    BigInt rc_bound;

    /// 2^251 + 17 * 2^192 + 1 with rc_bound 2^128.
    static const FieldConfig& default_config();
    /// Modulus 12289, rc_bound 64: small enough for exhaustive VM sweeps.
    static const FieldConfig& small_test_config();

    /// Validates primality (probabilistically) and 0 < rc_bound < modulus.
    static std::shared_ptr<const FieldConfig> make(BigInt modulus, BigInt rc_bound);
    /// {"modulus": "0x..", "rc_bound": ".."}; strings in decimal or 0x-hex.
    static std::shared_ptr<const FieldConfig> from_json(const std::string& text);

    bool operator==(const FieldConfig& other) const
    {
        return modulus == other.modulus && rc_bound == other.rc_bound;
    }
};

/// Canonical residue in [0, modulus) of a FieldConfig.
class Felt {
public:
    explicit Felt(const FieldConfig& cfg) : cfg_(&cfg) {}
    Felt(const BigInt& n, const FieldConfig& cfg);
    Felt(long n, const FieldConfig& cfg);

    static Felt from_int(const BigInt& n, const FieldConfig& cfg) { return Felt(n, cfg); }

    const BigInt& value() const { return value_; }
    BigInt to_int() const { return value_; }
    /// Representative in (-modulus/2, modulus/2].
    BigInt to_signed() const;

    const FieldConfig& config() const { return *cfg_; }
    bool is_zero() const { return value_ == 0; }

    Felt operator+(const Felt& rhs) const;
    Felt operator-(const Felt& rhs) const;
    Felt operator*(const Felt& rhs) const;
    Felt operator-() const;
    Felt& operator+=(const Felt& rhs) { return *this = *this + rhs; }
    Felt& operator-=(const Felt& rhs) { return *this = *this - rhs; }
    Felt& operator*=(const Felt& rhs) { return *this = *this * rhs; }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    Felt inv() const;
    Felt operator/(const Felt& rhs) const { return *this * rhs.inv(); }

    Felt operator+(long k) const { return *this + Felt(k, *cfg_); }
    Felt operator-(long k) const { return *this - Felt(k, *cfg_); }

    bool operator==(const Felt& rhs) const;
    bool operator!=(const Felt& rhs) const { return !(*this == rhs); }

private:
    void check_same(const Felt& rhs) const;

    BigInt value_;
    const FieldConfig* cfg_;
};

std::ostream& operator<<(std::ostream& os, const Felt& f);

/// Extended Euclid: returns x with a*x == 1 (mod m), or throws DivisionByZero
/// when gcd(a, m) != 1.
BigInt inverse_mod(const BigInt& a, const BigInt& m);

}  // namespace cairovm
