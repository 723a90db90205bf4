#pragma once

#include "cairovm/secp_bigint.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cairovm::secp {

/// y^2 = x^3 + 7 over Z/43: 31 points with infinity, prime order, so any
/// affine point generates. Oracle-only (the quotient of a non-native check
/// modulo 43 does not fit four limbs).
const CurveParams& tiny_curve();

// ---------------------------------------------------------------- oracle

struct ECGroupPoint {
    bool zero = true;
    BigInt x = 0;
    BigInt y = 0;

    static ECGroupPoint infinity() { return {}; }
    static ECGroupPoint affine(BigInt x, BigInt y) { return {false, std::move(x), std::move(y)}; }
    bool operator==(const ECGroupPoint& o) const
    {
        return zero == o.zero && (zero || (x == o.x && y == o.y));
    }
};

std::string to_string(const ECGroupPoint& p);

bool on_curve(const ECGroupPoint& p, const CurveParams& curve);
ECGroupPoint generator(const CurveParams& curve);

ECGroupPoint oracle_neg(const ECGroupPoint& p, const CurveParams& curve);
ECGroupPoint oracle_double(const ECGroupPoint& p, const CurveParams& curve);
ECGroupPoint oracle_add(const ECGroupPoint& p, const ECGroupPoint& q, const CurveParams& curve);
/// k * p by square-and-multiply; negative k negates.
ECGroupPoint oracle_smul(const BigInt& k, const ECGroupPoint& p, const CurveParams& curve);

/// Square root modulo p for p = 3 mod 4, nullopt for non-residues.
std::optional<BigInt> sqrt_mod(const BigInt& v, const BigInt& p);

/// Generator on the curve, n * G = infinity, p and n probable primes.
CheckResult validate_curve(const CurveParams& curve);
/// (0, y) lies on the curve when b is a square; such a point collides with
/// the zero encoding and cannot be represented.
bool zero_encoding_collides(const CurveParams& curve);

// ---------------------------------------------------------------- non-native

/// Zero is encoded as x = (0, 0, 0).
struct EcPointF {
    FeltLimbs x;
    FeltLimbs y;

    bool is_zero() const;
};

/// Integer coordinates behind an EcPointF, limbs bounded by D2_BOUND.
struct EcWitness {
    Bigint3i ix;
    Bigint3i iy;
};

struct EcValue {
    EcPointF pt;
    EcWitness w;
};

/// Canonical encoding of an oracle point. Throws
/// GadgetError(UnrepresentablePoint) for an affine point with x = 0.
EcValue make_ec_value(const ECGroupPoint& p, const CurveParams& curve, const FieldConfig& cfg);
/// The group element the witness denotes (coordinates reduced mod p).
ECGroupPoint to_group(const EcWitness& w, const CurveParams& curve);

/// Bounds, felt agreement, and on-curve-or-zero.
CheckResult check_witness(const EcValue& v, const CurveParams& curve, const FieldConfig& cfg);

EcValue ec_negate(const EcValue& v, const CurveParams& curve, const FieldConfig& cfg);
EcValue ec_double(const EcValue& v, const CurveParams& curve, const FieldConfig& cfg);
/// Throws GadgetError(PreconditionViolated) when both inputs are affine with
/// equal x modulo p.
EcValue fast_ec_add(const EcValue& a, const EcValue& b, const CurveParams& curve, const FieldConfig& cfg);
EcValue ec_add(const EcValue& a, const EcValue& b, const CurveParams& curve, const FieldConfig& cfg);

/// 2^128 * high + low with both limbs casts of naturals below 2^128.
struct Uint256 {
    Felt low;
    Felt high;

    static Uint256 from_bigint(const BigInt& k, const FieldConfig& cfg);
    /// Integer value; meaningful only when both limbs pass the range check.
    BigInt value() const;
};

/// Converts a canonical BigInt3 below 2^256 into Uint256 by splitting d1 at
/// bit 42; every equation stays below 2^131. Throws GadgetError(LimbRange)
/// for non-canonical limbs or values of 2^256 and above.
Uint256 bigint3_to_uint256(const FeltLimbs& d, const FieldConfig& cfg);

/// [Zero, P, 2P, ..., 15P].
std::vector<EcValue> ec_mul_table(const EcValue& v, const CurveParams& curve, const FieldConfig& cfg);

struct MulStats {
    std::size_t table_entries = 0;
    std::size_t doublings = 0;
    std::size_t additions = 0;
};

/// 4-bit windows over the 16-entry table, most significant nibble first.
/// Throws GadgetError(LimbRange) when a scalar limb is not below 2^128.
EcValue ec_mul_by_uint256(const EcValue& v, const Uint256& scalar, const CurveParams& curve, const FieldConfig& cfg,
                          MulStats* stats = nullptr);
/// Bitwise double-and-add path, same contract.
EcValue ec_mul_double_and_add(const EcValue& v, const Uint256& scalar, const CurveParams& curve,
                              const FieldConfig& cfg);

/// Point with x-coordinate val(x) mod p and y of the same parity as v.
/// Throws GadgetError(NonResidue) when x^3 + a*x + b has no square root.
/// Requires p = 3 mod 4.
EcValue get_point_from_x(const Bigint3i& x, const Felt& v, const CurveParams& curve, const FieldConfig& cfg);

}  // namespace cairovm::secp
