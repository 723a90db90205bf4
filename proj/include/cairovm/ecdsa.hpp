#pragma once

#include "cairovm/secp_ec.hpp"

#include <stdexcept>
#include <string>

namespace cairovm::ecdsa {

using secp::Bigint3i;
using secp::CurveParams;
using secp::ECGroupPoint;
using secp::EcValue;

class EcdsaError : public std::runtime_error {
public:
    enum class Kind { DegenerateNonce, ZeroR, VRange, NonResidue };

    EcdsaError(Kind kind, const std::string& what);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

const char* to_string(EcdsaError::Kind k);

struct Signature {
    BigInt r;
    BigInt s;
    int v = 0;  // parity of R.y
};

/// Textbook ECDSA with caller-supplied nonce: R = k*G, r = R.x mod n,
/// s = (msg + r*priv) / k mod n. Throws EcdsaError(DegenerateNonce) when r
/// or s is zero.
Signature oracle_sign(const BigInt& priv, const BigInt& msg, const BigInt& k,
                      const CurveParams& curve = CurveParams::secp256k1());

/// msg_hash, r and s as BigInt3 with limbs bounded by 3*BASE - 1; v any felt.
struct RecoveryInput {
    Bigint3i msg_hash;
    Bigint3i r;
    Bigint3i s;
    Felt v;

    static RecoveryInput from_ints(const BigInt& msg, const BigInt& r, const BigInt& s, const BigInt& v,
                                   const FieldConfig& cfg);
};

struct Recovery {
    EcValue public_key;
    EcValue r_point;  // the point recovered from r and v
    Bigint3i u1;      // msg_hash / r mod n
    Bigint3i u2;      // s / r mod n
};

/// get_point_from_x, two div_mod_n, two ec_mul, negate, ec_add.
/// Throws EcdsaError(ZeroR | VRange | NonResidue); gadget failures propagate
/// as secp::GadgetError.
Recovery recover_public_key(const RecoveryInput& in, const CurveParams& curve, const FieldConfig& cfg);

/// Direct big-integer recovery: (s*R - msg*G) / r.
ECGroupPoint oracle_recover(const BigInt& msg, const Signature& sig, const CurveParams& curve);

/// The recovery specification evaluated on a result: R on the curve with
/// x = val(r) mod p and y = v mod 2, u1*r = msg and u2*r = s mod n, and
/// Q = -(u1*G) + u2*R.
CheckResult spec_recover_public_key(const RecoveryInput& in, const Recovery& out, const CurveParams& curve);

bool validate_signature(const ECGroupPoint& pubkey, const BigInt& msg, const Signature& sig,
                        const CurveParams& curve, const FieldConfig& cfg);

}  // namespace cairovm::ecdsa
