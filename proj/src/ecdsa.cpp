#include "cairovm/ecdsa.hpp"

namespace cairovm::ecdsa {

using secp::GadgetError;

EcdsaError::EcdsaError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

const char* to_string(EcdsaError::Kind k)
{
    switch (k) {
    case EcdsaError::Kind::DegenerateNonce: return "DegenerateNonce";
    case EcdsaError::Kind::ZeroR: return "ZeroR";
    case EcdsaError::Kind::VRange: return "VRange";
    case EcdsaError::Kind::NonResidue: return "NonResidue";
    }
    return "?";
}

Signature oracle_sign(const BigInt& priv, const BigInt& msg, const BigInt& k, const CurveParams& c)
{
    if (priv <= 0 || priv >= c.n || k <= 0 || k >= c.n)
        throw std::invalid_argument("oracle_sign: priv and k must lie in (0, n)");
    const ECGroupPoint R = secp::oracle_smul(k, secp::generator(c), c);
    const BigInt r = mod_floor(R.x, c.n);
    if (R.zero || r == 0)
        throw EcdsaError(EcdsaError::Kind::DegenerateNonce, "nonce gives r = 0");
    const BigInt s = mod_floor(secp::invert_mod(k, c.n) * (msg + r * priv), c.n);
    if (s == 0)
        throw EcdsaError(EcdsaError::Kind::DegenerateNonce, "nonce gives s = 0");
    return {r, s, mpz_odd_p(R.y.get_mpz_t()) ? 1 : 0};
}

RecoveryInput RecoveryInput::from_ints(const BigInt& msg, const BigInt& r, const BigInt& s, const BigInt& v,
                                       const FieldConfig& cfg)
{
    return {secp::split(msg), secp::split(r), secp::split(s), Felt(v, cfg)};
}

Recovery recover_public_key(const RecoveryInput& in, const CurveParams& c, const FieldConfig& cfg)
{
    const auto& bound = secp::input_bound();
    if (!in.msg_hash.bounded(bound) || !in.r.bounded(bound) || !in.s.bounded(bound))
        throw GadgetError(GadgetError::Kind::BoundViolation, "recovery input exceeds 3 * BASE - 1");
    const secp::FeltLimbs r = secp::to_felts(in.r, cfg);
    if (r[0].is_zero() && r[1].is_zero() && r[2].is_zero())
        throw EcdsaError(EcdsaError::Kind::ZeroR, "r = 0");
    if (in.v.value() >= cfg.rc_bound)
        throw EcdsaError(EcdsaError::Kind::VRange, "v is not below rc_bound");

    Recovery out;
    try {
        out.r_point = secp::get_point_from_x(in.r, in.v, c, cfg);
    } catch (const GadgetError& e) {
        if (e.kind() == GadgetError::Kind::NonResidue)
            throw EcdsaError(EcdsaError::Kind::NonResidue, e.what());
        throw;
    }
    const secp::FeltLimbs u1 = secp::nondet_div_mod(secp::to_felts(in.msg_hash, cfg), r, c.n, cfg);
    const secp::FeltLimbs u2 = secp::nondet_div_mod(secp::to_felts(in.s, cfg), r, c.n, cfg);
    out.u1 = secp::lift(u1);
    out.u2 = secp::lift(u2);

    const EcValue g = secp::make_ec_value(secp::generator(c), c, cfg);
    const EcValue point1 = secp::ec_mul_by_uint256(g, secp::bigint3_to_uint256(u1, cfg), c, cfg);
    const EcValue minus_point1 = secp::ec_negate(point1, c, cfg);
    const EcValue point2 = secp::ec_mul_by_uint256(out.r_point, secp::bigint3_to_uint256(u2, cfg), c, cfg);
    out.public_key = secp::ec_add(minus_point1, point2, c, cfg);
    return out;
}

ECGroupPoint oracle_recover(const BigInt& msg, const Signature& sig, const CurveParams& c)
{
    const BigInt x = mod_floor(sig.r, c.p);
    const auto y = secp::sqrt_mod(x * x * x + c.a * x + c.b, c.p);
    if (!y)
        throw EcdsaError(EcdsaError::Kind::NonResidue, "r is not an x-coordinate");
    BigInt ry = *y;
    if ((mpz_odd_p(ry.get_mpz_t()) ? 1 : 0) != (sig.v & 1))
        ry = mod_floor(-ry, c.p);
    const ECGroupPoint R = ECGroupPoint::affine(x, ry);
    const BigInt rinv = secp::invert_mod(mod_floor(sig.r, c.n), c.n);
    const ECGroupPoint sR = secp::oracle_smul(mod_floor(sig.s * rinv, c.n), R, c);
    const ECGroupPoint mG = secp::oracle_smul(mod_floor(msg * rinv, c.n), secp::generator(c), c);
    return secp::oracle_add(sR, secp::oracle_neg(mG, c), c);
}

CheckResult spec_recover_public_key(const RecoveryInput& in, const Recovery& out, const CurveParams& c)
{
    const ECGroupPoint R = secp::to_group(out.r_point.w, c);
    if (R.zero || !secp::on_curve(R, c))
        return CheckResult::fail("recovered R is not an affine curve point");
    if (R.x != mod_floor(in.r.val(), c.p))
        return CheckResult::fail("R.x differs from r");
    if (mpz_odd_p(R.y.get_mpz_t()) != mpz_odd_p(in.v.value().get_mpz_t()))
        return CheckResult::fail("parity of R.y differs from v");
    if (mod_floor(out.u1.val() * in.r.val() - in.msg_hash.val(), c.n) != 0)
        return CheckResult::fail("u1 * r differs from msg_hash mod n");
    if (mod_floor(out.u2.val() * in.r.val() - in.s.val(), c.n) != 0)
        return CheckResult::fail("u2 * r differs from s mod n");
    const ECGroupPoint expected =
        secp::oracle_add(secp::oracle_neg(secp::oracle_smul(out.u1.val(), secp::generator(c), c), c),
                         secp::oracle_smul(out.u2.val(), R, c), c);
    if (!(secp::to_group(out.public_key.w, c) == expected))
        return CheckResult::fail("Q differs from -(u1 * G) + u2 * R");
    return CheckResult::pass();
}

bool validate_signature(const ECGroupPoint& pubkey, const BigInt& msg, const Signature& sig, const CurveParams& c,
                        const FieldConfig& cfg)
{
    if (!secp::on_curve(pubkey, c))
        throw std::invalid_argument("validate_signature: public key is not on the curve");
    const Recovery rec = recover_public_key(RecoveryInput::from_ints(msg, sig.r, sig.s, sig.v, cfg), c, cfg);
    return secp::to_group(rec.public_key.w, c) == pubkey;
}

}  // namespace cairovm::ecdsa
