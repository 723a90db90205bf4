#include "cairovm/ecdsa.hpp"

#include "../oracles/jacobian_ec.hpp"

#include <gtest/gtest.h>

using namespace cairovm;
using namespace cairovm::ecdsa;
using secp::GadgetError;

namespace {

const FieldConfig& F()
{
    return FieldConfig::default_config();
}

ECGroupPoint jac_pub(const BigInt& priv, const CurveParams& c)
{
    const oracle::Curve o{c.p, c.a, c.b};
    BigInt x, y;
    const bool finite = oracle::jac_to_affine(oracle::jac_ladder(priv, oracle::jac_from_affine(c.gx, c.gy), o), o, x, y);
    return finite ? ECGroupPoint::affine(x, y) : ECGroupPoint::infinity();
}

EcdsaError::Kind ecdsa_kind(const std::function<void()>& f)
{
    try {
        f();
    } catch (const EcdsaError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no EcdsaError";
    return EcdsaError::Kind::ZeroR;
}

struct Case {
    BigInt priv, msg, k;
};

std::vector<Case> cases(const CurveParams& c, unsigned long seed, int count)
{
    gmp_randclass r(gmp_randinit_default);
    r.seed(seed);
    std::vector<Case> out;
    for (int i = 0; i < count; ++i)
        out.push_back({1 + r.get_z_range(c.n - 1), r.get_z_bits(256), 1 + r.get_z_range(c.n - 1)});
    return out;
}

}  // namespace

TEST(Ecdsa, RecoversTheSignerOnBothCurves)
{
    for (const CurveParams* c : {&CurveParams::secp256k1(), &CurveParams::secp256r1()}) {
        for (const Case& t : cases(*c, 7, 6)) {
            const Signature sig = oracle_sign(t.priv, t.msg, t.k, *c);
            const ECGroupPoint pub = jac_pub(t.priv, *c);
            EXPECT_EQ(oracle_recover(t.msg, sig, *c), pub);

            const RecoveryInput in = RecoveryInput::from_ints(t.msg, sig.r, sig.s, sig.v, F());
            const Recovery rec = recover_public_key(in, *c, F());
            EXPECT_EQ(secp::to_group(rec.public_key.w, *c), pub);
            EXPECT_TRUE(spec_recover_public_key(in, rec, *c).ok);
            EXPECT_TRUE(validate_signature(pub, t.msg, sig, *c, F()));
        }
    }
}

TEST(Ecdsa, TamperingChangesTheRecoveredKey)
{
    const CurveParams& c = CurveParams::secp256k1();
    for (const Case& t : cases(c, 8, 4)) {
        const Signature sig = oracle_sign(t.priv, t.msg, t.k, c);
        const ECGroupPoint pub = jac_pub(t.priv, c);
        EXPECT_FALSE(validate_signature(pub, t.msg + 1, sig, c, F()));
        Signature s2 = sig;
        s2.s = mod_floor(s2.s + 1, c.n);
        EXPECT_FALSE(validate_signature(pub, t.msg, s2, c, F()));
        Signature s3 = sig;
        s3.v ^= 1;
        EXPECT_FALSE(validate_signature(pub, t.msg, s3, c, F()));
    }
}

TEST(Ecdsa, SpecRejectsAWrongResult)
{
    const CurveParams& c = CurveParams::secp256k1();
    const Case t = cases(c, 9, 1).front();
    const Signature sig = oracle_sign(t.priv, t.msg, t.k, c);
    const RecoveryInput in = RecoveryInput::from_ints(t.msg, sig.r, sig.s, sig.v, F());
    Recovery rec = recover_public_key(in, c, F());
    Recovery bad = rec;
    bad.public_key = secp::make_ec_value(secp::generator(c), c, F());
    EXPECT_FALSE(spec_recover_public_key(in, bad, c).ok);
    bad = rec;
    bad.u1.i[0] += 1;
    EXPECT_FALSE(spec_recover_public_key(in, bad, c).ok);
}

TEST(Ecdsa, Failures)
{
    const CurveParams& c = CurveParams::secp256k1();
    const Case t = cases(c, 10, 1).front();
    const Signature sig = oracle_sign(t.priv, t.msg, t.k, c);

    EXPECT_EQ(ecdsa_kind([&] { recover_public_key(RecoveryInput::from_ints(t.msg, 0, sig.s, 0, F()), c, F()); }),
              EcdsaError::Kind::ZeroR);
    EXPECT_EQ(ecdsa_kind([&] {
                  recover_public_key(RecoveryInput::from_ints(t.msg, sig.r, sig.s, F().rc_bound, F()), c, F());
              }),
              EcdsaError::Kind::VRange);
    EXPECT_EQ(ecdsa_kind([&] { recover_public_key(RecoveryInput::from_ints(t.msg, sig.r, sig.s, -1, F()), c, F()); }),
              EcdsaError::Kind::VRange);

    BigInt x = 1;
    while (true) {
        const BigInt rhs = mod_floor(x * x * x + c.b, c.p);
        if (mpz_legendre(rhs.get_mpz_t(), c.p.get_mpz_t()) == -1)
            break;
        x += 1;
    }
    EXPECT_EQ(ecdsa_kind([&] { recover_public_key(RecoveryInput::from_ints(t.msg, x, sig.s, 0, F()), c, F()); }),
              EcdsaError::Kind::NonResidue);

    // s = 0 when msg = -r * priv mod n.
    const BigInt r = mod_floor(jac_pub(t.k, c).x, c.n);
    const BigInt msg = mod_floor(-r * t.priv, c.n);
    EXPECT_EQ(ecdsa_kind([&] { oracle_sign(t.priv, msg, t.k, c); }), EcdsaError::Kind::DegenerateNonce);

    try {
        recover_public_key(RecoveryInput::from_ints(t.msg, sig.r, sig.s, 0, F()), c, F());
        RecoveryInput in = RecoveryInput::from_ints(t.msg, sig.r, sig.s, 0, F());
        in.r.i[1] = 3 * secp::base();
        recover_public_key(in, c, F());
        ADD_FAILURE() << "out-of-bound limb accepted";
    } catch (const GadgetError& e) {
        EXPECT_EQ(e.kind(), GadgetError::Kind::BoundViolation);
    }

    EXPECT_THROW(validate_signature(ECGroupPoint::affine(1, 1), t.msg, sig, c, F()), std::invalid_argument);
}

TEST(Ecdsa, ErrorNames)
{
    EXPECT_STREQ(to_string(EcdsaError::Kind::ZeroR), "ZeroR");
    EXPECT_STREQ(to_string(EcdsaError::Kind::NonResidue), "NonResidue");
}
