#include "cairovm/secp_ec.hpp"

#include "../oracles/jacobian_ec.hpp"

#include <gtest/gtest.h>

using namespace cairovm;
using namespace cairovm::secp;

namespace {

const FieldConfig& F()
{
    return FieldConfig::default_config();
}

const CurveParams* curves[] = {&CurveParams::secp256k1(), &CurveParams::secp256r1()};

oracle::Curve jc(const CurveParams& c)
{
    return {c.p, c.a, c.b};
}

ECGroupPoint from_jac(const oracle::Jac& j, const CurveParams& c)
{
    BigInt x, y;
    if (!oracle::jac_to_affine(j, jc(c), x, y))
        return ECGroupPoint::infinity();
    return ECGroupPoint::affine(x, y);
}

oracle::Jac to_jac(const ECGroupPoint& p)
{
    return p.zero ? oracle::jac_identity() : oracle::jac_from_affine(p.x, p.y);
}

ECGroupPoint jac_mul(const BigInt& k, const ECGroupPoint& p, const CurveParams& c)
{
    return from_jac(oracle::jac_ladder(k, to_jac(p), jc(c)), c);
}

struct Rng {
    gmp_randclass r{gmp_randinit_default};
    explicit Rng(unsigned long seed) { r.seed(seed); }
    BigInt below(const BigInt& n) { return r.get_z_range(n); }
};

ECGroupPoint random_point(Rng& rng, const CurveParams& c)
{
    return jac_mul(1 + rng.below(c.n - 1), generator(c), c);
}

GadgetError::Kind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const GadgetError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no GadgetError";
    return GadgetError::Kind::OutOfRange;
}

}  // namespace

TEST(SecpEc, CurvesValidate)
{
    for (const CurveParams* c : curves)
        EXPECT_TRUE(validate_curve(*c).ok) << c->name;
    EXPECT_TRUE(validate_curve(tiny_curve()).ok);
    CurveParams broken = CurveParams::secp256k1();
    broken.gy += 1;
    EXPECT_FALSE(validate_curve(broken).ok);
}

TEST(SecpEc, KnownDoublings)
{
    const CurveParams& k1 = CurveParams::secp256k1();
    const ECGroupPoint k1_2g = ECGroupPoint::affine(
        parse_bigint("0xc6047f9441ed7d6d3045406e95c07cd85c778e4b8cef3ca7abac09b95c709ee5"),
        parse_bigint("0x1ae168fea63dc339a3c58419466ceaeef7f632653266d0e1236431a950cfe52a"));
    EXPECT_EQ(oracle_double(generator(k1), k1), k1_2g);
    EXPECT_EQ(jac_mul(2, generator(k1), k1), k1_2g);

    const CurveParams& r1 = CurveParams::secp256r1();
    const ECGroupPoint r1_2g = ECGroupPoint::affine(
        parse_bigint("0x7cf27b188d034f7e8a52380304b51ac3c08969e277f21b35a60b48fc47669978"),
        parse_bigint("0x07775510db8ed040293d9ac69f7430dbba7dade63ce982299e04b79d227873d1"));
    EXPECT_EQ(oracle_double(generator(r1), r1), r1_2g);
    EXPECT_EQ(jac_mul(2, generator(r1), r1), r1_2g);
}

TEST(SecpEc, AffineOracleAgreesWithJacobianLadder)
{
    Rng rng(1);
    for (const CurveParams* c : curves)
        for (int i = 0; i < 100; ++i) {
            const ECGroupPoint p = random_point(rng, *c);
            const BigInt k = rng.below(pow2(256));
            ASSERT_EQ(oracle_smul(k, p, *c), jac_mul(k, p, *c));
            const ECGroupPoint q = random_point(rng, *c);
            ASSERT_EQ(oracle_add(p, q, *c), from_jac(oracle::jac_add(to_jac(p), to_jac(q), jc(*c)), *c));
        }
}

TEST(SecpEc, NonNativeOpsMatchTheJacobianOracle)
{
    Rng rng(2);
    for (const CurveParams* c : curves)
        for (int i = 0; i < 15; ++i) {
            const ECGroupPoint p = random_point(rng, *c), q = random_point(rng, *c);
            const EcValue vp = make_ec_value(p, *c, F()), vq = make_ec_value(q, *c, F());
            const oracle::Curve o = jc(*c);

            const EcValue sum = ec_add(vp, vq, *c, F());
            EXPECT_TRUE(check_witness(sum, *c, F()).ok);
            EXPECT_EQ(to_group(sum.w, *c), from_jac(oracle::jac_add(to_jac(p), to_jac(q), o), *c));
            EXPECT_EQ(to_group(fast_ec_add(vp, vq, *c, F()).w, *c), to_group(sum.w, *c));

            const EcValue dbl = ec_double(vp, *c, F());
            EXPECT_TRUE(check_witness(dbl, *c, F()).ok);
            EXPECT_EQ(to_group(dbl.w, *c), from_jac(oracle::jac_double(to_jac(p), o), *c));

            EXPECT_EQ(to_group(ec_negate(vp, *c, F()).w, *c), oracle_neg(p, *c));
        }
}

TEST(SecpEc, AdditionSpecialCases)
{
    for (const CurveParams* c : curves) {
        const ECGroupPoint g = generator(*c);
        const EcValue vg = make_ec_value(g, *c, F());
        const EcValue zero = make_ec_value(ECGroupPoint::infinity(), *c, F());
        const EcValue neg = ec_negate(vg, *c, F());
        EXPECT_TRUE(zero.pt.is_zero());
        EXPECT_TRUE(ec_add(vg, neg, *c, F()).pt.is_zero());
        EXPECT_EQ(to_group(ec_add(vg, zero, *c, F()).w, *c), g);
        EXPECT_EQ(to_group(ec_add(zero, vg, *c, F()).w, *c), g);
        EXPECT_TRUE(ec_add(zero, zero, *c, F()).pt.is_zero());
        EXPECT_EQ(to_group(ec_add(vg, vg, *c, F()).w, *c), oracle_double(g, *c));
        EXPECT_TRUE(ec_double(zero, *c, F()).pt.is_zero());
        EXPECT_EQ(kind_of([&] { fast_ec_add(vg, vg, *c, F()); }), GadgetError::Kind::PreconditionViolated);
        EXPECT_EQ(kind_of([&] { fast_ec_add(vg, neg, *c, F()); }), GadgetError::Kind::PreconditionViolated);
    }
}

TEST(SecpEc, ZeroEncodingCollision)
{
    for (const CurveParams* c : curves) {
        const bool b_is_square = mpz_legendre(c->b.get_mpz_t(), c->p.get_mpz_t()) == 1;
        EXPECT_EQ(zero_encoding_collides(*c), b_is_square) << c->name;
    }
    const CurveParams& r1 = CurveParams::secp256r1();
    ASSERT_TRUE(zero_encoding_collides(r1));
    BigInt y;
    mpz_powm(y.get_mpz_t(), r1.b.get_mpz_t(), BigInt((r1.p + 1) / 4).get_mpz_t(), r1.p.get_mpz_t());
    const ECGroupPoint bad = ECGroupPoint::affine(0, y);
    ASSERT_TRUE(on_curve(bad, r1));
    EXPECT_EQ(kind_of([&] { make_ec_value(bad, r1, F()); }), GadgetError::Kind::UnrepresentablePoint);
}

TEST(SecpEc, ScalarMultiplication)
{
    Rng rng(3);
    for (const CurveParams* c : curves) {
        const ECGroupPoint p = random_point(rng, *c);
        const EcValue vp = make_ec_value(p, *c, F());
        const auto table = ec_mul_table(vp, *c, F());
        ASSERT_EQ(table.size(), 16u);
        EXPECT_TRUE(table[0].pt.is_zero());
        for (std::size_t k = 1; k < 16; ++k)
            EXPECT_EQ(to_group(table[k].w, *c), jac_mul(from_u64(k), p, *c)) << k;

        for (const BigInt& k : std::vector<BigInt>{BigInt(0), BigInt(1), BigInt(15), BigInt(16), c->n - 1, c->n, BigInt(pow2(256) - 1),
                                rng.below(pow2(256))}) {
            MulStats stats;
            const EcValue r = ec_mul_by_uint256(vp, Uint256::from_bigint(k, F()), *c, F(), &stats);
            EXPECT_EQ(to_group(r.w, *c), jac_mul(k, p, *c)) << to_hex(k);
            EXPECT_EQ(stats.table_entries, 16u);
            EXPECT_EQ(stats.doublings, 4u * 63u);
            EXPECT_EQ(stats.additions, 64u);
        }
        const BigInt k = rng.below(pow2(256));
        EXPECT_EQ(to_group(ec_mul_double_and_add(vp, Uint256::from_bigint(k, F()), *c, F()).w, *c),
                  jac_mul(k, p, *c));
    }
}

TEST(SecpEc, ScalarLimbsMustBeRangeChecked)
{
    const CurveParams& c = CurveParams::secp256k1();
    const EcValue vg = make_ec_value(generator(c), c, F());
    const Uint256 bad{Felt(0L, F()), Felt(pow2(128), F())};
    EXPECT_EQ(kind_of([&] { ec_mul_by_uint256(vg, bad, c, F()); }), GadgetError::Kind::LimbRange);
    const Uint256 neg{Felt(-1L, F()), Felt(0L, F())};
    EXPECT_EQ(kind_of([&] { ec_mul_by_uint256(vg, neg, c, F()); }), GadgetError::Kind::LimbRange);
    EXPECT_THROW(Uint256::from_bigint(pow2(256), F()), std::invalid_argument);
}

TEST(SecpEc, Bigint3ToUint256)
{
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        const BigInt v = rng.below(pow2(256));
        const Uint256 u = bigint3_to_uint256(to_felts(split(v), F()), F());
        EXPECT_EQ(u.value(), v);
        EXPECT_LT(u.low.value(), pow2(128));
        EXPECT_LT(u.high.value(), pow2(128));
    }
    EXPECT_EQ(kind_of([] { bigint3_to_uint256(to_felts(split(pow2(256)), F()), F()); }),
              GadgetError::Kind::LimbRange);
    const FeltLimbs noncanonical{Felt(pow2(86), F()), Felt(0L, F()), Felt(0L, F())};
    EXPECT_EQ(kind_of([&] { bigint3_to_uint256(noncanonical, F()); }), GadgetError::Kind::LimbRange);
    const FeltLimbs negative{Felt(-1L, F()), Felt(0L, F()), Felt(0L, F())};
    EXPECT_EQ(kind_of([&] { bigint3_to_uint256(negative, F()); }), GadgetError::Kind::LimbRange);
}

TEST(SecpEc, PointFromX)
{
    Rng rng(5);
    for (const CurveParams* c : curves) {
        const ECGroupPoint g = generator(*c);
        for (long v : {0L, 1L, 2L, 7L}) {
            const EcValue r = get_point_from_x(split(g.x), Felt(v, F()), *c, F());
            const ECGroupPoint got = to_group(r.w, *c);
            EXPECT_EQ(got.x, g.x);
            EXPECT_EQ(mod_floor(got.y, 2), v % 2);
            EXPECT_TRUE(on_curve(got, *c));
        }
        // Non-canonical x: x + p reduces to the same point.
        const EcValue shifted = get_point_from_x(split(g.x + c->p), Felt(g.y % 2 == 0 ? 0L : 1L, F()), *c, F());
        EXPECT_EQ(to_group(shifted.w, *c), g);

        BigInt x = 1;
        for (;; x += 1) {
            const BigInt rhs = mod_floor(x * x * x + c->a * x + c->b, c->p);
            if (mpz_legendre(rhs.get_mpz_t(), c->p.get_mpz_t()) == -1)
                break;
        }
        EXPECT_EQ(kind_of([&] { get_point_from_x(split(x), Felt(0L, F()), *c, F()); }),
                  GadgetError::Kind::NonResidue);
    }
}

TEST(SecpEc, SqrtMod)
{
    const BigInt p = CurveParams::secp256k1().p;
    for (const BigInt& v : std::vector<BigInt>{BigInt(4), BigInt(9), BigInt(7)}) {
        const auto r = sqrt_mod(v, p);
        if (mpz_legendre(v.get_mpz_t(), p.get_mpz_t()) == 1) {
            ASSERT_TRUE(r.has_value());
            EXPECT_EQ(mod_floor(*r * *r, p), v);
        } else {
            EXPECT_FALSE(r.has_value());
        }
    }
    EXPECT_EQ(sqrt_mod(0, p), BigInt(0));
}

TEST(SecpEc, WitnessChecks)
{
    const CurveParams& c = CurveParams::secp256k1();
    EcValue v = make_ec_value(generator(c), c, F());
    EXPECT_TRUE(check_witness(v, c, F()).ok);
    EcValue off = v;
    off.w.iy.i[0] += 1;
    off.pt.y[0] = off.pt.y[0] + 1;
    EXPECT_FALSE(check_witness(off, c, F()).ok);
    EcValue mismatch = v;
    mismatch.pt.x[1] = mismatch.pt.x[1] + 1;
    EXPECT_FALSE(check_witness(mismatch, c, F()).ok);
}

TEST(SecpEc, TinyCurveGroupOrder)
{
    const CurveParams& t = tiny_curve();
    EXPECT_EQ(t.p, 43);
    EXPECT_EQ(t.n, 31);
    std::size_t count = 1;
    for (long x = 0; x < 43; ++x)
        for (long y = 0; y < 43; ++y)
            count += ((y * y - x * x * x - 7) % 43 + 43) % 43 == 0;
    EXPECT_EQ(count, 31u);
    EXPECT_TRUE(oracle_smul(31, generator(t), t).zero);
    EXPECT_EQ(oracle_smul(32, generator(t), t), generator(t));
    EXPECT_EQ(oracle_smul(-1, generator(t), t), oracle_neg(generator(t), t));
}
