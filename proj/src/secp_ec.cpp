#include "cairovm/secp_ec.hpp"

namespace cairovm::secp {

const CurveParams& tiny_curve()
{
    static const CurveParams c{"tiny43", 43, 0, 7, 31, 2, 12};
    return c;
}

// ---------------------------------------------------------------- oracle

std::string to_string(const ECGroupPoint& p)
{
    if (p.zero)
        return "Zero";
    return "(" + to_hex(p.x) + ", " + to_hex(p.y) + ")";
}

bool on_curve(const ECGroupPoint& p, const CurveParams& c)
{
    if (p.zero)
        return true;
    if (p.x < 0 || p.x >= c.p || p.y < 0 || p.y >= c.p)
        return false;
    return mod_floor(p.y * p.y - p.x * p.x * p.x - c.a * p.x - c.b, c.p) == 0;
}

ECGroupPoint generator(const CurveParams& c)
{
    return ECGroupPoint::affine(c.gx, c.gy);
}

ECGroupPoint oracle_neg(const ECGroupPoint& p, const CurveParams& c)
{
    if (p.zero)
        return p;
    return ECGroupPoint::affine(p.x, mod_floor(-p.y, c.p));
}

ECGroupPoint oracle_double(const ECGroupPoint& p, const CurveParams& c)
{
    if (p.zero || p.y == 0)
        return ECGroupPoint::infinity();
    const BigInt s = mod_floor((3 * p.x * p.x + c.a) * invert_mod(mod_floor(2 * p.y, c.p), c.p), c.p);
    const BigInt x = mod_floor(s * s - 2 * p.x, c.p);
    return ECGroupPoint::affine(x, mod_floor(s * (p.x - x) - p.y, c.p));
}

ECGroupPoint oracle_add(const ECGroupPoint& p, const ECGroupPoint& q, const CurveParams& c)
{
    if (p.zero)
        return q;
    if (q.zero)
        return p;
    if (p.x == q.x) {
        if (mod_floor(p.y + q.y, c.p) == 0)
            return ECGroupPoint::infinity();
        return oracle_double(p, c);
    }
    const BigInt s = mod_floor((p.y - q.y) * invert_mod(mod_floor(p.x - q.x, c.p), c.p), c.p);
    const BigInt x = mod_floor(s * s - p.x - q.x, c.p);
    return ECGroupPoint::affine(x, mod_floor(s * (p.x - x) - p.y, c.p));
}

ECGroupPoint oracle_smul(const BigInt& k, const ECGroupPoint& p, const CurveParams& c)
{
    if (k < 0)
        return oracle_smul(-k, oracle_neg(p, c), c);
    ECGroupPoint acc, base = p;
    BigInt e = k;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t()))
            acc = oracle_add(acc, base, c);
        base = oracle_double(base, c);
        e >>= 1;
    }
    return acc;
}

std::optional<BigInt> sqrt_mod(const BigInt& v, const BigInt& p)
{
    if (mod_floor(p, 4) != 3)
        throw std::invalid_argument("sqrt_mod: modulus is not 3 mod 4");
    const BigInt a = mod_floor(v, p);
    BigInt r;
    const BigInt e = (p + 1) / 4;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    if (mod_floor(r * r - a, p) != 0)
        return std::nullopt;
    return r;
}

CheckResult validate_curve(const CurveParams& c)
{
    if (mpz_probab_prime_p(c.p.get_mpz_t(), 30) == 0)
        return CheckResult::fail(c.name + ": p is not prime");
    if (mpz_probab_prime_p(c.n.get_mpz_t(), 30) == 0)
        return CheckResult::fail(c.name + ": n is not prime");
    const ECGroupPoint g = generator(c);
    if (!on_curve(g, c))
        return CheckResult::fail(c.name + ": generator is not on the curve");
    if (!oracle_smul(c.n, g, c).zero)
        return CheckResult::fail(c.name + ": n * G is not the identity");
    return CheckResult::pass();
}

bool zero_encoding_collides(const CurveParams& c)
{
    if (mod_floor(c.p, 4) == 3)
        return sqrt_mod(c.b, c.p).has_value();
    // Euler's criterion.
    BigInt r;
    const BigInt e = (c.p - 1) / 2;
    const BigInt b = mod_floor(c.b, c.p);
    if (b == 0)
        return true;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), c.p.get_mpz_t());
    return r == 1;
}

// ---------------------------------------------------------------- non-native

namespace {

using Kind = GadgetError::Kind;

bool all_zero(const FeltLimbs& d)
{
    for (const Felt& f : d)
        if (!f.is_zero())
            return false;
    return true;
}

bool all_zero(const Bigint3i& b)
{
    return b.i[0] == 0 && b.i[1] == 0 && b.i[2] == 0;
}

BigInt reduced(const FeltLimbs& d, const CurveParams& c)
{
    return mod_floor(lift_value(d), c.p);
}

// Prover supplies `value` in canonical limbs; the verifier range checks the
// limbs and proves expr(limbs) = 0 modulo m.
template <class Expr>
FeltLimbs nondet_value(const BigInt& value, Expr&& expr, const BigInt& m, const FieldConfig& cfg, const char* what)
{
    const FeltLimbs r = to_felts(split(value), cfg);
    const FeltLimbs e = expr(r);
    const std::vector<Felt> w = zero_witness(e, m, cfg);
    for (const Felt& l : r)
        if (!range_check_below(l, canonical_bound()))
            throw GadgetError(Kind::WitnessRejected, std::string(what) + ": limb not canonical");
    if (auto ok = verify_zero(e, w, m, cfg); !ok)
        throw GadgetError(Kind::WitnessRejected, std::string(what) + ": " + ok.reason);
    return r;
}

EcValue from_limbs(const FeltLimbs& x, const FeltLimbs& y)
{
    if (all_zero(x))
        throw GadgetError(Kind::UnrepresentablePoint, "affine point with x = 0 collides with the zero encoding");
    return {{x, y}, {lift(x), lift(y)}};
}

FeltLimbs curve_const(const BigInt& v, const FieldConfig& cfg)
{
    return to_felts(split(v), cfg);
}

EcValue zero_value(const FieldConfig& cfg)
{
    const FeltLimbs z(3, Felt(cfg));
    return {{z, z}, {}};
}

}  // namespace

bool EcPointF::is_zero() const
{
    return all_zero(x);
}

EcValue make_ec_value(const ECGroupPoint& p, const CurveParams& c, const FieldConfig& cfg)
{
    if (p.zero)
        return zero_value(cfg);
    if (!on_curve(p, c))
        throw std::invalid_argument("make_ec_value: point is not on the curve");
    const Bigint3i ix = split(p.x), iy = split(p.y);
    return from_limbs(to_felts(ix, cfg), to_felts(iy, cfg));
}

ECGroupPoint to_group(const EcWitness& w, const CurveParams& c)
{
    if (all_zero(w.ix))
        return ECGroupPoint::infinity();
    return ECGroupPoint::affine(mod_floor(w.ix.val(), c.p), mod_floor(w.iy.val(), c.p));
}

CheckResult check_witness(const EcValue& v, const CurveParams& c, const FieldConfig& cfg)
{
    if (!v.w.ix.bounded(d2_bound()) || !v.w.iy.bounded(d2_bound()))
        return CheckResult::fail("witness limbs exceed D2_BOUND");
    if (to_felts(v.w.ix, cfg) != v.pt.x || to_felts(v.w.iy, cfg) != v.pt.y)
        return CheckResult::fail("witness does not match the point's felts");
    if (!on_curve(to_group(v.w, c), c))
        return CheckResult::fail("witness point is not on the curve");
    return CheckResult::pass();
}

EcValue ec_negate(const EcValue& v, const CurveParams&, const FieldConfig& cfg)
{
    if (v.pt.is_zero())
        return v;
    const FeltLimbs zero(3, Felt(cfg));
    const FeltLimbs ny = sub_felts(zero, v.pt.y);
    return {{v.pt.x, ny}, {v.w.ix, lift(ny)}};
}

EcValue ec_double(const EcValue& v, const CurveParams& c, const FieldConfig& cfg)
{
    if (v.pt.is_zero())
        return v;
    require_wide_field(cfg);
    const FeltLimbs &x = v.pt.x, &y = v.pt.y;
    const BigInt X = reduced(x, c), Y = reduced(y, c);
    if (Y == 0)
        throw GadgetError(Kind::PreconditionViolated, "ec_double: y = 0");

    const BigInt s = mod_floor((3 * X * X + c.a) * invert_mod(mod_floor(2 * Y, c.p), c.p), c.p);
    const FeltLimbs a = curve_const(c.a, cfg);
    const FeltLimbs S = nondet_value(
        s,
        [&](const FeltLimbs& r) {
            return sub_felts(sub_felts(mul_felts(scale_felts(y, 2), r), scale_felts(mul_felts(x, x), 3)),
                             widen(a, 5));
        },
        c.p, cfg, "ec_double slope");

    const BigInt nx = mod_floor(s * s - 2 * X, c.p);
    const FeltLimbs NX = nondet_value(
        nx, [&](const FeltLimbs& r) { return sub_felts(mul_felts(S, S), widen(add_felts(scale_felts(x, 2), r), 5)); },
        c.p, cfg, "ec_double x");

    const BigInt ny = mod_floor(s * (X - nx) - Y, c.p);
    const FeltLimbs NY = nondet_value(
        ny, [&](const FeltLimbs& r) { return sub_felts(mul_felts(S, sub_felts(x, NX)), widen(add_felts(y, r), 5)); },
        c.p, cfg, "ec_double y");
    return from_limbs(NX, NY);
}

EcValue fast_ec_add(const EcValue& a, const EcValue& b, const CurveParams& c, const FieldConfig& cfg)
{
    if (a.pt.is_zero())
        return b;
    if (b.pt.is_zero())
        return a;
    require_wide_field(cfg);
    const FeltLimbs &x0 = a.pt.x, &y0 = a.pt.y, &x1 = b.pt.x, &y1 = b.pt.y;
    const BigInt X0 = reduced(x0, c), Y0 = reduced(y0, c), X1 = reduced(x1, c), Y1 = reduced(y1, c);
    if (X0 == X1)
        throw GadgetError(Kind::PreconditionViolated, "fast_ec_add: equal x-coordinates");

    const BigInt s = mod_floor((Y0 - Y1) * invert_mod(mod_floor(X0 - X1, c.p), c.p), c.p);
    const FeltLimbs S = nondet_value(
        s, [&](const FeltLimbs& r) { return sub_felts(mul_felts(r, sub_felts(x0, x1)), widen(sub_felts(y0, y1), 5)); },
        c.p, cfg, "fast_ec_add slope");

    const BigInt nx = mod_floor(s * s - X0 - X1, c.p);
    const FeltLimbs NX = nondet_value(
        nx,
        [&](const FeltLimbs& r) { return sub_felts(mul_felts(S, S), widen(add_felts(add_felts(x0, x1), r), 5)); },
        c.p, cfg, "fast_ec_add x");

    const BigInt ny = mod_floor(s * (X0 - nx) - Y0, c.p);
    const FeltLimbs NY = nondet_value(
        ny, [&](const FeltLimbs& r) { return sub_felts(mul_felts(S, sub_felts(x0, NX)), widen(add_felts(y0, r), 5)); },
        c.p, cfg, "fast_ec_add y");
    return from_limbs(NX, NY);
}

EcValue ec_add(const EcValue& a, const EcValue& b, const CurveParams& c, const FieldConfig& cfg)
{
    if (a.pt.is_zero())
        return b;
    if (b.pt.is_zero())
        return a;
    if (!nondet_is_zero(sub_felts(a.pt.x, b.pt.x), c.p, cfg))
        return fast_ec_add(a, b, c, cfg);
    if (nondet_is_zero(add_felts(a.pt.y, b.pt.y), c.p, cfg))
        return zero_value(cfg);
    return ec_double(a, c, cfg);
}

Uint256 Uint256::from_bigint(const BigInt& k, const FieldConfig& cfg)
{
    if (k < 0 || k >= pow2(256))
        throw std::invalid_argument("Uint256: value outside [0, 2^256)");
    const BigInt low = mod_floor(k, pow2(128));
    return {Felt(low, cfg), Felt(BigInt((k - low) >> 128), cfg)};
}

BigInt Uint256::value() const
{
    return high.value() * pow2(128) + low.value();
}

Uint256 bigint3_to_uint256(const FeltLimbs& d, const FieldConfig& cfg)
{
    if (d.size() != 3)
        throw std::invalid_argument("bigint3_to_uint256: expected 3 limbs");
    for (const Felt& l : d)
        if (!range_check_below(l, canonical_bound()))
            throw GadgetError(Kind::LimbRange, "BigInt3 limb not canonical");
    // d1 = d1_lo + 2^42 * d1_hi, low = d0 + 2^86 * d1_lo, high = d1_hi + 2^44 * d2.
    const Felt d1_lo(mod_floor(d[1].value(), pow2(42)), cfg);
    const Felt d1_hi(BigInt(d[1].value() >> 42), cfg);
    const Uint256 u{d[0] + d1_lo * Felt(pow2(86), cfg), d1_hi + d[2] * Felt(pow2(44), cfg)};
    if (!range_check_below(d1_lo, pow2(42)) || !range_check_below(d1_hi, pow2(44)) ||
        d1_lo + d1_hi * Felt(pow2(42), cfg) != d[1])
        throw GadgetError(Kind::WitnessRejected, "BigInt3 limb split rejected");
    if (!range_check_below(u.low, pow2(128)) || !range_check_below(u.high, pow2(128)))
        throw GadgetError(Kind::LimbRange, "BigInt3 value is not below 2^256");
    return u;
}

std::vector<EcValue> ec_mul_table(const EcValue& v, const CurveParams& c, const FieldConfig& cfg)
{
    std::vector<EcValue> t{zero_value(cfg), v};
    while (t.size() < 16)
        t.push_back(ec_add(t.back(), v, c, cfg));
    return t;
}

namespace {

void check_scalar(const Uint256& k)
{
    if (!range_check_below(k.low, pow2(128)) || !range_check_below(k.high, pow2(128)))
        throw GadgetError(Kind::LimbRange, "scalar limb is not below 2^128");
}

// Nibble witness of a 128-bit limb, least significant first, verified by
// per-nibble range checks and recomposition.
std::vector<unsigned> nibbles(const Felt& limb)
{
    const FieldConfig& cfg = limb.config();
    std::vector<Felt> w;
    BigInt rest = limb.value();
    for (int k = 0; k < 32; ++k) {
        w.emplace_back(mod_floor(rest, 16), cfg);
        rest >>= 4;
    }
    Felt acc(cfg);
    const Felt sixteen(16L, cfg);
    std::vector<unsigned> out;
    for (int k = 31; k >= 0; --k) {
        if (!range_check_below(w[k], 16))
            throw GadgetError(Kind::WitnessRejected, "nibble out of range");
        acc = acc * sixteen + w[k];
    }
    if (acc != limb)
        throw GadgetError(Kind::WitnessRejected, "nibbles do not recompose the limb");
    for (const Felt& f : w)
        out.push_back(static_cast<unsigned>(to_u64(f.value())));
    return out;
}

}  // namespace

EcValue ec_mul_by_uint256(const EcValue& v, const Uint256& scalar, const CurveParams& c, const FieldConfig& cfg,
                          MulStats* stats)
{
    check_scalar(scalar);
    const std::vector<EcValue> table = ec_mul_table(v, c, cfg);
    MulStats local;
    local.table_entries = table.size();

    std::vector<unsigned> digits = nibbles(scalar.low);
    const std::vector<unsigned> hi = nibbles(scalar.high);
    digits.insert(digits.end(), hi.begin(), hi.end());

    EcValue acc = zero_value(cfg);
    for (std::size_t k = digits.size(); k-- > 0;) {
        if (k + 1 != digits.size())
            for (int d = 0; d < 4; ++d) {
                acc = ec_double(acc, c, cfg);
                ++local.doublings;
            }
        acc = ec_add(acc, table[digits[k]], c, cfg);
        ++local.additions;
    }
    if (stats)
        *stats = local;
    return acc;
}

EcValue ec_mul_double_and_add(const EcValue& v, const Uint256& scalar, const CurveParams& c, const FieldConfig& cfg)
{
    check_scalar(scalar);
    const BigInt k = scalar.value();
    EcValue acc = zero_value(cfg);
    for (std::size_t bit = 256; bit-- > 0;) {
        acc = ec_double(acc, c, cfg);
        if (mpz_tstbit(k.get_mpz_t(), bit))
            acc = ec_add(acc, v, c, cfg);
    }
    return acc;
}

EcValue get_point_from_x(const Bigint3i& xi, const Felt& v, const CurveParams& c, const FieldConfig& cfg)
{
    require_wide_field(cfg);
    if (!xi.bounded(input_bound()))
        throw GadgetError(Kind::BoundViolation, "get_point_from_x: x exceeds 3 * BASE - 1");
    const FeltLimbs x = to_felts(xi, cfg);
    const BigInt X = mod_floor(xi.val(), c.p);
    const auto root = sqrt_mod(X * X * X + c.a * X + c.b, c.p);
    if (!root)
        throw GadgetError(Kind::NonResidue, "get_point_from_x: x^3 + a*x + b is not a square");
    BigInt y = *root;
    if (mpz_odd_p(y.get_mpz_t()) != mpz_odd_p(v.value().get_mpz_t()))
        y = mod_floor(-y, c.p);

    const FeltLimbs X2 = nondet_value(
        mod_floor(X * X, c.p), [&](const FeltLimbs& r) { return sub_felts(mul_felts(x, x), widen(r, 5)); }, c.p, cfg,
        "get_point_from_x x^2");
    const FeltLimbs a = curve_const(c.a, cfg), b = curve_const(c.b, cfg);
    const FeltLimbs Y = nondet_value(
        y,
        [&](const FeltLimbs& r) {
            return sub_felts(sub_felts(sub_felts(mul_felts(r, r), mul_felts(X2, x)), mul_felts(a, x)), widen(b, 5));
        },
        c.p, cfg, "get_point_from_x y");

    // y0 + v = 2 t with t range checked: y and v have the same parity.
    const Felt t((Y[0].value() + v.value()) / 2, cfg);
    if (!range_check_below(t, cfg.rc_bound) || t + t != Y[0] + v)
        throw GadgetError(Kind::WitnessRejected, "get_point_from_x: parity check failed");

    if (all_zero(x))
        throw GadgetError(Kind::UnrepresentablePoint, "affine point with x = 0 collides with the zero encoding");
    return {{x, Y}, {xi, lift(Y)}};
}

}  // namespace cairovm::secp
