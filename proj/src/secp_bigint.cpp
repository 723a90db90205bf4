#include "cairovm/secp_bigint.hpp"

#include <json.hpp>

namespace cairovm::secp {

namespace {

const BigInt kBase = pow2(86);
const BigInt kCanonical = pow2(86);
const BigInt kSum = pow2(87);
const BigInt kD2 = pow2(89);
const BigInt kInput = 3 * pow2(86) - 1;
const BigInt kQuotient = pow2(86);
const BigInt kCarry = pow2(127);
const BigInt kZeroInput = pow2(200);

BigInt abs_of(const BigInt& v)
{
    return v < 0 ? BigInt(-v) : v;
}

FeltLimbs limbs_of(const BigInt& m, const FieldConfig& cfg)
{
    return to_felts(split(m), cfg);
}

FeltLimbs one5(const FieldConfig& cfg)
{
    FeltLimbs o(5, Felt(cfg));
    o[0] = Felt(1L, cfg);
    return o;
}

std::vector<Felt> concat(const FeltLimbs& a, const std::vector<Felt>& b)
{
    std::vector<Felt> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::vector<Felt> tail(const std::vector<Felt>& w, std::size_t from)
{
    return {w.begin() + static_cast<std::ptrdiff_t>(from), w.end()};
}

CheckResult canonical_limbs(const std::vector<Felt>& w, std::size_t from)
{
    for (std::size_t k = from; k < from + 3; ++k)
        if (!range_check_below(w[k], kCanonical))
            return CheckResult::fail("result limb " + std::to_string(k - from) + " not canonical");
    return CheckResult::pass();
}

void check_input(const FeltLimbs& a, std::size_t n, const BigInt& bound, const char* what)
{
    if (a.size() != n)
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + " limbs");
    for (const Felt& f : a)
        if (abs_of(f.to_signed()) > bound)
            throw GadgetError(GadgetError::Kind::BoundViolation, std::string(what) + ": input limb out of bounds");
}

BigInt bigint_field(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key))
        throw std::invalid_argument(std::string("curve params: missing ") + key);
    const auto& v = j.at(key);
    if (v.is_string())
        return parse_bigint(v.get<std::string>());
    if (v.is_number_integer())
        return from_i64(v.get<std::int64_t>());
    throw std::invalid_argument(std::string("curve params: bad ") + key);
}

}  // namespace

const BigInt& base() { return kBase; }
const BigInt& canonical_bound() { return kCanonical; }
const BigInt& sum_bound() { return kSum; }
const BigInt& d2_bound() { return kD2; }
const BigInt& input_bound() { return kInput; }
const BigInt& quotient_bound() { return kQuotient; }
const BigInt& carry_bound() { return kCarry; }
const BigInt& zero_input_bound() { return kZeroInput; }

GadgetError::GadgetError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

const char* to_string(GadgetError::Kind k)
{
    switch (k) {
    case GadgetError::Kind::WitnessRejected: return "WitnessRejected";
    case GadgetError::Kind::BoundViolation: return "BoundViolation";
    case GadgetError::Kind::DivisionByZero: return "DivisionByZero";
    case GadgetError::Kind::PreconditionViolated: return "PreconditionViolated";
    case GadgetError::Kind::NonResidue: return "NonResidue";
    case GadgetError::Kind::LimbRange: return "LimbRange";
    case GadgetError::Kind::UnrepresentablePoint: return "UnrepresentablePoint";
    case GadgetError::Kind::OutOfRange: return "OutOfRange";
    }
    return "?";
}

const CurveParams& CurveParams::secp256k1()
{
    static const CurveParams c{
        "secp256k1",
        pow2(256) - pow2(32) - 977,
        0,
        7,
        parse_bigint("0xfffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141"),
        parse_bigint("0x79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798"),
        parse_bigint("0x483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8"),
    };
    return c;
}

const CurveParams& CurveParams::secp256r1()
{
    static const CurveParams c{
        "secp256r1",
        pow2(256) - pow2(224) + pow2(192) + pow2(96) - 1,
        pow2(256) - pow2(224) + pow2(192) + pow2(96) - 1 - 3,
        parse_bigint("0x5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b"),
        parse_bigint("0xffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"),
        parse_bigint("0x6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
        parse_bigint("0x4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"),
    };
    return c;
}

CurveParams CurveParams::from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("curve params: ") + e.what());
    }
    CurveParams c;
    c.name = j.value("name", std::string("custom"));
    c.p = bigint_field(j, "p");
    if (c.p < 5)
        throw std::invalid_argument("curve params: p too small");
    c.a = mod_floor(bigint_field(j, "a"), c.p);
    c.b = mod_floor(bigint_field(j, "b"), c.p);
    c.n = bigint_field(j, "n");
    c.gx = bigint_field(j, "gx");
    c.gy = bigint_field(j, "gy");
    return c;
}

BigInt Bigint3i::val() const
{
    return i[0] + i[1] * kBase + i[2] * kBase * kBase;
}

bool Bigint3i::bounded(const BigInt& bound) const
{
    for (const BigInt& l : i)
        if (abs_of(l) > bound)
            return false;
    return true;
}

Bigint3i split(const BigInt& x)
{
    if (x < 0 || x >= pow2(258))
        throw GadgetError(GadgetError::Kind::OutOfRange, "split: value outside [0, 2^258)");
    Bigint3i b;
    BigInt rest = x;
    for (BigInt& l : b.i) {
        l = mod_floor(rest, kBase);
        rest = (rest - l) / kBase;
    }
    return b;
}

Bigint3i split_mod(const BigInt& x, const BigInt& p)
{
    if (x < 0 || x >= p)
        throw GadgetError(GadgetError::Kind::OutOfRange, "split: value outside [0, p)");
    return split(x);
}

BigInt invert_mod(const BigInt& a, const BigInt& m)
{
    BigInt r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw GadgetError(GadgetError::Kind::DivisionByZero, "no inverse modulo " + to_hex(m));
    return r;
}

BigInt bval(const Bigint3i& b)
{
    return b.val();
}

FeltLimbs to_felts(const Bigint3i& b, const FieldConfig& cfg)
{
    return {Felt(b.i[0], cfg), Felt(b.i[1], cfg), Felt(b.i[2], cfg)};
}

Bigint3i lift(const FeltLimbs& d)
{
    if (d.size() != 3)
        throw std::invalid_argument("lift: expected 3 limbs");
    return {{d[0].to_signed(), d[1].to_signed(), d[2].to_signed()}};
}

BigInt lift_value(const FeltLimbs& d)
{
    BigInt v = 0;
    for (std::size_t k = d.size(); k-- > 0;)
        v = v * kBase + d[k].to_signed();
    return v;
}

Bigint3i unreduced_add(const Bigint3i& a, const Bigint3i& b)
{
    return {{a.i[0] + b.i[0], a.i[1] + b.i[1], a.i[2] + b.i[2]}};
}

Bigint3i unreduced_sub(const Bigint3i& a, const Bigint3i& b)
{
    return {{a.i[0] - b.i[0], a.i[1] - b.i[1], a.i[2] - b.i[2]}};
}

std::array<BigInt, 5> unreduced_mul(const Bigint3i& a, const Bigint3i& b)
{
    std::array<BigInt, 5> d{0, 0, 0, 0, 0};
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            d[x + y] += a.i[x] * b.i[y];
    return d;
}

FeltLimbs add_felts(const FeltLimbs& a, const FeltLimbs& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("add_felts: length mismatch");
    FeltLimbs out;
    for (std::size_t k = 0; k < a.size(); ++k)
        out.push_back(a[k] + b[k]);
    return out;
}

FeltLimbs sub_felts(const FeltLimbs& a, const FeltLimbs& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("sub_felts: length mismatch");
    FeltLimbs out;
    for (std::size_t k = 0; k < a.size(); ++k)
        out.push_back(a[k] - b[k]);
    return out;
}

FeltLimbs scale_felts(const FeltLimbs& a, long k)
{
    FeltLimbs out;
    for (const Felt& f : a)
        out.push_back(f * Felt(k, f.config()));
    return out;
}

FeltLimbs mul_felts(const FeltLimbs& a, const FeltLimbs& b)
{
    if (a.size() != 3 || b.size() != 3)
        throw std::invalid_argument("mul_felts: expected 3 limbs");
    const FieldConfig& cfg = a[0].config();
    FeltLimbs d(5, Felt(cfg));
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            d[x + y] += a[x] * b[y];
    return d;
}

FeltLimbs widen(const FeltLimbs& a, std::size_t n)
{
    if (a.empty() || a.size() > n)
        throw std::invalid_argument("widen: bad length");
    FeltLimbs out = a;
    out.resize(n, Felt(a[0].config()));
    return out;
}

bool range_check_below(const Felt& x, const BigInt& bound)
{
    const BigInt& rc = x.config().rc_bound;
    if (bound > rc)
        throw std::logic_error("range_check_below: bound exceeds rc_bound");
    if (bound == rc)
        return x.value() < rc;
    // x in [0, rc) and bound - 1 - x in [0, rc).
    return x.value() < rc && (Felt(bound - 1, x.config()) - x).value() < rc;
}

bool range_check_abs(const Felt& x, const BigInt& bound)
{
    const FieldConfig& cfg = x.config();
    const BigInt& rc = cfg.rc_bound;
    if (2 * bound > rc)
        throw std::logic_error("range_check_abs: bound exceeds rc_bound / 2");
    const Felt shifted = x + Felt(bound, cfg);
    if (2 * bound == rc)
        return shifted.value() < rc;
    return shifted.value() < rc && (Felt(bound - 1, cfg) - x).value() < rc;
}

void require_wide_field(const FieldConfig& cfg)
{
    if (cfg.rc_bound < pow2(128) || cfg.modulus <= pow2(250))
        throw std::invalid_argument("secp gadgets need rc_bound >= 2^128 and a modulus above 2^250");
}

std::vector<Felt> zero_witness(const FeltLimbs& x5, const BigInt& m, const FieldConfig& cfg)
{
    check_input(x5, 5, kZeroInput, "verify_zero");
    const Bigint3i ml = split(m);
    std::array<BigInt, 5> x;
    BigInt value = 0;
    for (std::size_t k = 5; k-- > 0;) {
        x[k] = x5[k].to_signed();
        value = value * kBase + x[k];
    }
    if (mod_floor(value, m) != 0)
        throw GadgetError(GadgetError::Kind::WitnessRejected, "verify_zero: value is not a multiple of the modulus");
    BigInt q = value / m;  // exact

    std::array<BigInt, 4> ql;
    for (int k = 0; k < 3; ++k) {
        ql[k] = mod_floor(q, kBase);
        q = (q - ql[k]) / kBase;
    }
    ql[3] = q;
    if (abs_of(ql[3]) >= kQuotient)
        throw GadgetError(GadgetError::Kind::BoundViolation, "verify_zero: quotient does not fit four limbs");

    std::vector<Felt> w;
    for (const BigInt& l : ql)
        w.emplace_back(l, cfg);
    BigInt carry = 0;
    for (int k = 0; k < 6; ++k) {
        BigInt e = k < 5 ? x[k] : BigInt(0);
        for (int i = 0; i < 4; ++i)
            if (k - i >= 0 && k - i < 3)
                e -= ql[i] * ml.i[k - i];
        if (k == 5) {
            if (e + carry != 0)
                throw std::logic_error("verify_zero: carry chain does not close");
            break;
        }
        const BigInt t = e + carry;
        if (mod_floor(t, kBase) != 0)
            throw std::logic_error("verify_zero: inexact carry");
        carry = t / kBase;
        if (abs_of(carry) >= kCarry)
            throw GadgetError(GadgetError::Kind::BoundViolation, "verify_zero: carry out of bounds");
        w.emplace_back(carry, cfg);
    }
    return w;
}

CheckResult verify_zero(const FeltLimbs& x5, const std::vector<Felt>& w, const BigInt& m, const FieldConfig& cfg)
{
    if (x5.size() != 5 || w.size() != kZeroWitnessSize)
        return CheckResult::fail("verify_zero: malformed input");
    for (int k = 0; k < 4; ++k)
        if (!range_check_abs(w[k], kQuotient))
            return CheckResult::fail("quotient limb " + std::to_string(k) + " out of range");
    for (int k = 0; k < 5; ++k)
        if (!range_check_abs(w[4 + k], kCarry))
            return CheckResult::fail("carry " + std::to_string(k) + " out of range");

    const FeltLimbs ml = limbs_of(m, cfg);
    const Felt b(kBase, cfg);
    Felt carry(cfg);
    for (int k = 0; k < 6; ++k) {
        Felt e = k < 5 ? x5[k] : Felt(cfg);
        for (int i = 0; i < 4; ++i)
            if (k - i >= 0 && k - i < 3)
                e -= w[i] * ml[k - i];
        if (k == 5) {
            if (!(e + carry).is_zero())
                return CheckResult::fail("verify_zero: top limb does not vanish");
            break;
        }
        const Felt c = w[4 + k];
        if (!(e + carry - c * b).is_zero())
            return CheckResult::fail("verify_zero: carry equation " + std::to_string(k) + " fails");
        carry = c;
    }
    return CheckResult::pass();
}

std::vector<Felt> reduce_witness(const FeltLimbs& x5, const BigInt& p, const FieldConfig& cfg)
{
    check_input(x5, 5, kZeroInput, "reduce");
    const FeltLimbs r = to_felts(split(mod_floor(lift_value(x5), p)), cfg);
    return concat(r, zero_witness(sub_felts(x5, widen(r, 5)), p, cfg));
}

CheckResult reduce_verify(const FeltLimbs& x5, const std::vector<Felt>& w, const BigInt& p, const FieldConfig& cfg)
{
    if (x5.size() != 5 || w.size() != 3 + kZeroWitnessSize)
        return CheckResult::fail("reduce: malformed witness");
    if (auto c = canonical_limbs(w, 0); !c)
        return c;
    return verify_zero(sub_felts(x5, widen(witness_result(w), 5)), tail(w, 3), p, cfg);
}

std::vector<Felt> inv_witness(const FeltLimbs& a, const BigInt& p, const FieldConfig& cfg)
{
    check_input(a, 3, kD2, "inv");
    const BigInt v = mod_floor(lift_value(a), p);
    if (v == 0)
        throw GadgetError(GadgetError::Kind::DivisionByZero, "inv: input is zero modulo p");
    const FeltLimbs r = to_felts(split(invert_mod(v, p)), cfg);
    return concat(r, zero_witness(sub_felts(mul_felts(a, r), one5(cfg)), p, cfg));
}

CheckResult inv_verify(const FeltLimbs& a, const std::vector<Felt>& w, const BigInt& p, const FieldConfig& cfg)
{
    if (a.size() != 3 || w.size() != 3 + kZeroWitnessSize)
        return CheckResult::fail("inv: malformed witness");
    if (auto c = canonical_limbs(w, 0); !c)
        return c;
    return verify_zero(sub_felts(mul_felts(a, witness_result(w)), one5(cfg)), tail(w, 3), p, cfg);
}

std::vector<Felt> div_mod_witness(const FeltLimbs& x, const FeltLimbs& y, const BigInt& n, const FieldConfig& cfg)
{
    check_input(x, 3, kInput, "div_mod_n");
    check_input(y, 3, kInput, "div_mod_n");
    const BigInt yv = mod_floor(lift_value(y), n);
    if (yv == 0)
        throw GadgetError(GadgetError::Kind::DivisionByZero, "div_mod_n: divisor is zero modulo n");
    const BigInt r = mod_floor(lift_value(x) * invert_mod(yv, n), n);
    const FeltLimbs rl = to_felts(split(r), cfg);
    return concat(rl, zero_witness(sub_felts(mul_felts(y, rl), widen(x, 5)), n, cfg));
}

CheckResult div_mod_verify(const FeltLimbs& x, const FeltLimbs& y, const std::vector<Felt>& w, const BigInt& n,
                           const FieldConfig& cfg)
{
    if (x.size() != 3 || y.size() != 3 || w.size() != 3 + kZeroWitnessSize)
        return CheckResult::fail("div_mod_n: malformed witness");
    if (auto c = canonical_limbs(w, 0); !c)
        return c;
    return verify_zero(sub_felts(mul_felts(y, witness_result(w)), widen(x, 5)), tail(w, 3), n, cfg);
}

std::vector<Felt> is_zero_witness(const FeltLimbs& a, const BigInt& p, const FieldConfig& cfg)
{
    check_input(a, 3, 2 * kD2, "is_zero");
    const BigInt v = mod_floor(lift_value(a), p);
    std::vector<Felt> w;
    if (v == 0) {
        w = {Felt(1L, cfg), Felt(cfg), Felt(cfg), Felt(cfg)};
        const auto z = zero_witness(widen(a, 5), p, cfg);
        w.insert(w.end(), z.begin(), z.end());
        return w;
    }
    const FeltLimbs r = to_felts(split(invert_mod(v, p)), cfg);
    w = {Felt(cfg)};
    w.insert(w.end(), r.begin(), r.end());
    const auto z = zero_witness(sub_felts(mul_felts(a, r), one5(cfg)), p, cfg);
    w.insert(w.end(), z.begin(), z.end());
    return w;
}

CheckResult is_zero_verify(const FeltLimbs& a, const std::vector<Felt>& w, const BigInt& p, const FieldConfig& cfg)
{
    if (a.size() != 3 || w.size() != 4 + kZeroWitnessSize)
        return CheckResult::fail("is_zero: malformed witness");
    const Felt& flag = w[0];
    if (!(flag * (flag - 1)).is_zero())
        return CheckResult::fail("is_zero: flag is not boolean");
    if (auto c = canonical_limbs(w, 1); !c)
        return c;
    const FeltLimbs r{w[1], w[2], w[3]};
    if (flag.value() == 1) {
        for (const Felt& l : r)
            if (!l.is_zero())
                return CheckResult::fail("is_zero: inverse limbs set for a zero input");
        return verify_zero(widen(a, 5), tail(w, 4), p, cfg);
    }
    return verify_zero(sub_felts(mul_felts(a, r), one5(cfg)), tail(w, 4), p, cfg);
}

FeltLimbs witness_result(const std::vector<Felt>& w)
{
    if (w.size() < 3)
        throw std::invalid_argument("witness_result: short witness");
    return {w[0], w[1], w[2]};
}

FeltLimbs nondet_reduce(const FeltLimbs& x5, const BigInt& p, const FieldConfig& cfg)
{
    require_wide_field(cfg);
    const auto w = reduce_witness(x5, p, cfg);
    if (auto c = reduce_verify(x5, w, p, cfg); !c)
        throw GadgetError(GadgetError::Kind::WitnessRejected, "reduce: " + c.reason);
    return witness_result(w);
}

FeltLimbs nondet_inv(const FeltLimbs& a, const BigInt& p, const FieldConfig& cfg)
{
    require_wide_field(cfg);
    const auto w = inv_witness(a, p, cfg);
    if (auto c = inv_verify(a, w, p, cfg); !c)
        throw GadgetError(GadgetError::Kind::WitnessRejected, "inv: " + c.reason);
    return witness_result(w);
}

FeltLimbs nondet_div_mod(const FeltLimbs& x, const FeltLimbs& y, const BigInt& n, const FieldConfig& cfg)
{
    require_wide_field(cfg);
    const auto w = div_mod_witness(x, y, n, cfg);
    if (auto c = div_mod_verify(x, y, w, n, cfg); !c)
        throw GadgetError(GadgetError::Kind::WitnessRejected, "div_mod_n: " + c.reason);
    return witness_result(w);
}

bool nondet_is_zero(const FeltLimbs& a, const BigInt& p, const FieldConfig& cfg)
{
    require_wide_field(cfg);
    const auto w = is_zero_witness(a, p, cfg);
    if (auto c = is_zero_verify(a, w, p, cfg); !c)
        throw GadgetError(GadgetError::Kind::WitnessRejected, "is_zero: " + c.reason);
    return w[0].value() == 1;
}

Bigint3i nondet_reduce(const Bigint3i& a, const CurveParams& curve, const FieldConfig& cfg)
{
    return lift(nondet_reduce(widen(to_felts(a, cfg), 5), curve.p, cfg));
}

Bigint3i nondet_mul(const Bigint3i& a, const Bigint3i& b, const CurveParams& curve, const FieldConfig& cfg)
{
    return lift(nondet_reduce(mul_felts(to_felts(a, cfg), to_felts(b, cfg)), curve.p, cfg));
}

Bigint3i nondet_inv(const Bigint3i& a, const CurveParams& curve, const FieldConfig& cfg)
{
    return lift(nondet_inv(to_felts(a, cfg), curve.p, cfg));
}

Bigint3i nondet_div_mod_n(const Bigint3i& x, const Bigint3i& y, const CurveParams& curve, const FieldConfig& cfg)
{
    return lift(nondet_div_mod(to_felts(x, cfg), to_felts(y, cfg), curve.n, cfg));
}

// ---------------------------------------------------------------- audit

namespace {

// Limb magnitude of the 5-limb product of two 3-limb values.
BigInt mul_bound(const BigInt& a, const BigInt& b)
{
    return 3 * a * b;
}

struct Auditor {
    const FieldConfig& cfg;
    BigInt half;
    std::vector<AuditEntry> out;

    explicit Auditor(const FieldConfig& c) : cfg(c), half((c.modulus - 1) / 2) {}

    void add(const std::string& g, const std::string& q, const BigInt& bound, const BigInt& limit)
    {
        out.push_back({g, q, bound, limit, bound < limit});
    }

    // A value with limbs bounded by x handed to verify_zero.
    void zero_check(const std::string& g, const BigInt& x)
    {
        add(g, "verify_zero input limb", x, kZeroInput + 1);
        // (q*m)_k has at most three terms. The shifted range checks admit
        // -Q <= q < Q and -C <= c < C, so magnitudes reach Q and C.
        const BigInt qm = 3 * kQuotient * (kBase - 1);
        add(g, "e_k = x_k - (q*m)_k", x + qm, half);
        add(g, "e_k + c_{k-1} - c_k*BASE", x + qm + kCarry * (kBase + 1), half);
        add(g, "honest carry", (x + qm + kCarry - 1) / kBase + 1, kCarry);
    }
};

}  // namespace

std::vector<AuditEntry> interval_audit(const FieldConfig& cfg)
{
    Auditor a(cfg);
    const BigInt c = kCanonical - 1;

    a.zero_check("reduce (of a D2 x D2 product)", mul_bound(kD2, kD2) + c);
    a.zero_check("inv", mul_bound(kD2, c) + 1);
    a.zero_check("div_mod_n", mul_bound(kInput, c) + kInput);
    // is_zero sees differences and sums of two D2 values (ec_add case split).
    a.zero_check("is_zero (zero branch)", 2 * kD2);
    a.zero_check("is_zero (inverse branch)", mul_bound(2 * kD2, c) + 1);

    // ec_double: 2y*s - 3x^2 - a, s^2 - 2x - x', s*(x - x') - y - y'.
    a.zero_check("ec_double slope", mul_bound(2 * kD2, c) + 3 * mul_bound(kD2, kD2) + c);
    a.zero_check("ec_double x'", mul_bound(c, c) + 2 * kD2 + c);
    a.zero_check("ec_double y'", mul_bound(c, kD2 + c) + kD2 + c);
    // fast_ec_add: s*(x0 - x1) - (y0 - y1), s^2 - x0 - x1 - x', s*(x0 - x') - y0 - y'.
    a.zero_check("fast_ec_add slope", mul_bound(c, 2 * kD2) + 2 * kD2);
    a.zero_check("fast_ec_add x'", mul_bound(c, c) + 2 * kD2 + c);
    a.zero_check("fast_ec_add y'", mul_bound(c, kD2 + c) + kD2 + c);
    // get_point_from_x: x2 = x*x reduced, then y^2 - x2*x - a*x - b.
    a.zero_check("get_point_from_x x^2", mul_bound(kInput, kInput) + c);
    a.zero_check("get_point_from_x curve equation", mul_bound(c, c) + 2 * mul_bound(c, kInput) + c);
    a.add("get_point_from_x", "y0 + v (parity)", c + cfg.rc_bound - 1, a.half);
    a.add("get_point_from_x", "2 * t (parity half)", 2 * (cfg.rc_bound - 1), a.half);
    // Uint256 <-> BigInt3 and nibble recomposition.
    a.add("bigint3 to uint256", "d1_lo + 2^42 * d1_hi", pow2(86), a.half);
    a.add("bigint3 to uint256", "low = d0 + 2^86 * d1_lo", pow2(128), a.half);
    a.add("bigint3 to uint256", "high = d1_hi + 2^44 * d2", pow2(44) + pow2(130), a.half);
    a.add("ec_mul_by_uint256", "sum nibble_i * 16^i", pow2(128), a.half);
    // Range checks of shifted values rely on these staying below rc_bound.
    a.add("range checks", "2 * CARRY", 2 * kCarry, cfg.rc_bound + 1);
    a.add("range checks", "2 * QUOTIENT", 2 * kQuotient, cfg.rc_bound + 1);
    return a.out;
}

}  // namespace cairovm::secp
