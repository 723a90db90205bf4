#include "cairovm/batch.hpp"

#include "cairovm/dict_squash.hpp"
#include "cairovm/ecdsa.hpp"

#include <exception>
#include <functional>

namespace cairovm::batch {

using namespace secp;

BigInt random_bits(std::mt19937_64& rng, unsigned bits)
{
    BigInt v = 0;
    unsigned have = 0;
    while (have < bits) {
        v = (v << 64) + from_u64(rng());
        have += 64;
    }
    return v >> (have - bits);
}

BigInt random_below(std::mt19937_64& rng, const BigInt& n)
{
    if (n <= 0)
        throw std::invalid_argument("random_below: n must be positive");
    const unsigned bits = static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2));
    for (;;) {
        BigInt v = random_bits(rng, bits);
        if (v < n)
            return v;
    }
}

namespace {

struct CaseResult {
    bool ok = true;
    std::string digest;
    std::string failure;
};

Summary run_cases(const Options& o, const std::function<CaseResult(std::mt19937_64&, std::size_t)>& f)
{
    std::vector<CaseResult> res(o.count);
    const long n = static_cast<long>(o.count);
#pragma omp parallel for schedule(dynamic) if (o.parallel)
    for (long i = 0; i < n; ++i) {
        std::mt19937_64 rng(o.seed + static_cast<std::uint64_t>(i));
        try {
            res[i] = f(rng, static_cast<std::size_t>(i));
        } catch (const std::exception& e) {
            res[i] = {false, std::string("exception: ") + e.what(), e.what()};
        }
    }
    Summary s;
    s.cases = o.count;
    for (std::size_t i = 0; i < res.size(); ++i) {
        s.digests.push_back(std::move(res[i].digest));
        if (!res[i].ok) {
            if (s.failures == 0)
                s.first_failure = "case " + std::to_string(i) + ": " + res[i].failure;
            ++s.failures;
        }
    }
    return s;
}

CaseResult fail(std::string digest, std::string why)
{
    return {false, std::move(digest), std::move(why)};
}

ECGroupPoint random_point(std::mt19937_64& rng, const CurveParams& c)
{
    return oracle_smul(1 + random_below(rng, c.n - 1), generator(c), c);
}

// Affine points only: the zero encoding collides with (0, y) on r1, and
// random multiples never hit it.
EcValue value_of(const ECGroupPoint& p, const CurveParams& c, const FieldConfig& cfg)
{
    return make_ec_value(p, c, cfg);
}

std::string witness_problem(const EcValue& v, const CurveParams& c, const FieldConfig& cfg)
{
    const CheckResult r = check_witness(v, c, cfg);
    return r ? std::string() : r.reason;
}

Bigint3i random_limbs(std::mt19937_64& rng, const BigInt& bound)
{
    Bigint3i b;
    for (BigInt& l : b.i)
        l = random_below(rng, 2 * bound + 1) - bound;
    return b;
}

Felt random_delta(std::mt19937_64& rng, const FieldConfig& cfg)
{
    for (;;) {
        Felt d(cfg);
        switch (rng() % 6) {
        case 0: d = Felt(rng() % 2 ? 1L : -1L, cfg); break;
        case 1: d = Felt(from_u64(rng()), cfg); break;
        case 2: d = Felt(random_below(rng, cfg.modulus), cfg); break;
        case 3: d = Felt(pow2(static_cast<unsigned>(rng() % 250)), cfg); break;
        case 4: d = Felt(cfg.modulus - 1 - from_u64(rng() % 16), cfg); break;
        default: d = Felt(base(), cfg) * Felt(from_u64(rng() % 8 + 1), cfg); break;
        }
        if (!d.is_zero())
            return d;
    }
}

}  // namespace

const char* to_string(EcOp op)
{
    switch (op) {
    case EcOp::Add: return "ec_add";
    case EcOp::FastAdd: return "fast_ec_add";
    case EcOp::Double: return "ec_double";
    case EcOp::Mul: return "ec_mul_by_uint256";
    case EcOp::MulDoubleAndAdd: return "ec_mul_double_and_add";
    }
    return "?";
}

Summary ec_equivalence(EcOp op, const CurveParams& c, const FieldConfig& cfg, const Options& o)
{
    return run_cases(o, [&](std::mt19937_64& rng, std::size_t i) -> CaseResult {
        const ECGroupPoint p = random_point(rng, c);
        const EcValue pv = value_of(p, c, cfg);
        ECGroupPoint expected;
        EcValue got;
        std::string extra;
        switch (op) {
        case EcOp::Add: {
            // Every eighth case hits a special branch: P + P, P + (-P), Zero.
            ECGroupPoint q = random_point(rng, c);
            switch (i % 8) {
            case 1: q = p; break;
            case 2: q = oracle_neg(p, c); break;
            case 3: q = ECGroupPoint::infinity(); break;
            default: break;
            }
            expected = oracle_add(p, q, c);
            got = ec_add(pv, value_of(q, c, cfg), c, cfg);
            break;
        }
        case EcOp::FastAdd: {
            ECGroupPoint q = i % 16 == 1 ? ECGroupPoint::infinity() : random_point(rng, c);
            expected = oracle_add(p, q, c);
            got = fast_ec_add(pv, value_of(q, c, cfg), c, cfg);
            break;
        }
        case EcOp::Double:
            expected = oracle_double(p, c);
            got = ec_double(pv, c, cfg);
            break;
        case EcOp::Mul:
        case EcOp::MulDoubleAndAdd: {
            BigInt k = random_bits(rng, 256);
            if (i == 0)
                k = 0;
            else if (i == 1)
                k = 1;
            else if (i == 2)
                k = c.n;
            else if (i == 3)
                k = pow2(256) - 1;
            const Uint256 scalar = Uint256::from_bigint(k, cfg);
            expected = oracle_smul(pow2(128) * scalar.high.value() + scalar.low.value(), p, c);
            if (op == EcOp::Mul) {
                MulStats stats;
                got = ec_mul_by_uint256(pv, scalar, c, cfg, &stats);
                if (stats.table_entries != 16)
                    extra = "table has " + std::to_string(stats.table_entries) + " entries";
            } else {
                got = ec_mul_double_and_add(pv, scalar, c, cfg);
            }
            break;
        }
        }
        const ECGroupPoint lifted = to_group(got.w, c);
        const std::string digest = to_string(lifted);
        if (!(lifted == expected))
            return fail(digest, std::string(to_string(op)) + " gave " + digest + ", oracle " + to_string(expected));
        if (auto w = witness_problem(got, c, cfg); !w.empty())
            return fail(digest, w);
        if (!extra.empty())
            return fail(digest, extra);
        return {true, digest, {}};
    });
}

Summary ecdsa_round_trip(const CurveParams& c, const FieldConfig& cfg, const Options& o)
{
    using namespace ecdsa;
    return run_cases(o, [&](std::mt19937_64& rng, std::size_t) -> CaseResult {
        const BigInt priv = 1 + random_below(rng, c.n - 1);
        const BigInt msg = random_bits(rng, 256);
        BigInt k = 1 + random_below(rng, c.n - 1);
        Signature sig;
        for (;;) {
            try {
                sig = oracle_sign(priv, msg, k, c);
                break;
            } catch (const EcdsaError&) {
                k = k % (c.n - 1) + 1;
            }
        }
        const ECGroupPoint pub = oracle_smul(priv, generator(c), c);
        const RecoveryInput in = RecoveryInput::from_ints(msg, sig.r, sig.s, sig.v, cfg);
        const Recovery rec = recover_public_key(in, c, cfg);
        const ECGroupPoint got = to_group(rec.public_key.w, c);
        const std::string digest = to_string(got);
        if (!(got == pub))
            return fail(digest, "recovered " + digest + ", expected " + to_string(pub));
        const ECGroupPoint R = to_group(rec.r_point.w, c);
        if (mpz_odd_p(R.y.get_mpz_t()) != mpz_odd_p(in.v.value().get_mpz_t()))
            return fail(digest, "parity of R.y differs from v");
        if (auto s = spec_recover_public_key(in, rec, c); !s)
            return fail(digest, "recovery spec: " + s.reason);

        // Each single-component tamper must not recover the true key.
        const BigInt delta = 1 + random_below(rng, pow2(64));
        const RecoveryInput tampered[] = {
            RecoveryInput::from_ints(msg + delta, sig.r, sig.s, sig.v, cfg),
            RecoveryInput::from_ints(msg, mod_floor(sig.r + delta, c.n), sig.s, sig.v, cfg),
            RecoveryInput::from_ints(msg, sig.r, mod_floor(sig.s + delta, c.n), sig.v, cfg),
            RecoveryInput::from_ints(msg, sig.r, sig.s, sig.v ^ 1, cfg),
        };
        const char* names[] = {"msg", "r", "s", "v"};
        for (int t = 0; t < 4; ++t) {
            try {
                const Recovery bad = recover_public_key(tampered[t], c, cfg);
                if (to_group(bad.public_key.w, c) == pub)
                    return fail(digest, std::string("tampered ") + names[t] + " still recovers the key");
            } catch (const EcdsaError&) {
                // r no longer an x-coordinate: rejected outright
            }
        }
        return {true, digest, {}};
    });
}

Summary dict_fuzz(const FieldConfig& cfg, const Options& o)
{
    using namespace dict;
    return run_cases(o, [&](std::mt19937_64& rng, std::size_t) -> CaseResult {
        LogShape shape;
        shape.max_len = 1 + rng() % 32;
        shape.key_domain = 1 + static_cast<unsigned>(rng() % 8);
        shape.value_domain = 1 + static_cast<unsigned>(rng() % 6);
        shape.break_probability = (rng() % 4) * 0.05;
        const AccessLog log = random_log(rng, cfg, shape);
        const BigInt kappa = from_u64(log.size() + rng() % 4);
        const Replay replay = oracle_replay(log);
        const SquashHints hints = generate_hints(log);

        std::string digest = replay.consistent ? "consistent" : "inconsistent@" + std::to_string(replay.position);
        bool accepted = false;
        SquashedDict out;
        try {
            out = squash_dict(log, hints, kappa);
            accepted = true;
        } catch (const HintRejected&) {
        }
        if (accepted != replay.consistent)
            return fail(digest, std::string("verifier ") + (accepted ? "accepted" : "rejected") + " a log the oracle " +
                                    (replay.consistent ? "accepts" : "rejects"));
        if (accepted && !(out == replay.squashed))
            return fail(digest, "verifier output differs from the oracle");
        if (accepted && !spec_squash_dict_check(log, out, kappa))
            return fail(digest, "accepted output fails the squash specification");

        const SquashHints bad = corrupt_hints(hints, log, rng);
        try {
            const SquashedDict forged = squash_dict(log, bad, kappa);
            digest += "|corrupt:accepted";
            if (!replay.consistent || !(forged == replay.squashed))
                return fail(digest, "corrupted hints accepted with a divergent output");
        } catch (const HintRejected& e) {
            digest += std::string("|corrupt:") + dict::to_string(e.reason());
        }
        return {true, digest, {}};
    });
}

const char* to_string(Gadget g)
{
    switch (g) {
    case Gadget::VerifyZero: return "verify_zero";
    case Gadget::Reduce: return "reduce";
    case Gadget::Inv: return "inv";
    case Gadget::DivModN: return "div_mod_n";
    case Gadget::IsZero: return "is_zero";
    }
    return "?";
}

Summary gadget_mutation(Gadget g, const CurveParams& c, const FieldConfig& cfg, const Options& o)
{
    return run_cases(o, [&](std::mt19937_64& rng, std::size_t i) -> CaseResult {
        std::function<CheckResult(const std::vector<Felt>&)> verify;
        std::vector<Felt> w;
        switch (g) {
        case Gadget::VerifyZero: {
            const FeltLimbs a = to_felts(random_limbs(rng, d2_bound()), cfg);
            const FeltLimbs b = to_felts(random_limbs(rng, d2_bound()), cfg);
            const FeltLimbs ab = mul_felts(a, b);
            const FeltLimbs r = to_felts(split(mod_floor(lift_value(ab), c.p)), cfg);
            const FeltLimbs x = sub_felts(ab, widen(r, 5));
            w = zero_witness(x, c.p, cfg);
            verify = [&, x](const std::vector<Felt>& ww) { return verify_zero(x, ww, c.p, cfg); };
            break;
        }
        case Gadget::Reduce: {
            const FeltLimbs x =
                mul_felts(to_felts(random_limbs(rng, d2_bound()), cfg), to_felts(random_limbs(rng, d2_bound()), cfg));
            w = reduce_witness(x, c.p, cfg);
            verify = [&, x](const std::vector<Felt>& ww) { return reduce_verify(x, ww, c.p, cfg); };
            break;
        }
        case Gadget::Inv: {
            FeltLimbs a;
            do
                a = to_felts(random_limbs(rng, d2_bound()), cfg);
            while (mod_floor(lift_value(a), c.p) == 0);
            w = inv_witness(a, c.p, cfg);
            verify = [&, a](const std::vector<Felt>& ww) { return inv_verify(a, ww, c.p, cfg); };
            break;
        }
        case Gadget::DivModN: {
            const FeltLimbs x = to_felts(random_limbs(rng, input_bound()), cfg);
            FeltLimbs y;
            do
                y = to_felts(random_limbs(rng, input_bound()), cfg);
            while (mod_floor(lift_value(y), c.n) == 0);
            w = div_mod_witness(x, y, c.n, cfg);
            verify = [&, x, y](const std::vector<Felt>& ww) { return div_mod_verify(x, y, ww, c.n, cfg); };
            break;
        }
        case Gadget::IsZero: {
            FeltLimbs a;
            if (i % 2 == 0) {
                // v - (v + p): limbs are small and signed, value -p.
                const BigInt v = random_below(rng, pow2(257) - c.p);
                a = to_felts(unreduced_sub(split(v), split(v + c.p)), cfg);
            } else {
                a = to_felts(unreduced_sub(random_limbs(rng, d2_bound()), random_limbs(rng, d2_bound())), cfg);
            }
            w = is_zero_witness(a, c.p, cfg);
            verify = [&, a](const std::vector<Felt>& ww) { return is_zero_verify(a, ww, c.p, cfg); };
            break;
        }
        }
        if (auto honest = verify(w); !honest)
            return fail("honest-rejected", "honest witness rejected: " + honest.reason);
        const std::size_t at = static_cast<std::size_t>(rng() % w.size());
        const Felt delta = random_delta(rng, cfg);
        std::vector<Felt> mutated = w;
        mutated[at] += delta;
        const CheckResult r = verify(mutated);
        const std::string digest = std::to_string(at) + ":" + (r ? "accepted" : "rejected");
        if (r)
            return fail(digest, "perturbation of witness limb " + std::to_string(at) + " by " +
                                    to_hex(delta.value()) + " accepted");
        return {true, digest, {}};
    });
}

}  // namespace cairovm::batch
