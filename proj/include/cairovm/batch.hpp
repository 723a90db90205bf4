#pragma once

#include "cairovm/field.hpp"
#include "cairovm/secp_ec.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cairovm::batch {

// Case i of every kernel draws from std::mt19937_64(seed + i), so the
// OpenMP path and the serial reference see identical inputs and must
// produce identical per-case digests.

BigInt random_bits(std::mt19937_64& rng, unsigned bits);
/// Uniform in [0, n) for n > 0 (rejection sampling).
BigInt random_below(std::mt19937_64& rng, const BigInt& n);

struct Options {
    std::size_t count = 100;
    std::uint64_t seed = 1;
    bool parallel = true;
};

struct Summary {
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;
    std::vector<std::string> digests;  // one per case

    bool ok() const { return failures == 0; }
};

enum class EcOp { Add, FastAdd, Double, Mul, MulDoubleAndAdd };

const char* to_string(EcOp op);

/// Non-native op vs the big-integer oracle, plus output witness validity.
/// Mul also checks the precompute table has 16 entries.
Summary ec_equivalence(EcOp op, const secp::CurveParams& curve, const FieldConfig& cfg, const Options& o);

/// Sign with the oracle, recover, and tamper with each of m, r, s, v.
Summary ecdsa_round_trip(const secp::CurveParams& curve, const FieldConfig& cfg, const Options& o);

/// Random log: truthful hints agree with the replay oracle (verdict and
/// output) and satisfy the spec check; one corrupted-hint trial must not be
/// accepted with an output that differs from the oracle.
Summary dict_fuzz(const FieldConfig& cfg, const Options& o);

enum class Gadget { VerifyZero, Reduce, Inv, DivModN, IsZero };

const char* to_string(Gadget g);

/// Honest witness accepted; one random single-limb perturbation rejected.
Summary gadget_mutation(Gadget g, const secp::CurveParams& curve, const FieldConfig& cfg, const Options& o);

}  // namespace cairovm::batch
