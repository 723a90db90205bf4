#pragma once

#include "cairovm/bigint.hpp"
#include "cairovm/field.hpp"
#include "cairovm/vm.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cairovm::secp {

// Bound table. Limb bounds are on absolute values of the integer a felt
// limb is the cast of; "< B" bounds are exclusive.
//
//   name            bound            used for
//   BASE            2^86             limb radix
//   CANONICAL       [0, 2^86)        gadget outputs (range checked)
//   SUM             |l| <= 2^87      sums/differences of two canonical values
//   D2_BOUND        |l| <= 2^89      EcWitness coordinates
//   INPUT_BOUND     |l| <= 3*BASE-1  recovery inputs (msg_hash, r, s)
//   QUOTIENT        -2^86 <= q < 2^86    verify_zero quotient limbs (4 limbs)
//   CARRY           -2^127 <= c < 2^127  verify_zero carries (5 carries)
//   ZERO_INPUT      |x| <= 2^200     limbs of a 5-limb value handed to verify_zero
//
// interval_audit() propagates these through every gadget and checks each
// felt-level intermediate stays below (VM modulus - 1) / 2, so felt
// equations imply the same equations over the integers.
const BigInt& base();
const BigInt& canonical_bound();
const BigInt& sum_bound();
const BigInt& d2_bound();
const BigInt& input_bound();
const BigInt& quotient_bound();
const BigInt& carry_bound();
const BigInt& zero_input_bound();

class GadgetError : public std::runtime_error {
public:
    enum class Kind {
        WitnessRejected,
        BoundViolation,
        DivisionByZero,
        PreconditionViolated,
        NonResidue,
        LimbRange,
        UnrepresentablePoint,
        OutOfRange,
    };

    GadgetError(Kind kind, const std::string& what);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

const char* to_string(GadgetError::Kind k);

struct CurveParams {
    std::string name;
    BigInt p;
    BigInt a;  // canonical residue of ALPHA
    BigInt b;
    BigInt n;
    BigInt gx;
    BigInt gy;

    static const CurveParams& secp256k1();
    static const CurveParams& secp256r1();
    /// {"p": "0x..", "a": .., "b": .., "n": .., "gx": .., "gy": ..}
    static CurveParams from_json(const std::string& text);
};

/// Three signed integer limbs, value i0 + i1*BASE + i2*BASE^2.
struct Bigint3i {
    std::array<BigInt, 3> i;

    BigInt val() const;
    /// |ik| <= bound for every limb.
    bool bounded(const BigInt& bound) const;
    bool operator==(const Bigint3i&) const = default;
};

/// Felt limbs (length 3 for BigInt3, 5 for unreduced products).
using FeltLimbs = std::vector<Felt>;

/// Radix decomposition with canonical limbs. Throws GadgetError(OutOfRange)
/// unless 0 <= x < 2^258.
Bigint3i split(const BigInt& x);
/// split() with the 0 <= x < p precondition checked.
Bigint3i split_mod(const BigInt& x, const BigInt& p);

BigInt bval(const Bigint3i& b);

/// Host-side inverse modulo m (GMP), throws GadgetError(DivisionByZero)
/// when a is not invertible.
BigInt invert_mod(const BigInt& a, const BigInt& m);
FeltLimbs to_felts(const Bigint3i& b, const FieldConfig& cfg);
/// Integers the limbs are casts of, read as signed residues.
Bigint3i lift(const FeltLimbs& d);
/// Value of arbitrary-length felt limbs read as signed residues.
BigInt lift_value(const FeltLimbs& d);

Bigint3i unreduced_add(const Bigint3i& a, const Bigint3i& b);
Bigint3i unreduced_sub(const Bigint3i& a, const Bigint3i& b);
/// Five limbs of the schoolbook product, value exactly a*b.
std::array<BigInt, 5> unreduced_mul(const Bigint3i& a, const Bigint3i& b);

// Felt-level counterparts (what the VM code computes).
FeltLimbs add_felts(const FeltLimbs& a, const FeltLimbs& b);
FeltLimbs sub_felts(const FeltLimbs& a, const FeltLimbs& b);
FeltLimbs scale_felts(const FeltLimbs& a, long k);
FeltLimbs mul_felts(const FeltLimbs& a, const FeltLimbs& b);  // 3 x 3 -> 5
FeltLimbs widen(const FeltLimbs& a, std::size_t n);            // zero-pad

// ---- verify_zero: proves sum x_k BASE^k == q * m over the integers.
//
// Witness layout: q0..q3 (signed limbs), c0..c4 (signed carries), with
//   e_k = x_k - (q*m)_k,  e_k + c_{k-1} = c_k * BASE (k < 5),  e_5 + c_4 = 0.
inline constexpr std::size_t kZeroWitnessSize = 9;

/// Honest witness; throws GadgetError(WitnessRejected) when m does not
/// divide the value or it falls outside ZERO_INPUT.
std::vector<Felt> zero_witness(const FeltLimbs& x5, const BigInt& m, const FieldConfig& cfg);
CheckResult verify_zero(const FeltLimbs& x5, const std::vector<Felt>& w, const BigInt& m, const FieldConfig& cfg);

/// -bound <= x < bound for the integer x is the cast of, through range
/// checks of shifted values (one check when 2*bound == rc_bound, two
/// otherwise).
bool range_check_abs(const Felt& x, const BigInt& bound);
/// 0 <= x < bound through range checks.
bool range_check_below(const Felt& x, const BigInt& bound);

// ---- gadgets. Each has a prover (witness) and a verifier that never
// trusts the witness beyond the checks it performs.
//
// reduce     input 5 limbs     witness r0..r2 | zero witness        (12)
// inv        input a           witness r0..r2 | zero witness        (12)
// div_mod_n  input x, y        witness r0..r2 | zero witness        (12)
// is_zero    input a           witness flag | r0..r2 | zero witness (13)

std::vector<Felt> reduce_witness(const FeltLimbs& x5, const BigInt& p, const FieldConfig& cfg);
CheckResult reduce_verify(const FeltLimbs& x5, const std::vector<Felt>& w, const BigInt& p, const FieldConfig& cfg);

std::vector<Felt> inv_witness(const FeltLimbs& a, const BigInt& p, const FieldConfig& cfg);
CheckResult inv_verify(const FeltLimbs& a, const std::vector<Felt>& w, const BigInt& p, const FieldConfig& cfg);

std::vector<Felt> div_mod_witness(const FeltLimbs& x, const FeltLimbs& y, const BigInt& n, const FieldConfig& cfg);
CheckResult div_mod_verify(const FeltLimbs& x, const FeltLimbs& y, const std::vector<Felt>& w, const BigInt& n,
                           const FieldConfig& cfg);

std::vector<Felt> is_zero_witness(const FeltLimbs& a, const BigInt& p, const FieldConfig& cfg);
CheckResult is_zero_verify(const FeltLimbs& a, const std::vector<Felt>& w, const BigInt& p, const FieldConfig& cfg);

/// Canonical result limbs held by a reduce/inv/div witness.
FeltLimbs witness_result(const std::vector<Felt>& w);

// Prover + verifier in one call; rejected witnesses throw
// GadgetError(WitnessRejected).
/// Throws std::invalid_argument unless rc_bound >= 2^128 and the modulus
/// exceeds 2^250 (the audit is stated for such fields).
void require_wide_field(const FieldConfig& cfg);

FeltLimbs nondet_reduce(const FeltLimbs& x5, const BigInt& p, const FieldConfig& cfg);
FeltLimbs nondet_inv(const FeltLimbs& a, const BigInt& p, const FieldConfig& cfg);
FeltLimbs nondet_div_mod(const FeltLimbs& x, const FeltLimbs& y, const BigInt& n, const FieldConfig& cfg);
bool nondet_is_zero(const FeltLimbs& a, const BigInt& p, const FieldConfig& cfg);

Bigint3i nondet_reduce(const Bigint3i& a, const CurveParams& curve, const FieldConfig& cfg);
Bigint3i nondet_mul(const Bigint3i& a, const Bigint3i& b, const CurveParams& curve, const FieldConfig& cfg);
Bigint3i nondet_inv(const Bigint3i& a, const CurveParams& curve, const FieldConfig& cfg);
Bigint3i nondet_div_mod_n(const Bigint3i& x, const Bigint3i& y, const CurveParams& curve, const FieldConfig& cfg);

// ---- interval audit.

struct AuditEntry {
    std::string gadget;
    std::string quantity;
    BigInt bound;  // max |integer value| of the felt expression
    BigInt limit;  // what the bound has to stay within
    bool ok = false;
};

/// Propagates the bound table through every gadget expression (and the EC
/// formulas built on them). Felt equations are checked against
/// (modulus - 1) / 2, values handed to verify_zero against ZERO_INPUT and
/// honest carries against CARRY.
std::vector<AuditEntry> interval_audit(const FieldConfig& cfg);

}  // namespace cairovm::secp
