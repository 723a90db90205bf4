#pragma once

#include "cairovm/field.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cairovm::dict {

struct DictAccess {
    Felt key;
    Felt prev;
    Felt next;

    static constexpr std::size_t SIZE = 3;
    bool operator==(const DictAccess& o) const { return key == o.key && prev == o.prev && next == o.next; }
};

using AccessLog = std::vector<DictAccess>;
/// One entry per key, sorted by key.
using SquashedDict = std::vector<DictAccess>;

AccessLog log_from_json(const std::string& text, const FieldConfig& cfg);
std::string log_to_json(const AccessLog& log);
/// Rows `key prev next`, decimal.
std::string format_table(const std::vector<DictAccess>& rows);

/// The 7-access example and its squashed form.
AccessLog example_log(const FieldConfig& cfg);
SquashedDict example_squashed(const FieldConfig& cfg);

// ---------------------------------------------------------------- oracle

struct Replay {
    bool consistent = true;
    std::size_t position = 0;  // first inconsistent access
    SquashedDict squashed;     // set when consistent
};

/// Mutable-map replay: each access's prev must equal the key's current value.
Replay oracle_replay(const AccessLog& log);

// ---------------------------------------------------------------- hints

/// Prover data, read by the verifier only through checks.
struct SquashHints {
    std::vector<Felt> sorted_keys;
    std::vector<std::vector<Felt>> positions;  // per key, indices into the log
};

SquashHints generate_hints(const AccessLog& log);
/// One random structural or value mutation of `h`.
SquashHints corrupt_hints(const SquashHints& h, const AccessLog& log, std::mt19937_64& rng);

// ---------------------------------------------------------------- verifier

enum class RejectReason {
    UnsortedKeys,
    KeyRange,
    BadIndex,
    KeyMismatch,
    ChainBreak,
    CountMismatch,
    KappaBound,
};

const char* to_string(RejectReason r);

class HintRejected : public std::runtime_error {
public:
    HintRejected(RejectReason reason, const std::string& detail);
    RejectReason reason() const { return reason_; }

private:
    RejectReason reason_;
};

/// min(2^50, modulus): κ must stay below it.
BigInt kappa_limit(const FieldConfig& cfg);

/// Checks that the hints describe a consistent history of `log` and returns
/// the squashed dictionary. Requires n <= κ < kappa_limit. Keys must be
/// below rc_bound. Throws HintRejected.
SquashedDict squash_dict(const AccessLog& log, const SquashHints& hints, const BigInt& kappa);

/// Conjuncts of the squash specification: n <= κ < 2^50, squashed sorted
/// by key, equal key sets, and each entry is the squash of its key's
/// accesses (consecutive chaining from entry.prev to entry.next).
bool spec_squash_dict_check(const AccessLog& log, const SquashedDict& squashed, const BigInt& kappa);

// ---------------------------------------------------------------- fuzzing

struct LogShape {
    std::size_t max_len = 24;
    unsigned key_domain = 6;
    unsigned value_domain = 8;
    double break_probability = 0.1;  // chance an access ignores the current value
};

AccessLog random_log(std::mt19937_64& rng, const FieldConfig& cfg, const LogShape& shape = {});

}  // namespace cairovm::dict
