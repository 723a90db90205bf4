#include "cairovm/dict_squash.hpp"

#include "../oracles/naive_dict.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace cairovm;
using namespace cairovm::dict;

namespace {

const FieldConfig& F()
{
    return FieldConfig::default_config();
}

std::vector<oracle::Access> to_oracle(const AccessLog& log)
{
    std::vector<oracle::Access> out;
    for (const auto& a : log)
        out.push_back({a.key.value(), a.prev.value(), a.next.value()});
    return out;
}

RejectReason reason_of(const AccessLog& log, const SquashHints& h, const BigInt& kappa = 1000)
{
    try {
        squash_dict(log, h, kappa);
    } catch (const HintRejected& e) {
        return e.reason();
    }
    ADD_FAILURE() << "hints accepted";
    return RejectReason::KappaBound;
}

Felt f(long v)
{
    return Felt(v, F());
}

}  // namespace

TEST(DictSquash, Example)
{
    const AccessLog log = example_log(F());
    ASSERT_EQ(log.size(), 7u);
    const SquashedDict out = squash_dict(log, generate_hints(log), 7);
    EXPECT_EQ(out, example_squashed(F()));
    EXPECT_EQ(format_table(out), "key prev next\n0 2 5\n5 4 4\n7 3 0\n");
    EXPECT_TRUE(spec_squash_dict_check(log, out, 7));
    EXPECT_EQ(oracle_replay(log).squashed, out);
}

TEST(DictSquash, JsonRoundTrip)
{
    const AccessLog log = example_log(F());
    EXPECT_EQ(log_from_json(log_to_json(log), F()), log);
    const AccessLog parsed = log_from_json(R"([{"key":"0x5","prev":"4","next":"0x4"}])", F());
    ASSERT_EQ(parsed.size(), 1u);
    EXPECT_EQ(parsed[0].key, f(5));
    EXPECT_EQ(parsed[0].prev, f(4));
    EXPECT_ANY_THROW(log_from_json(R"([{"key":"0x5","prev":"4"}])", F()));
    EXPECT_ANY_THROW(log_from_json("{", F()));
}

TEST(DictSquash, EmptyLog)
{
    EXPECT_TRUE(squash_dict({}, generate_hints({}), 0).empty());
    EXPECT_TRUE(spec_squash_dict_check({}, {}, 0));
}

TEST(DictSquash, AgreesWithNaiveOracle)
{
    std::mt19937_64 rng(11);
    std::size_t consistent = 0;
    for (int i = 0; i < 2000; ++i) {
        const AccessLog log = random_log(rng, F());
        const auto naive = oracle::naive_squash(to_oracle(log));
        const Replay replay = oracle_replay(log);
        ASSERT_EQ(replay.consistent, naive.has_value());
        try {
            const SquashedDict out = squash_dict(log, generate_hints(log), 64);
            ASSERT_TRUE(naive.has_value());
            ASSERT_EQ(out.size(), naive->size());
            for (std::size_t k = 0; k < out.size(); ++k) {
                EXPECT_EQ(out[k].key.value(), (*naive)[k].key);
                EXPECT_EQ(out[k].prev.value(), (*naive)[k].prev);
                EXPECT_EQ(out[k].next.value(), (*naive)[k].next);
            }
            EXPECT_TRUE(spec_squash_dict_check(log, out, 64));
            ++consistent;
        } catch (const HintRejected& e) {
            ASSERT_FALSE(naive.has_value()) << e.what();
            EXPECT_EQ(e.reason(), RejectReason::ChainBreak);
        }
    }
    EXPECT_GT(consistent, 200u);
    EXPECT_LT(consistent, 2000u);
}

TEST(DictSquash, CorruptedHintsNeverYieldAWrongAnswer)
{
    std::mt19937_64 rng(12);
    std::size_t rejected = 0;
    for (int i = 0; i < 3000; ++i) {
        const AccessLog log = random_log(rng, F());
        const SquashHints bad = corrupt_hints(generate_hints(log), log, rng);
        const auto naive = oracle::naive_squash(to_oracle(log));
        try {
            const SquashedDict out = squash_dict(log, bad, 64);
            ASSERT_TRUE(naive.has_value());
            ASSERT_EQ(out.size(), naive->size());
            for (std::size_t k = 0; k < out.size(); ++k)
                ASSERT_EQ(out[k].next.value(), (*naive)[k].next);
        } catch (const HintRejected&) {
            ++rejected;
        }
    }
    EXPECT_GT(rejected, 2000u);
}

TEST(DictSquash, RejectReasons)
{
    const AccessLog log = example_log(F());
    const SquashHints good = generate_hints(log);
    ASSERT_EQ(good.sorted_keys.size(), 3u);

    SquashHints h = good;
    std::swap(h.sorted_keys[0], h.sorted_keys[1]);
    std::swap(h.positions[0], h.positions[1]);
    EXPECT_EQ(reason_of(log, h), RejectReason::UnsortedKeys);

    h = good;
    h.sorted_keys.insert(h.sorted_keys.begin() + 1, h.sorted_keys[1]);
    h.positions.insert(h.positions.begin() + 1, h.positions[1]);
    EXPECT_EQ(reason_of(log, h), RejectReason::UnsortedKeys);

    h = good;
    h.sorted_keys[2] = Felt(F().rc_bound, F());
    EXPECT_EQ(reason_of(log, h), RejectReason::KeyRange);

    h = good;
    h.positions[0].push_back(f(7));
    EXPECT_EQ(reason_of(log, h), RejectReason::BadIndex);

    h = good;
    h.positions[0].front() = f(-1);
    EXPECT_EQ(reason_of(log, h), RejectReason::BadIndex);

    h = good;
    std::reverse(h.positions[0].begin(), h.positions[0].end());
    EXPECT_EQ(reason_of(log, h), RejectReason::BadIndex);

    h = good;
    h.positions[1].clear();
    EXPECT_EQ(reason_of(log, h), RejectReason::BadIndex);

    h = good;
    h.positions[0].front() = h.positions[1].front();
    std::sort(h.positions[0].begin(), h.positions[0].end(),
              [](const Felt& a, const Felt& b) { return a.value() < b.value(); });
    EXPECT_EQ(reason_of(log, h), RejectReason::KeyMismatch);

    h = good;
    h.positions[0].pop_back();
    EXPECT_EQ(reason_of(log, h), RejectReason::CountMismatch);

    h = good;
    h.positions.pop_back();
    EXPECT_EQ(reason_of(log, h), RejectReason::CountMismatch);

    AccessLog broken = log;
    broken[6].prev = broken[6].prev + f(1);
    EXPECT_EQ(reason_of(broken, generate_hints(broken)), RejectReason::ChainBreak);

    EXPECT_EQ(reason_of(log, good, 6), RejectReason::KappaBound);
    EXPECT_EQ(reason_of(log, good, kappa_limit(F())), RejectReason::KappaBound);
    EXPECT_EQ(reason_of(log, good, -1), RejectReason::KappaBound);
}

TEST(DictSquash, KappaLimit)
{
    EXPECT_EQ(kappa_limit(F()), pow2(50));
    const auto small = FieldConfig::make(12289, 64);
    EXPECT_EQ(kappa_limit(*small), 12289);
}

TEST(DictSquash, SpecCheckDetectsWrongOutputs)
{
    const AccessLog log = example_log(F());
    SquashedDict out = example_squashed(F());
    ASSERT_TRUE(spec_squash_dict_check(log, out, 7));
    SquashedDict wrong = out;
    wrong[1].next = f(9);
    EXPECT_FALSE(spec_squash_dict_check(log, wrong, 7));
    wrong = out;
    std::swap(wrong[0], wrong[1]);
    EXPECT_FALSE(spec_squash_dict_check(log, wrong, 7));
    wrong = out;
    wrong.pop_back();
    EXPECT_FALSE(spec_squash_dict_check(log, wrong, 7));
    EXPECT_FALSE(spec_squash_dict_check(log, out, 6));
    EXPECT_TRUE(spec_squash_dict_check(log, wrong, pow2(50)));
}
