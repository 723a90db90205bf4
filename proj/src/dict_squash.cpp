#include "cairovm/dict_squash.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

namespace cairovm::dict {

namespace {

BigInt json_int(const nlohmann::json& v)
{
    if (v.is_string())
        return parse_bigint(v.get<std::string>());
    if (v.is_number_integer())
        return from_i64(v.get<std::int64_t>());
    throw std::invalid_argument("dict log: expected an integer or a string");
}

AccessLog rows(const std::vector<std::array<long, 3>>& t, const FieldConfig& cfg)
{
    AccessLog out;
    for (const auto& r : t)
        out.push_back({Felt(r[0], cfg), Felt(r[1], cfg), Felt(r[2], cfg)});
    return out;
}

[[noreturn]] void reject(RejectReason r, const std::string& detail)
{
    throw HintRejected(r, detail);
}

}  // namespace

AccessLog log_from_json(const std::string& text, const FieldConfig& cfg)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("dict log: ") + e.what());
    }
    if (!j.is_array())
        throw std::invalid_argument("dict log: expected an array");
    AccessLog log;
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("key") || !e.contains("prev") || !e.contains("next"))
            throw std::invalid_argument("dict log: entries need key, prev and next");
        log.push_back({Felt(json_int(e["key"]), cfg), Felt(json_int(e["prev"]), cfg), Felt(json_int(e["next"]), cfg)});
    }
    return log;
}

std::string log_to_json(const AccessLog& log)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : log)
        j.push_back({{"key", to_hex(a.key.value())}, {"prev", to_hex(a.prev.value())}, {"next", to_hex(a.next.value())}});
    return j.dump();
}

std::string format_table(const std::vector<DictAccess>& t)
{
    std::ostringstream os;
    os << "key prev next\n";
    for (const auto& a : t)
        os << a.key << ' ' << a.prev << ' ' << a.next << '\n';
    return os.str();
}

AccessLog example_log(const FieldConfig& cfg)
{
    return rows({{7, 3, 2}, {5, 4, 4}, {7, 2, 10}, {0, 2, 3}, {7, 10, 0}, {0, 3, 4}, {0, 4, 5}}, cfg);
}

SquashedDict example_squashed(const FieldConfig& cfg)
{
    return rows({{0, 2, 5}, {5, 4, 4}, {7, 3, 0}}, cfg);
}

Replay oracle_replay(const AccessLog& log)
{
    std::map<BigInt, std::pair<Felt, Felt>> state;  // key -> (first prev, current)
    for (std::size_t i = 0; i < log.size(); ++i) {
        const DictAccess& a = log[i];
        auto it = state.find(a.key.value());
        if (it == state.end()) {
            state.emplace(a.key.value(), std::make_pair(a.prev, a.next));
            continue;
        }
        if (it->second.second != a.prev)
            return {false, i, {}};
        it->second.second = a.next;
    }
    Replay r;
    for (const auto& [key, v] : state)
        r.squashed.push_back({Felt(key, v.first.config()), v.first, v.second});
    return r;
}

SquashHints generate_hints(const AccessLog& log)
{
    std::map<BigInt, std::vector<std::size_t>> by_key;
    for (std::size_t i = 0; i < log.size(); ++i)
        by_key[log[i].key.value()].push_back(i);
    SquashHints h;
    for (const auto& [key, pos] : by_key) {
        const FieldConfig& cfg = log[pos.front()].key.config();
        h.sorted_keys.emplace_back(key, cfg);
        std::vector<Felt> fp;
        for (std::size_t p : pos)
            fp.emplace_back(from_u64(p), cfg);
        h.positions.push_back(std::move(fp));
    }
    return h;
}

SquashHints corrupt_hints(const SquashHints& orig, const AccessLog& log, std::mt19937_64& rng)
{
    SquashHints h = orig;
    if (log.empty() || h.sorted_keys.empty()) {
        const FieldConfig& cfg = FieldConfig::default_config();
        h.sorted_keys.emplace_back(BigInt(rng() % 8), cfg);
        h.positions.push_back({Felt(0L, cfg)});
        return h;
    }
    const FieldConfig& cfg = log.front().key.config();
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    const std::size_t n = log.size();
    const std::size_t k = pick(h.sorted_keys.size());
    auto& list = h.positions[k];

    switch (rng() % 14) {
    case 0:  // swap adjacent keys
        if (h.sorted_keys.size() > 1) {
            const std::size_t a = pick(h.sorted_keys.size() - 1);
            std::swap(h.sorted_keys[a], h.sorted_keys[a + 1]);
            break;
        }
        [[fallthrough]];
    case 1:  // duplicate a key with its list
        h.sorted_keys.insert(h.sorted_keys.begin() + static_cast<long>(k), h.sorted_keys[k]);
        h.positions.insert(h.positions.begin() + static_cast<long>(k), h.positions[k]);
        break;
    case 2:  // drop a position
        list.erase(list.begin() + static_cast<long>(pick(list.size())));
        break;
    case 3:  // add a position
        list.insert(list.begin() + static_cast<long>(pick(list.size() + 1)), Felt(from_u64(pick(n + 2)), cfg));
        break;
    case 4: {  // nudge a position
        Felt& p = list[pick(list.size())];
        p = p + Felt(rng() % 2 ? 1L : -1L, cfg);
        break;
    }
    case 5:  // move a position to another key
        if (h.sorted_keys.size() > 1) {
            const std::size_t j = (k + 1 + pick(h.sorted_keys.size() - 1)) % h.sorted_keys.size();
            const std::size_t at = pick(list.size());
            auto& dst = h.positions[j];
            dst.insert(dst.begin() + static_cast<long>(pick(dst.size() + 1)), list[at]);
            list.erase(list.begin() + static_cast<long>(at));
            break;
        }
        [[fallthrough]];
    case 6:  // remove a key
        h.sorted_keys.erase(h.sorted_keys.begin() + static_cast<long>(k));
        h.positions.erase(h.positions.begin() + static_cast<long>(k));
        break;
    case 7:  // bogus key
        h.sorted_keys.insert(h.sorted_keys.begin() + static_cast<long>(k), Felt(BigInt(rng() % 16), cfg));
        h.positions.insert(h.positions.begin() + static_cast<long>(k), {Felt(from_u64(pick(n)), cfg)});
        break;
    case 8:  // shift a key value
        h.sorted_keys[k] = h.sorted_keys[k] + Felt(rng() % 2 ? 1L : -1L, cfg);
        break;
    case 9:
        std::reverse(list.begin(), list.end());
        if (list.size() > 1)
            break;
        [[fallthrough]];
    case 10:  // position that is "negative" as an integer
        list[pick(list.size())] = Felt(-1L, cfg) - Felt(from_u64(pick(4)), cfg);
        break;
    case 11:
        if (list.size() > 1) {
            std::swap(list[0], list[list.size() - 1]);
            break;
        }
        [[fallthrough]];
    case 12:  // key outside the range-checked domain
        h.sorted_keys[k] = Felt(cfg.rc_bound + BigInt(rng() % 4), cfg);
        break;
    default:
        list.clear();
        break;
    }
    return h;
}

const char* to_string(RejectReason r)
{
    switch (r) {
    case RejectReason::UnsortedKeys: return "unsorted keys";
    case RejectReason::KeyRange: return "key range";
    case RejectReason::BadIndex: return "bad index";
    case RejectReason::KeyMismatch: return "key mismatch";
    case RejectReason::ChainBreak: return "chain break";
    case RejectReason::CountMismatch: return "count mismatch";
    case RejectReason::KappaBound: return "kappa bound";
    }
    return "?";
}

HintRejected::HintRejected(RejectReason reason, const std::string& detail)
    : std::runtime_error(std::string(to_string(reason)) + ": " + detail), reason_(reason)
{
}

BigInt kappa_limit(const FieldConfig& cfg)
{
    return std::min(pow2(50), cfg.modulus);
}

SquashedDict squash_dict(const AccessLog& log, const SquashHints& hints, const BigInt& kappa)
{
    const std::size_t n = log.size();
    if (n == 0 && hints.sorted_keys.empty() && hints.positions.empty())
        return {};
    const FieldConfig& cfg = log.empty() ? hints.sorted_keys.front().config() : log.front().key.config();
    const BigInt& rc = cfg.rc_bound;

    // n <= κ < min(2^50, modulus): counts and positions cannot wrap.
    if (kappa < 0 || kappa >= kappa_limit(cfg))
        reject(RejectReason::KappaBound, "kappa " + to_dec(kappa) + " is not below " + to_dec(kappa_limit(cfg)));
    if (from_u64(n) > kappa)
        reject(RejectReason::KappaBound, "log length " + std::to_string(n) + " exceeds kappa");
    if (hints.positions.size() != hints.sorted_keys.size())
        reject(RejectReason::CountMismatch, "one position list per key expected");

    const Felt n_felt(from_u64(n), cfg);
    const Felt one(1L, cfg);
    Felt total(cfg);
    SquashedDict out;
    for (std::size_t k = 0; k < hints.sorted_keys.size(); ++k) {
        const Felt& key = hints.sorted_keys[k];
        if (key.value() >= rc)
            reject(RejectReason::KeyRange, "key " + to_dec(key.value()) + " is not below rc_bound");
        if (k > 0 && (key - hints.sorted_keys[k - 1] - one).value() >= rc)
            reject(RejectReason::UnsortedKeys, "key " + to_dec(key.value()) + " does not follow its predecessor");

        const auto& pos = hints.positions[k];
        if (pos.empty())
            reject(RejectReason::BadIndex, "empty position list for key " + to_dec(key.value()));
        const DictAccess* last = nullptr;
        for (std::size_t t = 0; t < pos.size(); ++t) {
            const Felt& j = pos[t];
            // 0 <= j < n.
            if (j.value() >= rc || (n_felt - one - j).value() >= rc)
                reject(RejectReason::BadIndex, "position " + to_dec(j.value()) + " outside the log");
            if (t > 0 && (j - pos[t - 1] - one).value() >= rc)
                reject(RejectReason::BadIndex, "positions for key " + to_dec(key.value()) + " not increasing");
            const DictAccess& a = log[to_u64(j.value())];
            if (a.key != key)
                reject(RejectReason::KeyMismatch, "access " + to_dec(j.value()) + " has another key");
            if (last && last->next != a.prev)
                reject(RejectReason::ChainBreak, "access " + to_dec(j.value()) + " does not continue its key");
            last = &a;
        }
        total += Felt(from_u64(pos.size()), cfg);
        out.push_back({key, log[to_u64(pos.front().value())].prev, last->next});
    }
    if (total != n_felt)
        reject(RejectReason::CountMismatch, "positions cover " + to_dec(total.value()) + " of " + std::to_string(n) +
                                                " accesses");
    return out;
}

bool spec_squash_dict_check(const AccessLog& log, const SquashedDict& squashed, const BigInt& kappa)
{
    if (kappa >= pow2(50))
        return true;  // the specification is vacuous
    if (from_u64(log.size()) > kappa || from_u64(squashed.size()) > kappa)
        return false;
    for (std::size_t i = 1; i < squashed.size(); ++i)
        if (!(squashed[i - 1].key.value() < squashed[i].key.value()))
            return false;

    std::vector<BigInt> log_keys, out_keys;
    for (const auto& a : log)
        log_keys.push_back(a.key.value());
    for (const auto& s : squashed)
        out_keys.push_back(s.key.value());
    std::sort(log_keys.begin(), log_keys.end());
    log_keys.erase(std::unique(log_keys.begin(), log_keys.end()), log_keys.end());
    std::sort(out_keys.begin(), out_keys.end());
    out_keys.erase(std::unique(out_keys.begin(), out_keys.end()), out_keys.end());
    if (log_keys != out_keys)
        return false;

    for (const auto& s : squashed) {
        std::vector<const DictAccess*> f;
        for (const auto& a : log)
            if (a.key == s.key)
                f.push_back(&a);
        if (f.empty() || f.front()->prev != s.prev || f.back()->next != s.next)
            return false;
        for (std::size_t i = 1; i < f.size(); ++i)
            if (f[i - 1]->next != f[i]->prev)
                return false;
    }
    return true;
}

AccessLog random_log(std::mt19937_64& rng, const FieldConfig& cfg, const LogShape& shape)
{
    const std::size_t len = static_cast<std::size_t>(rng() % (shape.max_len + 1));
    std::map<unsigned, unsigned> current;
    std::bernoulli_distribution brk(shape.break_probability);
    AccessLog log;
    for (std::size_t i = 0; i < len; ++i) {
        const unsigned key = static_cast<unsigned>(rng() % shape.key_domain);
        auto it = current.find(key);
        unsigned prev = static_cast<unsigned>(rng() % shape.value_domain);
        if (it != current.end() && !brk(rng))
            prev = it->second;
        const unsigned next = static_cast<unsigned>(rng() % shape.value_domain);
        current[key] = next;
        log.push_back({Felt(static_cast<long>(key), cfg), Felt(static_cast<long>(prev), cfg),
                       Felt(static_cast<long>(next), cfg)});
    }
    return log;
}

}  // namespace cairovm::dict
