#pragma once

// Squash by grouping accesses per key in a std::map and checking each chain
// directly. No hints, no sorting argument.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace oracle {

struct Access {
    mpz_class key, prev, next;
};

inline std::optional<std::vector<Access>> naive_squash(const std::vector<Access>& log)
{
    std::map<mpz_class, std::vector<const Access*>> by_key;
    for (const Access& a : log)
        by_key[a.key].push_back(&a);
    std::vector<Access> out;
    for (const auto& [key, chain] : by_key) {
        for (std::size_t i = 1; i < chain.size(); ++i)
            if (chain[i]->prev != chain[i - 1]->next)
                return std::nullopt;
        out.push_back({key, chain.front()->prev, chain.back()->next});
    }
    return out;
}

}  // namespace oracle
