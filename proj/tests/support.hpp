#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "spinsim/profile.hpp"

namespace spinsim::test {

inline const TechnologyProfile& near_term() {
    static const TechnologyProfile p = load_named_profile("near_term");
    return p;
}

inline const TechnologyProfile& long_term() {
    static const TechnologyProfile p = load_named_profile("long_term");
    return p;
}

inline std::vector<std::uint8_t> random_bits(std::mt19937_64& rng, int n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng() & 1u);
    return v;
}

}  // namespace spinsim::test
