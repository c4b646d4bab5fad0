#pragma once

#include "frtb/engine.hpp"
#include "frtb/evalharness.hpp"
#include "frtb/portfolio.hpp"
#include "frtb/rulebook.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace frtb::test {

inline std::string data_path(const std::string& rel) {
    return std::string(FRTB_DATA_DIR) + "/" + rel;
}

inline const Rulebook& reference_rulebook() {
    static const Rulebook rb = load_rulebook_file(data_path("rulebook/d352_reference.json"));
    return rb;
}

inline const MarketData& fixture_market() {
    static const MarketData md = load_market_data_file(data_path("fixtures/market.json"));
    return md;
}

inline const IssuerRegistry& fixture_registry() {
    static const IssuerRegistry reg = load_registry_file(data_path("fixtures/registry.json"));
    return reg;
}

inline double rel_err(double got, double want) {
    if (want == 0.0)
        return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

/// Bounded draws straight from mt19937_64 output so results do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}

    double unit() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(g_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool coin() { return (g_() >> 63) != 0; }

private:
    std::mt19937_64 g_;
};

} // namespace frtb::test
