#ifndef UAVMEC_COMMON_HPP_
#define UAVMEC_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace uavmec {

/// Thrown when a scenario or decision violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a document cannot be parsed into a scenario.
class ParseError : public std::runtime_error {
 public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a subproblem has no feasible point (names the violated budget).
class InfeasibleError : public std::runtime_error {
 public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

namespace constants {
inline constexpr double speed_of_light = 299792458.0;  // m/s
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Deterministic uniform double in [lo, hi) from a 64-bit generator draw.
/// Kept explicit (rather than std::uniform_real_distribution) so scenario
/// generation is byte-identical across standard library implementations.
template <class Rng>
double uniform(Rng& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

}  // namespace uavmec

#endif  // UAVMEC_COMMON_HPP_
