#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace icrb {

/**
 * @brief Seedable, splittable random stream with portable output.
 *
 * Uniforms come from mt19937_64; normals from an explicit Box-Muller
 * transform (std::normal_distribution is implementation-defined and would
 * not reproduce across standard libraries). split(i) derives a child
 * stream from a fixed hash of (seed, i), so the stream consumed by trial i
 * never depends on how trials are scheduled across threads.
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    /// Child stream for subtask @p index. Pure function of (seed, index).
    RngStream split(std::uint64_t index) const;

    std::uint64_t next_u64();

    /// Uniform on (0, 1]. The open lower end keeps log() in Box-Muller finite.
    double uniform01();

    /// Standard normal deviate (Box-Muller, one spare cached).
    double normal();

    /// Isotropic N(0, sigma^2 I_3) draw, components in x, y, z order.
    Eigen::Vector3d normal3(double sigma);

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace icrb
