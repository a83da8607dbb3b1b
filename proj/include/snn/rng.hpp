#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace snn {

// The one PRNG used repo-wide. mt19937_64 is bit-exact across platforms by
// the standard; the double conversions below avoid std::*_distribution,
// whose output is implementation defined.
inline constexpr const char* kGeneratorName = "mt19937_64/box-muller";

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; one spare value cached per pair.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    Eigen::VectorXd gaussian_vector(Eigen::Index size) {
        Eigen::VectorXd out(size);
        for (Eigen::Index i = 0; i < size; ++i) out[i] = gaussian();
        return out;
    }

    // Uniform point on the unit sphere of R^size (normalized Gaussian).
    Eigen::VectorXd unit_sphere(Eigen::Index size) {
        Eigen::VectorXd v = gaussian_vector(size);
        double norm = v.norm();
        while (norm == 0.0) {  // probability ~0, but stay total
            v = gaussian_vector(size);
            norm = v.norm();
        }
        return v / norm;
    }

    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling keeps the draw unbiased and deterministic.
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return x % bound;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace snn
