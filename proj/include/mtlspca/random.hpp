#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace mtlspca {

// Seeded generator: 64-bit Mersenne Twister (19937-bit state) with the
// standard library's uniform and normal distributions (libstdc++ draws normals
// with the Marsaglia polar method). Streams are reproducible for a given
// standard library only.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();  // [0, 1)
    double normal();
    void fill_normal(Eigen::Ref<Eigen::MatrixXd> out);

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Independent seed for sub-stream `stream` of `master` (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace mtlspca
