#pragma once

// Consistent estimates of the quantities every asymptotic formula depends on:
// class proportions c, the ratio c0 = p/n, and the normalised matrix
//   calM = (1/c0) D_c^{1/2} (M^T M) D_c^{1/2}.

#include <cstdint>

#include <Eigen/Dense>

#include "mtlspca/datamodel.hpp"

namespace mtlspca {

struct SufficientStats {
    int tasks = 0;
    int classes = 0;
    Eigen::VectorXd proportions;  // c, sums to 1
    double c0 = 0.0;
    Eigen::MatrixXd gram;         // estimate of M^T M
    Eigen::MatrixXd calM;         // normalised, PSD after clipping
    // Sum of |negative eigenvalues| of the raw calM that were clipped to zero.
    double clipped_mass = 0.0;
    bool clipped() const { return clipped_mass > 0.0; }
};

struct Proportions {
    Eigen::VectorXd c;
    double c0 = 0.0;
};

Proportions estimate_proportions(const TaskLayout& layout);

enum class HalfSplit {
    positional,  // first floor(n/2) columns against the next floor(n/2)
    randomized,  // halves drawn by a seeded permutation of the class columns
};

struct GramOptions {
    HalfSplit split = HalfSplit::positional;
    std::uint64_t seed = 0;
};

// Off-diagonal (a != b): inner product of the class sample means.
// Diagonal: inner product of the two half-sample means (halves of size
// floor(n_a/2); with odd n_a the last column is left out).
Eigen::MatrixXd estimate_gram(const TaskDataset& x, const GramOptions& options = {});

// Normalise a Gram matrix (estimated or exact) and clip calM to PSD.
SufficientStats stats_from_gram(const TaskLayout& layout, const Eigen::MatrixXd& gram);

SufficientStats build_stats(const TaskDataset& x, const GramOptions& options = {});

// Exact population statistics of a mixture (M^T M computed from the true means).
SufficientStats population_stats(const MixtureSpec& spec);

}  // namespace mtlspca
