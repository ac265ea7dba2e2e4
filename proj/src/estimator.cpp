#include "mtlspca/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtlspca/errors.hpp"
#include "mtlspca/random.hpp"
#include "mtlspca/smalldense.hpp"

namespace mtlspca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Proportions estimate_proportions(const TaskLayout& layout) {
    Proportions out;
    const double n = static_cast<double>(layout.total());
    out.c.resize(layout.groups());
    for (int g = 0; g < layout.groups(); ++g) out.c(g) = layout.count(g) / n;
    out.c0 = layout.dimension() / n;
    return out;
}

MatrixXd estimate_gram(const TaskDataset& x, const GramOptions& options) {
    const TaskLayout& layout = x.layout();
    const int groups = layout.groups();
    const int p = layout.dimension();

    MatrixXd means(p, groups);
    MatrixXd first_half(p, groups);
    MatrixXd second_half(p, groups);
    for (int g = 0; g < groups; ++g) {
        const int count = layout.count(g);
        if (count < 2) {
            throw EstimationError("estimate_gram: group " + std::to_string(g) +
                                  " has fewer than 2 samples");
        }
        const auto block = x.group_block(g);
        const int half = count / 2;
        if (options.split == HalfSplit::positional) {
            const VectorXd ones = VectorXd::Ones(half);
            VectorXd a = block.leftCols(half) * ones;
            VectorXd b = block.middleCols(half, half) * ones;
            VectorXd total = a + b;
            if (count % 2) total += block.col(count - 1);
            means.col(g) = total / static_cast<double>(count);
            first_half.col(g) = a / static_cast<double>(half);
            second_half.col(g) = b / static_cast<double>(half);
        } else {
            means.col(g) = block * VectorXd::Constant(count, 1.0 / static_cast<double>(count));
            std::vector<int> order(static_cast<std::size_t>(count));
            std::iota(order.begin(), order.end(), 0);
            Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(g)));
            for (int i = count - 1; i > 0; --i) {
                const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
                std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
            }
            VectorXd a = VectorXd::Zero(p);
            VectorXd b = VectorXd::Zero(p);
            for (int i = 0; i < half; ++i) {
                a += block.col(order[static_cast<std::size_t>(i)]);
                b += block.col(order[static_cast<std::size_t>(half + i)]);
            }
            first_half.col(g) = a / static_cast<double>(half);
            second_half.col(g) = b / static_cast<double>(half);
        }
    }

    MatrixXd gram = means.transpose() * means;
    for (int g = 0; g < groups; ++g) gram(g, g) = first_half.col(g).dot(second_half.col(g));
    return 0.5 * (gram + gram.transpose());
}

SufficientStats stats_from_gram(const TaskLayout& layout, const MatrixXd& gram) {
    if (gram.rows() != layout.groups() || gram.cols() != layout.groups()) {
        throw InputError("stats_from_gram: Gram matrix must be (k*m) x (k*m)");
    }
    const Proportions prop = estimate_proportions(layout);
    SufficientStats s;
    s.tasks = layout.tasks();
    s.classes = layout.classes();
    s.proportions = prop.c;
    s.c0 = prop.c0;
    s.gram = 0.5 * (gram + gram.transpose());

    const VectorXd root = prop.c.cwiseSqrt();
    MatrixXd raw = (root.asDiagonal() * s.gram * root.asDiagonal()) / prop.c0;
    raw = 0.5 * (raw + raw.transpose());

    const EigenDecomposition ed = sym_eig(raw);
    VectorXd kept = ed.values;
    double clipped = 0.0;
    // Negatives within rounding of zero are left alone.
    const double roundoff = 1e-13 * std::max(1.0, kept.size() ? std::abs(kept(0)) : 0.0);
    for (Eigen::Index i = 0; i < kept.size(); ++i) {
        if (kept(i) < -roundoff) {
            clipped += -kept(i);
            kept(i) = 0.0;
        }
    }
    if (clipped > 0.0) {
        MatrixXd fixed = ed.vectors * kept.asDiagonal() * ed.vectors.transpose();
        s.calM = 0.5 * (fixed + fixed.transpose());
    } else {
        s.calM = raw;
    }
    s.clipped_mass = clipped;
    return s;
}

SufficientStats build_stats(const TaskDataset& x, const GramOptions& options) {
    return stats_from_gram(x.layout(), estimate_gram(x, options));
}

SufficientStats population_stats(const MixtureSpec& spec) {
    spec.validate();
    return stats_from_gram(spec.layout, spec.means.transpose() * spec.means);
}

}  // namespace mtlspca
