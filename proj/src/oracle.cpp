#include <cmath>
#include <string>

#include "mtlspca/errors.hpp"
#include "mtlspca/estimator.hpp"
#include "mtlspca/harness.hpp"
#include "mtlspca/random.hpp"
#include "mtlspca/smalldense.hpp"
#include "mtlspca/theory.hpp"

namespace mtlspca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_config(const OracleConfig& config) {
    if (config.trainings < 1) throw InputError("oracle: need at least one training set");
    if (config.draws < 1000) throw InputError("oracle: need at least 1000 draws");
}

// Scores basis^T x for antithetic pairs of test noise around every group mean.
// `per_training` draws per group are spent on each basis.
struct Accumulator {
    MatrixXd sum;      // groups x tau, sum of scores
    MatrixXd sum_sq;   // sum of squared scores
    MatrixXd mean_sum;     // per training: sum of conditional means
    MatrixXd mean_sum_sq;  // ... and of their squares
    long draws = 0;
    int trainings = 0;

    Accumulator(int groups, Eigen::Index tau)
        : sum(MatrixXd::Zero(groups, tau)),
          sum_sq(MatrixXd::Zero(groups, tau)),
          mean_sum(MatrixXd::Zero(groups, tau)),
          mean_sum_sq(MatrixXd::Zero(groups, tau)) {}

    void add(const MixtureSpec& spec, const MatrixXd& basis, int per_training, Rng& rng) {
        const int p = spec.layout.dimension();
        MatrixXd noise(p, per_training / 2);
        rng.fill_normal(noise);
        const MatrixXd projected_noise = basis.transpose() * noise;  // tau x pairs
        for (int g = 0; g < spec.layout.groups(); ++g) {
            const VectorXd centre = basis.transpose() * spec.means.col(g);
            for (Eigen::Index i = 0; i < projected_noise.cols(); ++i) {
                for (int sign : {1, -1}) {
                    const VectorXd score = centre + sign * projected_noise.col(i);
                    sum.row(g) += score.transpose();
                    sum_sq.row(g) += score.cwiseAbs2().transpose();
                }
            }
            mean_sum.row(g) += centre.transpose();
            mean_sum_sq.row(g) += centre.cwiseAbs2().transpose();
        }
        draws += 2 * projected_noise.cols();
        ++trainings;
    }

    EmpiricalScoreLaw finish() const {
        EmpiricalScoreLaw law;
        law.draws = draws;
        const double n = static_cast<double>(draws);
        law.mean = sum / n;
        law.variance = (sum_sq / n - law.mean.cwiseAbs2()) * (n / (n - 1.0));
        // Antithetic pairs cancel the test noise in the mean, so its error comes
        // from the spread of the conditional means across training sets.
        const double t = static_cast<double>(trainings);
        if (trainings > 1) {
            const MatrixXd cm = mean_sum / t;
            const MatrixXd spread = ((mean_sum_sq / t - cm.cwiseAbs2()) * (t / (t - 1.0))).cwiseMax(0.0);
            law.mean_stderr = (spread / t).cwiseSqrt();
        } else {
            law.mean_stderr = MatrixXd::Zero(law.mean.rows(), law.mean.cols());
        }
        return law;
    }
};

int draws_per_training(const OracleConfig& config) {
    int per = (config.draws + config.trainings - 1) / config.trainings;
    if (per % 2) ++per;
    return per;
}

}  // namespace

EmpiricalScoreLaw monte_carlo_oracle(const MixtureSpec& spec, const VectorXd& ytilde,
                                     const OracleConfig& config) {
    check_config(config);
    spec.validate();
    if (ytilde.size() != spec.layout.groups()) throw InputError("oracle: one label per group required");
    if (ytilde.norm() == 0.0) throw InputError("oracle: labels are zero");

    const int per = draws_per_training(config);
    Accumulator acc(spec.layout.groups(), 1);
    Rng test_rng(derive_seed(config.seed, 0x7e57ULL));
    for (int t = 0; t < config.trainings; ++t) {
        const TaskDataset train = synth_gaussian(spec, derive_seed(config.seed, static_cast<std::uint64_t>(t)));
        VectorXd v = train.samples() * expand_labels(spec.layout, ytilde).col(0);
        const double norm = v.norm();
        if (!(norm > 0.0)) throw DegenerateDirectionError("oracle: X y vanished");
        v /= norm;
        acc.add(spec, v, per, test_rng);
    }
    return acc.finish();
}

EmpiricalScoreLaw monte_carlo_pca_oracle(const MixtureSpec& spec, int tau, const OracleConfig& config) {
    check_config(config);
    spec.validate();
    const SufficientStats pop = population_stats(spec);
    const ScoreLaw theory = pca_score_law(pop.calM, pop.proportions, pop.c0, tau, spec.layout.classes());

    const int per = draws_per_training(config);
    Accumulator acc(spec.layout.groups(), tau);
    Rng test_rng(derive_seed(config.seed, 0x7e57ULL));
    for (int t = 0; t < config.trainings; ++t) {
        const TaskDataset train = synth_gaussian(spec, derive_seed(config.seed, static_cast<std::uint64_t>(t)));
        MatrixXd basis = top_subspace(train.samples(), tau);
        const MatrixXd along = spec.means.transpose() * basis;  // groups x tau
        for (int i = 0; i < tau; ++i) {
            if (along.col(i).dot(theory.means.col(i)) < 0.0) basis.col(i) = -basis.col(i);
        }
        acc.add(spec, basis, per, test_rng);
    }
    return acc.finish();
}

}  // namespace mtlspca
