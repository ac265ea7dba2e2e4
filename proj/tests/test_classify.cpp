#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mtlspca/classify.hpp"
#include "mtlspca/errors.hpp"
#include "mtlspca/harness.hpp"
#include "mtlspca/random.hpp"
#include "mtlspca/theory.hpp"

using namespace mtlspca;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Three tasks, three classes, means 4/sqrt(2) e_j so every pair is 4 apart.
MixtureSpec separated_three_class(int p, int per_class) {
    const int groups = 9;
    MatrixXd means = MatrixXd::Zero(p, groups);
    for (int t = 0; t < 3; ++t)
        for (int j = 0; j < 3; ++j) means(j, 3 * t + j) = 4.0 / std::sqrt(2.0);
    return MixtureSpec{TaskLayout(p, 3, 3, std::vector<int>(groups, per_class)), means};
}

}  // namespace

TEST_CASE("method names round-trip") {
    for (Method m : {Method::pca, Method::spca, Method::mtl_spca, Method::multiclass})
        CHECK(parse_method(method_name(m)) == m);
    CHECK_THROWS_AS(parse_method("svm"), InputError);
}

TEST_CASE("PCA on data along one axis") {
    MatrixXd s = MatrixXd::Zero(4, 6);
    s.row(0) << -3, -2, -1, 1, 2, 3;
    const FittedModel m = fit_pca(TaskDataset(TaskLayout(4, 1, 2, {3, 3}), s), 1);
    CHECK(std::abs(m.basis(0, 0)) == doctest::Approx(1.0));
    CHECK((m.basis.transpose() * m.basis - MatrixXd::Identity(1, 1)).norm() < 1e-10);
    CHECK(m.centroids.rows() == 2);
    CHECK_THROWS_AS(fit_pca(TaskDataset(TaskLayout(4, 1, 2, {3, 3}), MatrixXd::Zero(4, 6)), 1), InputError);
}

TEST_CASE("PCA and SPCA on the p = 100 benchmark") {
    const MixtureSpec spec = binary_transfer_mixture(100, {500}, {1.0});
    std::vector<double> pca, spca, extra;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TaskDataset train = synth_gaussian(spec, seed);
        const TaskDataset test = synth_task_samples(spec, 0, 500, seed + 100);
        pca.push_back(error_rate(fit_pca(train, 1), test));
        spca.push_back(error_rate(fit_single_task_spca(train, 0), test));
        const FittedModel wide = fit_pca(train, 3);
        extra.push_back(std::abs(wide.centroids(0, 2) - wide.centroids(1, 2)));
        extra.push_back(std::abs(wide.centroids(0, 1) - wide.centroids(1, 1)));
    }
    CHECK(std::abs(mean(pca) - 0.18286) < 0.02);
    CHECK(std::abs(mean(spca) - 0.17018) < 0.02);
    for (double e : extra) CHECK(e < 0.1);
}

TEST_CASE("SPCA on noiseless points separates perfectly") {
    MatrixXd s(3, 4);
    const VectorXd mu{{1.0, 2.0, -1.0}};
    s << mu, mu, -mu, -mu;
    const TaskDataset x(TaskLayout(3, 1, 2, {2, 2}), s);
    const FittedModel m = fit_spca_binary(x, VectorXd{{1.0, -1.0}}, 0);
    CHECK(predict(m, mu).raw_scores(0) == doctest::Approx(mu.norm()));
    CHECK(predict(m, -mu).raw_scores(0) == doctest::Approx(-mu.norm()));
    CHECK(predict(m, mu).label == 0);
    CHECK(predict(m, -mu).label == 1);
    CHECK_THROWS_AS(fit_spca_binary(x, VectorXd{{1.0, 1.0}}, 0), DegenerateDirectionError);
    CHECK_THROWS_AS(fit_spca_binary(x, VectorXd{{1.0, 1.0, 1.0}}, 0), InputError);
}

TEST_CASE("label scaling and negation") {
    const MixtureSpec spec = binary_transfer_mixture(40, {60, 20}, {1.0, 0.6});
    const TaskDataset train = synth_gaussian(spec, 4);
    const TaskDataset test = synth_task_samples(spec, 1, 200, 5);
    const VectorXd y{{0.4, -1.0, 0.8, -0.5}};
    const FittedModel a = fit_spca_binary(train, y, 1);
    const FittedModel b = fit_spca_binary(train, 3.0 * y, 1);
    const FittedModel c = fit_spca_binary(train, -y, 1);
    const auto la = predict_labels(a, test.samples());
    CHECK(la == predict_labels(b, test.samples()));
    CHECK(la == predict_labels(c, test.samples()));
    const auto pa = predict_batch(a, test.samples());
    const auto pc = predict_batch(c, test.samples());
    for (std::size_t i = 0; i < pa.size(); ++i)
        CHECK(pa[i].raw_scores(0) == doctest::Approx(-pc[i].raw_scores(0)).epsilon(1e-12));
}

TEST_CASE("a point on the threshold goes to the first class") {
    MatrixXd s(2, 4);
    s << 1, 1, -1, -1, 0.5, -0.5, 0.5, -0.5;
    const FittedModel m = fit_spca_binary(TaskDataset(TaskLayout(2, 1, 2, {2, 2}), s), VectorXd{{1.0, -1.0}}, 0);
    const VectorXd on = m.basis.col(0) * m.threshold;
    CHECK(predict(m, on).centered_scores(0) == doctest::Approx(0.0));
    CHECK(predict(m, on).label == 0);
}

TEST_CASE("batch prediction equals single predictions") {
    const MixtureSpec spec = binary_transfer_mixture(30, {40, 40}, {1.0, 0.2});
    const TaskDataset train = synth_gaussian(spec, 8);
    const TaskDataset test = synth_task_samples(spec, 0, 50, 9);
    const FittedModel m = fit_mtl_spca_binary(train, 0);
    const auto batch = predict_batch(m, test.samples());
    for (Eigen::Index i = 0; i < test.samples().cols(); ++i) {
        const Prediction one = predict(m, test.samples().col(i));
        CHECK(one.label == batch[static_cast<std::size_t>(i)].label);
        CHECK(one.raw_scores == batch[static_cast<std::size_t>(i)].raw_scores);
    }
    CHECK_THROWS_AS(predict(m, VectorXd::Zero(29)), InputError);
}

TEST_CASE("MTL-SPCA on the transfer benchmark") {
    for (double beta : {0.0, 1.0}) {
        const MixtureSpec spec = binary_transfer_mixture(100, {1000, 50}, {1.0, beta});
        std::vector<double> mtl, naive;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const TaskDataset train = synth_gaussian(spec, seed);
            const TaskDataset test = synth_task_samples(spec, 1, 500, seed + 50);
            mtl.push_back(error_rate(fit_mtl_spca_binary(train, 1), test));
            naive.push_back(error_rate(fit_naive_spca(train, 1), test));
        }
        const double want = beta == 1.0 ? 0.16428 : 0.23975;
        CHECK(std::abs(mean(mtl) - want) < 0.02);
        if (beta == 0.0) CHECK(mean(naive) > mean(mtl) + 0.15);
    }
}

TEST_CASE("orthogonal source task changes nothing") {
    MatrixXd means = MatrixXd::Zero(80, 4);
    means(0, 0) = -1.0;
    means(0, 1) = 1.0;
    means(1, 2) = -1.0;
    means(1, 3) = 1.0;
    const MixtureSpec spec{TaskLayout(80, 2, 2, {200, 200, 200, 200}), means};
    std::vector<double> diff;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TaskDataset train = synth_gaussian(spec, seed);
        const TaskDataset test = synth_task_samples(spec, 0, 1000, seed + 9);
        diff.push_back(error_rate(fit_mtl_spca_binary(train, 0), test) -
                       error_rate(fit_single_task_spca(train, 0), test));
    }
    CHECK(std::abs(mean(diff)) < 0.02);
}

TEST_CASE("held-out binary scores have unit variance") {
    const MixtureSpec spec = binary_transfer_mixture(100, {1000, 50}, {1.0, 0.5});
    const FittedModel m = fit_mtl_spca_binary(synth_gaussian(spec, 3), 1);
    const TaskDataset test = synth_task_samples(spec, 1, 4000, 4);
    for (int j = 0; j < 2; ++j) {
        const VectorXd s = (m.basis.transpose() * test.group_block(j)).transpose();
        const double var = (s.array() - s.mean()).square().sum() / (s.size() - 1.0);
        CHECK(var > 0.85);
        CHECK(var < 1.15);
    }
}

TEST_CASE("binary models predict with the stored threshold") {
    const MixtureSpec spec = binary_transfer_mixture(50, {100, 40}, {1.0, 0.8});
    const FittedModel m = fit_mtl_spca_binary(synth_gaussian(spec, 2), 1);
    const ScoreHead& h = m.heads.front();
    CHECK(m.threshold == doctest::Approx(0.5 * (h.mean_target + h.mean_rest)));
    CHECK(h.normalizer > 0.0);
    CHECK(m.predicted_error >= 0.0);
    CHECK(m.predicted_error <= 0.5);
    CHECK(m.basis.col(0).norm() == doctest::Approx(1.0));
}

TEST_CASE("one-vs-all multiclass fit with two classes agrees with the binary model") {
    const MixtureSpec spec = binary_transfer_mixture(60, {200, 60}, {1.0, 0.7});
    const TaskDataset train = synth_gaussian(spec, 6);
    const TaskDataset test = synth_task_samples(spec, 1, 500, 7);
    Algorithm1Options opts;
    opts.zscore = false;
    const auto a = predict_labels(fit_algorithm1(train, 1, opts), test.samples());
    const auto b = predict_labels(fit_mtl_spca_binary(train, 1), test.samples());
    int same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
    CHECK(same >= 0.98 * static_cast<double>(a.size()));
}

TEST_CASE("one-vs-all multiclass fit on well separated classes") {
    const MixtureSpec spec = separated_three_class(50, 100);
    const TaskDataset train = synth_gaussian(spec, 11);
    const TaskDataset test = synth_task_samples(spec, 2, 1000, 12);
    const FittedModel m = fit_algorithm1(train, 2);
    CHECK(m.heads.size() == 3);
    for (const ScoreHead& h : m.heads) CHECK(h.normalizer > 0.0);
    CHECK(m.input_map.has_value());

    // Nearest true centroid, the best any rule can do here.
    long bayes_wrong = 0;
    for (int j = 0; j < 3; ++j) {
        const auto block = test.group_block(j);
        for (Eigen::Index i = 0; i < block.cols(); ++i) {
            int best = 0;
            for (int c = 1; c < 3; ++c)
                if ((block.col(i) - spec.means.col(6 + c)).squaredNorm() <
                    (block.col(i) - spec.means.col(6 + best)).squaredNorm())
                    best = c;
            bayes_wrong += best != j;
        }
    }
    const double bayes = static_cast<double>(bayes_wrong) / 3000.0;
    Algorithm1Options raw;
    raw.zscore = false;
    const double plain = error_rate(fit_algorithm1(train, 2, raw), test);
    CHECK(plain < bayes + 0.01);
    CHECK(error_rate(m, test) < bayes + 0.03);
}

TEST_CASE("centered target-class scores have mean near zero") {
    const MixtureSpec spec = binary_transfer_mixture(100, {1000, 50}, {1.0, 0.5});
    // Averaged over training draws: a single fit's plug-in constant carries
    // the estimation noise of 50 samples per class.
    const int trainings = 40;
    double centered[2] = {0.0, 0.0};
    for (int r = 0; r < trainings; ++r) {
        const std::uint64_t seed = derive_seed(13, static_cast<std::uint64_t>(r));
        const FittedModel m = fit_algorithm1(synth_gaussian(spec, seed), 1);
        const TaskDataset test = synth_task_samples(spec, 1, 500, seed);
        for (int l = 0; l < 2; ++l) {
            const auto preds = predict_batch(m, test.group_block(l));
            double s = 0.0;
            for (const Prediction& p : preds) s += p.centered_scores(l);
            centered[l] += s / static_cast<double>(preds.size()) / trainings;
        }
    }
    CHECK(std::abs(centered[0]) < 0.05);
    CHECK(std::abs(centered[1]) < 0.05);
}

TEST_CASE("one-vs-all multiclass fit without signal is at chance") {
    const MixtureSpec spec{TaskLayout(30, 2, 3, std::vector<int>(6, 100)), MatrixXd::Zero(30, 6)};
    const TaskDataset train = synth_gaussian(spec, 21);
    const TaskDataset test = synth_task_samples(spec, 0, 1000, 22);
    try {
        const double acc = 1.0 - error_rate(fit_algorithm1(train, 0), test);
        CHECK(std::abs(acc - 1.0 / 3.0) < 0.06);
    } catch (const DegenerateDirectionError&) {
        CHECK(true);
    }
}

TEST_CASE("model files round-trip exactly") {
    const MixtureSpec spec = separated_three_class(20, 30);
    const TaskDataset train = synth_gaussian(spec, 31);
    const TaskDataset test = synth_task_samples(spec, 1, 20, 32);
    const std::vector<FittedModel> models{fit_algorithm1(train, 1), fit_pca(train, 2, 1)};
    for (const FittedModel& m : models) {
        std::stringstream buf;
        write_model(m, buf);
        const FittedModel back = read_model(buf, "mem");
        CHECK(back.method == m.method);
        CHECK(back.layout == m.layout);
        CHECK(back.basis == m.basis);
        CHECK(back.centroids == m.centroids);
        CHECK(back.heads.size() == m.heads.size());
        CHECK(back.warnings == m.warnings);
        const auto p1 = predict_batch(m, test.samples());
        const auto p2 = predict_batch(back, test.samples());
        for (std::size_t i = 0; i < p1.size(); ++i) {
            CHECK(p1[i].label == p2[i].label);
            CHECK(p1[i].centered_scores == p2[i].centered_scores);
        }
    }
    std::stringstream bad("mtlspca-model 1\nmethod svm\n");
    CHECK_THROWS_AS(read_model(bad, "mem"), ParseError);
    std::stringstream wrong("something else\n");
    CHECK_THROWS_AS(read_model(wrong, "mem"), ParseError);
}
