// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mtlspca/classify.hpp"
#include "mtlspca/estimator.hpp"
#include "mtlspca/harness.hpp"
#include "mtlspca/random.hpp"
#include "mtlspca/smalldense.hpp"
#include "mtlspca/theory.hpp"

using namespace mtlspca;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v, int digits = 5) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

SufficientStats fig1_stats(int p) { return population_stats(binary_transfer_mixture(p, {500}, {1.0})); }

double separation(const SufficientStats& s, const VectorXd& labels, int task) {
    const VectorXd m = binary_score_means(s.calM, s.proportions, s.c0, labels);
    return std::pow(m(2 * task) - m(2 * task + 1), 2);
}

// Every empirical value within `tol` of the theory column of the same row.
void check_empirical(Outcome& o, const ExperimentReport& r, const std::string& method, double tol) {
    double worst = 0.0;
    double at = 0.0;
    for (const ReportRow& row : r.curve(method)) {
        const double d = std::abs(row.empirical_error - row.theory_error);
        if (!(d <= worst)) {
            worst = d;
            at = row.sweep_value;
        }
    }
    o.detail << " " << method << " max|emp-th|=" << num(worst, 4) << " at " << num(at, 3);
    o.require(worst <= tol, method + " empirical off theory");
}

Outcome criterion1() {
    Outcome o;
    const auto start = Clock::now();
    std::vector<double> pca, spca;
    for (int p = 100; p <= 1000; p += 100) {
        const SufficientStats s = fig1_stats(p);
        pca.push_back(pca_score_law(s.calM, s.proportions, s.c0, 1, 2).binary_error(0));
        spca.push_back(spca_score_law(s.calM, s.proportions, s.c0, 2).binary_error(0));
    }
    const double t = seconds_since(start);
    o.detail << " pca(100)=" << num(pca.front()) << " pca(1000)=" << num(pca.back()) << " spca(100)="
             << num(spca.front()) << " spca(1000)=" << num(spca.back()) << " time=" << num(t, 3) << "s";
    o.require(std::abs(pca.front() - 0.18286) <= 5e-4, "pca p=100");
    o.require(std::abs(pca.back() - 0.5) <= 5e-4, "pca p=1000");
    o.require(std::abs(spca.front() - 0.17018) <= 5e-4, "spca p=100");
    o.require(std::abs(spca.back() - 0.23975) <= 5e-4, "spca p=1000");
    o.require(t < 1.0, "runtime");
    return o;
}

Outcome criterion2() {
    Outcome o;
    Fig1Config cfg;
    cfg.seed = 1;
    const auto start = Clock::now();
    const ExperimentReport r = run_fig1(cfg);
    const double t = seconds_since(start);
    check_empirical(o, r, "pca", 0.02);
    check_empirical(o, r, "spca", 0.02);
    o.detail << " time=" << num(t, 1) << "s";
    o.require(t < 60.0, "runtime");
    return o;
}

Outcome criterion3() {
    Outcome o;
    Fig2Config cfg;
    cfg.seed = 1;
    const auto start = Clock::now();
    const ExperimentReport r = run_fig2(cfg);
    const double t = seconds_since(start);
    const double mtl0 = r.at("mtl-spca", 0.0).theory_error;
    const double mtl1 = r.at("mtl-spca", 1.0).theory_error;
    const double naive0 = r.at("n-spca", 0.0).theory_error;
    o.detail << " mtl(0)=" << num(mtl0) << " mtl(1)=" << num(mtl1) << " n-spca(0)=" << num(naive0);
    o.require(std::abs(mtl0 - 0.23975) <= 5e-4, "mtl beta=0");
    o.require(std::abs(mtl1 - 0.16428) <= 5e-4, "mtl beta=1");
    o.require(std::abs(naive0 - 0.48059) <= 5e-4, "n-spca beta=0");
    o.require(naive0 - mtl0 >= 0.24, "negative transfer margin");
    for (const char* m : {"st-spca", "n-spca", "mtl-spca"}) check_empirical(o, r, m, 0.02);
    o.detail << " time=" << num(t, 1) << "s";
    o.require(t < 120.0, "runtime");
    return o;
}

Outcome criterion4() {
    Outcome o;
    Rng rng(20240);
    double worst_gap = -1e300;
    double worst_consistency = 0.0;
    for (int instance = 0; instance < 100; ++instance) {
        const int k = 1 + instance % 4;
        const int d = 2 * k;
        MatrixXd b(d, d + 1);
        rng.fill_normal(b);
        const MatrixXd m = (1.0 + 4.0 * rng.uniform()) * b * b.transpose() / d;
        VectorXd c(d);
        for (int i = 0; i < d; ++i) c(i) = 0.05 + rng.uniform();
        c /= c.sum();
        const double c0 = 0.05 + 2.0 * rng.uniform();
        const int task = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(k));
        const SufficientStats s{k, 2, c, c0, MatrixXd(), m, 0.0};

        const VectorXd star = optimal_labels(m, c, task);
        const double best = separation(s, star, task);
        for (int trial = 0; trial < 1000; ++trial) {
            VectorXd y(d);
            for (int i = 0; i < d; ++i) y(i) = rng.normal();
            worst_gap = std::max(worst_gap, separation(s, y.normalized(), task) - best);
        }
        const double at_star = qfunc(0.5 * std::sqrt(best));
        worst_consistency = std::max(worst_consistency, std::abs(at_star - optimal_error(m, c, c0, task)));
    }
    o.detail << " max(random - optimal separation)=" << worst_gap
             << " max|optimal_error - error(y*)|=" << worst_consistency;
    o.require(worst_gap <= 1e-9, "random label beat the optimum");
    o.require(worst_consistency <= 1e-12, "optimal_error inconsistent");
    return o;
}

Outcome criterion5() {
    Outcome o;
    Rng rng(55);
    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        const int k = 2 + instance % 3;
        MatrixXd m = MatrixXd::Zero(2 * k, 2 * k);
        for (int t = 0; t < k; ++t) {
            MatrixXd b(2, 2);
            rng.fill_normal(b);
            m.block(2 * t, 2 * t, 2, 2) = b * b.transpose();
        }
        VectorXd c(2 * k);
        for (int i = 0; i < 2 * k; ++i) c(i) = 0.1 + rng.uniform();
        c /= c.sum();
        const int target = instance % k;
        const VectorXd star = optimal_labels(m, c, target);
        for (int g = 0; g < 2 * k; ++g)
            if (g / 2 != target) worst = std::max(worst, std::abs(star(g)));
    }
    o.detail << " max non-target |y*|=" << worst;
    o.require(worst <= 1e-12, "non-target entries");
    return o;
}

Outcome criterion6() {
    Outcome o;
    OracleConfig cfg;
    cfg.trainings = 200;
    cfg.draws = 10000;
    double worst_mean = 0.0;
    double min_var = 1e300;
    double max_var = 0.0;
    auto absorb = [&](const EmpiricalScoreLaw& emp, const MatrixXd& theory) {
        worst_mean = std::max(worst_mean, (emp.mean - theory).cwiseAbs().maxCoeff());
        min_var = std::min(min_var, emp.variance.minCoeff());
        max_var = std::max(max_var, emp.variance.maxCoeff());
    };
    // Single-task benchmark: SPCA labels and PCA, below and above the transition.
    for (int p : {100, 500}) {
        const MixtureSpec spec = binary_transfer_mixture(p, {500}, {1.0});
        const SufficientStats s = population_stats(spec);
        cfg.seed = static_cast<std::uint64_t>(p);
        const VectorXd y{{1.0, -1.0}};
        absorb(monte_carlo_oracle(spec, y, cfg), binary_score_means(s.calM, s.proportions, s.c0, y));
        absorb(monte_carlo_pca_oracle(spec, 1, cfg), pca_score_law(s.calM, s.proportions, s.c0, 1, 2).means);
    }
    // Two-task transfer benchmark: naive and optimal labels.
    for (double beta : {0.0, 0.5, 1.0}) {
        const MixtureSpec spec = binary_transfer_mixture(100, {1000, 50}, {1.0, beta});
        const SufficientStats s = population_stats(spec);
        cfg.seed = static_cast<std::uint64_t>(1000 + 10 * beta);
        const VectorXd naive{{1.0, -1.0, 1.0, -1.0}};
        const VectorXd star = optimal_labels(s.calM, s.proportions, 1);
        for (const VectorXd& y : {naive, star})
            absorb(monte_carlo_oracle(spec, y, cfg), binary_score_means(s.calM, s.proportions, s.c0, y));
    }
    o.detail << " max|mean-theory|=" << num(worst_mean, 4) << " variance in [" << num(min_var, 3) << ", "
             << num(max_var, 3) << "]";
    o.require(worst_mean <= 0.02, "means");
    o.require(min_var >= 0.9 && max_var <= 1.1, "variances");
    return o;
}

double top_eigenvalue(const MatrixXd& x) {
    const MatrixXd g = x * x.transpose() / static_cast<double>(x.rows());
    return sym_eig(g).values(0);
}

Outcome criterion7() {
    Outcome o;
    const int p = 400;
    const int per_class = 2000;  // c0 = 0.1
    // ||mu||^2 = 1 gives spike l = 10; ||mu||^2 = 0.1 gives l = 1 < 1/sqrt(c0).
    for (double beta_norm : {1.0, std::sqrt(0.1)}) {
        MatrixXd means = MatrixXd::Zero(p, 2);
        means(0, 0) = -beta_norm;
        means(0, 1) = beta_norm;
        const MixtureSpec spec{TaskLayout(p, 1, 2, {per_class, per_class}), means};
        const SufficientStats s = population_stats(spec);
        const SpectralSummary summary = phase_transition(s.calM, s.c0);
        double observed = 0.0;
        const int seeds = 3;
        for (int seed = 0; seed < seeds; ++seed)
            observed += top_eigenvalue(synth_gaussian(spec, static_cast<std::uint64_t>(seed)).samples()) / seeds;
        const double want = summary.visible[0] ? summary.isolated(0) : summary.bulk_right;
        o.detail << " l=" << num(summary.spikes(0), 2) << (summary.visible[0] ? " (visible)" : " (hidden)")
                 << " predicted=" << num(want, 3) << " observed=" << num(observed, 3);
        o.require(std::abs(observed - want) <= 0.05 * want, "top eigenvalue");
        if (beta_norm == 1.0) o.require(std::abs(summary.isolated(0) - 22.0) < 1e-9, "lambda bar = 22");
    }
    return o;
}

double gram_rms(int per_class, int seeds) {
    const MixtureSpec spec = binary_transfer_mixture(200, {per_class, per_class}, {1.0, 0.5});
    const MatrixXd truth = population_stats(spec).gram;
    double sq = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const MatrixXd g = estimate_gram(synth_gaussian(spec, static_cast<std::uint64_t>(7000 + s)));
        sq += (g - truth).squaredNorm() / static_cast<double>(truth.size());
    }
    return std::sqrt(sq / seeds);
}

Outcome criterion8() {
    Outcome o;
    const double base = gram_rms(1000, 20);    // n = 4000
    const double big = gram_rms(4000, 20);     // n = 16000
    const double ratio = base / big;
    o.detail << " rms(n=4000)=" << num(base, 4) << " rms(n=16000)=" << num(big, 4) << " ratio=" << num(ratio, 3);
    o.require(base < 0.1, "rms at n=4000");
    o.require(ratio >= 2.0 / 1.5 && ratio <= 2.0 * 1.5, "halving when n quadruples");
    return o;
}

Outcome criterion9() {
    Outcome o;
    {
        const int p = 100;
        MatrixXd means = MatrixXd::Zero(p, 9);
        for (int t = 0; t < 3; ++t)
            for (int j = 0; j < 3; ++j) means(j, 3 * t + j) = 4.0 / std::sqrt(2.0);
        const MixtureSpec spec{TaskLayout(p, 3, 3, std::vector<int>(9, 100)), means};
        double acc = 0.0;
        double acc_raw = 0.0;
        double bayes = 0.0;
        const int seeds = 5;
        Algorithm1Options raw;
        raw.zscore = false;
        for (int s = 0; s < seeds; ++s) {
            const std::uint64_t seed = derive_seed(901, static_cast<std::uint64_t>(s));
            const TaskDataset train = synth_gaussian(spec, seed);
            const TaskDataset test = synth_task_samples(spec, 2, 500, seed);
            acc += (1.0 - error_rate(fit_algorithm1(train, 2), test)) / seeds;
            acc_raw += (1.0 - error_rate(fit_algorithm1(train, 2, raw), test)) / seeds;
            long right = 0;
            for (int j = 0; j < 3; ++j) {
                const auto block = test.group_block(j);
                for (Eigen::Index i = 0; i < block.cols(); ++i) {
                    int best = 0;
                    for (int c = 1; c < 3; ++c)
                        if ((block.col(i) - means.col(6 + c)).squaredNorm() <
                            (block.col(i) - means.col(6 + best)).squaredNorm())
                            best = c;
                    right += best == j;
                }
            }
            bayes += static_cast<double>(right) / 1500.0 / seeds;
        }
        o.detail << " accuracy(separated)=" << num(acc, 4) << " (without z-score " << num(acc_raw, 4)
                 << ", nearest true centroid " << num(bayes, 4) << ")";
        o.require(acc > 0.95, "accuracy");
    }
    {
        // Unbalanced: class sizes 4:2:1 and mean norms 3, 2, 1.5.
        const int p = 100;
        MatrixXd means = MatrixXd::Zero(p, 6);
        const double norms[3] = {3.0, 2.0, 1.5};
        for (int t = 0; t < 2; ++t)
            for (int j = 0; j < 3; ++j) means(j, 3 * t + j) = norms[j];
        const MixtureSpec spec{TaskLayout(p, 2, 3, {300, 150, 75, 120, 60, 30}), means};
        double centered = 0.0;
        double uncentered = 0.0;
        int wins = 0;
        const int seeds = 10;
        for (int s = 0; s < seeds; ++s) {
            const std::uint64_t seed = derive_seed(77, static_cast<std::uint64_t>(s));
            const FittedModel m = fit_algorithm1(synth_gaussian(spec, seed), 1);
            const TaskDataset test = synth_task_samples(spec, 1, 1000, seed);
            const double c = error_rate(m, test);
            const double u = error_rate(m, test, PredictOptions{false});
            centered += c / seeds;
            uncentered += u / seeds;
            wins += c < u;
        }
        o.detail << " unbalanced error centered=" << num(centered, 4) << " uncentered=" << num(uncentered, 4)
                 << " (centered better on " << wins << "/" << seeds << " seeds)";
        o.require(centered < uncentered, "centered beats uncentered");
    }
    {
        Fig4Config cfg;
        cfg.seed = 1;
        const ExperimentReport r = run_fig4_synth(cfg);
        o.detail << " fig4 synthetic: centered=" << num(r.at("mtl-spca", cfg.target + 1).empirical_error, 4)
                 << " uncentered=" << num(r.at("mtl-spca-uncentered", cfg.target + 1).empirical_error, 4)
                 << " st=" << num(r.at("st-spca", cfg.target + 1).empirical_error, 4);
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    Fig3Config cfg;
    cfg.seed = 1;
    const auto start = Clock::now();
    const ExperimentReport r = run_fig3_synth(cfg);
    const double t = seconds_since(start);
    const auto mtl = r.curve("mtl-spca");
    const auto st = r.curve("st-spca");
    const auto naive = r.curve("n-spca");
    bool monotone = true;
    for (std::size_t i = 1; i < mtl.size(); ++i) {
        const double slack = 2.0 * std::hypot(mtl[i].std_error, mtl[i - 1].std_error);
        if (mtl[i].empirical_error > mtl[i - 1].empirical_error + slack) monotone = false;
    }
    double st_lo = 1.0;
    double st_hi = 0.0;
    double st_se = 0.0;
    for (const ReportRow& row : st) {
        st_lo = std::min(st_lo, row.empirical_error);
        st_hi = std::max(st_hi, row.empirical_error);
        st_se = std::max(st_se, row.std_error);
    }
    o.detail << " mtl:";
    for (const ReportRow& row : mtl) o.detail << " " << static_cast<int>(row.sweep_value) << "=" << num(row.empirical_error, 4);
    o.detail << " n-spca:";
    for (const ReportRow& row : naive)
        o.detail << " " << static_cast<int>(row.sweep_value) << "=" << num(row.empirical_error, 4);
    o.detail << " st range=[" << num(st_lo, 4) << ", " << num(st_hi, 4) << "] time=" << num(t, 1) << "s";
    o.require(monotone, "mtl non-increasing within 2 SE");
    o.require(std::abs(mtl.back().empirical_error - 0.165) <= 0.02, "mtl at 256 tasks near 0.165");
    o.require(st_hi - st_lo <= 2.0 * st_se, "st-spca flat");
    o.require(naive.front().empirical_error > mtl.front().empirical_error &&
                  naive[1].empirical_error > mtl[1].empirical_error,
              "n-spca worse at 2 and 4 tasks");
    return o;
}

Outcome criterion11() {
    Outcome o;
    RuntimeConfig cfg;
    cfg.dimensions = {256, 512, 1024, 2048};
    cfg.seed = 1;
    const ExperimentReport r = run_runtime_bench(cfg);
    const double slope = scaling_exponent(r, "mtl-spca", 256);
    const double t2048 = r.at("mtl-spca", 2048).seconds;
    o.detail << " times:";
    for (const ReportRow& row : r.rows) o.detail << " " << static_cast<int>(row.sweep_value) << "=" << num(row.seconds, 4) << "s";
    o.detail << " exponent=" << num(slope, 3);
    o.require(slope >= 1.6 && slope <= 2.4, "scaling exponent");
    o.require(t2048 < 60.0, "p=2048 runtime");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 fig1 theory", criterion1},
        {"2 fig1 empirical", criterion2},
        {"3 fig2 transfer", criterion3},
        {"4 label optimality", criterion4},
        {"5 orthogonal-task nulling", criterion5},
        {"6 monte-carlo score laws", criterion6},
        {"7 phase transition", criterion7},
        {"8 estimator consistency", criterion8},
        {"9 multiclass", criterion9},
        {"10 fig3 task-count trend", criterion10},
        {"11 complexity", criterion11},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %s:%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
