#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "mtlspca/classify.hpp"
#include "mtlspca/errors.hpp"
#include "mtlspca/estimator.hpp"
#include "mtlspca/harness.hpp"
#include "mtlspca/random.hpp"
#include "mtlspca/theory.hpp"

namespace mtlspca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Sample {
    std::vector<double> values;
    double seconds = 0.0;

    double mean() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
    double std_error() const {
        if (values.size() < 2) return 0.0;
        const double mu = mean();
        double ss = 0.0;
        for (double v : values) ss += (v - mu) * (v - mu);
        return std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
    }
};

ReportRow make_row(double sweep, const std::string& method, double theory, const Sample& s) {
    return ReportRow{sweep, method, theory, s.mean(), s.std_error(), s.seconds};
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    return out.str();
}

void add_common_metadata(ExperimentReport& r, std::uint64_t seed, int seeds, const std::string& layout,
                         const std::string& config_text) {
    r.metadata.emplace_back("seed", std::to_string(seed));
    r.metadata.emplace_back("seeds", std::to_string(seeds));
    r.metadata.emplace_back("layout", layout);
    std::ostringstream hash;
    hash << std::hex << fnv1a(config_text);
    r.metadata.emplace_back("config_hash", hash.str());
}

template <class T>
void require_increasing(const std::vector<T>& grid, const char* what) {
    if (grid.empty()) throw InputError(std::string(what) + ": empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw InputError(std::string(what) + ": grid must be strictly increasing");
}

void require_positive(int value, const char* what) {
    if (value < 1) throw InputError(std::string(what) + " must be positive");
}

double spca_theory_error(const MixtureSpec& spec, const VectorXd& labels, int target) {
    const SufficientStats pop = population_stats(spec);
    const VectorXd means = binary_score_means(pop.calM, pop.proportions, pop.c0, labels);
    return qfunc(0.5 * std::abs(means(2 * target) - means(2 * target + 1)));
}

VectorXd naive_labels(int tasks) {
    VectorXd y(2 * tasks);
    for (int g = 0; g < 2 * tasks; ++g) y(g) = g % 2 == 0 ? 1.0 : -1.0;
    return y;
}

MixtureSpec single_task(const MixtureSpec& spec, int task) {
    const int m = spec.layout.classes();
    std::vector<int> counts(spec.layout.counts().begin() + task * m,
                            spec.layout.counts().begin() + (task + 1) * m);
    return MixtureSpec{TaskLayout(spec.layout.dimension(), 1, m, counts), spec.means.middleCols(task * m, m)};
}

}  // namespace

MixtureSpec binary_transfer_mixture(int dimension, const std::vector<int>& per_class,
                                    const std::vector<double>& betas) {
    if (dimension < 2) throw InputError("binary_transfer_mixture: dimension must be at least 2");
    if (per_class.size() != betas.size() || per_class.empty()) {
        throw InputError("binary_transfer_mixture: one count and one beta per task");
    }
    SyntheticConfig cfg;
    cfg.dimension = dimension;
    cfg.tasks = static_cast<int>(betas.size());
    cfg.classes = 2;
    for (int n : per_class) {
        cfg.counts.push_back(n);
        cfg.counts.push_back(n);
    }
    cfg.base = MatrixXd::Zero(dimension, 2);
    cfg.base(0, 0) = -1.0;
    cfg.base(0, 1) = 1.0;
    cfg.perp = MatrixXd::Zero(dimension, 2);
    cfg.perp(dimension - 1, 0) = -1.0;
    cfg.perp(dimension - 1, 1) = 1.0;
    cfg.betas = betas;
    return cfg.mixture();
}

MixtureSpec multiclass_transfer_mixture(int dimension, int classes, const std::vector<int>& per_class,
                                        const std::vector<double>& betas) {
    if (classes < 2 || 2 * classes + 1 > dimension) {
        throw InputError("multiclass_transfer_mixture: need 2 <= classes and 2 * classes < dimension");
    }
    if (per_class.size() != betas.size() || per_class.empty()) {
        throw InputError("multiclass_transfer_mixture: one count and one beta per task");
    }
    SyntheticConfig cfg;
    cfg.dimension = dimension;
    cfg.tasks = static_cast<int>(betas.size());
    cfg.classes = classes;
    for (int n : per_class)
        for (int j = 0; j < classes; ++j) cfg.counts.push_back(n);
    cfg.base = MatrixXd::Zero(dimension, classes);
    cfg.perp = MatrixXd::Zero(dimension, classes);
    for (int j = 1; j <= classes; ++j) {
        cfg.base(j - 1, j - 1) = 2.0;
        cfg.perp(dimension - j - 1, j - 1) = 2.0;
    }
    cfg.betas = betas;
    return cfg.mixture();
}

ExperimentReport run_fig1(const Fig1Config& config) {
    require_increasing(config.dimensions, "fig1 dimensions");
    require_positive(config.seeds, "seeds");
    if (config.test_samples < 4) throw InputError("fig1: need at least 4 test samples");

    ExperimentReport report;
    report.experiment = "fig1";
    report.sweep_variable = "p";
    std::ostringstream cfg;
    cfg << "fig1 p=" << join(config.dimensions) << " per_class=" << config.per_class
        << " test=" << config.test_samples << " seeds=" << config.seeds;
    add_common_metadata(report, config.seed, config.seeds,
                        "1 task, 2 classes, " + std::to_string(config.per_class) + " per class, mean -+e1",
                        cfg.str());

    const VectorXd labels{{1.0, -1.0}};
    for (std::size_t i = 0; i < config.dimensions.size(); ++i) {
        const int p = config.dimensions[i];
        const MixtureSpec spec = binary_transfer_mixture(p, {config.per_class}, {1.0});
        const SufficientStats pop = population_stats(spec);
        const double pca_theory = pca_score_law(pop.calM, pop.proportions, pop.c0, 1, 2).binary_error(0);
        const double spca_theory = spca_theory_error(spec, labels, 0);

        Sample pca;
        Sample spca;
        const std::uint64_t point_seed = derive_seed(config.seed, i);
        for (int s = 0; s < config.seeds; ++s) {
            const std::uint64_t seed = derive_seed(point_seed, static_cast<std::uint64_t>(s));
            const TaskDataset train = synth_gaussian(spec, seed);
            const TaskDataset test = synth_task_samples(spec, 0, config.test_samples / 2, seed);

            auto start = Clock::now();
            pca.values.push_back(error_rate(fit_pca(train, 1), test));
            pca.seconds += seconds_since(start);
            start = Clock::now();
            spca.values.push_back(error_rate(fit_spca_binary(train, labels, 0), test));
            spca.seconds += seconds_since(start);
        }
        report.rows.push_back(make_row(p, "pca", pca_theory, pca));
        report.rows.push_back(make_row(p, "spca", spca_theory, spca));
    }
    return report;
}

ExperimentReport run_fig2(const Fig2Config& config) {
    require_increasing(config.betas, "fig2 betas");
    require_positive(config.seeds, "seeds");
    if (config.betas.front() < 0.0 || config.betas.back() > 1.0) throw InputError("fig2: betas must lie in [0, 1]");
    if (config.test_samples < 4) throw InputError("fig2: need at least 4 test samples");

    ExperimentReport report;
    report.experiment = "fig2";
    report.sweep_variable = "beta";
    std::ostringstream cfg;
    cfg << "fig2 p=" << config.dimension << " source=" << config.source_per_class
        << " target=" << config.target_per_class << " betas=" << join(config.betas)
        << " test=" << config.test_samples << " seeds=" << config.seeds;
    add_common_metadata(report, config.seed, config.seeds,
                        "2 tasks, 2 classes, " + std::to_string(config.source_per_class) + "/" +
                            std::to_string(config.target_per_class) + " per class, target task 2",
                        cfg.str());

    const int target = 1;
    for (std::size_t i = 0; i < config.betas.size(); ++i) {
        const double beta = config.betas[i];
        const MixtureSpec spec = binary_transfer_mixture(
            config.dimension, {config.source_per_class, config.target_per_class}, {1.0, beta});
        const SufficientStats pop = population_stats(spec);
        const double st_theory = spca_theory_error(single_task(spec, target), VectorXd{{1.0, -1.0}}, 0);
        const double naive_theory = spca_theory_error(spec, naive_labels(2), target);
        const double mtl_theory = optimal_error(pop.calM, pop.proportions, pop.c0, target);

        Sample st;
        Sample naive;
        Sample mtl;
        const std::uint64_t point_seed = derive_seed(config.seed, i);
        for (int s = 0; s < config.seeds; ++s) {
            const std::uint64_t seed = derive_seed(point_seed, static_cast<std::uint64_t>(s));
            const TaskDataset train = synth_gaussian(spec, seed);
            const TaskDataset test = synth_task_samples(spec, target, config.test_samples / 2, seed);

            auto start = Clock::now();
            st.values.push_back(error_rate(fit_single_task_spca(train, target), test));
            st.seconds += seconds_since(start);
            start = Clock::now();
            naive.values.push_back(error_rate(fit_naive_spca(train, target), test));
            naive.seconds += seconds_since(start);
            start = Clock::now();
            mtl.values.push_back(error_rate(fit_mtl_spca_binary(train, target), test));
            mtl.seconds += seconds_since(start);
        }
        report.rows.push_back(make_row(beta, "st-spca", st_theory, st));
        report.rows.push_back(make_row(beta, "n-spca", naive_theory, naive));
        report.rows.push_back(make_row(beta, "mtl-spca", mtl_theory, mtl));
    }
    return report;
}

ExperimentReport run_fig3_synth(const Fig3Config& config) {
    require_increasing(config.task_counts, "fig3 task counts");
    require_positive(config.seeds, "seeds");
    if (config.task_counts.front() < 1) throw InputError("fig3: task counts must be positive");
    if (config.test_samples < 4) throw InputError("fig3: need at least 4 test samples");

    ExperimentReport report;
    report.experiment = "fig3";
    report.sweep_variable = "tasks";
    std::ostringstream cfg;
    cfg << "fig3 p=" << config.dimension << " target=" << config.target_per_class
        << " source=" << config.source_per_class << " tasks=" << join(config.task_counts)
        << " test=" << config.test_samples << " seeds=" << config.seeds;
    add_common_metadata(report, config.seed, config.seeds,
                        "k tasks, 2 classes, " + std::to_string(config.target_per_class) +
                            " per class in task 1, " + std::to_string(config.source_per_class) +
                            " per class elsewhere, beta uniform on [0, 1]",
                        cfg.str());
    report.metadata.emplace_back("theory", "only st-spca has a seed-independent theory value");

    const int max_tasks = config.task_counts.back();
    std::vector<int> per_class(static_cast<std::size_t>(max_tasks), config.source_per_class);
    per_class.front() = config.target_per_class;

    const double st_theory = spca_theory_error(
        binary_transfer_mixture(config.dimension, {config.target_per_class}, {1.0}), VectorXd{{1.0, -1.0}}, 0);

    std::vector<Sample> st(config.task_counts.size());
    std::vector<Sample> naive(config.task_counts.size());
    std::vector<Sample> mtl(config.task_counts.size());
    for (int s = 0; s < config.seeds; ++s) {
        const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(s));
        Rng beta_rng(derive_seed(seed, 0xbe7aULL));
        std::vector<double> betas(static_cast<std::size_t>(max_tasks));
        for (double& b : betas) b = beta_rng.uniform();
        const MixtureSpec spec = binary_transfer_mixture(config.dimension, per_class, betas);
        const TaskDataset full = synth_gaussian(spec, seed);
        const TaskDataset test = synth_task_samples(spec, 0, config.test_samples / 2, seed);

        for (std::size_t i = 0; i < config.task_counts.size(); ++i) {
            const TaskDataset train = full.leading_tasks(config.task_counts[i]);
            auto start = Clock::now();
            st[i].values.push_back(error_rate(fit_single_task_spca(train, 0), test));
            st[i].seconds += seconds_since(start);
            start = Clock::now();
            naive[i].values.push_back(error_rate(fit_naive_spca(train, 0), test));
            naive[i].seconds += seconds_since(start);
            start = Clock::now();
            mtl[i].values.push_back(error_rate(fit_mtl_spca_binary(train, 0), test));
            mtl[i].seconds += seconds_since(start);
        }
    }
    for (std::size_t i = 0; i < config.task_counts.size(); ++i) {
        const double k = config.task_counts[i];
        report.rows.push_back(make_row(k, "st-spca", st_theory, st[i]));
        report.rows.push_back(make_row(k, "n-spca", kNaN, naive[i]));
        report.rows.push_back(make_row(k, "mtl-spca", kNaN, mtl[i]));
    }
    return report;
}

ExperimentReport run_fig4_synth(const Fig4Config& config) {
    require_positive(config.seeds, "seeds");
    require_positive(config.test_per_class, "test_per_class");
    const MixtureSpec spec =
        multiclass_transfer_mixture(config.dimension, config.classes, config.per_class, config.betas);
    spec.layout.check_task(config.target);

    ExperimentReport report;
    report.experiment = "fig4";
    report.sweep_variable = "target_task";
    std::ostringstream cfg;
    cfg << "fig4 p=" << config.dimension << " classes=" << config.classes << " per_class=" << join(config.per_class)
        << " betas=" << join(config.betas) << " target=" << config.target << " test=" << config.test_per_class
        << " seeds=" << config.seeds;
    add_common_metadata(report, config.seed, config.seeds,
                        std::to_string(config.per_class.size()) + " tasks, " + std::to_string(config.classes) +
                            " classes, per class " + join(config.per_class),
                        cfg.str());

    Sample centered;
    Sample uncentered;
    Sample single;
    for (int s = 0; s < config.seeds; ++s) {
        const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(s));
        const TaskDataset train = synth_gaussian(spec, seed);
        const TaskDataset test = synth_task_samples(spec, config.target, config.test_per_class, seed);

        auto start = Clock::now();
        const FittedModel model = fit_algorithm1(train, config.target);
        centered.values.push_back(error_rate(model, test));
        centered.seconds += seconds_since(start);
        start = Clock::now();
        uncentered.values.push_back(error_rate(model, test, PredictOptions{false}));
        uncentered.seconds += seconds_since(start);
        start = Clock::now();
        single.values.push_back(error_rate(fit_algorithm1(train.task_subset(config.target), 0), test));
        single.seconds += seconds_since(start);
    }
    const double sweep = config.target + 1;
    report.rows.push_back(make_row(sweep, "mtl-spca", kNaN, centered));
    report.rows.push_back(make_row(sweep, "mtl-spca-uncentered", kNaN, uncentered));
    report.rows.push_back(make_row(sweep, "st-spca", kNaN, single));
    return report;
}

ExperimentReport run_runtime_bench(const RuntimeConfig& config) {
    require_increasing(config.dimensions, "runtime dimensions");
    require_positive(config.repeats, "repeats");
    for (int p : config.dimensions)
        if (p < 4 || p % 2 != 0) throw InputError("runtime: dimensions must be even and at least 4");

    ExperimentReport report;
    report.experiment = "runtime";
    report.sweep_variable = "p";
    std::ostringstream cfg;
    cfg << "runtime p=" << join(config.dimensions) << " repeats=" << config.repeats;
    add_common_metadata(report, config.seed, 1, "2 tasks, 2 classes, n = 2p, p/2 per class, beta 0.5",
                        cfg.str());
    report.metadata.emplace_back("timing", "best of repeats; fit plus prediction of n test points");

    const int target = 1;
    for (std::size_t i = 0; i < config.dimensions.size(); ++i) {
        const int p = config.dimensions[i];
        const MixtureSpec spec = binary_transfer_mixture(p, {p / 2, p / 2}, {1.0, 0.5});
        const SufficientStats pop = population_stats(spec);
        const std::uint64_t seed = derive_seed(config.seed, i);
        const TaskDataset train = synth_gaussian(spec, seed);
        const TaskDataset test = synth_task_samples(spec, target, p, seed);

        double best = std::numeric_limits<double>::infinity();
        double err = 0.0;
        for (int r = 0; r < config.repeats; ++r) {
            const auto start = Clock::now();
            const FittedModel model = fit_mtl_spca_binary(train, target);
            const std::vector<int> labels = predict_labels(model, test.samples());
            best = std::min(best, seconds_since(start));
            long wrong = 0;
            for (int j = 0; j < 2; ++j)
                for (int c = 0; c < p; ++c)
                    if (labels[static_cast<std::size_t>(j * p + c)] != j) ++wrong;
            err = static_cast<double>(wrong) / (2.0 * p);
        }
        report.rows.push_back(ReportRow{static_cast<double>(p), "mtl-spca",
                                        optimal_error(pop.calM, pop.proportions, pop.c0, target), err, 0.0,
                                        best});
    }
    const auto curve = report.curve("mtl-spca");
    if (std::count_if(curve.begin(), curve.end(), [](const ReportRow& r) { return r.sweep_value >= 256; }) >= 2) {
        report.metadata.emplace_back("exponent_p_ge_256", format_double(scaling_exponent(report, "mtl-spca", 256)));
    }
    return report;
}

double scaling_exponent(const ExperimentReport& report, const std::string& method, double min_value) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const ReportRow& r : report.curve(method)) {
        if (r.sweep_value < min_value) continue;
        if (!(r.sweep_value > 0.0) || !(r.seconds > 0.0)) throw InputError("scaling_exponent: non-positive value");
        xs.push_back(std::log(r.sweep_value));
        ys.push_back(std::log(r.seconds));
    }
    if (xs.size() < 2) throw InputError("scaling_exponent: need at least two points");
    const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
    const VectorXd x = Eigen::Map<const VectorXd>(xs.data(), n);
    const VectorXd y = Eigen::Map<const VectorXd>(ys.data(), n);
    const VectorXd xc = x.array() - x.mean();
    return xc.dot(y.array().matrix() - VectorXd::Constant(n, y.mean())) / xc.squaredNorm();
}

}  // namespace mtlspca
