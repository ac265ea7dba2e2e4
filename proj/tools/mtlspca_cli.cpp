// mtlspca command-line tool.
//
//   mtlspca synth     --config mix.cfg --seed 1 --out train.csv
//   mtlspca theory    --config mix.cfg --target 2 --out theory.csv
//   mtlspca fit       --data train.csv --method mtl-spca --target 2 --model m.txt
//   mtlspca predict   --model m.txt --data test.csv --out pred.csv
//   mtlspca reproduce fig2 --seed 1 --out fig2.csv
//   mtlspca oracle    --config mix.cfg --method mtl-spca --target 2 --seed 1 --out oracle.csv
//
// Exit status: 0 success, 1 bad input, 2 numerical failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtlspca/classify.hpp"
#include "mtlspca/config.hpp"
#include "mtlspca/datamodel.hpp"
#include "mtlspca/errors.hpp"
#include "mtlspca/estimator.hpp"
#include "mtlspca/harness.hpp"
#include "mtlspca/theory.hpp"

namespace {

using namespace mtlspca;
using Eigen::VectorXd;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    return out;
}

std::string fmt(double v) { return format_double(v); }

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
}

// 1-based id from the command line to a 0-based index.
int task_index(int one_based, const TaskLayout& layout) {
    layout.check_task(one_based - 1);
    return one_based - 1;
}

VectorXd alternating_labels(int tasks) {
    VectorXd y(2 * tasks);
    for (int g = 0; g < 2 * tasks; ++g) y(g) = g % 2 == 0 ? 1.0 : -1.0;
    return y;
}

SyntheticConfig load_synthetic(const std::string& path) {
    return synthetic_config_from(KeyValueConfig::load(path));
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
};

void run_synth(const SynthArgs& a) {
    const MixtureSpec spec = load_synthetic(a.config).mixture();
    const TaskDataset x = synth_gaussian(spec, a.seed);
    save_csv(x, a.out);
    std::cout << "wrote " << x.layout().total() << " samples (p = " << x.layout().dimension()
              << ", " << x.layout().tasks() << " tasks, " << x.layout().classes() << " classes) to "
              << a.out << '\n';
}

// --- theory ----------------------------------------------------------------

struct TheoryArgs {
    std::string config;
    std::string data;
    std::string out;
    int target = 1;
    int tau = 1;
};

void run_theory(const TheoryArgs& a) {
    SufficientStats stats;
    TaskLayout layout;
    if (!a.config.empty()) {
        const MixtureSpec spec = load_synthetic(a.config).mixture();
        stats = population_stats(spec);
        layout = spec.layout;
    } else {
        const TaskDataset x = load_csv(a.data);
        stats = build_stats(x);
        layout = x.layout();
    }
    const int t = task_index(a.target, layout);
    const int m = layout.classes();
    const VectorXd& c = stats.proportions;

    const SpectralSummary spec = phase_transition(stats.calM, stats.c0);
    std::cout << "c0 = " << fmt(stats.c0) << ", phase transition at " << fmt(spec.threshold)
              << ", bulk edge " << fmt(spec.bulk_right) << '\n';
    for (Eigen::Index i = 0; i < spec.spikes.size(); ++i) {
        std::cout << "  spike " << i + 1 << ": " << fmt(spec.spikes(i))
                  << (spec.visible[static_cast<std::size_t>(i)] ? " (visible)" : " (hidden)") << '\n';
    }

    std::ofstream out = open_out(a.out);
    out << "task,method,theory_error\n";
    const ScoreLaw pca = pca_score_law(stats.calM, c, stats.c0, a.tau, m);
    auto emit = [&](const std::string& method, double err) {
        out << a.target << ',' << method << ',' << fmt(err) << '\n';
        std::cout << std::left << std::setw(10) << method << fmt(err) << '\n';
    };
    if (m == 2) {
        emit("pca", pca.binary_error(t));
        const VectorXd own = [&] {
            VectorXd y = VectorXd::Zero(layout.groups());
            y(2 * t) = 1.0;
            y(2 * t + 1) = -1.0;
            return y;
        }();
        const VectorXd st = binary_score_means(stats.calM, c, stats.c0, own);
        emit("st-spca", qfunc(0.5 * std::abs(st(2 * t) - st(2 * t + 1))));
        const VectorXd naive = binary_score_means(stats.calM, c, stats.c0, alternating_labels(layout.tasks()));
        emit("n-spca", qfunc(0.5 * std::abs(naive(2 * t) - naive(2 * t + 1))));
        emit("mtl-spca", optimal_error(stats.calM, c, stats.c0, t));
    } else {
        const ScoreLaw spca = spca_score_law(stats.calM, c, stats.c0, m);
        for (int j = 0; j < m; ++j) {
            for (int l = j + 1; l < m; ++l) {
                const int a1 = layout.group(t, j);
                const int a2 = layout.group(t, l);
                const std::string pair = std::to_string(j + 1) + "v" + std::to_string(l + 1);
                emit("pca-" + pair, pca.pairwise_error(a1, a2));
                emit("spca-" + pair, spca.pairwise_error(a1, a2));
            }
        }
    }
    if (pca.degenerate_spectrum) std::cerr << "warning: calM has repeated eigenvalues\n";
    if (stats.clipped()) std::cerr << "warning: estimated calM was clipped to PSD\n";
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
    std::string data;
    std::string method = "mtl-spca";
    std::string model;
    std::string out;
    int target = 1;
    int tau = 1;
    bool no_zscore = false;
    bool randomized_split = false;
    std::optional<std::uint64_t> seed;
};

void run_fit(const FitArgs& a) {
    const TaskDataset x = load_csv(a.data);
    const int t = task_index(a.target, x.layout());
    GramOptions gram;
    if (a.randomized_split) {
        if (!a.seed) throw InputError("--randomized-split needs --seed");
        gram.split = HalfSplit::randomized;
        gram.seed = *a.seed;
    }

    FittedModel model;
    if (a.method == "pca") {
        model = fit_pca(x, a.tau, t, gram);
    } else if (a.method == "spca" || a.method == "n-spca") {
        model = fit_naive_spca(x, t, gram);
    } else if (a.method == "st-spca") {
        model = fit_single_task_spca(x, t, gram);
    } else if (a.method == "mtl-spca") {
        model = fit_mtl_spca_binary(x, t, gram);
    } else if (a.method == "multiclass") {
        model = fit_algorithm1(x, t, Algorithm1Options{!a.no_zscore, gram});
    } else {
        throw InputError("unknown method '" + a.method + "'");
    }
    save_model(model, a.model);
    print_warnings(model.warnings);

    std::cout << "fitted " << method_name(model.method) << " on " << x.layout().total() << " samples, target task "
              << a.target << '\n';
    if (!std::isnan(model.predicted_error)) std::cout << "predicted error " << fmt(model.predicted_error) << '\n';
    std::cout << "model written to " << a.model << '\n';

    if (!a.out.empty()) {
        std::ofstream out = open_out(a.out);
        out << "head,normalizer,mean_target,mean_rest,labels\n";
        for (std::size_t h = 0; h < model.heads.size(); ++h) {
            const ScoreHead& sh = model.heads[h];
            out << h + 1 << ',' << fmt(sh.normalizer) << ',' << fmt(sh.mean_target) << ',' << fmt(sh.mean_rest) << ',';
            for (Eigen::Index i = 0; i < sh.labels.size(); ++i) out << (i ? " " : "") << fmt(sh.labels(i));
            out << '\n';
        }
    }
}

// --- predict ---------------------------------------------------------------

struct PredictArgs {
    std::string model;
    std::string data;
    std::string out;
    bool uncentered = false;
};

void run_predict(const PredictArgs& a) {
    const FittedModel model = load_model(a.model);
    const TaskDataset x = load_csv(a.data);
    if (x.layout().classes() != model.classes()) throw InputError("test data has a different number of classes");
    const PredictOptions options{!a.uncentered};

    std::ofstream out = open_out(a.out);
    out << "task,class,predicted";
    const auto first = predict(model, x.samples().col(0), options);
    for (Eigen::Index i = 0; i < first.raw_scores.size(); ++i) out << ",score" << i + 1;
    out << '\n';

    long wrong = 0;
    const TaskLayout& layout = x.layout();
    for (int g = 0; g < layout.groups(); ++g) {
        const int task = g / layout.classes();
        const int cls = g % layout.classes();
        const auto block = x.group_block(g);
        for (Eigen::Index i = 0; i < block.cols(); ++i) {
            const Prediction p = predict(model, block.col(i), options);
            if (p.label != cls) ++wrong;
            out << task + 1 << ',' << cls + 1 << ',' << p.label + 1;
            for (Eigen::Index s = 0; s < p.raw_scores.size(); ++s) out << ',' << fmt(p.raw_scores(s));
            out << '\n';
        }
    }
    std::cout << "predicted " << layout.total() << " samples, error rate "
              << fmt(static_cast<double>(wrong) / layout.total()) << '\n';
}

// --- reproduce -------------------------------------------------------------

struct ReproduceArgs {
    std::string figure;
    std::string out;
    std::uint64_t seed = 0;
    int seeds = 10;
    int repeats = 5;
};

void print_report(const ExperimentReport& r) {
    std::cout << std::left << std::setw(12) << r.sweep_variable << std::setw(22) << "method" << std::setw(14)
              << "theory" << std::setw(14) << "empirical" << std::setw(12) << "stderr"
              << "seconds\n";
    for (const ReportRow& row : r.rows) {
        std::cout << std::setw(12) << fmt(row.sweep_value) << std::setw(22) << row.method << std::setw(14)
                  << std::setprecision(5) << row.theory_error << std::setw(14) << row.empirical_error
                  << std::setw(12) << row.std_error << row.seconds << '\n';
    }
    for (const auto& [k, v] : r.metadata) std::cout << k << ": " << v << '\n';
}

void run_reproduce(const ReproduceArgs& a) {
    ExperimentReport report;
    if (a.figure == "fig1") {
        Fig1Config c;
        c.seed = a.seed;
        c.seeds = a.seeds;
        report = run_fig1(c);
    } else if (a.figure == "fig2") {
        Fig2Config c;
        c.seed = a.seed;
        c.seeds = a.seeds;
        report = run_fig2(c);
    } else if (a.figure == "fig3") {
        Fig3Config c;
        c.seed = a.seed;
        c.seeds = a.seeds;
        report = run_fig3_synth(c);
    } else if (a.figure == "fig4") {
        Fig4Config c;
        c.seed = a.seed;
        c.seeds = a.seeds;
        report = run_fig4_synth(c);
    } else if (a.figure == "runtime") {
        RuntimeConfig c;
        c.seed = a.seed;
        c.repeats = a.repeats;
        report = run_runtime_bench(c);
    } else {
        throw InputError("unknown figure '" + a.figure + "'");
    }
    save_report(report, a.out);
    print_report(report);
    std::cout << "report written to " << a.out << '\n';
}

// --- oracle ----------------------------------------------------------------

struct OracleArgs {
    std::string config;
    std::string method = "mtl-spca";
    std::string out;
    std::uint64_t seed = 0;
    int target = 1;
    int tau = 1;
    int trainings = 200;
    int draws = 10000;
};

void run_oracle(const OracleArgs& a) {
    const MixtureSpec spec = load_synthetic(a.config).mixture();
    const SufficientStats pop = population_stats(spec);
    const TaskLayout& layout = spec.layout;
    const OracleConfig oc{a.trainings, a.draws, a.seed};

    Eigen::MatrixXd theory;
    EmpiricalScoreLaw empirical;
    if (a.method == "pca") {
        theory = pca_score_law(pop.calM, pop.proportions, pop.c0, a.tau, layout.classes()).means;
        empirical = monte_carlo_pca_oracle(spec, a.tau, oc);
    } else {
        if (layout.classes() != 2) throw InputError("oracle: label methods need a binary layout");
        const int t = task_index(a.target, layout);
        VectorXd labels;
        if (a.method == "mtl-spca") {
            labels = optimal_labels(pop.calM, pop.proportions, t);
        } else if (a.method == "n-spca" || a.method == "spca") {
            labels = alternating_labels(layout.tasks());
        } else {
            throw InputError("unknown method '" + a.method + "'");
        }
        theory = binary_score_means(pop.calM, pop.proportions, pop.c0, labels);
        empirical = monte_carlo_oracle(spec, labels, oc);
    }

    std::ofstream out = open_out(a.out);
    out << "task,class,component,theory_mean,empirical_mean,mean_stderr,empirical_variance\n";
    std::cout << "draws per group: " << empirical.draws << '\n';
    for (int g = 0; g < layout.groups(); ++g) {
        for (Eigen::Index i = 0; i < theory.cols(); ++i) {
            out << g / layout.classes() + 1 << ',' << g % layout.classes() + 1 << ',' << i + 1 << ','
                << fmt(theory(g, i)) << ',' << fmt(empirical.mean(g, i)) << ',' << fmt(empirical.mean_stderr(g, i))
                << ',' << fmt(empirical.variance(g, i)) << '\n';
            std::cout << "group (" << g / layout.classes() + 1 << ',' << g % layout.classes() + 1 << ") component "
                      << i + 1 << ": theory " << fmt(theory(g, i)) << ", empirical " << fmt(empirical.mean(g, i))
                      << " +- " << fmt(empirical.mean_stderr(g, i)) << ", variance "
                      << fmt(empirical.variance(g, i)) << '\n';
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-task supervised PCA: theory, fitting and experiment reproduction"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Draw a synthetic Gaussian mixture dataset");
    s->add_option("--config", synth.config, "Mixture config (dimension, tasks, classes, counts, betas, mean.<j>, perp.<j>)")
        ->required()
        ->check(CLI::ExistingFile);
    s->add_option("--seed", synth.seed, "Random seed")->required();
    s->add_option("--out", synth.out, "Output CSV")->required();

    TheoryArgs theory;
    auto* th = app.add_subcommand("theory", "Asymptotic error predictions from population or estimated statistics");
    auto* th_cfg = th->add_option("--config", theory.config, "Mixture config")->check(CLI::ExistingFile);
    auto* th_data = th->add_option("--data", theory.data, "Dataset CSV (statistics are estimated)")
                        ->check(CLI::ExistingFile);
    th_cfg->excludes(th_data);
    th->add_option("--target", theory.target, "Target task (1-based)");
    th->add_option("--tau", theory.tau, "PCA components")->check(CLI::PositiveNumber);
    th->add_option("--out", theory.out, "Output CSV")->required();

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit a classifier on a dataset CSV");
    f->add_option("--data", fit.data, "Training CSV")->required()->check(CLI::ExistingFile);
    f->add_option("--method", fit.method, "pca | spca | n-spca | st-spca | mtl-spca | multiclass")
        ->check(CLI::IsMember({"pca", "spca", "n-spca", "st-spca", "mtl-spca", "multiclass"}));
    f->add_option("--target", fit.target, "Target task (1-based)");
    f->add_option("--tau", fit.tau, "PCA components")->check(CLI::PositiveNumber);
    f->add_flag("--no-zscore", fit.no_zscore, "Multiclass: skip per-task standardisation");
    f->add_flag("--randomized-split", fit.randomized_split, "Seeded random halves for the diagonal Gram estimate");
    f->add_option("--seed", fit.seed, "Seed for --randomized-split");
    f->add_option("--model", fit.model, "Output model file")->required();
    f->add_option("--out", fit.out, "Optional CSV with the fitted heads");

    PredictArgs pred;
    auto* p = app.add_subcommand("predict", "Classify a dataset CSV with a fitted model");
    p->add_option("--model", pred.model, "Model file")->required()->check(CLI::ExistingFile);
    p->add_option("--data", pred.data, "Test CSV")->required()->check(CLI::ExistingFile);
    p->add_option("--out", pred.out, "Output CSV")->required();
    p->add_flag("--uncentered", pred.uncentered, "Multiclass: argmax of raw scores");

    ReproduceArgs rep;
    auto* r = app.add_subcommand("reproduce", "Run a synthetic experiment and write its report");
    r->add_option("figure", rep.figure, "fig1 | fig2 | fig3 | fig4 | runtime")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "runtime"}));
    r->add_option("--seed", rep.seed, "Master seed")->required();
    r->add_option("--seeds", rep.seeds, "Training seeds per grid point")->check(CLI::PositiveNumber);
    r->add_option("--repeats", rep.repeats, "Runtime: timing repeats per size")->check(CLI::PositiveNumber);
    r->add_option("--out", rep.out, "Output CSV")->required();

    OracleArgs orc;
    auto* o = app.add_subcommand("oracle", "Monte-Carlo check of the projected score means");
    o->add_option("--config", orc.config, "Mixture config")->required()->check(CLI::ExistingFile);
    o->add_option("--method", orc.method, "pca | n-spca | mtl-spca")
        ->check(CLI::IsMember({"pca", "spca", "n-spca", "mtl-spca"}));
    o->add_option("--target", orc.target, "Target task (1-based)");
    o->add_option("--tau", orc.tau, "PCA components")->check(CLI::PositiveNumber);
    o->add_option("--trainings", orc.trainings, "Training sets")->check(CLI::PositiveNumber);
    o->add_option("--draws", orc.draws, "Test draws per group")->check(CLI::Range(1000, 100000000));
    o->add_option("--seed", orc.seed, "Random seed")->required();
    o->add_option("--out", orc.out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*s) run_synth(synth);
        if (*th) {
            if (theory.config.empty() && theory.data.empty()) throw InputError("theory needs --config or --data");
            run_theory(theory);
        }
        if (*f) run_fit(fit);
        if (*p) run_predict(pred);
        if (*r) run_reproduce(rep);
        if (*o) run_oracle(orc);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
