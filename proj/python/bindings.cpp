#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mtlspca/classify.hpp"
#include "mtlspca/config.hpp"
#include "mtlspca/datamodel.hpp"
#include "mtlspca/errors.hpp"
#include "mtlspca/estimator.hpp"
#include "mtlspca/harness.hpp"
#include "mtlspca/theory.hpp"

namespace py = pybind11;
using namespace mtlspca;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

py::list report_rows(const ExperimentReport& r) {
    py::list rows;
    for (const ReportRow& row : r.rows) {
        py::dict d;
        d["sweep_value"] = row.sweep_value;
        d["method"] = row.method;
        d["theory_error"] = row.theory_error;
        d["empirical_error"] = row.empirical_error;
        d["stderr"] = row.std_error;
        d["seconds"] = row.seconds;
        rows.append(d);
    }
    return rows;
}

py::dict report_dict(const ExperimentReport& r) {
    py::dict d;
    d["experiment"] = r.experiment;
    d["sweep"] = r.sweep_variable;
    py::dict meta;
    for (const auto& [k, v] : r.metadata) meta[py::str(k)] = v;
    d["metadata"] = meta;
    d["rows"] = report_rows(r);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-task supervised PCA classifiers and their large-dimensional theory";

    auto base = py::register_exception<Error>(m, "Error");
    auto input = py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", input.ptr());
    py::register_exception<EstimationError>(m, "EstimationError", input.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<NotPsdError>(m, "NotPsdError", numerical.ptr());
    py::register_exception<SingularError>(m, "SingularError", numerical.ptr());
    py::register_exception<DegenerateDirectionError>(m, "DegenerateDirectionError", numerical.ptr());

    py::class_<TaskLayout>(m, "TaskLayout")
        .def(py::init<int, int, int, std::vector<int>>(), py::arg("dimension"), py::arg("tasks"),
             py::arg("classes"), py::arg("counts"))
        .def_property_readonly("dimension", &TaskLayout::dimension)
        .def_property_readonly("tasks", &TaskLayout::tasks)
        .def_property_readonly("classes", &TaskLayout::classes)
        .def_property_readonly("groups", &TaskLayout::groups)
        .def_property_readonly("total", &TaskLayout::total)
        .def_property_readonly("counts", &TaskLayout::counts)
        .def("group", &TaskLayout::group, py::arg("task"), py::arg("cls"))
        .def("offset", &TaskLayout::offset, py::arg("group"))
        .def(py::self == py::self)
        .def("__repr__", [](const TaskLayout& l) {
            return "TaskLayout(p=" + std::to_string(l.dimension()) + ", k=" + std::to_string(l.tasks()) +
                   ", m=" + std::to_string(l.classes()) + ", n=" + std::to_string(l.total()) + ")";
        });

    py::class_<TaskDataset>(m, "TaskDataset")
        .def(py::init<TaskLayout, MatrixXd>(), py::arg("layout"), py::arg("samples"))
        .def_property_readonly("layout", &TaskDataset::layout)
        .def_property_readonly("samples", &TaskDataset::samples)
        .def("task_subset", &TaskDataset::task_subset, py::arg("task"))
        .def("leading_tasks", &TaskDataset::leading_tasks, py::arg("tasks"))
        .def("group_block", [](const TaskDataset& x, int g) { return MatrixXd(x.group_block(g)); }, py::arg("group"))
        .def("task_block", [](const TaskDataset& x, int t) { return MatrixXd(x.task_block(t)); }, py::arg("task"));

    py::class_<MixtureSpec>(m, "MixtureSpec")
        .def(py::init([](TaskLayout layout, MatrixXd means) {
                 MixtureSpec s{std::move(layout), std::move(means)};
                 s.validate();
                 return s;
             }),
             py::arg("layout"), py::arg("means"))
        .def_readonly("layout", &MixtureSpec::layout)
        .def_readonly("means", &MixtureSpec::means);

    m.def("load_mixture_config", [](const std::filesystem::path& path) {
        return synthetic_config_from(KeyValueConfig::load(path)).mixture();
    }, py::arg("path"));
    m.def("binary_transfer_mixture", &binary_transfer_mixture, py::arg("dimension"), py::arg("per_class"),
          py::arg("betas"));
    m.def("multiclass_transfer_mixture", &multiclass_transfer_mixture, py::arg("dimension"), py::arg("classes"),
          py::arg("per_class"), py::arg("betas"));
    m.def("synth_gaussian", &synth_gaussian, py::arg("spec"), py::arg("seed"));
    m.def("synth_task_samples", &synth_task_samples, py::arg("spec"), py::arg("task"), py::arg("per_class"),
          py::arg("seed"));
    m.def("load_csv", &load_csv, py::arg("path"));
    m.def("save_csv", &save_csv, py::arg("dataset"), py::arg("path"));
    m.def("zscore_per_task", [](const TaskDataset& x) { return zscore_per_task(x).data; }, py::arg("dataset"));
    m.def("one_vs_all_view", &one_vs_all_view, py::arg("dataset"), py::arg("cls"));

    py::class_<SufficientStats>(m, "SufficientStats")
        .def_readonly("tasks", &SufficientStats::tasks)
        .def_readonly("classes", &SufficientStats::classes)
        .def_readonly("proportions", &SufficientStats::proportions)
        .def_readonly("c0", &SufficientStats::c0)
        .def_readonly("gram", &SufficientStats::gram)
        .def_readonly("calM", &SufficientStats::calM)
        .def_readonly("clipped_mass", &SufficientStats::clipped_mass);
    m.def("estimate_gram", [](const TaskDataset& x) { return estimate_gram(x); }, py::arg("dataset"));
    m.def("build_stats", [](const TaskDataset& x) { return build_stats(x); }, py::arg("dataset"));
    m.def("population_stats", &population_stats, py::arg("spec"));

    py::class_<SpectralSummary>(m, "SpectralSummary")
        .def_readonly("spikes", &SpectralSummary::spikes)
        .def_readonly("visible", &SpectralSummary::visible)
        .def_readonly("isolated", &SpectralSummary::isolated)
        .def_readonly("threshold", &SpectralSummary::threshold)
        .def_readonly("bulk_left", &SpectralSummary::bulk_left)
        .def_readonly("bulk_right", &SpectralSummary::bulk_right);
    py::class_<ScoreLaw>(m, "ScoreLaw")
        .def_readonly("means", &ScoreLaw::means)
        .def_readonly("separation", &ScoreLaw::separation)
        .def_readonly("degenerate_spectrum", &ScoreLaw::degenerate_spectrum)
        .def("pairwise_error", &ScoreLaw::pairwise_error, py::arg("a"), py::arg("b"))
        .def("threshold", &ScoreLaw::threshold, py::arg("task"))
        .def("binary_error", &ScoreLaw::binary_error, py::arg("task"));

    m.def("qfunc", &qfunc, py::arg("t"));
    m.def("phase_transition", &phase_transition, py::arg("calM"), py::arg("c0"));
    m.def("pca_score_law", &pca_score_law, py::arg("calM"), py::arg("c"), py::arg("c0"), py::arg("tau"),
          py::arg("classes_per_task"));
    m.def("spca_score_law", &spca_score_law, py::arg("calM"), py::arg("c"), py::arg("c0"),
          py::arg("classes_per_task"));
    m.def("mtl_score_law", &mtl_score_law, py::arg("calM"), py::arg("c"), py::arg("c0"), py::arg("ytilde"),
          py::arg("classes_per_task"));
    m.def("binary_score_means", &binary_score_means, py::arg("calM"), py::arg("c"), py::arg("c0"),
          py::arg("ytilde"));
    m.def("optimal_labels", &optimal_labels, py::arg("calM"), py::arg("c"), py::arg("task"));
    m.def("optimal_error", &optimal_error, py::arg("calM"), py::arg("c"), py::arg("c0"), py::arg("task"));
    m.def("pca_spca_gap", [](double dmu, double n_over_p) {
        const PcaSpcaGap g = pca_spca_gap(dmu, n_over_p);
        return py::make_tuple(g.absolute, g.relative);
    }, py::arg("delta_mu_sq"), py::arg("n_over_p"));

    py::class_<ScoreHead>(m, "ScoreHead")
        .def_readonly("labels", &ScoreHead::labels)
        .def_readonly("normalizer", &ScoreHead::normalizer)
        .def_readonly("mean_target", &ScoreHead::mean_target)
        .def_readonly("mean_rest", &ScoreHead::mean_rest);
    py::class_<FittedModel>(m, "FittedModel")
        .def_property_readonly("method", [](const FittedModel& f) { return std::string(method_name(f.method)); })
        .def_readonly("layout", &FittedModel::layout)
        .def_readonly("target", &FittedModel::target)
        .def_readonly("basis", &FittedModel::basis)
        .def_readonly("centroids", &FittedModel::centroids)
        .def_readonly("heads", &FittedModel::heads)
        .def_readonly("threshold", &FittedModel::threshold)
        .def_readonly("predicted_error", &FittedModel::predicted_error)
        .def_readonly("stats", &FittedModel::stats)
        .def_readonly("warnings", &FittedModel::warnings)
        .def("predict", [](const FittedModel& f, const MatrixXd& x, bool centered) {
            return predict_labels(f, x, PredictOptions{centered});
        }, py::arg("x"), py::arg("centered") = true)
        .def("scores", [](const FittedModel& f, const MatrixXd& x, bool centered) {
            const auto preds = predict_batch(f, x, PredictOptions{centered});
            MatrixXd out(preds.empty() ? 0 : preds.front().centered_scores.size(), static_cast<Eigen::Index>(preds.size()));
            for (std::size_t i = 0; i < preds.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = preds[i].centered_scores;
            return out;
        }, py::arg("x"), py::arg("centered") = true)
        .def("error_rate", [](const FittedModel& f, const TaskDataset& test, bool centered) {
            return error_rate(f, test, PredictOptions{centered});
        }, py::arg("test"), py::arg("centered") = true)
        .def("save", [](const FittedModel& f, const std::filesystem::path& p) { save_model(f, p); }, py::arg("path"));

    m.def("load_model", &load_model, py::arg("path"));
    m.def("fit_pca", [](const TaskDataset& x, int tau, int target) { return fit_pca(x, tau, target); },
          py::arg("dataset"), py::arg("tau"), py::arg("target") = 0);
    m.def("fit_spca_binary", [](const TaskDataset& x, const VectorXd& y, int target) {
        return fit_spca_binary(x, y, target);
    }, py::arg("dataset"), py::arg("ytilde"), py::arg("target"));
    m.def("fit_mtl_spca_binary", [](const TaskDataset& x, int target) { return fit_mtl_spca_binary(x, target); },
          py::arg("dataset"), py::arg("target"));
    m.def("fit_naive_spca", [](const TaskDataset& x, int target) { return fit_naive_spca(x, target); },
          py::arg("dataset"), py::arg("target"));
    m.def("fit_single_task_spca", [](const TaskDataset& x, int target) { return fit_single_task_spca(x, target); },
          py::arg("dataset"), py::arg("target"));
    m.def("fit_algorithm1", [](const TaskDataset& x, int target, bool zscore) {
        Algorithm1Options o;
        o.zscore = zscore;
        return fit_algorithm1(x, target, o);
    }, py::arg("dataset"), py::arg("target"), py::arg("zscore") = true);

    m.def("reproduce", [](const std::string& name, std::uint64_t seed, int seeds) {
        if (name == "fig1") {
            Fig1Config c;
            c.seed = seed;
            if (seeds > 0) c.seeds = seeds;
            return report_dict(run_fig1(c));
        }
        if (name == "fig2") {
            Fig2Config c;
            c.seed = seed;
            if (seeds > 0) c.seeds = seeds;
            return report_dict(run_fig2(c));
        }
        if (name == "fig3") {
            Fig3Config c;
            c.seed = seed;
            if (seeds > 0) c.seeds = seeds;
            return report_dict(run_fig3_synth(c));
        }
        if (name == "fig4") {
            Fig4Config c;
            c.seed = seed;
            if (seeds > 0) c.seeds = seeds;
            return report_dict(run_fig4_synth(c));
        }
        if (name == "runtime") {
            RuntimeConfig c;
            c.seed = seed;
            return report_dict(run_runtime_bench(c));
        }
        throw InputError("unknown experiment '" + name + "'");
    }, py::arg("name"), py::arg("seed"), py::arg("seeds") = 0);

    m.def("monte_carlo_oracle", [](const MixtureSpec& spec, const VectorXd& y, int trainings, int draws,
                                   std::uint64_t seed) {
        const EmpiricalScoreLaw law = monte_carlo_oracle(spec, y, OracleConfig{trainings, draws, seed});
        return py::make_tuple(law.mean, law.variance, law.mean_stderr);
    }, py::arg("spec"), py::arg("ytilde"), py::arg("trainings") = 200, py::arg("draws") = 10000,
          py::arg("seed") = 0);
}
