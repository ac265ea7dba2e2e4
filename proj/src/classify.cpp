#include "mtlspca/classify.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mtlspca/errors.hpp"
#include "mtlspca/smalldense.hpp"
#include "mtlspca/theory.hpp"

namespace mtlspca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_binary(const TaskLayout& layout, const char* what) {
    if (layout.classes() != 2) throw InputError(std::string(what) + ": binary layout (m = 2) required");
}

struct Direction {
    VectorXd unit;
    double norm = 0.0;
};

Direction matched_filter(const TaskDataset& x, const VectorXd& ytilde, const std::string& what) {
    const VectorXd y = expand_labels(x.layout(), ytilde).col(0);
    Direction d;
    d.unit = x.samples() * y;
    d.norm = d.unit.norm();
    if (!(d.norm > 0.0) || !std::isfinite(d.norm)) {
        throw DegenerateDirectionError(what + ": X y vanishes, no projection direction");
    }
    d.unit /= d.norm;
    return d;
}

ScoreHead make_head(const SufficientStats& stats, const VectorXd& ytilde, double normalizer,
                    int target) {
    const VectorXd means = binary_score_means(stats.calM, stats.proportions, stats.c0, ytilde);
    ScoreHead head;
    head.labels = ytilde;
    head.normalizer = normalizer;
    head.mean_target = means(2 * target);
    head.mean_rest = means(2 * target + 1);
    return head;
}

FittedModel fit_binary(const TaskDataset& x, const VectorXd& ytilde, int target, Method method,
                       const SufficientStats& stats) {
    const TaskLayout& layout = x.layout();
    require_binary(layout, "fit_spca_binary");
    layout.check_task(target);
    if (ytilde.size() != layout.groups()) {
        throw InputError("fit_spca_binary: need one label per (task, class) group");
    }
    if (!ytilde.allFinite()) throw InputError("fit_spca_binary: labels must be finite");

    const Direction dir = matched_filter(x, ytilde, "fit_spca_binary");
    FittedModel model;
    model.method = method;
    model.layout = layout;
    model.target = target;
    model.basis = dir.unit;
    model.heads.push_back(make_head(stats, ytilde, dir.norm, target));
    const ScoreHead& h = model.heads.front();
    model.threshold = 0.5 * (h.mean_target + h.mean_rest);
    model.predicted_error = qfunc(0.5 * std::abs(h.mean_target - h.mean_rest));
    if (h.mean_target == h.mean_rest) {
        model.warnings.push_back("plug-in class means coincide; every point goes to class 1");
    }
    if (stats.clipped()) {
        model.warnings.push_back("estimated calM was not PSD and has been clipped");
    }
    model.stats.push_back(stats);
    return model;
}

int argmax_first(const VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v(i) > v(best)) best = i;
    return best;
}

int argmin_first(const VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v(i) < v(best)) best = i;
    return best;
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::pca: return "pca";
        case Method::spca: return "spca";
        case Method::mtl_spca: return "mtl-spca";
        case Method::multiclass: return "multiclass";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "pca") return Method::pca;
    if (name == "spca") return Method::spca;
    if (name == "mtl-spca") return Method::mtl_spca;
    if (name == "multiclass") return Method::multiclass;
    throw InputError("unknown method '" + name + "'");
}

FittedModel fit_pca(const TaskDataset& x, int tau, int target, const GramOptions& gram) {
    const TaskLayout& layout = x.layout();
    layout.check_task(target);
    if (x.samples().squaredNorm() == 0.0) throw InputError("fit_pca: training data has zero variance");

    const SufficientStats stats = build_stats(x, gram);
    MatrixXd basis = top_subspace(x.samples(), tau);
    const ScoreLaw law = pca_score_law(stats.calM, stats.proportions, stats.c0, tau, layout.classes());

    MatrixXd projected(layout.groups(), tau);
    for (int g = 0; g < layout.groups(); ++g) {
        projected.row(g) = (basis.transpose() * x.group_block(g).rowwise().mean()).transpose();
    }
    for (int i = 0; i < tau; ++i) {
        double agreement = 0.0;
        for (int g = 0; g < layout.groups(); ++g) {
            agreement += layout.count(g) * projected(g, i) * law.means(g, i);
        }
        if (agreement < 0.0) {
            basis.col(i) = -basis.col(i);
            projected.col(i) = -projected.col(i);
        }
    }

    const int m = layout.classes();
    FittedModel model;
    model.method = Method::pca;
    model.layout = layout;
    model.target = target;
    model.basis = std::move(basis);
    model.centroids = law.means.middleRows(layout.group(target, 0), m);
    model.empirical_centroids = projected.middleRows(layout.group(target, 0), m);
    model.threshold = kNaN;
    model.predicted_error = m == 2 ? law.pairwise_error(layout.group(target, 0), layout.group(target, 1))
                                   : kNaN;
    if (law.means.isZero(0.0)) {
        model.warnings.push_back(
            "no eigenvalue of calM exceeds the phase transition; PCA decisions are at chance level");
    } else if (law.degenerate_spectrum) {
        model.centroids = model.empirical_centroids;
        model.warnings.push_back(
            "calM has repeated eigenvalues; using empirical projected class means as centroids");
    }
    if (stats.clipped()) model.warnings.push_back("estimated calM was not PSD and has been clipped");
    model.stats.push_back(stats);
    return model;
}

FittedModel fit_spca_binary(const TaskDataset& x, const VectorXd& ytilde, int target,
                            const GramOptions& gram) {
    require_binary(x.layout(), "fit_spca_binary");
    return fit_binary(x, ytilde, target, Method::spca, build_stats(x, gram));
}

FittedModel fit_mtl_spca_binary(const TaskDataset& x, int target, const GramOptions& gram) {
    require_binary(x.layout(), "fit_mtl_spca_binary");
    x.layout().check_task(target);
    const SufficientStats stats = build_stats(x, gram);
    const VectorXd labels = optimal_labels(stats.calM, stats.proportions, target);
    if (labels.isZero(0.0)) {
        throw DegenerateDirectionError("fit_mtl_spca_binary: estimated statistics carry no signal");
    }
    return fit_binary(x, labels, target, Method::mtl_spca, stats);
}

FittedModel fit_naive_spca(const TaskDataset& x, int target, const GramOptions& gram) {
    require_binary(x.layout(), "fit_naive_spca");
    VectorXd labels(x.layout().groups());
    for (int g = 0; g < labels.size(); ++g) labels(g) = g % 2 == 0 ? 1.0 : -1.0;
    return fit_binary(x, labels, target, Method::spca, build_stats(x, gram));
}

FittedModel fit_single_task_spca(const TaskDataset& x, int target, const GramOptions& gram) {
    require_binary(x.layout(), "fit_single_task_spca");
    x.layout().check_task(target);
    const TaskDataset own = x.task_subset(target);
    return fit_binary(own, VectorXd{{1.0, -1.0}}, 0, Method::spca, build_stats(own, gram));
}

FittedModel fit_algorithm1(const TaskDataset& x, int target, const Algorithm1Options& options) {
    const TaskLayout& layout = x.layout();
    if (layout.classes() < 2) throw InputError("fit_algorithm1: need at least two classes");
    layout.check_task(target);

    FittedModel model;
    model.method = Method::multiclass;
    model.layout = layout;
    model.target = target;
    model.threshold = kNaN;
    model.predicted_error = kNaN;

    TaskDataset data = x;
    if (options.zscore) {
        ZScoreResult z = zscore_per_task(x);
        if (z.warning()) {
            model.warnings.push_back(std::to_string(z.constant_features.size()) +
                                     " constant feature(s) were centred but not scaled");
        }
        model.input_map = z.maps[static_cast<std::size_t>(target)];
        data = std::move(z.data);
    }

    const int m = layout.classes();
    model.basis.resize(layout.dimension(), m);
    for (int l = 0; l < m; ++l) {
        const TaskDataset view = one_vs_all_view(data, l);
        const SufficientStats stats = build_stats(view, options.gram);
        const VectorXd labels = optimal_labels(stats.calM, stats.proportions, target);
        const std::string what = "fit_algorithm1 (class " + std::to_string(l + 1) + ")";
        if (labels.isZero(0.0)) throw DegenerateDirectionError(what + ": no signal in estimated statistics");
        const Direction dir = matched_filter(view, labels, what);
        model.basis.col(l) = dir.unit;
        model.heads.push_back(make_head(stats, labels, dir.norm, target));
        if (stats.clipped()) {
            model.warnings.push_back(what + ": estimated calM was not PSD and has been clipped");
        }
        model.stats.push_back(stats);
    }
    return model;
}

Prediction predict(const FittedModel& model, const VectorXd& x, const PredictOptions& options) {
    if (x.size() != model.dimension()) {
        throw InputError("predict: expected dimension " + std::to_string(model.dimension()) + ", got " +
                         std::to_string(x.size()));
    }
    const VectorXd z = model.input_map ? model.input_map->apply(x) : x;
    Prediction out;
    out.raw_scores = model.basis.transpose() * z;
    switch (model.method) {
        case Method::pca: {
            out.centered_scores.resize(model.centroids.rows());
            for (Eigen::Index j = 0; j < model.centroids.rows(); ++j) {
                out.centered_scores(j) = (model.centroids.row(j).transpose() - out.raw_scores).squaredNorm();
            }
            out.label = argmin_first(out.centered_scores);
            break;
        }
        case Method::spca:
        case Method::mtl_spca: {
            const ScoreHead& h = model.heads.front();
            out.centered_scores = out.raw_scores.array() - model.threshold;
            const double orient = h.mean_target >= h.mean_rest ? 1.0 : -1.0;
            out.label = out.centered_scores(0) * orient >= 0.0 ? 0 : 1;
            break;
        }
        case Method::multiclass: {
            out.centered_scores = out.raw_scores;
            for (std::size_t l = 0; l < model.heads.size(); ++l) {
                out.centered_scores(static_cast<Eigen::Index>(l)) -= model.heads[l].mean_target;
            }
            out.label = argmax_first(options.centered ? out.centered_scores : out.raw_scores);
            break;
        }
    }
    return out;
}

std::vector<Prediction> predict_batch(const FittedModel& model, const MatrixXd& x,
                                      const PredictOptions& options) {
    std::vector<Prediction> out;
    out.reserve(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index i = 0; i < x.cols(); ++i) out.push_back(predict(model, x.col(i), options));
    return out;
}

std::vector<int> predict_labels(const FittedModel& model, const MatrixXd& x,
                                const PredictOptions& options) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index i = 0; i < x.cols(); ++i) out.push_back(predict(model, x.col(i), options).label);
    return out;
}

double error_rate(const FittedModel& model, const TaskDataset& test, const PredictOptions& options) {
    const TaskLayout& layout = test.layout();
    if (layout.tasks() != 1 || layout.classes() != model.classes()) {
        throw InputError("error_rate: test set must be a single task with the model's classes");
    }
    long wrong = 0;
    for (int j = 0; j < layout.classes(); ++j) {
        const auto block = test.group_block(j);
        for (Eigen::Index i = 0; i < block.cols(); ++i) {
            if (predict(model, block.col(i), options).label != j) ++wrong;
        }
    }
    return static_cast<double>(wrong) / layout.total();
}

}  // namespace mtlspca
