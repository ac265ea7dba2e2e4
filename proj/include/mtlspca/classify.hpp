#pragma once

// Trainable classifiers: PCA, supervised PCA with given labels, naive and
// single-task SPCA baselines, binary MTL-SPCA with optimal labels, and the
// one-versus-all multi-class variant with centered scores.
//
// Binary models score a test point with the matched filter
//   g(x) = y^T X^T x / ||X y||,  y = J ytilde,
// and compare it with the midpoint of the plug-in class means of the target
// task. Multi-class models run one such head per class and take the argmax of
// the centered scores g_l(x) - m_l.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlspca/datamodel.hpp"
#include "mtlspca/estimator.hpp"

namespace mtlspca {

enum class Method {
    pca,
    spca,        // binary matched filter with caller-supplied labels
    mtl_spca,    // binary matched filter with optimal labels
    multiclass,  // one head per class, optimal labels per head
};

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct ScoreHead {
    Eigen::VectorXd labels;  // ytilde, one entry per group of the head's (binary) layout
    double normalizer = 0.0;  // ||X y||
    double mean_target = 0.0;  // plug-in mean score of the target task's first class
    double mean_rest = 0.0;    // ... and of its second (merged) class
};

struct FittedModel {
    Method method = Method::pca;
    TaskLayout layout;  // training layout
    int target = 0;     // task whose test points the model classifies
    std::optional<AffineMap> input_map;
    // p x tau orthonormal PCA basis, or one unit direction X y / ||X y|| per head.
    Eigen::MatrixXd basis;
    // PCA only: classes x tau score centroids (plug-in) and the empirical
    // projected training means, reported as a cross-check.
    Eigen::MatrixXd centroids;
    Eigen::MatrixXd empirical_centroids;
    std::vector<ScoreHead> heads;
    double threshold = 0.0;  // binary models
    double predicted_error = 0.0;  // NaN when the theory gives no single number
    std::vector<SufficientStats> stats;  // one per head (one for PCA)
    std::vector<std::string> warnings;

    int dimension() const { return layout.dimension(); }
    int classes() const { return layout.classes(); }
};

struct Prediction {
    int label = 0;
    // PCA: projections onto the basis. Binary: the single score.
    // Multi-class: one score per head.
    Eigen::VectorXd raw_scores;
    // PCA: squared distances to the centroids. Binary: score - threshold.
    // Multi-class: raw score minus the head's target-class mean.
    Eigen::VectorXd centered_scores;
};

struct PredictOptions {
    bool centered = true;  // multi-class only: argmax of raw scores when false
};

struct Algorithm1Options {
    bool zscore = true;
    GramOptions gram;
};

// tau leading eigenvectors of X X^T. Test points of task `target` are assigned
// to the nearest plug-in centroid; with no spike above the phase transition
// all centroids vanish and the decision falls back to class 0 (chance level).
FittedModel fit_pca(const TaskDataset& x, int tau, int target = 0,
                    const GramOptions& gram = {});

// Binary layouts only. `ytilde` has one entry per group.
FittedModel fit_spca_binary(const TaskDataset& x, const Eigen::VectorXd& ytilde, int target,
                            const GramOptions& gram = {});

FittedModel fit_mtl_spca_binary(const TaskDataset& x, int target, const GramOptions& gram = {});

// Labels (+1, -1) repeated for every task.
FittedModel fit_naive_spca(const TaskDataset& x, int target, const GramOptions& gram = {});

// SPCA on the target task alone with labels (+1, -1).
FittedModel fit_single_task_spca(const TaskDataset& x, int target, const GramOptions& gram = {});

FittedModel fit_algorithm1(const TaskDataset& x, int target, const Algorithm1Options& options = {});

Prediction predict(const FittedModel& model, const Eigen::VectorXd& x,
                   const PredictOptions& options = {});
std::vector<Prediction> predict_batch(const FittedModel& model, const Eigen::MatrixXd& x,
                                      const PredictOptions& options = {});
std::vector<int> predict_labels(const FittedModel& model, const Eigen::MatrixXd& x,
                                const PredictOptions& options = {});

// Fraction of columns of `test` (one-task dataset) assigned to the wrong class.
double error_rate(const FittedModel& model, const TaskDataset& test,
                  const PredictOptions& options = {});

// Text format with a versioned header; doubles are written in shortest
// round-trip form so load(save(m)) reproduces every number exactly.
void save_model(const FittedModel& model, const std::filesystem::path& path);
FittedModel load_model(const std::filesystem::path& path);
void write_model(const FittedModel& model, std::ostream& out);
FittedModel read_model(std::istream& in, const std::string& source);

}  // namespace mtlspca
