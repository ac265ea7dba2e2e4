#pragma once

// Closed-form large-dimensional predictions for PCA, supervised PCA and
// multi-task supervised PCA classifiers under an isotropic Gaussian mixture.
//
// Every formula is expressed through the sufficient statistics (calM, c, c0),
// with groups indexed task-major (group = task * m + class). Projected test
// scores are asymptotically Gaussian with identity covariance; only their
// means differ between classes.
//
// Normalisation used for the score means (checked against direct Monte-Carlo
// simulation, see tests/test_theory.cpp and the oracle in harness.hpp):
//
//   PCA, component i, visible spike l_i > 1/sqrt(c0):
//       sqrt((c0 l_i^2 - 1) / (l_i^2 (l_i + 1))) * u_i^T calM D_c^{-1/2} e_a
//   SPCA / MTL-SPCA, eigenpair (lt_i, v_i) of Y^{1/2} (D^{1/2} calM D^{1/2} + D) Y^{1/2}:
//       sqrt(c0 / lt_i) * v_i^T Y^{1/2} D^{1/2} calM D^{-1/2} e_a,   Y = yt yt^T
//   binary labels yt (a vector):
//       sqrt(c0) * yt^T D^{1/2} calM D^{-1/2} e_a / sqrt(yt^T (D^{1/2} calM D^{1/2} + D) yt)
//
// The misclassification probability between two classes at squared mean
// distance d is Q(sqrt(d) / 2), with Q the standard normal upper tail.

#include <vector>

#include <Eigen/Dense>

namespace mtlspca {

// Standard normal upper-tail probability.
double qfunc(double t);

struct SpectralSummary {
    Eigen::VectorXd spikes;     // eigenvalues of calM, descending
    std::vector<bool> visible;  // spike strictly above 1/sqrt(c0)
    Eigen::VectorXd isolated;   // limiting eigenvalue of X X^T / p for each spike
    double threshold = 0.0;     // 1/sqrt(c0)
    double bulk_left = 0.0;     // (1 - sqrt(1/c0))^2
    double bulk_right = 0.0;    // (1 + sqrt(1/c0))^2
};

SpectralSummary phase_transition(const Eigen::MatrixXd& calM, double c0);

struct ScoreLaw {
    int classes_per_task = 0;
    Eigen::MatrixXd means;       // groups x tau; row a is the mean score of group a
    Eigen::MatrixXd separation;  // groups x groups squared distances between means
    bool degenerate_spectrum = false;

    int groups() const { return static_cast<int>(means.rows()); }
    int dimension() const { return static_cast<int>(means.cols()); }
    // Q(sqrt(separation(a, b)) / 2)
    double pairwise_error(int a, int b) const;
    // Binary layouts only: midpoint of the two class means of `task`
    // (first component) and the equal-prior error of that threshold test.
    double threshold(int task) const;
    double binary_error(int task) const;
};

// Components beyond the number of groups carry no signal and get zero means.
ScoreLaw pca_score_law(const Eigen::MatrixXd& calM, const Eigen::VectorXd& c, double c0,
                       int tau, int classes_per_task);

// Canonical labels (one score column per group).
ScoreLaw spca_score_law(const Eigen::MatrixXd& calM, const Eigen::VectorXd& c, double c0,
                        int classes_per_task);

// General label matrix yt (groups x r). With r == 1 the means follow the
// binary closed form, whose sign matches the matched filter Xy / ||Xy||.
ScoreLaw mtl_score_law(const Eigen::MatrixXd& calM, const Eigen::VectorXd& c, double c0,
                       const Eigen::MatrixXd& ytilde, int classes_per_task);

// Binary closed form for one label vector; returns the mean of every group.
Eigen::VectorXd binary_score_means(const Eigen::MatrixXd& calM, const Eigen::VectorXd& c,
                                   double c0, const Eigen::VectorXd& ytilde);

// Label vector maximising (m_t1 - m_t2)^2 for target `task` of a binary
// layout: D^{-1/2} (calM + I)^{-1} calM D^{-1/2} (e_t1 - e_t2), scaled to unit
// norm. Zero when calM carries no signal for the task.
Eigen::VectorXd optimal_labels(const Eigen::MatrixXd& calM, const Eigen::VectorXd& c, int task);

// Error reached by the optimal labels:
//   Q( sqrt(c0 * de^T D^{-1/2} calM (calM + I)^{-1} calM D^{-1/2} de) / 2 ).
double optimal_error(const Eigen::MatrixXd& calM, const Eigen::VectorXd& c, double c0, int task);

struct PcaSpcaGap {
    double absolute = 0.0;  // separation(SPCA) - separation(PCA)
    double relative = 0.0;  // absolute / separation(SPCA)
};

// Binary single-task gap as a function of ||mu_1 - mu_2||^2 and n/p.
PcaSpcaGap pca_spca_gap(double delta_mu_sq, double n_over_p);

}  // namespace mtlspca
