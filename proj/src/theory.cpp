#include "mtlspca/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mtlspca/errors.hpp"
#include "mtlspca/smalldense.hpp"

namespace mtlspca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_inputs(const MatrixXd& calM, const VectorXd& c, double c0, const char* what) {
    check_symmetric(calM, what);
    if (c.size() != calM.rows()) {
        throw InputError(std::string(what) + ": proportions and calM sizes differ");
    }
    if ((c.array() <= 0.0).any() || !c.allFinite()) {
        throw InputError(std::string(what) + ": proportions must be positive");
    }
    if (!(c0 > 0.0) || !std::isfinite(c0)) throw InputError(std::string(what) + ": c0 must be positive");
}

void check_classes(int groups, int classes_per_task) {
    if (classes_per_task < 1 || groups % classes_per_task != 0) {
        throw InputError("classes_per_task does not divide the number of groups");
    }
}

MatrixXd squared_distances(const MatrixXd& means) {
    const Eigen::Index g = means.rows();
    MatrixXd d(g, g);
    for (Eigen::Index a = 0; a < g; ++a)
        for (Eigen::Index b = 0; b < g; ++b) d(a, b) = (means.row(a) - means.row(b)).squaredNorm();
    return d;
}

// D^{1/2} calM D^{-1/2}
MatrixXd signal_map(const MatrixXd& calM, const VectorXd& c) {
    return c.cwiseSqrt().asDiagonal() * calM * c.cwiseSqrt().cwiseInverse().asDiagonal();
}

// D^{1/2} calM D^{1/2} + D
MatrixXd score_covariance(const MatrixXd& calM, const VectorXd& c) {
    MatrixXd q = c.cwiseSqrt().asDiagonal() * calM * c.cwiseSqrt().asDiagonal();
    q.diagonal() += c;
    return 0.5 * (q + q.transpose());
}

// Means along the eigenvectors of root * K * root, root = (yt yt^T)^{1/2}.
ScoreLaw supervised_law(const MatrixXd& calM, const VectorXd& c, double c0, const MatrixXd& root,
                        int classes_per_task) {
    const MatrixXd k = score_covariance(calM, c);
    MatrixXd b = root * k * root;
    b = 0.5 * (b + b.transpose());
    const EigenDecomposition ed = sym_eig(b);

    const double cutoff = 1e-12 * std::max(1.0, ed.values.size() ? ed.values(0) : 0.0);
    Eigen::Index tau = 0;
    while (tau < ed.values.size() && ed.values(tau) > cutoff) ++tau;

    const MatrixXd projected = (root * signal_map(calM, c)).transpose();  // groups x groups
    ScoreLaw law;
    law.classes_per_task = classes_per_task;
    law.means.resize(calM.rows(), tau);
    for (Eigen::Index i = 0; i < tau; ++i) {
        law.means.col(i) = std::sqrt(c0 / ed.values(i)) * (projected * ed.vectors.col(i));
    }
    law.separation = squared_distances(law.means);
    law.degenerate_spectrum = ed.degenerate && tau > 1;
    return law;
}

}  // namespace

double qfunc(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

double ScoreLaw::pairwise_error(int a, int b) const {
    return qfunc(0.5 * std::sqrt(std::max(0.0, separation(a, b))));
}

double ScoreLaw::threshold(int task) const {
    if (classes_per_task != 2) throw InputError("threshold: binary layout required");
    if (dimension() == 0) return 0.0;
    return 0.5 * (means(2 * task, 0) + means(2 * task + 1, 0));
}

double ScoreLaw::binary_error(int task) const {
    if (classes_per_task != 2) throw InputError("binary_error: binary layout required");
    if (task < 0 || 2 * task + 1 >= groups()) throw InputError("binary_error: task out of range");
    return pairwise_error(2 * task, 2 * task + 1);
}

SpectralSummary phase_transition(const MatrixXd& calM, double c0) {
    if (!(c0 > 0.0)) throw InputError("phase_transition: c0 must be positive");
    const EigenDecomposition ed = sym_eig(calM);
    SpectralSummary s;
    s.spikes = ed.values;
    s.threshold = 1.0 / std::sqrt(c0);
    const double r = std::sqrt(1.0 / c0);
    s.bulk_left = (1.0 - r) * (1.0 - r);
    s.bulk_right = (1.0 + r) * (1.0 + r);
    s.isolated.resize(ed.values.size());
    s.visible.resize(static_cast<std::size_t>(ed.values.size()));
    for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
        const double l = ed.values(i);
        // Ties at the threshold count as invisible.
        const bool vis = l > s.threshold * (1.0 + 1e-10);
        s.visible[static_cast<std::size_t>(i)] = vis;
        s.isolated(i) = vis ? 1.0 + 1.0 / c0 + l + 1.0 / (c0 * l) : s.bulk_right;
    }
    return s;
}

ScoreLaw pca_score_law(const MatrixXd& calM, const VectorXd& c, double c0, int tau,
                       int classes_per_task) {
    check_inputs(calM, c, c0, "pca_score_law");
    check_classes(static_cast<int>(calM.rows()), classes_per_task);
    if (tau < 1) throw InputError("pca_score_law: tau must be positive");

    const EigenDecomposition ed = sym_eig(calM);
    const double threshold = 1.0 / std::sqrt(c0);
    const MatrixXd weighted = calM * c.cwiseSqrt().cwiseInverse().asDiagonal();  // calM D^{-1/2}
    const double gap_tol = 1e-8 * std::max(calM.norm(), std::numeric_limits<double>::min());

    ScoreLaw law;
    law.classes_per_task = classes_per_task;
    law.means = MatrixXd::Zero(calM.rows(), tau);
    for (int i = 0; i < std::min<Eigen::Index>(tau, ed.values.size()); ++i) {
        const double l = ed.values(i);
        if (!(l > threshold * (1.0 + 1e-10))) continue;
        const double alignment = (c0 * l * l - 1.0) / (l * l * (l + 1.0));
        law.means.col(i) = std::sqrt(alignment) * (weighted.transpose() * ed.vectors.col(i));
        if (i + 1 < ed.values.size() && l - ed.values(i + 1) < gap_tol) law.degenerate_spectrum = true;
        if (i > 0 && ed.values(i - 1) - l < gap_tol) law.degenerate_spectrum = true;
    }
    law.separation = squared_distances(law.means);
    return law;
}

ScoreLaw spca_score_law(const MatrixXd& calM, const VectorXd& c, double c0, int classes_per_task) {
    check_inputs(calM, c, c0, "spca_score_law");
    check_classes(static_cast<int>(calM.rows()), classes_per_task);
    return supervised_law(calM, c, c0, MatrixXd::Identity(calM.rows(), calM.cols()),
                          classes_per_task);
}

VectorXd binary_score_means(const MatrixXd& calM, const VectorXd& c, double c0,
                            const VectorXd& ytilde) {
    check_inputs(calM, c, c0, "binary_score_means");
    if (ytilde.size() != calM.rows()) throw InputError("binary_score_means: label length mismatch");
    const double energy = ytilde.dot(score_covariance(calM, c) * ytilde);
    if (!(energy > 0.0)) throw InputError("binary_score_means: label vector is zero");
    const VectorXd numer = signal_map(calM, c).transpose() * ytilde;
    return std::sqrt(c0) * numer / std::sqrt(energy);
}

ScoreLaw mtl_score_law(const MatrixXd& calM, const VectorXd& c, double c0, const MatrixXd& ytilde,
                       int classes_per_task) {
    check_inputs(calM, c, c0, "mtl_score_law");
    check_classes(static_cast<int>(calM.rows()), classes_per_task);
    if (ytilde.rows() != calM.rows() || ytilde.cols() < 1) {
        throw InputError("mtl_score_law: label matrix must have one row per group");
    }
    if (ytilde.norm() == 0.0) throw InputError("mtl_score_law: label matrix is zero");

    if (ytilde.cols() == 1) {
        ScoreLaw law;
        law.classes_per_task = classes_per_task;
        law.means = binary_score_means(calM, c, c0, ytilde.col(0));
        law.separation = squared_distances(law.means);
        return law;
    }
    return supervised_law(calM, c, c0, psd_sqrt(ytilde * ytilde.transpose()), classes_per_task);
}

VectorXd optimal_labels(const MatrixXd& calM, const VectorXd& c, int task) {
    check_inputs(calM, c, 1.0, "optimal_labels");
    const Eigen::Index d = calM.rows();
    if (d % 2 != 0) throw InputError("optimal_labels: binary layout required");
    if (task < 0 || 2 * task + 1 >= d) throw InputError("optimal_labels: task out of range");

    const VectorXd inv_root = c.cwiseSqrt().cwiseInverse();
    VectorXd de = VectorXd::Zero(d);
    de(2 * task) = inv_root(2 * task);
    de(2 * task + 1) = -inv_root(2 * task + 1);
    const VectorXd w = calM * de;  // calM D^{-1/2} (e_t1 - e_t2)
    const MatrixXd shifted = calM + MatrixXd::Identity(d, d);
    const VectorXd x = spd_solve(shifted, w);
    VectorXd y = inv_root.cwiseProduct(x);
    const double norm = y.norm();
    if (norm > 0.0) y /= norm;
    return y;
}

double optimal_error(const MatrixXd& calM, const VectorXd& c, double c0, int task) {
    check_inputs(calM, c, c0, "optimal_error");
    const Eigen::Index d = calM.rows();
    if (d % 2 != 0) throw InputError("optimal_error: binary layout required");
    if (task < 0 || 2 * task + 1 >= d) throw InputError("optimal_error: task out of range");

    const VectorXd inv_root = c.cwiseSqrt().cwiseInverse();
    VectorXd de = VectorXd::Zero(d);
    de(2 * task) = inv_root(2 * task);
    de(2 * task + 1) = -inv_root(2 * task + 1);
    const VectorXd w = calM * de;
    const VectorXd x = spd_solve(calM + MatrixXd::Identity(d, d), w);
    const double quad = std::max(0.0, w.dot(x));
    return qfunc(0.5 * std::sqrt(c0 * quad));
}

PcaSpcaGap pca_spca_gap(double delta_mu_sq, double n_over_p) {
    if (!(delta_mu_sq >= 0.0) || !(n_over_p > 0.0)) {
        throw InputError("pca_spca_gap: need ||delta mu||^2 >= 0 and n/p > 0");
    }
    PcaSpcaGap gap;
    gap.absolute = 16.0 / (n_over_p * delta_mu_sq + 4.0);
    gap.relative = 16.0 / (n_over_p * delta_mu_sq * delta_mu_sq);
    return gap;
}

}  // namespace mtlspca
