#include "mtlspca/smalldense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mtlspca/errors.hpp"

namespace mtlspca {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void sort_descending(EigenDecomposition& ed) {
    const Index n = ed.values.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return ed.values(i) > ed.values(j); });
    VectorXd values(n);
    MatrixXd vectors(ed.vectors.rows(), n);
    for (Index i = 0; i < n; ++i) {
        values(i) = ed.values(order[static_cast<std::size_t>(i)]);
        vectors.col(i) = ed.vectors.col(order[static_cast<std::size_t>(i)]);
    }
    ed.values = std::move(values);
    ed.vectors = std::move(vectors);
}

void flag_degeneracy(EigenDecomposition& ed, double scale) {
    ed.degenerate = false;
    const double gap_tol = 1e-8 * scale;
    for (Index i = 0; i + 1 < ed.values.size(); ++i) {
        if (ed.values(i) - ed.values(i + 1) < gap_tol) {
            ed.degenerate = true;
            return;
        }
    }
}

void finalize(EigenDecomposition& ed, double scale) {
    sort_descending(ed);
    normalize_signs(ed.vectors);
    flag_degeneracy(ed, scale);
}

double max_abs(const MatrixXd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace

void check_symmetric(const MatrixXd& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw InputError(std::string(what) + ": matrix is not square");
    }
    if (!a.allFinite()) {
        throw InputError(std::string(what) + ": non-finite entries");
    }
    const double tol = 1e-12 * std::max(1.0, max_abs(a));
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = j + 1; i < a.rows(); ++i) {
            if (std::abs(a(i, j) - a(j, i)) > tol) {
                throw InputError(std::string(what) + ": matrix is not symmetric");
            }
        }
    }
}

void normalize_signs(MatrixXd& vectors) {
    for (Index j = 0; j < vectors.cols(); ++j) {
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < vectors.rows(); ++i) {
            const double v = std::abs(vectors(i, j));
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        if (vectors.rows() > 0 && vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
    }
}

EigenDecomposition jacobi_eig(const MatrixXd& input) {
    check_symmetric(input, "jacobi_eig");
    const Index n = input.rows();
    MatrixXd a = 0.5 * (input + input.transpose());
    MatrixXd v = MatrixXd::Identity(n, n);
    const double scale = a.norm();

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index q = 1; q < n; ++q)
            for (Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
        if (off <= (1e-17 * scale) * (1e-17 * scale)) break;

        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                // Negligible relative to both diagonals: zero it outright.
                if (sweep > 3 && std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    EigenDecomposition ed;
    ed.values = a.diagonal();
    ed.vectors = std::move(v);
    finalize(ed, scale);
    return ed;
}

EigenDecomposition sym_eig(const MatrixXd& a) {
    if (a.rows() <= kJacobiMaxOrder) return jacobi_eig(a);
    check_symmetric(a, "sym_eig");
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(0.5 * (a + a.transpose()));
    if (solver.info() != Eigen::Success) {
        throw NumericalError("sym_eig: eigen-solver did not converge");
    }
    EigenDecomposition ed;
    ed.values = solver.eigenvalues();
    ed.vectors = solver.eigenvectors();
    finalize(ed, a.norm());
    return ed;
}

MatrixXd psd_sqrt(const MatrixXd& a) {
    const EigenDecomposition ed = sym_eig(a);
    const double scale = std::max(1.0, ed.values.size() ? std::abs(ed.values(0)) : 0.0);
    VectorXd root(ed.values.size());
    for (Index i = 0; i < ed.values.size(); ++i) {
        const double lambda = ed.values(i);
        if (lambda < -1e-6 * scale) {
            throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(lambda) + " is negative");
        }
        root(i) = std::sqrt(std::max(lambda, 0.0));
    }
    MatrixXd s = ed.vectors * root.asDiagonal() * ed.vectors.transpose();
    return 0.5 * (s + s.transpose());
}

MatrixXd spd_solve(const MatrixXd& a, const MatrixXd& b) {
    check_symmetric(a, "spd_solve");
    if (b.rows() != a.rows()) throw InputError("spd_solve: right-hand side has wrong row count");
    const MatrixXd sym = 0.5 * (a + a.transpose());
    double min_eig = 0.0;
    if (sym.rows() <= kJacobiMaxOrder) {
        const EigenDecomposition ed = jacobi_eig(sym);
        min_eig = ed.values.size() ? ed.values(ed.values.size() - 1) : 0.0;
    } else {
        Eigen::SelfAdjointEigenSolver<MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
        min_eig = solver.eigenvalues()(0);
    }
    if (!(min_eig >= 1e-12)) {
        throw SingularError("spd_solve: smallest eigenvalue " + std::to_string(min_eig) +
                            " below 1e-12");
    }
    Eigen::LLT<MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success) throw SingularError("spd_solve: Cholesky failed");
    return llt.solve(b);
}

EigenDecomposition lanczos_top(const MatrixXd& a, Index k) {
    const Index n = a.rows();
    if (k < 1 || k > n) throw InputError("lanczos_top: k out of range");
    const double anorm = std::max(a.norm(), std::numeric_limits<double>::min());

    MatrixXd q(n, std::min<Index>(n, 64));
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[j] couples q_j and q_{j+1}

    std::mt19937_64 engine(0x5eedULL);
    std::normal_distribution<double> gauss;
    auto fresh_vector = [&](Index cols) {
        VectorXd r(n);
        for (int attempt = 0; attempt < 8; ++attempt) {
            for (Index i = 0; i < n; ++i) r(i) = gauss(engine);
            for (int pass = 0; pass < 2; ++pass) {
                if (cols > 0) r -= q.leftCols(cols) * (q.leftCols(cols).transpose() * r);
            }
            const double nr = r.norm();
            if (nr > 1e-8) return VectorXd(r / nr);
        }
        throw NumericalError("lanczos_top: could not extend Krylov basis");
    };

    q.col(0) = fresh_vector(0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
    VectorXd w(n);
    Index steps = 0;
    bool converged = false;

    while (steps < n) {
        const Index j = steps;
        w.noalias() = a * q.col(j);
        const double aj = q.col(j).dot(w);
        alpha.push_back(aj);
        // Full reorthogonalisation, applied twice.
        for (int pass = 0; pass < 2; ++pass) {
            w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
        }
        const double bj = w.norm();
        ++steps;

        const bool check = steps >= k && (steps % 4 == 0 || steps == n || bj < 1e-12 * anorm);
        if (check) {
            VectorXd d = Eigen::Map<VectorXd>(alpha.data(), steps);
            VectorXd e = steps > 1 ? VectorXd(Eigen::Map<VectorXd>(beta.data(), steps - 1))
                                   : VectorXd();
            tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
            const VectorXd& theta = tri.eigenvalues();
            const double tmax = std::max(std::abs(theta(0)), std::abs(theta(steps - 1)));
            bool ok = true;
            for (Index i = 0; i < k; ++i) {
                const Index col = steps - 1 - i;
                const double residual = std::abs(bj * tri.eigenvectors()(steps - 1, col));
                if (residual > 1e-12 * std::max(tmax, anorm * 1e-3)) {
                    ok = false;
                    break;
                }
            }
            if (ok || steps == n) {
                converged = true;
                break;
            }
        }
        if (steps == n) break;
        if (q.cols() < steps + 1) {
            q.conservativeResize(Eigen::NoChange, std::min<Index>(n, 2 * q.cols()));
        }
        if (bj < 1e-12 * anorm) {
            // Invariant subspace found: restart in the orthogonal complement.
            beta.push_back(0.0);
            q.col(steps) = fresh_vector(steps);
        } else {
            beta.push_back(bj);
            q.col(steps) = w / bj;
        }
    }
    if (!converged) {
        VectorXd d = Eigen::Map<VectorXd>(alpha.data(), steps);
        VectorXd e = steps > 1 ? VectorXd(Eigen::Map<VectorXd>(beta.data(), steps - 1))
                               : VectorXd();
        tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    }

    EigenDecomposition ed;
    ed.values.resize(k);
    ed.vectors.resize(n, k);
    for (Index i = 0; i < k; ++i) {
        const Index col = steps - 1 - i;
        ed.values(i) = tri.eigenvalues()(col);
        ed.vectors.col(i) = q.leftCols(steps) * tri.eigenvectors().col(col);
        ed.vectors.col(i).normalize();
    }
    finalize(ed, anorm);
    return ed;
}

MatrixXd top_subspace(const MatrixXd& x, Index tau) {
    const Index p = x.rows();
    const Index n = x.cols();
    if (tau < 1 || tau > std::min(p, n)) {
        throw InputError("top_subspace: tau=" + std::to_string(tau) + " exceeds min(p, n)=" +
                         std::to_string(std::min(p, n)));
    }
    if (!x.allFinite()) throw InputError("top_subspace: non-finite data");

    const bool via_samples = n < p;
    const Index d = via_samples ? n : p;
    MatrixXd gram = MatrixXd::Zero(d, d);
    if (via_samples) {
        gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    } else {
        gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
    }
    gram = gram.selfadjointView<Eigen::Lower>();
    gram /= static_cast<double>(p);

    EigenDecomposition ed;
    if (d <= 256 || tau > d / 4) {
        ed = sym_eig(gram);
    } else {
        ed = lanczos_top(gram, tau);
    }

    MatrixXd basis(p, tau);
    Index filled = 0;
    if (via_samples) {
        const double floor = 1e-12 * std::max(1.0, std::abs(ed.values(0)));
        for (Index i = 0; i < tau; ++i) {
            if (ed.values(i) <= floor) break;
            VectorXd u = x * ed.vectors.col(i);
            for (int pass = 0; pass < 2; ++pass) {
                if (filled > 0) u -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * u);
            }
            basis.col(filled++) = u.normalized();
        }
        // Null directions of X X^T: any orthonormal completion is an eigenbasis.
        for (Index e = 0; filled < tau && e < p; ++e) {
            VectorXd u = VectorXd::Unit(p, e);
            for (int pass = 0; pass < 2; ++pass) {
                if (filled > 0) u -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * u);
            }
            if (u.norm() > 1e-6) basis.col(filled++) = u.normalized();
        }
    } else {
        basis = ed.vectors.leftCols(tau);
    }
    normalize_signs(basis);
    return basis;
}

}  // namespace mtlspca
