#pragma once

// =============================================================================
// Dense LU with partial pivoting (with explicit singular-pivot diagnostics)
// and a damped Newton-Raphson iteration. Systems here are tiny (tens of
// unknowns), so a straightforward dense factorization is the right tool.
// =============================================================================

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gcsim/errors.hpp"

namespace gcsim {

/// Solves A x = b by Gaussian elimination with partial pivoting. Throws
/// singular_matrix_error naming the elimination column whose pivot falls
/// below 1e-14 times the infinity norm of its (original) row.
inline Eigen::VectorXd lu_solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.size() != n)
        throw numerical_input_error("lu_solve: dimension mismatch");

    Eigen::VectorXd row_norm(n);
    for (Eigen::Index i = 0; i < n; ++i) row_norm[i] = a.row(i).cwiseAbs().maxCoeff();

    std::vector<Eigen::Index> origin(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) origin[static_cast<std::size_t>(i)] = i;

    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index p = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (p != k) {
            a.row(k).swap(a.row(p));
            std::swap(b[k], b[p]);
            std::swap(origin[static_cast<std::size_t>(k)], origin[static_cast<std::size_t>(p)]);
        }
        const double pivot = a(k, k);
        const double scale = row_norm[origin[static_cast<std::size_t>(k)]];
        if (!(std::abs(pivot) > 1e-14 * scale))
            throw singular_matrix_error(
                "singular Jacobian: pivot " + std::to_string(pivot) + " at index " +
                    std::to_string(k) + " (row scale " + std::to_string(scale) + ")",
                static_cast<int>(k));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double m = a(i, k) / pivot;
            if (m == 0.0) continue;
            a.row(i).tail(n - k - 1) -= m * a.row(k).tail(n - k - 1);
            b[i] -= m * b[k];
        }
    }
    Eigen::VectorXd x(n);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        double s = b[k];
        for (Eigen::Index j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

struct NewtonOptions {
    double tol_rel = 1e-9;
    double tol_abs = 1e-12;
    int max_iters = 50;
    int max_halvings = 8;
};

struct NewtonResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double residual = 0.0;
};

/// Damped Newton-Raphson. `provider(x, F, J)` must fill the residual and
/// Jacobian at x. Convergence: ||F(x)|| <= tol_abs + tol_rel * ||F(x0)||.
/// A full step that increases ||F|| is halved up to max_halvings times; the
/// best candidate seen is then taken so a flat stretch cannot wedge the
/// iteration.
template <typename Provider>
NewtonResult newton_solve(Provider&& provider, Eigen::VectorXd x0, const NewtonOptions& opts) {
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd f;
    Eigen::MatrixXd j;
    provider(x, f, j);
    double r = f.norm();
    if (!std::isfinite(r))
        throw numerical_input_error("newton_solve: residual not finite at initial guess");
    const double threshold = opts.tol_abs + opts.tol_rel * r;

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        if (r <= threshold) return {std::move(x), iter, r};

        Eigen::VectorXd delta;
        try {
            delta = lu_solve(j, -f);
        } catch (const singular_matrix_error& e) {
            if (iter == 0) throw;
            throw nonconvergence_error(
                "newton_solve: no convergence after " + std::to_string(iter) +
                    " iterations (" + e.what() + "); last residual " + std::to_string(r),
                r, iter);
        }

        double best_r = std::numeric_limits<double>::infinity();
        Eigen::VectorXd best_x, best_f;
        Eigen::MatrixXd best_j;
        double factor = 1.0;
        for (int h = 0; h <= opts.max_halvings; ++h, factor *= 0.5) {
            Eigen::VectorXd xc = x + factor * delta;
            Eigen::VectorXd fc;
            Eigen::MatrixXd jc;
            provider(xc, fc, jc);
            const double rc = fc.norm();
            if (std::isfinite(rc) && rc < best_r) {
                best_r = rc;
                best_x = std::move(xc);
                best_f = std::move(fc);
                best_j = std::move(jc);
            }
            if (std::isfinite(rc) && rc <= r) break;  // residual no longer increases
        }
        if (!std::isfinite(best_r))
            throw nonconvergence_error("newton_solve: residual not finite for any damped step at iteration " +
                                           std::to_string(iter) + "; last residual " + std::to_string(r),
                                       r, iter);
        x = std::move(best_x);
        f = std::move(best_f);
        j = std::move(best_j);
        r = best_r;
    }
    if (r <= threshold) return {std::move(x), opts.max_iters, r};
    throw nonconvergence_error("newton_solve: max iterations (" + std::to_string(opts.max_iters) +
                                   ") exceeded; last residual " + std::to_string(r),
                               r, opts.max_iters);
}

} // namespace gcsim
