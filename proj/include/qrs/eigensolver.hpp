// eigensolver.hpp: lowest eigenpairs of a Hermitian OperatorMatrix.
// Dense Hermitian decomposition for small matrices, Lanczos with full
// reorthogonalisation and locking above; both return the same SpectralResult.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qrs/errors.hpp"
#include "qrs/fock.hpp"

namespace qrs {

struct SpectralResult {
    std::vector<double> values;      // ascending
    std::vector<Vector> vectors;     // unit norm
    std::vector<double> residuals;   // ||M v - E v||
    double matrix_norm{};            // infinity-norm bound used for the tolerance
    std::string method;              // "dense" or "lanczos"
    int iterations{};                // matrix-vector products (0 for dense)
};

struct EigenOptions {
    std::int64_t dense_limit{512};   // a dense solve at dim ~1300 already costs seconds
    double tolerance{1e-9};          // residual relative to matrix_norm
    int krylov_dim{400};             // per restart cycle
    int max_restarts{40};
    std::uint64_t seed{12345};
    const Vector* initial{nullptr};  // Lanczos start vector for the lowest pair (e.g. a nearby ground state)
};

namespace detail {

inline SpectralResult dense_lowest(const OperatorMatrix& m, int k, const EigenOptions& opt) {
    SpectralResult r;
    r.method = "dense";
    r.matrix_norm = m.norm_inf();
    const DenseMatrix a = m.to_dense();
    const bool real = a.imag().cwiseAbs().maxCoeff() == 0.0;
    auto take = [&](const auto& es) {
        if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "dense eigensolver failed");
        for (int i = 0; i < k; ++i) {
            r.values.push_back(es.eigenvalues()(i));
            r.vectors.push_back(es.eigenvectors().col(i).template cast<cplx>());
        }
    };
    if (real) {
        take(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a.real()));
    } else {
        take(Eigen::SelfAdjointEigenSolver<DenseMatrix>(a));
    }
    for (std::size_t i = 0; i < r.values.size(); ++i)
        r.residuals.push_back((m.apply(r.vectors[i]) - r.values[i] * r.vectors[i]).norm());
    const double tol = opt.tolerance * std::max(r.matrix_norm, 1.0);
    for (std::size_t i = 0; i < r.residuals.size(); ++i) {
        if (!(r.residuals[i] < tol)) {
            std::ostringstream os;
            os << "dense eigenpair " << i << " residual " << r.residuals[i] << " above " << tol;
            throw Error(ErrorKind::NoConvergence, os.str());
        }
    }
    return r;
}

// Remove components along `basis` (two passes of classical Gram-Schmidt).
inline void orthogonalize(Vector& v, const std::vector<Vector>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= b * b.dot(v);
}

inline SpectralResult lanczos_lowest(const OperatorMatrix& m, int k, const EigenOptions& opt) {
    SpectralResult r;
    r.method = "lanczos";
    r.matrix_norm = m.norm_inf();
    const std::int64_t n = m.dim();
    const double tol = opt.tolerance * std::max(r.matrix_norm, 1.0);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;

    std::vector<Vector> locked;
    int matvecs = 0;
    for (int want = 0; want < k; ++want) {
        Vector start(n);
        for (std::int64_t i = 0; i < n; ++i) start(i) = cplx(normal(rng), normal(rng));
        // a warm start keeps a small random admixture so no eigenvector is missed by symmetry
        if (want == 0 && opt.initial && opt.initial->size() == n) start = *opt.initial + 1e-3 * start / start.norm();
        orthogonalize(start, locked);
        start.normalize();

        bool converged = false;
        double best_residual = 0.0;
        for (int cycle = 0; cycle <= opt.max_restarts && !converged; ++cycle) {
            const int mdim = static_cast<int>(std::min<std::int64_t>(opt.krylov_dim, n - locked.size()));
            std::vector<Vector> basis{start};
            std::vector<double> alpha, beta;
            double theta = 0.0;
            Vector ritz;
            for (int j = 0; j < mdim; ++j) {
                Vector w = m.apply(basis[j]);
                ++matvecs;
                const double a = basis[j].dot(w).real();
                alpha.push_back(a);
                // locked last: any residue along a locked (extremal) eigenvector is
                // amplified by the recurrence, so it must leave each new vector exactly
                orthogonalize(w, locked);
                orthogonalize(w, basis);
                orthogonalize(w, locked);
                const double b = w.norm();
                const bool exhausted = b < 1e-14 * std::max(r.matrix_norm, 1.0) || j + 1 == mdim;
                const bool check = exhausted || (j + 1) % 10 == 0;
                if (check) {
                    const int sz = j + 1;
                    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(sz, sz);
                    for (int i = 0; i < sz; ++i) {
                        t(i, i) = alpha[i];
                        if (i + 1 < sz) t(i, i + 1) = t(i + 1, i) = beta[i];
                    }
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
                    theta = es.eigenvalues()(0);
                    const Eigen::VectorXd y = es.eigenvectors().col(0);
                    const double estimate = std::abs(b * y(sz - 1));
                    if (estimate < 0.1 * tol || exhausted) {
                        ritz = Vector::Zero(n);
                        for (int i = 0; i < sz; ++i) ritz += y(i) * basis[i];
                        orthogonalize(ritz, locked);
                        ritz.normalize();
                        theta = ritz.dot(m.apply(ritz)).real();
                        const double res = (m.apply(ritz) - theta * ritz).norm();
                        matvecs += 2;
                        best_residual = res;
                        if (res < tol) {
                            converged = true;
                            break;
                        }
                        if (exhausted) break;
                    }
                }
                if (b < 1e-14 * std::max(r.matrix_norm, 1.0)) break;
                beta.push_back(b);
                basis.push_back(w / b);
            }
            if (converged) {
                r.values.push_back(theta);
                r.vectors.push_back(ritz);
                r.residuals.push_back(best_residual);
                locked.push_back(ritz);
            } else if (ritz.size() == n) {
                start = ritz;  // explicit restart from the current Ritz vector
            }
        }
        if (!converged) {
            std::ostringstream os;
            os << "Lanczos failed for eigenpair " << want << " after " << opt.max_restarts
               << " restarts, " << matvecs << " mat-vecs; last residual " << best_residual
               << " vs tolerance " << tol;
            throw Error(ErrorKind::NoConvergence, os.str());
        }
    }
    // locking finds eigenpairs in increasing order only up to near-degeneracies
    std::vector<std::size_t> order(r.values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return r.values[a] < r.values[b]; });
    SpectralResult sorted = r;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.values[i] = r.values[order[i]];
        sorted.vectors[i] = r.vectors[order[i]];
        sorted.residuals[i] = r.residuals[order[i]];
    }
    sorted.iterations = matvecs;
    return sorted;
}

}  // namespace detail

/// k lowest eigenpairs of a Hermitian matrix.
inline SpectralResult ground_state(const OperatorMatrix& m, int k = 1, const EigenOptions& opt = {}) {
    if (k < 1) throw Error(ErrorKind::InvalidParameters, "need at least one eigenpair");
    if (k > m.dim()) throw Error(ErrorKind::InvalidParameters, "more eigenpairs requested than the dimension");
    if (m.dim() <= opt.dense_limit) return detail::dense_lowest(m, k, opt);
    return detail::lanczos_lowest(m, k, opt);
}

}  // namespace qrs
