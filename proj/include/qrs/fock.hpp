// fock.hpp: truncated Fock space of four cavities and four qubits, and the
// Hermitian / unitary operators built on it.
//
// Basis ordering (cavity-major, spin-minor):
//   index = P * 16 + S
//   P = ((n1 * nc + n2) * nc + n3) * nc + n4,  0 <= n_i < nc
//   S = s1 * 8 + s2 * 4 + s3 * 2 + s4,          s_i = 1 for spin up
// Site 1 is the most significant digit in both blocks.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "qrs/errors.hpp"
#include "qrs/meanfield.hpp"
#include "qrs/model.hpp"

namespace qrs {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kSpinStates = 16;
inline constexpr const char* kBasisOrderTag = "cavity-major/spin-minor";

struct BasisState {
    std::array<int, kSites> n{};  // photons per cavity
    std::array<int, kSites> s{};  // 1 = up, 0 = down
    friend bool operator==(const BasisState&, const BasisState&) = default;
};

class FockSpace {
public:
    /// n_c photon states per cavity (0 .. n_c-1).
    explicit FockSpace(int n_c, std::int64_t max_dim = 2'000'000) : n_c_(n_c) {
        if (n_c < 2) throw Error(ErrorKind::InvalidParameters, "photon cutoff n_c must be >= 2");
        photon_dim_ = static_cast<std::int64_t>(n_c) * n_c * n_c * n_c;
        dim_ = photon_dim_ * kSpinStates;
        if (dim_ > max_dim) {
            throw Error(ErrorKind::DimensionOverflow,
                        "dimension " + std::to_string(dim_) + " exceeds cap " + std::to_string(max_dim));
        }
    }

    int n_c() const { return n_c_; }
    std::int64_t dim() const { return dim_; }
    std::int64_t photon_dim() const { return photon_dim_; }

    std::int64_t index(const BasisState& b) const {
        std::int64_t photon = 0;
        int spin = 0;
        for (int i = 0; i < kSites; ++i) {
            photon = photon * n_c_ + b.n[i];
            spin = spin * 2 + b.s[i];
        }
        return photon * kSpinStates + spin;
    }

    BasisState decode(std::int64_t idx) const {
        BasisState b;
        int spin = static_cast<int>(idx % kSpinStates);
        std::int64_t photon = idx / kSpinStates;
        for (int i = kSites - 1; i >= 0; --i) {
            b.s[i] = spin & 1;
            spin >>= 1;
            b.n[i] = static_cast<int>(photon % n_c_);
            photon /= n_c_;
        }
        return b;
    }

private:
    int n_c_;
    std::int64_t photon_dim_{};
    std::int64_t dim_{};
};

/// Operator on the truncated space; sparse for local Hamiltonians, dense for
/// operators obtained from matrix exponentials.
struct OperatorMatrix {
    std::variant<SparseMatrix, DenseMatrix> data;
    bool hermitian{false};

    std::int64_t dim() const {
        return std::visit([](const auto& m) { return static_cast<std::int64_t>(m.rows()); }, data);
    }

    Vector apply(const Vector& v) const {
        return std::visit([&](const auto& m) -> Vector { return m * v; }, data);
    }

    DenseMatrix to_dense() const {
        if (auto* s = std::get_if<SparseMatrix>(&data)) return DenseMatrix(*s);
        return std::get<DenseMatrix>(data);
    }

    SparseMatrix to_sparse(double prune = 0.0) const {
        if (auto* s = std::get_if<SparseMatrix>(&data)) return *s;
        SparseMatrix out = std::get<DenseMatrix>(data).sparseView(1.0, prune);
        out.makeCompressed();
        return out;
    }

    /// Max-row-sum norm, an upper bound on the spectral norm.
    double norm_inf() const {
        if (auto* s = std::get_if<SparseMatrix>(&data)) {
            double best = 0.0;
            for (int r = 0; r < s->outerSize(); ++r) {
                double row = 0.0;
                for (SparseMatrix::InnerIterator it(*s, r); it; ++it) row += std::abs(it.value());
                best = std::max(best, row);
            }
            return best;
        }
        return std::get<DenseMatrix>(data).cwiseAbs().rowwise().sum().maxCoeff();
    }
};

/// max |A_ij - B_ij| for sparse operands.
inline double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix d = a - b;
    double worst = 0.0;
    for (int r = 0; r < d.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(d, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

inline double hermiticity_defect(const OperatorMatrix& m) {
    if (auto* s = std::get_if<SparseMatrix>(&m.data)) {
        SparseMatrix adj = s->adjoint();
        return max_abs_difference(*s, adj);
    }
    const auto& d = std::get<DenseMatrix>(m.data);
    return (d - d.adjoint()).cwiseAbs().maxCoeff();
}

/// Normalised state vector on a FockSpace.
class QuantumState {
public:
    QuantumState() = default;
    explicit QuantumState(Vector v) : amplitudes_(std::move(v)) {
        const double n = amplitudes_.norm();
        if (!(n > 0.0)) throw Error(ErrorKind::DomainError, "cannot normalise a zero state");
        amplitudes_ /= n;
    }
    const Vector& amplitudes() const { return amplitudes_; }
    std::int64_t size() const { return amplitudes_.size(); }

private:
    Vector amplitudes_;
};

struct HoppingBond {
    int i, j;
    double amplitude;
};

/// The six photon-hopping bonds: four edges (J1) and two diagonals (J2).
inline std::vector<HoppingBond> hopping_bonds(const ModelParams& p) {
    return {{0, 1, p.j1}, {1, 2, p.j1}, {2, 3, p.j1}, {3, 0, p.j1}, {0, 2, p.j2}, {1, 3, p.j2}};
}

/// Hamiltonian with every a_i replaced by a_i + alpha_i, i.e. D(alpha) H D(alpha)^dagger with
/// D(alpha) = prod_n exp(alpha_n^* a_n - alpha_n a_n^dagger). alpha = 0 gives the lab-frame H.
/// The shift is applied to the operator algebra before truncation, so no truncated
/// exponential enters. The coupling lambda is taken from p.
inline OperatorMatrix build_hamiltonian(const ModelParams& p, const FockSpace& f,
                                        const Displacements& shift = {}) {
    p.validate();
    const auto bonds = hopping_bonds(p);
    const int nc = f.n_c();

    // a_i^dagger coefficient c_i = omega alpha_i + sum_j M_ij alpha_j, plus a constant.
    std::array<cplx, kSites> drive{};
    double constant = 0.0;
    for (int i = 0; i < kSites; ++i) {
        drive[i] = p.omega * shift.alpha[i];
        constant += p.omega * std::norm(shift.alpha[i]);
    }
    for (const auto& b : bonds) {
        drive[b.i] += b.amplitude * shift.alpha[b.j];
        drive[b.j] += b.amplitude * shift.alpha[b.i];
        constant += 2.0 * b.amplitude * std::real(std::conj(shift.alpha[b.i]) * shift.alpha[b.j]);
    }

    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(f.dim()) * 32);
    for (std::int64_t col = 0; col < f.dim(); ++col) {
        const BasisState b = f.decode(col);
        double diag = constant;
        for (int i = 0; i < kSites; ++i) diag += p.omega * b.n[i] + 0.5 * p.Omega * (2 * b.s[i] - 1);
        trip.emplace_back(col, col, diag);

        for (int i = 0; i < kSites; ++i) {
            // lambda (a + a^dagger + 2 Re alpha) sigma^x
            BasisState flip = b;
            flip.s[i] ^= 1;
            const double shift_x = 2.0 * shift.alpha[i].real();
            if (shift_x != 0.0) trip.emplace_back(f.index(flip), col, p.lambda * shift_x);
            if (b.n[i] > 0) {
                BasisState t = flip;
                t.n[i] -= 1;
                trip.emplace_back(f.index(t), col, p.lambda * std::sqrt(double(b.n[i])));
            }
            if (b.n[i] + 1 < nc) {
                BasisState t = flip;
                t.n[i] += 1;
                trip.emplace_back(f.index(t), col, p.lambda * std::sqrt(double(b.n[i] + 1)));
            }
            // c_i a_i^dagger + c_i^* a_i
            if (drive[i] != cplx{}) {
                if (b.n[i] + 1 < nc) {
                    BasisState t = b;
                    t.n[i] += 1;
                    trip.emplace_back(f.index(t), col, drive[i] * std::sqrt(double(b.n[i] + 1)));
                }
                if (b.n[i] > 0) {
                    BasisState t = b;
                    t.n[i] -= 1;
                    trip.emplace_back(f.index(t), col, std::conj(drive[i]) * std::sqrt(double(b.n[i])));
                }
            }
        }
        // J (a_i a_j^dagger + a_j a_i^dagger)
        for (const auto& bond : bonds) {
            if (bond.amplitude == 0.0) continue;
            for (auto [from, to] : {std::pair{bond.i, bond.j}, std::pair{bond.j, bond.i}}) {
                if (b.n[from] == 0 || b.n[to] + 1 >= nc) continue;
                BasisState t = b;
                t.n[from] -= 1;
                t.n[to] += 1;
                trip.emplace_back(f.index(t), col,
                                  bond.amplitude * std::sqrt(double(b.n[from]) * (b.n[to] + 1)));
            }
        }
    }
    SparseMatrix h(f.dim(), f.dim());
    h.setFromTriplets(trip.begin(), trip.end());
    h.makeCompressed();
    return {std::move(h), true};
}

/// P = exp(i pi sum_i (a_i^dagger a_i + sigma_i^+ sigma_i^-)), diagonal +-1.
inline OperatorMatrix parity_operator(const FockSpace& f) {
    SparseMatrix m(f.dim(), f.dim());
    m.reserve(Eigen::VectorXi::Constant(f.dim(), 1));
    for (std::int64_t k = 0; k < f.dim(); ++k) {
        const auto b = f.decode(k);
        int total = 0;
        for (int i = 0; i < kSites; ++i) total += b.n[i] + b.s[i];
        m.insert(k, k) = (total % 2 == 0) ? 1.0 : -1.0;
    }
    m.makeCompressed();
    return {std::move(m), true};
}

/// Image of each basis index under the site relabelling 1234 -> 2341: the
/// content of site i+1 moves to site i, so one photon in cavity 1 ends up in cavity 4.
inline std::vector<std::int64_t> cyclic_shift_permutation(const FockSpace& f) {
    std::vector<std::int64_t> perm(static_cast<std::size_t>(f.dim()));
    for (std::int64_t k = 0; k < f.dim(); ++k) {
        const auto b = f.decode(k);
        BasisState t;
        for (int i = 0; i < kSites; ++i) {
            t.n[i] = b.n[(i + 1) % kSites];
            t.s[i] = b.s[(i + 1) % kSites];
        }
        perm[static_cast<std::size_t>(k)] = f.index(t);
    }
    return perm;
}

inline OperatorMatrix cyclic_shift_operator(const FockSpace& f) {
    const auto perm = cyclic_shift_permutation(f);
    SparseMatrix m(f.dim(), f.dim());
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        trip.emplace_back(perm[k], static_cast<std::int64_t>(k), 1.0);
    m.setFromTriplets(trip.begin(), trip.end());
    return {std::move(m), false};
}

/// Truncated single-mode annihilation operator.
inline Eigen::MatrixXd single_mode_annihilation(int n_c) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_c, n_c);
    for (int n = 1; n < n_c; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

/// Site-local photon operator embedded on the photon space (n_c^4) of site `site`.
inline SparseMatrix embed_photon_site(const FockSpace& f, int site, const DenseMatrix& local) {
    const int nc = f.n_c();
    std::int64_t stride = 1;
    for (int i = kSites - 1; i > site; --i) stride *= nc;
    std::vector<Eigen::Triplet<cplx>> trip;
    for (std::int64_t col = 0; col < f.photon_dim(); ++col) {
        const int n = static_cast<int>((col / stride) % nc);
        const std::int64_t base = col - n * stride;
        for (int m = 0; m < nc; ++m) {
            const cplx v = local(m, n);
            if (v != cplx{}) trip.emplace_back(base + m * stride, col, v);
        }
    }
    SparseMatrix out(f.photon_dim(), f.photon_dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

/// photon_op (x) identity_spin on the full space.
inline SparseMatrix embed_photon_operator(const FockSpace& f, const SparseMatrix& photon_op) {
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(photon_op.nonZeros()) * kSpinStates);
    for (int r = 0; r < photon_op.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(photon_op, r); it; ++it)
            for (int s = 0; s < kSpinStates; ++s)
                trip.emplace_back(it.row() * kSpinStates + s, it.col() * kSpinStates + s, it.value());
    SparseMatrix out(f.dim(), f.dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

inline constexpr double kUnitarityThreshold = 1e-6;

struct UnitaryOperator {
    OperatorMatrix op;
    double unitarity_loss{};  // ||U^dagger U - 1||_max on the photon space
    double edge_weight{};     // population pushed into the highest retained Fock level from vacuum
    bool warning{false};      // either diagnostic above kUnitarityThreshold
};

/// D(alpha) = exp(alpha^* a - alpha a^dagger) on one truncated mode.
inline DenseMatrix single_mode_displacement(int n_c, cplx alpha) {
    const Eigen::MatrixXd a = single_mode_annihilation(n_c);
    const DenseMatrix gen = std::conj(alpha) * a.cast<cplx>() - alpha * a.transpose().cast<cplx>();
    return gen.exp();
}

/// Photon-space factor prod_n D(alpha_n) as a dense n_c^4 matrix.
inline DenseMatrix photon_displacement(const FockSpace& f, const Displacements& alpha) {
    const int nc = f.n_c();
    DenseMatrix out = DenseMatrix::Identity(1, 1);
    for (int n = 0; n < kSites; ++n) {
        const DenseMatrix d = single_mode_displacement(nc, alpha.alpha[n]);
        DenseMatrix next(out.rows() * nc, out.cols() * nc);
        for (int r = 0; r < out.rows(); ++r)
            for (int c = 0; c < out.cols(); ++c) next.block(r * nc, c * nc, nc, nc) = out(r, c) * d;
        out = std::move(next);
    }
    return out;
}

namespace detail {

inline UnitaryOperator finish_unitary(const FockSpace& f, const DenseMatrix& photon) {
    UnitaryOperator u;
    const auto n = photon.rows();
    u.unitarity_loss = (photon.adjoint() * photon - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    // vacuum column; weight on states with any cavity at the cutoff
    double edge = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        std::int64_t rest = k;
        bool at_edge = false;
        for (int i = 0; i < kSites; ++i) {
            at_edge = at_edge || (rest % f.n_c()) == f.n_c() - 1;
            rest /= f.n_c();
        }
        if (at_edge) edge += std::norm(photon(k, 0));
    }
    u.edge_weight = edge;
    u.warning = u.unitarity_loss > kUnitarityThreshold || u.edge_weight > kUnitarityThreshold;
    SparseMatrix sp = photon.sparseView(1.0, 1e-300);
    u.op = OperatorMatrix{embed_photon_operator(f, sp), false};
    return u;
}

}  // namespace detail

/// D(alpha) = prod_n exp(alpha_n^* a_n - alpha_n a_n^dagger), each factor the
/// matrix exponential of the truncated generator. Near-unitary for |alpha_n|^2 <~ n_c/4.
inline UnitaryOperator displacement_operator(const FockSpace& f, const Displacements& alpha) {
    return detail::finish_unitary(f, photon_displacement(f, alpha));
}

/// Real symmetric kernel K_nm = (1/4) cos((n - m) q) of the Bloch pair operator
/// a_q a_{-q} = sum_nm K_nm a_n a_m, with a_q = (1/2) sum_n e^{inq} a_n.
inline Eigen::Matrix4d bloch_pair_kernel(MomentumBranch q) {
    Eigen::Matrix4d k;
    for (int n = 0; n < kSites; ++n)
        for (int m = 0; m < kSites; ++m) k(n, m) = 0.25 * std::cos((n - m) * q.q());
    return k;
}

/// Photon-space generator sum_q lambda_q (a_q^dagger a_{-q}^dagger - a_q a_{-q}).
inline Eigen::MatrixXd squeeze_generator(const FockSpace& f, const std::array<double, kSites>& lam) {
    Eigen::Matrix4d kernel = Eigen::Matrix4d::Zero();
    for (auto q : MomentumBranch::all()) kernel += lam[q.index()] * bloch_pair_kernel(q);
    const int nc = f.n_c();
    const Eigen::MatrixXd a1 = single_mode_annihilation(nc);
    std::array<SparseMatrix, kSites> a;
    for (int n = 0; n < kSites; ++n) a[n] = embed_photon_site(f, n, a1.cast<cplx>());
    SparseMatrix pairs(f.photon_dim(), f.photon_dim());
    for (int n = 0; n < kSites; ++n) {
        for (int m = 0; m < kSites; ++m) {
            if (std::abs(kernel(n, m)) < 1e-300) continue;
            SparseMatrix ann = a[n] * a[m];
            pairs += kernel(n, m) * ann;
        }
    }
    SparseMatrix cre = pairs.adjoint();
    SparseMatrix gen = cre - pairs;
    return DenseMatrix(gen).real();
}

/// S_q = exp[lambda_q (a_q^dagger a_{-q}^dagger - a_q a_{-q})] on the full space. For
/// q in {pi/2, 3pi/2} this is the two-mode squeeze of the (q, -q) pair.
inline UnitaryOperator momentum_squeeze_operator(const FockSpace& f, MomentumBranch q, double lam_q) {
    if (!std::isfinite(lam_q)) throw Error(ErrorKind::Divergent, "squeeze parameter is not finite");
    std::array<double, kSites> lam{};
    lam[q.index()] = lam_q;
    const Eigen::MatrixXd gen = squeeze_generator(f, lam);
    const Eigen::MatrixXd u = gen.exp();
    return detail::finish_unitary(f, u.cast<cplx>());
}

/// prod_q S_q for all four momenta (their generators commute).
inline DenseMatrix photon_squeeze_product(const FockSpace& f, const std::array<double, kSites>& lam) {
    const Eigen::MatrixXd gen = squeeze_generator(f, lam);
    return gen.exp().cast<cplx>();
}

}  // namespace qrs
