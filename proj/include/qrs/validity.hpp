// validity.hpp: mean-field trial states on the truncated Fock space, their
// fidelity with exact eigenstates, and site observables.

#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "qrs/eigensolver.hpp"
#include "qrs/fock.hpp"
#include "qrs/meanfield.hpp"
#include "qrs/model.hpp"

namespace qrs {

enum class Frame { Lab, Displaced };

inline const char* to_string(Frame f) { return f == Frame::Lab ? "lab" : "displaced"; }

/// Copy of p with lambda set from the dimensionless coupling g.
inline ModelParams at_coupling(ModelParams p, double g) {
    p.lambda = detail::coupling_lambda(p, g);
    return p;
}

struct MeanFieldState {
    QuantumState state;
    Displacements alpha;                 // condensate amplitudes (zero in NP)
    std::array<double, kSites> lambda_q{};
    std::array<double, kSites> gamma{};  // qubit rotation angles
    double coupling{};                   // g for NP, g' for SRP
    double unitarity_loss{};
    double edge_weight{};
    bool warning{false};
};

/// |psi_g> = D^dagger(alpha) prod_q S_q (|0>|->)^{x4}. `branch` empty or below its
/// critical point gives the normal phase; otherwise the condensate solution
/// `solution` of srp_displacements is used and the squeezing is evaluated at g'.
/// In the displaced frame the D^dagger factor is omitted.
inline MeanFieldState meanfield_state(const ModelParams& p, double g, std::optional<MomentumBranch> branch,
                                      const FockSpace& f, Frame frame = Frame::Lab, int solution = 0) {
    MeanFieldState m;
    m.coupling = g;
    if (branch) {
        const auto set = srp_displacements(p, g, *branch);
        if (!set.below_critical) {
            if (solution < 0 || solution >= static_cast<int>(set.solutions.size()))
                throw Error(ErrorKind::InvalidParameters, "no such displacement solution");
            m.alpha = set.solutions[static_cast<std::size_t>(solution)];
            m.coupling = renormalized_coupling(p, g, *branch);
        }
    }
    for (auto q : MomentumBranch::all()) m.lambda_q[q.index()] = squeeze_parameter(p, m.coupling, q);

    const DenseMatrix squeeze = photon_squeeze_product(f, m.lambda_q);
    Vector photon = squeeze.col(0);
    m.unitarity_loss =
        (squeeze.adjoint() * squeeze - DenseMatrix::Identity(squeeze.rows(), squeeze.cols())).cwiseAbs().maxCoeff();
    if (frame == Frame::Lab) {
        Displacements minus;
        for (int n = 0; n < kSites; ++n) minus.alpha[n] = -m.alpha.alpha[n];
        const DenseMatrix dm = photon_displacement(f, minus);
        const auto d = detail::finish_unitary(f, dm);
        m.unitarity_loss = std::max(m.unitarity_loss, d.unitarity_loss);
        m.edge_weight = d.edge_weight;
        photon = dm * squeeze.col(0);
    }
    m.warning = m.unitarity_loss > kUnitarityThreshold || m.edge_weight > kUnitarityThreshold;

    const double lam = detail::coupling_lambda(p, g);
    Eigen::VectorXd spin = Eigen::VectorXd::Ones(1);
    for (int n = 0; n < kSites; ++n) {
        m.gamma[n] = 0.5 * std::atan2(4.0 * lam * m.alpha.real(n), p.Omega);
        Eigen::Vector2d local(std::cos(m.gamma[n]), -std::sin(m.gamma[n]));  // (down, up)
        Eigen::VectorXd next(spin.size() * 2);
        for (Eigen::Index i = 0; i < spin.size(); ++i) next.segment(2 * i, 2) = spin(i) * local;
        spin = std::move(next);
    }
    Vector full(f.dim());
    for (std::int64_t k = 0; k < f.photon_dim(); ++k)
        full.segment(k * kSpinStates, kSpinStates) = photon(k) * spin.cast<cplx>();
    m.state = QuantumState(std::move(full));
    return m;
}

/// Squared norm of the projection of psi onto span(subspace).
inline double fidelity(const Vector& psi, const std::vector<Vector>& subspace) {
    if (subspace.empty()) throw Error(ErrorKind::EmptySubspace, "fidelity needs at least one state");
    std::vector<Vector> basis;
    for (const auto& v : subspace) {
        Vector w = v;
        detail::orthogonalize(w, basis);
        const double n = w.norm();
        if (n > 1e-10 * v.norm()) basis.push_back(w / n);
    }
    if (basis.empty()) throw Error(ErrorKind::EmptySubspace, "subspace vectors are all zero");
    double f = 0.0;
    for (const auto& b : basis) f += std::norm(b.dot(psi));
    return std::clamp(f / psi.squaredNorm(), 0.0, 1.0);
}

inline double fidelity(const QuantumState& psi, const std::vector<QuantumState>& subspace) {
    std::vector<Vector> v;
    for (const auto& s : subspace) v.push_back(s.amplitudes());
    return fidelity(psi.amplitudes(), v);
}

struct SiteObservables {
    std::array<cplx, kSites> a{};        // <a_n> (+ shift)
    std::array<double, kSites> n{};      // <a_n^dagger a_n> in the same frame as a
    std::array<double, kSites> sz{};     // <sigma_n^z>
    Displacements as_displacements() const {
        Displacements d;
        d.alpha = a;
        return d;
    }
    double magnitude() const { return as_displacements().magnitude(); }
    double correlation() const { return as_displacements().correlation(); }
};

/// Site expectations of a state. With a nonzero `shift` the state is taken to
/// live in the frame a -> a + shift and lab-frame values are returned.
inline SiteObservables observables(const Vector& psi, const FockSpace& f, const Displacements& shift = {}) {
    SiteObservables o;
    const double norm2 = psi.squaredNorm();
    std::array<std::int64_t, kSites> stride{};
    std::int64_t s = kSpinStates;
    for (int i = kSites - 1; i >= 0; --i) {
        stride[i] = s;
        s *= f.n_c();
    }
    for (std::int64_t k = 0; k < f.dim(); ++k) {
        const cplx amp = psi(k);
        if (amp == cplx{}) continue;
        const auto b = f.decode(k);
        for (int i = 0; i < kSites; ++i) {
            o.n[i] += b.n[i] * std::norm(amp);
            o.sz[i] += (2 * b.s[i] - 1) * std::norm(amp);
            if (b.n[i] > 0) o.a[i] += std::conj(psi(k - stride[i])) * amp * std::sqrt(double(b.n[i]));
        }
    }
    for (int i = 0; i < kSites; ++i) {
        o.a[i] /= norm2;
        o.n[i] /= norm2;
        o.sz[i] /= norm2;
        const cplx al = shift.alpha[i];
        // <(a + al)^dagger (a + al)> = <n> + 2 Re(al^* <a>) + |al|^2
        o.n[i] += 2.0 * std::real(std::conj(al) * o.a[i]) + std::norm(al);
        o.a[i] += al;
    }
    return o;
}

/// <psi|H|psi> for a normalised psi.
inline double expectation(const OperatorMatrix& h, const Vector& psi) {
    return psi.dot(h.apply(psi)).real() / psi.squaredNorm();
}

struct DisplacedGroundState {
    Displacements shift;       // final frame displacement, equals lab <a> at convergence
    SpectralResult spectrum;   // of the Hamiltonian in that frame
    SiteObservables lab;       // lab-frame observables of the lowest state
    int iterations{};
    bool converged{false};
};

struct DisplacedOptions {
    int max_iterations{60};
    double tolerance{1e-8};  // on max |<a_n>| in the displaced frame
    int k{1};
    EigenOptions eigen{};
};

/// Ground state in a frame shifted by alpha, iterating alpha <- alpha + <a>_frame
/// until the displaced-frame mean field vanishes. max_iterations = 0 gives the
/// single-shot result at `initial`.
inline DisplacedGroundState displaced_ground_state(const ModelParams& p, double g, const FockSpace& f,
                                                   const Displacements& initial,
                                                   const DisplacedOptions& opt = {}) {
    const ModelParams pg = at_coupling(p, g);
    DisplacedGroundState r;
    r.shift = initial;
    for (int it = 0;; ++it) {
        const auto h = build_hamiltonian(pg, f, r.shift);
        r.spectrum = ground_state(h, opt.k, opt.eigen);
        const auto local = observables(r.spectrum.vectors[0], f);
        double drift = 0.0;
        for (auto a : local.a) drift = std::max(drift, std::abs(a));
        r.lab = observables(r.spectrum.vectors[0], f, r.shift);
        r.iterations = it;
        if (drift < opt.tolerance) {
            r.converged = true;
            break;
        }
        if (it >= opt.max_iterations) break;
        r.shift = r.lab.as_displacements();
    }
    return r;
}

struct BranchResponse {
    double amplitude{};   // A of the frame shift A * signs(q0)
    double response{};    // mean over sites of signs_n Re<a_n> in the shifted frame
    double energy{};      // lowest eigenvalue of H(a + shift)
    Vector ground;        // its eigenvector
};

/// Ground state of H(a -> a + A s) with s the sign pattern of branch q0, and the
/// frame-relative field projected on that pattern. A self-consistent amplitude
/// has response zero; below the ED onset A = 0 is the only such point.
inline BranchResponse branch_response(const ModelParams& p, double g, const FockSpace& f, MomentumBranch q0,
                                      double amplitude, const EigenOptions& eig = {}) {
    const auto signs = branch_signs(q0);
    std::array<double, kSites> a{};
    for (int n = 0; n < kSites; ++n) a[n] = amplitude * signs[n];
    const auto h = build_hamiltonian(at_coupling(p, g), f, Displacements::from_real(a));
    auto spec = ground_state(h, 1, eig);
    const auto obs = observables(spec.vectors[0], f);
    BranchResponse r;
    r.amplitude = amplitude;
    for (int n = 0; n < kSites; ++n) r.response += signs[n] * obs.a[n].real() / kSites;
    r.energy = spec.values[0];
    r.ground = std::move(spec.vectors[0]);
    return r;
}

struct EdOrderParameter {
    double amplitude{};   // |alpha| from exact diagonalisation, 0 when uncondensed
    double energy{};      // ground energy in the self-consistent frame
    bool condensed{false};
    int solves{};         // eigen-solves used
};

struct EdOrderOptions {
    double probe{1e-3};      // amplitude used to test stability of alpha = 0
    double tolerance{1e-6};  // on the amplitude
    int max_solves{60};
    EigenOptions eigen{};
};

/// Self-consistent ED order parameter along branch q0: the positive root of the
/// branch response, located by bracketing and Illinois regula falsi.
inline EdOrderParameter ed_order_parameter(const ModelParams& p, double g, const FockSpace& f, MomentumBranch q0,
                                           const EdOrderOptions& opt = {}) {
    EdOrderParameter out;
    EigenOptions eig = opt.eigen;
    auto probe = branch_response(p, g, f, q0, opt.probe, eig);
    out.solves = 1;
    if (probe.response <= 0.0) {
        out.energy = branch_response(p, g, f, q0, 0.0, eig).energy;
        ++out.solves;
        return out;
    }
    Vector warm = probe.ground;
    eig.initial = &warm;
    // bracket: start from the mean-field amplitude when it exists
    double guess = 1.0;
    try {
        guess = std::max(1.0, std::sqrt(srp_amplitude_squared(p, g, q0)));
    } catch (const Error&) {
    }
    BranchResponse lo = probe;
    BranchResponse hi = branch_response(p, g, f, q0, guess, eig);
    ++out.solves;
    while (hi.response > 0.0) {
        if (out.solves >= opt.max_solves)
            throw Error(ErrorKind::NoConvergence, "ED order parameter could not be bracketed");
        lo = hi;
        hi = branch_response(p, g, f, q0, 2.0 * hi.amplitude, eig);
        ++out.solves;
    }
    int side = 0;
    BranchResponse mid = hi;
    while (hi.amplitude - lo.amplitude > opt.tolerance) {
        if (out.solves >= opt.max_solves)
            throw Error(ErrorKind::NoConvergence, "ED order parameter root did not converge");
        double flo = lo.response, fhi = hi.response;
        if (side == -1) fhi *= 0.5;
        if (side == 1) flo *= 0.5;
        double x = (lo.amplitude * fhi - hi.amplitude * flo) / (fhi - flo);
        if (!(x > lo.amplitude && x < hi.amplitude)) x = 0.5 * (lo.amplitude + hi.amplitude);
        warm = mid.ground;
        mid = branch_response(p, g, f, q0, x, eig);
        ++out.solves;
        if (mid.response > 0.0) {
            lo = mid;
            side = 1;
        } else {
            hi = mid;
            side = -1;
        }
        if (std::abs(mid.response) < 1e-12) break;
    }
    out.amplitude = mid.amplitude;
    out.energy = mid.energy;
    out.condensed = true;
    return out;
}

/// Coupling at which alpha = 0 stops being a stable self-consistent frame in
/// ED along branch q0, by bisection on the sign of the small-amplitude response.
inline double ed_onset(const ModelParams& p, const FockSpace& f, MomentumBranch q0, double g_lo, double g_hi,
                       double tolerance = 1e-3, const EigenOptions& eig = {}) {
    auto condensed = [&](double g) { return branch_response(p, g, f, q0, 1e-3, eig).response > 0.0; };
    if (condensed(g_lo) || !condensed(g_hi))
        throw Error(ErrorKind::NoRoot, "ED onset is not bracketed by the coupling window");
    while (g_hi - g_lo > tolerance) {
        const double mid = 0.5 * (g_lo + g_hi);
        (condensed(mid) ? g_hi : g_lo) = mid;
    }
    return 0.5 * (g_lo + g_hi);
}

struct ValidityPoint {
    double g{};
    Frame frame{Frame::Lab};
    std::optional<MomentumBranch> branch;  // condensed branch, empty in the NP
    double infidelity{};                   // 1 - f over the ED ground manifold
    int manifold_dim{};
    double ed_energy{};
    double mf_energy{};                    // <psi_mf|H|psi_mf>
    double unitarity_loss{};
    bool warning{false};
    double seconds{};
    Vector ground;                         // lowest ED eigenvector, in `frame`
};

/// Mean-field state vs ED at one coupling. Below the dominant g_c the lab frame
/// is used; above it the comparison is made in the frame displaced by the
/// analytic condensate, where the broken-symmetry state fits the cutoff.
inline ValidityPoint meanfield_validity(const ModelParams& p, double g, const FockSpace& f,
                                        const EigenOptions& eig = {}, double degeneracy_tol = 1e-8) {
    const auto t0 = std::chrono::steady_clock::now();
    const ModelParams pg = at_coupling(p, g);
    ValidityPoint v;
    v.g = g;
    const auto choice = dominant_branch(pg);
    if (detail::srp_excess(pg, g, choice.branch) > 0.0) {
        v.branch = choice.branch;
        v.frame = Frame::Displaced;
    }
    const auto mf = meanfield_state(pg, g, v.branch, f, v.frame);
    const auto h = build_hamiltonian(pg, f, mf.alpha);
    const auto spec = ground_state(h, 3, eig);
    std::vector<Vector> manifold;
    for (std::size_t i = 0; i < spec.values.size(); ++i)
        if (spec.values[i] - spec.values[0] <= degeneracy_tol * std::max(1.0, std::abs(spec.values[0])))
            manifold.push_back(spec.vectors[i]);
    v.manifold_dim = static_cast<int>(manifold.size());
    v.infidelity = 1.0 - fidelity(mf.state.amplitudes(), manifold);
    v.ed_energy = spec.values[0];
    v.mf_energy = expectation(h, mf.state.amplitudes());
    v.unitarity_loss = mf.unitarity_loss;
    v.warning = mf.warning;
    v.ground = spec.vectors[0];
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
}

}  // namespace qrs
