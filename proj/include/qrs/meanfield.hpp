// meanfield.hpp: superradiant mean-field solutions, renormalised parameters,
// SRP energies and phase classification.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qrs/errors.hpp"
#include "qrs/model.hpp"
#include "qrs/nelder_mead.hpp"

namespace qrs {

using cplx = std::complex<double>;

enum class DisplacementPattern { Zero, Uniform, Staggered, Paired };

inline const char* to_string(DisplacementPattern p) {
    switch (p) {
        case DisplacementPattern::Zero: return "zero";
        case DisplacementPattern::Uniform: return "uniform";
        case DisplacementPattern::Staggered: return "staggered";
        case DisplacementPattern::Paired: return "paired";
    }
    return "?";
}

/// Mean-field cavity amplitudes alpha_n = A_n + i B_n on the four sites.
struct Displacements {
    std::array<cplx, kSites> alpha{};

    static Displacements from_real(const std::array<double, kSites>& a) {
        Displacements d;
        for (int n = 0; n < kSites; ++n) d.alpha[n] = {a[n], 0.0};
        return d;
    }

    double real(int n) const { return alpha[site(n)].real(); }
    double imag(int n) const { return alpha[site(n)].imag(); }

    /// Periodic site index.
    static int site(int n) { return ((n % kSites) + kSites) % kSites; }

    /// Root-mean-square amplitude; equals |A| for every branch solution.
    double magnitude() const {
        double s = 0.0;
        for (auto a : alpha) s += std::norm(a);
        return std::sqrt(s / kSites);
    }

    /// alpha_n alpha_{n+2} / |alpha| averaged over sites (real parts).
    double correlation() const {
        const double mag = magnitude();
        if (mag == 0.0) return 0.0;
        double s = 0.0;
        for (int n = 0; n < kSites; ++n) s += real(n) * real(n + 2);
        return s / kSites / mag;
    }

    /// Sign pattern of the real parts; entries below tol count as zero.
    DisplacementPattern pattern(double tol = 1e-9) const {
        const double mag = magnitude();
        if (mag <= tol) return DisplacementPattern::Zero;
        std::array<int, kSites> s{};
        for (int n = 0; n < kSites; ++n) {
            if (std::abs(real(n)) <= tol * mag) return DisplacementPattern::Zero;
            s[n] = real(n) > 0 ? 1 : -1;
        }
        const int nn = s[0] * s[1] + s[1] * s[2] + s[2] * s[3] + s[3] * s[0];
        const int diag = s[0] * s[2] + s[1] * s[3];
        if (nn == 4 && diag == 2) return DisplacementPattern::Uniform;
        if (nn == -4 && diag == 2) return DisplacementPattern::Staggered;
        if (nn == 0 && diag == -2) return DisplacementPattern::Paired;
        return DisplacementPattern::Zero;
    }
};

inline DisplacementPattern branch_pattern(MomentumBranch q) {
    switch (q.index()) {
        case 0: return DisplacementPattern::Uniform;
        case 2: return DisplacementPattern::Staggered;
        default: return DisplacementPattern::Paired;
    }
}

/// +-1 sign template of a branch: uniform, staggered or paired (A, A, -A, -A).
inline std::array<double, kSites> branch_signs(MomentumBranch q, int shift = 0) {
    std::array<double, kSites> base{};
    switch (q.index()) {
        case 0: base = {1, 1, 1, 1}; break;
        case 2: base = {1, -1, 1, -1}; break;
        default: base = {1, 1, -1, -1}; break;
    }
    std::array<double, kSites> out{};
    for (int n = 0; n < kSites; ++n) out[n] = base[Displacements::site(n + shift)];
    return out;
}

inline int branch_degeneracy(MomentumBranch q) {
    return (q.index() == 0 || q.index() == 2) ? 2 : 4;
}

namespace detail {

inline double coupling_lambda(const ModelParams& p, double g) {
    return g * std::sqrt(p.Omega * p.omega);
}

/// 4 lambda^2 / (omega_eff * Omega) - 1 with omega_eff = omega + J2 cos2q + 2 J1 cos q,
/// i.e. g^2/g_c^2 - 1; snapped to zero at the critical point.
inline double srp_excess(const ModelParams& p, double g, MomentumBranch q) {
    const double ratio = g * g / (0.25 * critical_rhs(p, q));
    double x = ratio - 1.0;
    if (detail::at_rounding_level(x, ratio)) x = 0.0;
    return x;
}

}  // namespace detail

/// Squared SRP amplitude A^2 = (1/16 lambda^2)(16 lambda^4 / (omega + J2 cos2q + 2 J1 cos q)^2 - Omega^2),
/// written as Omega^2/(16 lambda^2) ((g/g_c)^4 - 1).
inline double srp_amplitude_squared(const ModelParams& p, double g, MomentumBranch q) {
    critical_coupling(p, q);  // throws NoCriticalPoint
    const double lam = detail::coupling_lambda(p, g);
    const double x = detail::srp_excess(p, g, q);
    if (lam == 0.0 || x < 0.0) {
        throw Error(ErrorKind::BelowCritical,
                    "g=" + std::to_string(g) + " is below g_c(" + q.name() + ")");
    }
    const double r = x + 1.0;
    return p.Omega * p.Omega / (16.0 * lam * lam) * (r * r - 1.0);
}

struct DisplacementSet {
    MomentumBranch branch;
    bool below_critical{false};
    double amplitude{0.0};  // |A| >= 0
    std::vector<Displacements> solutions;
};

/// All symmetry-related stationary displacement patterns of branch q. Below the
/// critical point the set holds the single normal-phase solution alpha = 0 and
/// is tagged below_critical.
inline DisplacementSet srp_displacements(const ModelParams& p, double g, MomentumBranch q) {
    DisplacementSet set;
    set.branch = q;
    double a2 = 0.0;
    try {
        a2 = srp_amplitude_squared(p, g, q);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::BelowCritical) throw;
        set.below_critical = true;
        set.solutions.push_back(Displacements{});
        return set;
    }
    set.amplitude = std::sqrt(a2);
    const int shifts = (q.index() == 0 || q.index() == 2) ? 1 : 2;
    for (int shift = 0; shift < shifts; ++shift) {
        for (double sign : {1.0, -1.0}) {
            auto s = branch_signs(q, shift);
            std::array<double, kSites> a{};
            for (int n = 0; n < kSites; ++n) a[n] = sign * set.amplitude * s[n];
            set.solutions.push_back(Displacements::from_real(a));
        }
    }
    return set;
}

/// Residuals of the stationarity conditions Re V = Im V = 0:
///   omega A_n - lambda sin(2 gamma_n) + J1 (A_{n+1} + A_{n-1}) + J2 A_{n+2},
///   omega B_n + J1 (B_{n+1} + B_{n-1}) + J2 B_{n+2},
/// with sin(2 gamma_n) = 4 lambda A_n / sqrt(Omega^2 + 16 lambda^2 A_n^2). Returns the max abs.
inline double stationarity_residual(const ModelParams& p, double g, const Displacements& d) {
    const double lam = detail::coupling_lambda(p, g);
    double worst = 0.0;
    for (int n = 0; n < kSites; ++n) {
        const double a = d.real(n);
        const double omega_n = std::sqrt(p.Omega * p.Omega + 16.0 * lam * lam * a * a);
        const double sin2g = 4.0 * lam * a / omega_n;
        const double re = p.omega * a - lam * sin2g + p.j1 * (d.real(n + 1) + d.real(n - 1)) +
                          p.j2 * d.real(n + 2);
        const double im = p.omega * d.imag(n) + p.j1 * (d.imag(n + 1) + d.imag(n - 1)) +
                          p.j2 * d.imag(n + 2);
        worst = std::max({worst, std::abs(re), std::abs(im)});
    }
    return worst;
}

struct RenormalizedParams {
    double g_prime{};
    double Omega_prime{};
    double lambda_prime{};
    double A2{};
};

/// Omega' = sqrt(Omega^2 + 16 lambda^2 A^2), lambda' = lambda Omega / Omega',
/// g' = lambda' / sqrt(omega Omega').
inline RenormalizedParams renormalized_params(const ModelParams& p, double g, MomentumBranch q) {
    RenormalizedParams r;
    r.A2 = srp_amplitude_squared(p, g, q);
    const double lam = detail::coupling_lambda(p, g);
    r.Omega_prime = std::sqrt(p.Omega * p.Omega + 16.0 * lam * lam * r.A2);
    r.lambda_prime = lam * p.Omega / r.Omega_prime;
    r.g_prime = r.lambda_prime / std::sqrt(p.omega * r.Omega_prime);
    return r;
}

/// g' = g_c^3(q0) / g^2
inline double renormalized_coupling(const ModelParams& p, double g, MomentumBranch q0) {
    const double gc = critical_coupling(p, q0);
    if (detail::srp_excess(p, g, q0) < 0.0)
        throw Error(ErrorKind::BelowCritical, "g is below g_c(" + q0.name() + ")");
    return gc * gc * gc / (g * g);
}

/// SRP excitation energy of mode q when branch q0 has condensed; the NP
/// formula evaluated at g'.
inline double srp_excitation_energy(const ModelParams& p, double g, MomentumBranch q0,
                                    MomentumBranch q) {
    const double gp = renormalized_coupling(p, g, q0);
    return bogoliubov_excitation(mode_frequency(p, gp, q), mode_frequency(p, gp, q.negated()),
                                 p.omega, gp);
}

/// Minimised condensate energy -[lambda^2/(g_c^2 omega) + Omega^2 g_c^2 omega / lambda^2].
inline double srp_condensate_energy(const ModelParams& p, double g, MomentumBranch q0) {
    const double gc = critical_coupling(p, q0);
    if (detail::srp_excess(p, g, q0) < 0.0)
        throw Error(ErrorKind::BelowCritical, "g is below g_c(" + q0.name() + ")");
    const double lam = detail::coupling_lambda(p, g);
    const double gc2 = gc * gc;
    return -(lam * lam / (gc2 * p.omega) + p.Omega * p.Omega * gc2 * p.omega / (lam * lam));
}

struct SrpEnergyTerms {
    double condensate{};   // first line of the SRP ground energy
    double dressing{};     // 4(-omega g'^2 + omega^2 g'^2 / Omega')
    double fluctuation{};  // 1/2 sum_q (eps'_q - omega'_q)
    double total(bool with_fluctuations = true) const {
        return condensate + dressing + (with_fluctuations ? fluctuation : 0.0);
    }
};

/// All four momenta share the g' of the condensed branch q0.
inline SrpEnergyTerms srp_energy_terms(const ModelParams& p, double g, MomentumBranch q0) {
    SrpEnergyTerms t;
    t.condensate = srp_condensate_energy(p, g, q0);
    const auto r = renormalized_params(p, g, q0);
    const double gp = renormalized_coupling(p, g, q0);
    t.dressing = 4.0 * (-p.omega * gp * gp + p.omega * p.omega * gp * gp / r.Omega_prime);
    for (auto q : MomentumBranch::all())
        t.fluctuation += srp_excitation_energy(p, g, q0, q) - mode_frequency(p, gp, q);
    t.fluctuation *= 0.5;
    return t;
}

inline double srp_ground_energy(const ModelParams& p, double g, MomentumBranch q0,
                                bool with_fluctuations = true) {
    if (!with_fluctuations) {
        const auto r = renormalized_params(p, g, q0);
        const double gp = renormalized_coupling(p, g, q0);
        return srp_condensate_energy(p, g, q0) +
               4.0 * (-p.omega * gp * gp + p.omega * p.omega * gp * gp / r.Omega_prime);
    }
    return srp_energy_terms(p, g, q0).total(true);
}

/// First two lines of the mean-field SRP energy for arbitrary amplitudes:
///   sum_n { omega (A^2 + B^2) + 2 J1 (A_n A_{n+1} + B_n B_{n+1})
///           + J2 (A_n A_{n+2} + B_n B_{n+2}) - Omega_n / 2 }.
inline double condensate_energy(const ModelParams& p, double g, const Displacements& d) {
    const double lam = detail::coupling_lambda(p, g);
    double e = 0.0;
    for (int n = 0; n < kSites; ++n) {
        const double a = d.real(n), b = d.imag(n);
        e += p.omega * (a * a + b * b);
        e += 2.0 * p.j1 * (a * d.real(n + 1) + b * d.imag(n + 1));
        e += p.j2 * (a * d.real(n + 2) + b * d.imag(n + 2));
        e -= 0.5 * std::sqrt(p.Omega * p.Omega + 16.0 * lam * lam * a * a);
    }
    return e;
}

struct CondensateMinimum {
    Displacements displacements;
    double energy{};
    int starts{};
};

/// Multi-start Nelder-Mead minimisation of condensate_energy over R^8.
inline CondensateMinimum minimize_condensate_energy(const ModelParams& p, double g,
                                                    int starts = 32,
                                                    std::uint64_t seed = 20240601) {
    std::mt19937_64 rng(seed);
    const double box = 1.0 + 2.0 * g * std::sqrt(p.eta());
    std::uniform_real_distribution<double> uni(-box, box);
    auto energy = [&](const std::vector<double>& x) {
        Displacements d;
        for (int n = 0; n < kSites; ++n) d.alpha[n] = {x[n], x[n + kSites]};
        return condensate_energy(p, g, d);
    };
    CondensateMinimum best;
    best.energy = std::numeric_limits<double>::infinity();
    best.starts = starts;
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x0(2 * kSites);
        for (auto& v : x0) v = uni(rng);
        NelderMeadOptions opts;
        opts.initial_step = 0.25 * box;
        const auto r = nelder_mead(energy, x0, opts);
        if (r.value < best.energy) {
            best.energy = r.value;
            for (int n = 0; n < kSites; ++n)
                best.displacements.alpha[n] = {r.x[n], r.x[n + kSites]};
        }
    }
    return best;
}

enum class PhaseLabel { NP, AFRP, FRP, Frustrated };

inline const char* to_string(PhaseLabel l) {
    switch (l) {
        case PhaseLabel::NP: return "NP";
        case PhaseLabel::AFRP: return "AFRP";
        case PhaseLabel::FRP: return "FRP";
        case PhaseLabel::Frustrated: return "Frustrated";
    }
    return "?";
}

inline PhaseLabel branch_label(MomentumBranch q) {
    switch (q.index()) {
        case 0: return PhaseLabel::FRP;
        case 2: return PhaseLabel::AFRP;
        default: return PhaseLabel::Frustrated;
    }
}

struct PhasePoint {
    PhaseLabel label{PhaseLabel::NP};
    std::optional<MomentumBranch> branch;
    double abs_alpha{0.0};
    double corr{0.0};
    double energy{0.0};  // mean-field energy without the fluctuation term
    int degeneracy{1};
    bool boundary{false};  // first-order branch degeneracy
    std::vector<MomentumBranch> tied_with;
};

/// Normal phase below min_q g_c(q); otherwise the SRP branch of lowest
/// mean-field energy (condensate plus dressing terms).
inline PhasePoint classify_phase(const ModelParams& p, double g) {
    const auto choice = dominant_branch(p);
    PhasePoint pt;
    if (detail::srp_excess(p, g, choice.branch) <= 0.0) {
        pt.energy = np_constant_energy(p, g);
        pt.tied_with = choice.tied_with;
        return pt;
    }
    std::optional<MomentumBranch> best;
    double best_e = 0.0;
    for (auto q : {MomentumBranch::zero(), MomentumBranch::pi(), MomentumBranch::half_pi()}) {
        if (detail::srp_excess(p, g, q) < 0.0) continue;
        const double e = srp_ground_energy(p, g, q, false);
        if (!best || e < best_e) {
            best = q;
            best_e = e;
        }
    }
    pt.branch = best;
    pt.label = branch_label(*best);
    pt.energy = best_e;
    pt.degeneracy = branch_degeneracy(*best);
    if (choice.tie) {
        pt.boundary = true;
        for (auto q : std::array{MomentumBranch::zero(), MomentumBranch::pi(),
                                 MomentumBranch::half_pi()}) {
            if (q == *best) continue;
            const bool tied = q == choice.branch ||
                              std::find(choice.tied_with.begin(), choice.tied_with.end(), q) !=
                                  choice.tied_with.end();
            if (tied) pt.tied_with.push_back(q);
        }
    }
    const auto set = srp_displacements(p, g, *best);
    pt.abs_alpha = set.amplitude;
    pt.corr = set.solutions.front().correlation();
    return pt;
}

struct OrderParameter {
    double abs_alpha{0.0};
    double corr{0.0};
};

inline OrderParameter order_parameter(const ModelParams& p, double g) {
    const auto pt = classify_phase(p, g);
    return {pt.abs_alpha, pt.corr};
}

enum class PhaseSide { NP, SRP };

struct ScalingFit {
    double exponent{};
    double intercept{};
    std::vector<double> delta;
    std::vector<double> epsilon;
};

/// Least-squares slope of ln(eps) against ln|g - g_c(q0)| over log-spaced
/// offsets in [delta_min, delta_max].
inline ScalingFit scaling_fit(const ModelParams& p, MomentumBranch q0, PhaseSide side,
                              double delta_min, double delta_max, int points = 24) {
    if (!(delta_min > 0.0) || !(delta_max > delta_min) || points < 20)
        throw Error(ErrorKind::InsufficientWindow,
                    "need 0 < delta_min < delta_max and at least 20 points");
    const double gc = critical_coupling(p, q0);
    const auto choice = dominant_branch(p);
    const bool dominant = std::abs(gc - choice.g_c) <= kBranchTieTolerance * choice.g_c;
    if (!dominant)
        throw Error(ErrorKind::InsufficientWindow,
                    "branch " + q0.name() + " does not set the phase boundary");
    ScalingFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        const double delta = delta_min * std::pow(delta_max / delta_min, t);
        const double g = side == PhaseSide::NP ? gc - delta : gc + delta;
        if (g <= 0.0)
            throw Error(ErrorKind::InsufficientWindow, "window leaves the normal phase at g<=0");
        double eps = 0.0;
        try {
            eps = side == PhaseSide::NP ? np_excitation_energy(p, g, q0)
                                        : srp_excitation_energy(p, g, q0, q0);
        } catch (const Error& e) {
            throw Error(ErrorKind::InsufficientWindow,
                        std::string("sample left the phase: ") + e.what());
        }
        if (!(eps > 0.0))
            throw Error(ErrorKind::InsufficientWindow, "excitation energy vanished in window");
        fit.delta.push_back(delta);
        fit.epsilon.push_back(eps);
        const double x = std::log(delta), y = std::log(eps);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = points;
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.exponent * sx) / n;
    return fit;
}

inline double scaling_exponent(const ModelParams& p, MomentumBranch q0, PhaseSide side,
                               double delta_min, double delta_max) {
    return scaling_fit(p, q0, side, delta_min, delta_max).exponent;
}

}  // namespace qrs
