// gauge.hpp: the quantum Rabi ring with complex hopping J1_0 e^{i theta} (no
// diagonal hopping) and the real-J2 square that reproduces its spectrum.
//
// Ring modes are not symmetric under q -> -q:
//   omega0_q = omega - 2 omega g^2 + 2 J1_0 cos(q - theta),
// so the asymmetric Bogoliubov form is used throughout.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qrs/errors.hpp"
#include "qrs/meanfield.hpp"
#include "qrs/model.hpp"

namespace qrs {

struct GaugeParams {
    double j1_0{0.0};   // ring hopping magnitude
    double theta{0.0};  // gauge phase

    void validate() const {
        if (!std::isfinite(j1_0)) throw Error(ErrorKind::InvalidParameters, "J1_0 must be finite");
        if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi))
            throw Error(ErrorKind::InvalidParameters, "theta must lie in [0, 2 pi)");
    }

    /// theta reduced into [0, 2 pi).
    static GaugeParams wrapped(double j1_0, double theta) {
        const double two_pi = 2.0 * std::numbers::pi;
        double t = std::fmod(theta, two_pi);
        if (t < 0.0) t += two_pi;
        if (t >= two_pi) t = 0.0;
        return {j1_0, t};
    }
};

enum class Regime { NP, SRP };

inline const char* to_string(Regime r) { return r == Regime::NP ? "NP" : "SRP"; }

inline double qrr_mode_frequency(const GaugeParams& gp, const ModelParams& p, double g, MomentumBranch q) {
    return p.omega - 2.0 * p.omega * g * g + 2.0 * gp.j1_0 * std::cos(q.q() - gp.theta);
}

/// 4 (g_c^0)^2 = (1 + a)(1 + b) / (1 + (a + b)/2),  a, b = 2 J1_0 cos(q -+ theta) / omega.
/// Symmetric under q -> -q: the (q, -q) pair destabilises at one coupling, where
/// the lower of eps0_q and eps0_-q closes.
inline double qrr_critical_coupling(const GaugeParams& gp, const ModelParams& p, MomentumBranch q) {
    const double a = 2.0 * gp.j1_0 / p.omega * std::cos(q.q() - gp.theta);
    const double b = 2.0 * gp.j1_0 / p.omega * std::cos(q.q() + gp.theta);
    const double num = 1.0 + a + b + a * b;
    const double den = 1.0 + 0.5 * (a + b);
    if (!(num > 0.0) || !(den > 0.0)) {
        throw Error(ErrorKind::NoCriticalPoint, "ring branch q=" + q.name() + " has no critical point");
    }
    return 0.5 * std::sqrt(num / den);
}

/// Ring branch with the smallest critical coupling among 0, pi and 3pi/2.
inline MomentumBranch qrr_dominant_branch(const GaugeParams& gp, const ModelParams& p) {
    MomentumBranch best = MomentumBranch::zero();
    double best_gc = std::numeric_limits<double>::infinity();
    for (auto q : {MomentumBranch::zero(), MomentumBranch::pi(), MomentumBranch::three_half_pi()}) {
        try {
            const double gc = qrr_critical_coupling(gp, p, q);
            if (gc < best_gc) {
                best_gc = gc;
                best = q;
            }
        } catch (const Error&) {
        }
    }
    if (!std::isfinite(best_gc)) throw Error(ErrorKind::NoCriticalPoint, "ring has no critical point");
    return best;
}

/// g'0 = (g_c^0)^3(q0) / g^2
inline double qrr_renormalized_coupling(const GaugeParams& gp, const ModelParams& p, double g, MomentumBranch q0) {
    const double gc = qrr_critical_coupling(gp, p, q0);
    if (g < gc && !detail::at_rounding_level(g - gc, gc))
        throw Error(ErrorKind::BelowCritical, "g is below the ring critical coupling");
    return gc * gc * gc / (g * g);
}

/// Ring excitation energy. In the SRP the coupling is replaced by g'0 of the
/// condensed branch q0 (default: the dominant ring branch).
inline double qrr_excitation(const GaugeParams& gp, const ModelParams& p, double g, MomentumBranch q,
                             Regime regime, std::optional<MomentumBranch> q0 = std::nullopt) {
    gp.validate();
    double geff = g;
    if (regime == Regime::SRP) geff = qrr_renormalized_coupling(gp, p, g, q0.value_or(qrr_dominant_branch(gp, p)));
    return bogoliubov_excitation(qrr_mode_frequency(gp, p, geff, q),
                                 qrr_mode_frequency(gp, p, geff, q.negated()), p.omega, geff);
}

/// J2 = 2 (J1 - J1_0 cos theta): square and ring share omega_pi, hence eps_pi
/// and g_c(pi), in both phases.
inline double map_afrp(double j1, const GaugeParams& gp) { return 2.0 * (j1 - gp.j1_0 * std::cos(gp.theta)); }

namespace detail {

// omega (1 - 2 x^2) - sqrt((omega sqrt(1 - 4 x^2) - 2 J1_0 sin theta)^2 + 4 omega^2 x^4)
inline double frustrated_j2(const GaugeParams& gp, const ModelParams& p, double x) {
    const double disc = 1.0 - 4.0 * x * x;
    if (disc < 0.0 && !at_rounding_level(disc, 1.0))
        throw Error(ErrorKind::DomainError, "1 - 4 g^2 < 0: coupling beyond the frustrated map domain");
    const double r = p.omega * std::sqrt(std::max(disc, 0.0)) - 2.0 * gp.j1_0 * std::sin(gp.theta);
    if (r < 0.0 && !at_rounding_level(r, p.omega))
        throw Error(ErrorKind::DomainError, "ring excitation eps0_{3pi/2} would be negative");
    const double rr = std::max(r, 0.0);
    return p.omega * (1.0 - 2.0 * x * x) - std::sqrt(rr * rr + 4.0 * p.omega * p.omega * x * x * x * x);
}

}  // namespace detail

/// J2(g) making eps_{3pi/2} of the square equal to the ring's. In the SRP the
/// ring's renormalised coupling g'0 (q0 = 3pi/2) replaces g.
inline double map_frustrated(const GaugeParams& gp, const ModelParams& p, double g, Regime regime) {
    gp.validate();
    const double x = regime == Regime::NP
                         ? g
                         : qrr_renormalized_coupling(gp, p, g, MomentumBranch::three_half_pi());
    return detail::frustrated_j2(gp, p, x);
}

/// J2 giving the same condensate amplitude A^2, i.e. the same g_c(q0), for branch q0:
///   pi:          2 (J1 - J1_0 cos theta)
///   pi/2, 3pi/2: 4 J1_0^2 sin^2 theta / omega
///   0:           2 (J1_0 cos theta - J1)     (J1 < 0, ferromagnetic side)
inline double map_order_parameter(const GaugeParams& gp, const ModelParams& p, MomentumBranch q0) {
    switch (q0.index()) {
        case 2: return map_afrp(p.j1, gp);
        case 0: return 2.0 * (gp.j1_0 * std::cos(gp.theta) - p.j1);
        default: {
            const double s = std::sin(gp.theta);
            return 4.0 * gp.j1_0 * gp.j1_0 * s * s / p.omega;
        }
    }
}

/// The AFRP map after J1 -> -J1, theta -> pi - theta; matches the q = 0 (FRP)
/// branch of a ring with phase theta for a square with J1 < 0.
inline double negative_j1_map(double j1, const GaugeParams& gp) {
    const auto flipped = GaugeParams::wrapped(gp.j1_0, std::numbers::pi - gp.theta);
    return map_afrp(-j1, flipped);
}

struct TriplePoint {
    double theta_c{};
    double j1_from_cos{};  // 2 J1_0 cos theta_c
    double j1_from_sin{};  // 4 J1_0^2 sin^2 theta_c / omega
    double j1() const { return j1_from_cos; }
};

/// Root of 2 J1_0 cos t = 4 J1_0^2 sin^2 t / omega on (0, pi/2): bisection to
/// 1e-12 followed by one Newton step.
inline TriplePoint triple_point(double j1_0, double omega = 1.0) {
    if (!(j1_0 > 0.0) || !std::isfinite(j1_0))
        throw Error(ErrorKind::InvalidParameters, "triple point needs J1_0 > 0");
    auto f = [&](double t) {
        const double s = std::sin(t);
        return 2.0 * j1_0 * std::cos(t) - 4.0 * j1_0 * j1_0 * s * s / omega;
    };
    double lo = 0.0, hi = 0.5 * std::numbers::pi;
    if (!(f(lo) > 0.0 && f(hi) < 0.0)) throw Error(ErrorKind::NoRoot, "triple point is not bracketed");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    const double df = -2.0 * j1_0 * std::sin(t) - 8.0 * j1_0 * j1_0 * std::sin(t) * std::cos(t) / omega;
    if (df != 0.0) t -= f(t) / df;
    TriplePoint tp;
    tp.theta_c = t;
    tp.j1_from_cos = 2.0 * j1_0 * std::cos(t);
    tp.j1_from_sin = 4.0 * j1_0 * j1_0 * std::sin(t) * std::sin(t) / omega;
    return tp;
}

enum class GaugeMap { AFRP, Frustrated, FRP };

inline const char* to_string(GaugeMap m) {
    switch (m) {
        case GaugeMap::AFRP: return "afrp";
        case GaugeMap::Frustrated: return "frustrated";
        case GaugeMap::FRP: return "frp";
    }
    return "?";
}

struct CorrespondenceResult {
    double j2{};
    double residual{};          // |eps_q(square) - eps0_q(ring)|
    Regime regime{Regime::NP};
    MomentumBranch branch;
    double square_energy{};
    double ring_energy{};
    /// Frustrated SRP only: |g'(square with mapped J2) - g'0(ring)|, zero only at g_c.
    std::optional<double> g_prime_mismatch;
};

/// Compare square (J1 from p, J2 from the map) and ring spectra at one coupling.
/// AFRP compares q = pi, FRP q = 0, frustrated q = 3pi/2. The condensed branch
/// is the compared branch in each case.
inline CorrespondenceResult verify_equivalence(const GaugeParams& gp, const ModelParams& p, double g,
                                               GaugeMap map, Regime regime) {
    gp.validate();
    CorrespondenceResult r;
    r.regime = regime;
    ModelParams sq = p;
    sq.j2 = 0.0;
    switch (map) {
        case GaugeMap::AFRP:
            r.branch = MomentumBranch::pi();
            sq.j2 = map_afrp(p.j1, gp);
            break;
        case GaugeMap::FRP:
            r.branch = MomentumBranch::zero();
            sq.j2 = negative_j1_map(p.j1, gp);
            break;
        case GaugeMap::Frustrated:
            r.branch = MomentumBranch::three_half_pi();
            sq.j2 = map_frustrated(gp, p, g, regime);
            break;
    }
    r.j2 = sq.j2;
    const auto q = r.branch;
    r.ring_energy = qrr_excitation(gp, p, g, q, regime, q);
    if (regime == Regime::NP) {
        r.square_energy = np_excitation_energy(sq, g, q);
    } else if (map == GaugeMap::Frustrated) {
        const double gp0 = qrr_renormalized_coupling(gp, p, g, q);
        r.square_energy = bogoliubov_excitation(mode_frequency(sq, gp0, q), mode_frequency(sq, gp0, q.negated()),
                                                sq.omega, gp0);
        const double gc = critical_coupling(sq, q);
        r.g_prime_mismatch = std::abs(gc * gc * gc / (g * g) - gp0);
    } else {
        r.square_energy = srp_excitation_energy(sq, g, q, q);
    }
    r.residual = std::abs(r.square_energy - r.ring_energy);
    return r;
}

/// Largest residual of verify_equivalence over `points` couplings spread
/// uniformly over [g_lo, g_hi].
inline double equivalence_residual(const GaugeParams& gp, const ModelParams& p, GaugeMap map, Regime regime,
                                   double g_lo, double g_hi, int points = 50) {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double g = points == 1 ? g_lo : g_lo + (g_hi - g_lo) * i / (points - 1);
        worst = std::max(worst, verify_equivalence(gp, p, g, map, regime).residual);
    }
    return worst;
}

}  // namespace qrs
