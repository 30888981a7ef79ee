// model.hpp: parameters, Bloch momenta and the analytic normal-phase solution
// of four Rabi sites on a square with nearest (J1) and diagonal (J2) hopping.
//
// Every function taking (p, g) reads omega, Omega, j1, j2 from p and uses the
// explicit dimensionless coupling g in place of p.g(); this lets sweeps vary g
// without rebuilding parameter sets.

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qrs/errors.hpp"

namespace qrs {

inline constexpr int kSites = 4;

struct ModelParams {
    double omega{1.0};   // photon frequency
    double Omega{50.0};  // qubit gap
    double lambda{0.0};  // atom-cavity coupling
    double j1{0.0};      // nearest-neighbour hopping
    double j2{0.0};      // next-nearest-neighbour hopping

    /// Build a parameter set from the dimensionless coupling, back-solving lambda.
    static ModelParams with_g(double g, double j1, double j2, double Omega = 50.0,
                              double omega = 1.0) {
        ModelParams p{omega, Omega, 0.0, j1, j2};
        p.lambda = g * std::sqrt(Omega * omega);
        p.validate();
        return p;
    }

    double g() const { return lambda / std::sqrt(Omega * omega); }
    double eta() const { return Omega / omega; }

    void validate() const {
        auto finite = [](double x) { return std::isfinite(x); };
        if (!(omega > 0.0) || !finite(omega))
            throw Error(ErrorKind::InvalidParameters, "omega must be positive and finite");
        if (!(Omega > 0.0) || !finite(Omega))
            throw Error(ErrorKind::InvalidParameters, "Omega must be positive and finite");
        if (!(lambda >= 0.0) || !finite(lambda))
            throw Error(ErrorKind::InvalidParameters, "lambda must be nonnegative and finite");
        if (!finite(j1) || !finite(j2))
            throw Error(ErrorKind::InvalidParameters, "hopping amplitudes must be finite");
    }

    /// Soft check of Omega >> lambda >> omega >> |J1|, |J2| with a factor-of-two margin.
    /// The formulas are evaluated regardless; this is advisory.
    std::optional<std::string> regime_warning() const {
        std::ostringstream os;
        if (Omega < 2.0 * lambda) os << "Omega is not large compared with lambda; ";
        if (lambda < 2.0 * omega && lambda > 0.0) os << "lambda is not large compared with omega; ";
        if (omega < 2.0 * std::max(std::abs(j1), std::abs(j2)))
            os << "hopping is not small compared with omega; ";
        auto s = os.str();
        if (s.empty()) return std::nullopt;
        return s;
    }
};

/// Bloch momentum q = 2*pi*l/4 of the four-site ring.
class MomentumBranch {
public:
    constexpr MomentumBranch() = default;
    constexpr explicit MomentumBranch(int l) : l_(((l % kSites) + kSites) % kSites) {}

    static constexpr MomentumBranch zero() { return MomentumBranch(0); }
    static constexpr MomentumBranch half_pi() { return MomentumBranch(1); }
    static constexpr MomentumBranch pi() { return MomentumBranch(2); }
    static constexpr MomentumBranch three_half_pi() { return MomentumBranch(3); }

    static constexpr std::array<MomentumBranch, kSites> all() {
        return {MomentumBranch(0), MomentumBranch(1), MomentumBranch(2), MomentumBranch(3)};
    }

    constexpr int index() const { return l_; }
    double q() const { return 2.0 * std::numbers::pi * l_ / kSites; }

    // cos(q) and cos(2q) are tabulated so that q = pi/2 gives exactly zero.
    constexpr double cos_q() const {
        constexpr std::array<double, kSites> c{1.0, 0.0, -1.0, 0.0};
        return c[l_];
    }
    constexpr double cos_2q() const {
        constexpr std::array<double, kSites> c{1.0, -1.0, 1.0, -1.0};
        return c[l_];
    }
    constexpr double sin_q() const {
        constexpr std::array<double, kSites> s{0.0, 1.0, 0.0, -1.0};
        return s[l_];
    }

    constexpr MomentumBranch negated() const { return MomentumBranch(kSites - l_); }

    std::string name() const {
        constexpr std::array<const char*, kSites> n{"0", "pi/2", "pi", "3pi/2"};
        return n[l_];
    }

    friend constexpr bool operator==(MomentumBranch, MomentumBranch) = default;

private:
    int l_{0};
};

/// omega_q = omega - 2 omega g^2 + J2 cos 2q + 2 J1 cos q
inline double mode_frequency(const ModelParams& p, double g, MomentumBranch q) {
    return p.omega - 2.0 * p.omega * g * g + p.j2 * q.cos_2q() + 2.0 * p.j1 * q.cos_q();
}

namespace detail {

// Radicands within a few ulps of zero are the critical point itself.
inline bool at_rounding_level(double diff, double scale) {
    return std::abs(diff) <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(scale);
}

}  // namespace detail

/// Bogoliubov excitation energy of the (q, -q) pair given the two bare mode
/// frequencies and the squeezing coupling omega*g^2:
///   eps = 1/2 [ sqrt((w_q + w_-q)^2 - 16 omega^2 g^4) + w_q - w_-q ].
/// The radicand is evaluated in factored form so that the square-root
/// closing near the critical point keeps full relative precision.
inline double bogoliubov_excitation(double w_q, double w_minus_q, double omega, double g) {
    const double sum = w_q + w_minus_q;
    const double pair = 4.0 * omega * g * g;
    double lower = sum - pair;
    const double upper = sum + pair;
    // w_q itself carries rounding of order eps * omega
    if (detail::at_rounding_level(lower, upper + 2.0 * omega)) lower = 0.0;
    const double radicand = lower * upper;
    if (radicand < 0.0 || upper < 0.0) {
        std::ostringstream os;
        os << "Bogoliubov radicand " << radicand << " is negative (w_q=" << w_q
           << ", w_-q=" << w_minus_q << ", g=" << g << ")";
        throw Error(ErrorKind::ComplexEnergy, os.str());
    }
    return 0.5 * (std::sqrt(radicand) + w_q - w_minus_q);
}

/// 1 + (J2/omega) cos 2q + (2 J1/omega) cos q, which equals 4 g_c^2(q).
inline double critical_rhs(const ModelParams& p, MomentumBranch q) {
    return 1.0 + p.j2 / p.omega * q.cos_2q() + 2.0 * p.j1 / p.omega * q.cos_q();
}

inline double critical_coupling(const ModelParams& p, MomentumBranch q) {
    const double rhs = critical_rhs(p, q);
    if (!(rhs > 0.0)) {
        throw Error(ErrorKind::NoCriticalPoint,
                    "branch q=" + q.name() + " has 4 g_c^2 = " + std::to_string(rhs) + " <= 0");
    }
    return 0.5 * std::sqrt(rhs);
}

inline double np_excitation_energy(const ModelParams& p, double g, MomentumBranch q) {
    return bogoliubov_excitation(mode_frequency(p, g, q), mode_frequency(p, g, q.negated()),
                                 p.omega, g);
}

/// lambda_q = (1/8) ln[(w_q + w_-q + 4 omega g^2) / (w_q + w_-q - 4 omega g^2)]
inline double squeeze_parameter(const ModelParams& p, double g, MomentumBranch q) {
    const double sum = mode_frequency(p, g, q) + mode_frequency(p, g, q.negated());
    const double pair = 4.0 * p.omega * g * g;
    const double den = sum - pair;
    if (!(den > 0.0) || detail::at_rounding_level(den, sum + pair + 2.0 * p.omega)) {
        throw Error(ErrorKind::Divergent, "squeeze parameter diverges at q=" + q.name() +
                                              " (w_q + w_-q <= 4 omega g^2)");
    }
    return 0.125 * std::log((sum + pair) / den);
}

/// Constant of the projected low-energy Hamiltonian, 4(-Omega/2 - omega g^2 + omega^2 g^2/Omega).
inline double np_constant_energy(const ModelParams& p, double g) {
    const double g2 = g * g;
    return 4.0 * (-0.5 * p.Omega - p.omega * g2 + p.omega * p.omega * g2 / p.Omega);
}

/// E_g = E_0 + 1/2 sum_q (eps_q - omega_q)
inline double np_ground_energy(const ModelParams& p, double g) {
    double fluct = 0.0;
    for (auto q : MomentumBranch::all())
        fluct += np_excitation_energy(p, g, q) - mode_frequency(p, g, q);
    return np_constant_energy(p, g) + 0.5 * fluct;
}

struct BranchSpectrum {
    MomentumBranch branch;
    double omega_q{};
    std::optional<double> epsilon_q;  // empty beyond the branch instability
    std::optional<double> lambda_q;   // empty at or beyond the critical point
    double g_c{};
};

inline BranchSpectrum branch_spectrum(const ModelParams& p, double g, MomentumBranch q) {
    BranchSpectrum s;
    s.branch = q;
    s.omega_q = mode_frequency(p, g, q);
    s.g_c = critical_coupling(p, q);
    try {
        s.epsilon_q = np_excitation_energy(p, g, q);
    } catch (const Error&) {
    }
    try {
        s.lambda_q = squeeze_parameter(p, g, q);
    } catch (const Error&) {
    }
    return s;
}

inline constexpr double kBranchTieTolerance = 1e-9;

struct BranchChoice {
    MomentumBranch branch;
    double g_c{};
    bool tie{false};
    /// Branches whose g_c matches within tolerance, excluding the trivial
    /// pi/2 <-> 3pi/2 partner.
    std::vector<MomentumBranch> tied_with;
};

/// Branch with the smallest critical coupling. q = pi/2 represents the
/// degenerate pi/2, 3pi/2 pair.
inline BranchChoice dominant_branch(const ModelParams& p) {
    const std::array<MomentumBranch, 3> candidates{MomentumBranch::zero(), MomentumBranch::pi(),
                                                   MomentumBranch::half_pi()};
    std::optional<BranchChoice> best;
    std::vector<std::pair<MomentumBranch, double>> values;
    for (auto q : candidates) {
        const double rhs = critical_rhs(p, q);
        if (!(rhs > 0.0)) {
            throw Error(ErrorKind::NoCriticalPoint,
                        "branch q=" + q.name() + " has no physical critical point");
        }
        const double gc = 0.5 * std::sqrt(rhs);
        values.emplace_back(q, gc);
        if (!best || gc < best->g_c) best = BranchChoice{q, gc, false, {}};
    }
    for (auto [q, gc] : values) {
        if (q == best->branch) continue;
        if (std::abs(gc - best->g_c) <= kBranchTieTolerance * best->g_c) {
            best->tie = true;
            best->tied_with.push_back(q);
        }
    }
    return *best;
}

}  // namespace qrs
