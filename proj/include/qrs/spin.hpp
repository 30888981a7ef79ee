// spin.hpp: classical (large-S) J1-J2 spin picture of the low-energy square:
// mean-field energy per omega*S, its branch solutions and a multi-start minimiser.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qrs/errors.hpp"
#include "qrs/meanfield.hpp"
#include "qrs/model.hpp"

namespace qrs {

/// X_n = <S^x_n>/S, Y_n = <S^y_n>/S.
struct SpinConfig {
    std::array<double, kSites> x{};
    std::array<double, kSites> y{};

    double x_at(int n) const { return x[Displacements::site(n)]; }
    double y_at(int n) const { return y[Displacements::site(n)]; }

    DisplacementPattern pattern(double tol = 1e-9) const {
        return Displacements::from_real(x).pattern(tol);
    }
};

enum class SpinBranch { I, II, III };  // uniform (q=0), staggered (q=pi), paired (q=pi/2)

inline const char* to_string(SpinBranch b) {
    switch (b) {
        case SpinBranch::I: return "i";
        case SpinBranch::II: return "ii";
        case SpinBranch::III: return "iii";
    }
    return "?";
}

inline MomentumBranch spin_branch_momentum(SpinBranch b) {
    switch (b) {
        case SpinBranch::I: return MomentumBranch::zero();
        case SpinBranch::II: return MomentumBranch::pi();
        case SpinBranch::III: return MomentumBranch::half_pi();
    }
    return MomentumBranch::zero();
}

/// E/(omega S) = sum_n [ -sqrt(1 - X^2 - Y^2) - 2 g^2 X^2
///                      + (J1/omega)(X X' + Y Y') + (J2/2 omega)(X X'' + Y Y'') ],
/// primes denoting the next and next-next site.
inline double spin_meanfield_energy(const ModelParams& p, double g, const SpinConfig& c) {
    double e = 0.0;
    for (int n = 0; n < kSites; ++n) {
        const double r2 = c.x[n] * c.x[n] + c.y[n] * c.y[n];
        if (r2 > 1.0 + 1e-14) throw Error(ErrorKind::DomainError, "spin length exceeds 1 on a site");
        e += -std::sqrt(std::max(0.0, 1.0 - r2)) - 2.0 * g * g * c.x[n] * c.x[n] +
             p.j1 / p.omega * (c.x_at(n) * c.x_at(n + 1) + c.y_at(n) * c.y_at(n + 1)) +
             0.5 * p.j2 / p.omega * (c.x_at(n) * c.x_at(n + 2) + c.y_at(n) * c.y_at(n + 2));
    }
    return e;
}

/// Gradient ordered (X_1..X_4, Y_1..Y_4).
inline Eigen::Matrix<double, 8, 1> spin_energy_gradient(const ModelParams& p, double g, const SpinConfig& c) {
    Eigen::Matrix<double, 8, 1> grad;
    const double a = p.j1 / p.omega, b = p.j2 / p.omega;
    for (int n = 0; n < kSites; ++n) {
        const double s = std::sqrt(std::max(1e-300, 1.0 - c.x[n] * c.x[n] - c.y[n] * c.y[n]));
        grad(n) = c.x[n] / s - 4.0 * g * g * c.x[n] + a * (c.x_at(n + 1) + c.x_at(n - 1)) + b * c.x_at(n + 2);
        grad(n + 4) = c.y[n] / s + a * (c.y_at(n + 1) + c.y_at(n - 1)) + b * c.y_at(n + 2);
    }
    return grad;
}

inline Eigen::Matrix<double, 8, 8> spin_energy_hessian(const ModelParams& p, double g, const SpinConfig& c) {
    Eigen::Matrix<double, 8, 8> h = Eigen::Matrix<double, 8, 8>::Zero();
    const double a = p.j1 / p.omega, b = p.j2 / p.omega;
    for (int n = 0; n < kSites; ++n) {
        const double x = c.x[n], y = c.y[n];
        const double s = std::sqrt(std::max(1e-300, 1.0 - x * x - y * y));
        const double s3 = s * s * s;
        h(n, n) = 1.0 / s + x * x / s3 - 4.0 * g * g;
        h(n + 4, n + 4) = 1.0 / s + y * y / s3;
        h(n, n + 4) = h(n + 4, n) = x * y / s3;
        for (int off : {0, 4}) {
            h(n + off, Displacements::site(n + 1) + off) += a;
            h(n + off, Displacements::site(n - 1) + off) += a;
            h(n + off, Displacements::site(n + 2) + off) += b;
        }
    }
    return h;
}

struct SpinSolution {
    SpinBranch branch{SpinBranch::I};
    double x_value{};  // |X|
    double energy{};   // E/(omega S)
    bool below_critical{false};
    SpinConfig config;
};

/// X = sqrt(1 - (1/(4 g^2 - 4 g_c^2 + 1))^2) on the branch pattern, Y = 0;
/// X = 0 (tagged below_critical) for g <= g_c.
inline SpinSolution spin_branch_solution(const ModelParams& p, double g, SpinBranch branch) {
    SpinSolution s;
    s.branch = branch;
    const auto q = spin_branch_momentum(branch);
    const double excess = detail::srp_excess(p, g, q);
    if (excess <= 0.0) {
        s.below_critical = true;
    } else {
        const double gc = critical_coupling(p, q);
        const double d = 4.0 * g * g - 4.0 * gc * gc;
        // 1 - 1/(1+d)^2 = d (2 + d) / (1 + d)^2, free of cancellation near onset
        s.x_value = std::sqrt(d * (2.0 + d)) / (1.0 + d);
    }
    const auto signs = branch_signs(q);
    for (int n = 0; n < kSites; ++n) s.config.x[n] = s.x_value * signs[n];
    s.energy = spin_meanfield_energy(p, g, s.config);
    return s;
}

inline std::array<SpinSolution, 3> spin_branch_solutions(const ModelParams& p, double g) {
    return {spin_branch_solution(p, g, SpinBranch::I), spin_branch_solution(p, g, SpinBranch::II),
            spin_branch_solution(p, g, SpinBranch::III)};
}

inline SpinSolution best_spin_branch(const ModelParams& p, double g) {
    const auto all = spin_branch_solutions(p, g);
    SpinSolution best = all[0];
    for (const auto& s : all)
        if (s.energy < best.energy) best = s;
    return best;
}

struct SpinMinimum {
    SpinConfig config;
    double energy{};
    double gradient_norm{};
    int starts{};
    int best_start{};
};

struct SpinMinimizerOptions {
    int starts{64};
    std::uint64_t seed{20240601};
    double gradient_tolerance{1e-12};
    int max_descent_steps{20000};
    int max_newton_steps{50};
};

namespace detail {

inline void project_to_disks(SpinConfig& c, double radius) {
    for (int n = 0; n < kSites; ++n) {
        c.x[n] = std::clamp(c.x[n], -1.0, 1.0);
        c.y[n] = std::clamp(c.y[n], -1.0, 1.0);
        const double r = std::hypot(c.x[n], c.y[n]);
        if (r > radius) {
            c.x[n] *= radius / r;
            c.y[n] *= radius / r;
        }
    }
}

inline SpinConfig from_vector(const Eigen::Matrix<double, 8, 1>& v) {
    SpinConfig c;
    for (int n = 0; n < kSites; ++n) {
        c.x[n] = v(n);
        c.y[n] = v(n + 4);
    }
    return c;
}

inline Eigen::Matrix<double, 8, 1> to_vector(const SpinConfig& c) {
    Eigen::Matrix<double, 8, 1> v;
    for (int n = 0; n < kSites; ++n) {
        v(n) = c.x[n];
        v(n + 4) = c.y[n];
    }
    return v;
}

}  // namespace detail

/// Multi-start projected gradient descent (Armijo backtracking) over the
/// per-site unit disks, each run finished by damped Newton steps.
inline SpinMinimum minimize_spin_energy(const ModelParams& p, double g, const SpinMinimizerOptions& opt = {}) {
    constexpr double radius = 1.0 - 1e-12;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SpinMinimum best;
    best.energy = std::numeric_limits<double>::infinity();
    best.starts = opt.starts;
    auto energy = [&](const SpinConfig& c) { return spin_meanfield_energy(p, g, c); };

    for (int start = 0; start < opt.starts; ++start) {
        SpinConfig c;
        for (int n = 0; n < kSites; ++n) {
            c.x[n] = 0.9 * uni(rng);
            c.y[n] = 0.9 * uni(rng);
        }
        detail::project_to_disks(c, 0.95);
        double e = energy(c);
        double step = 0.1;
        for (int it = 0; it < opt.max_descent_steps; ++it) {
            const auto grad = spin_energy_gradient(p, g, c);
            if (grad.norm() < 1e-6) break;
            bool moved = false;
            for (int k = 0; k < 60; ++k) {
                SpinConfig t = detail::from_vector(detail::to_vector(c) - step * grad);
                detail::project_to_disks(t, radius);
                const double et = energy(t);
                const double decrease = (detail::to_vector(c) - detail::to_vector(t)).squaredNorm() / step;
                if (et <= e - 1e-4 * decrease) {
                    c = t;
                    e = et;
                    moved = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        // Newton polish; a step is kept only if it does not raise the energy
        for (int it = 0; it < opt.max_newton_steps; ++it) {
            const auto grad = spin_energy_gradient(p, g, c);
            if (grad.norm() < opt.gradient_tolerance) break;
            const auto h = spin_energy_hessian(p, g, c);
            const Eigen::Matrix<double, 8, 1> dx = h.ldlt().solve(grad);
            double t = 1.0;
            bool moved = false;
            for (int k = 0; k < 30; ++k, t *= 0.5) {
                SpinConfig trial = detail::from_vector(detail::to_vector(c) - t * dx);
                detail::project_to_disks(trial, radius);
                const double et = energy(trial);
                if (et <= e + 1e-15 * std::abs(e) &&
                    spin_energy_gradient(p, g, trial).norm() < grad.norm()) {
                    c = trial;
                    e = et;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        if (e < best.energy) {
            best.energy = e;
            best.config = c;
            best.best_start = start;
        }
    }
    best.gradient_norm = spin_energy_gradient(p, g, best.config).norm();
    if (!(best.gradient_norm < 1e-8)) {
        throw Error(ErrorKind::NoConvergence, "spin minimiser: best of " + std::to_string(opt.starts) +
                                                  " starts has gradient norm " + std::to_string(best.gradient_norm));
    }
    return best;
}

struct SpinDisplacementReport {
    SpinSolution spin;                  // lowest analytic spin branch
    std::optional<MomentumBranch> displacement_branch;  // empty in the NP
    DisplacementPattern spin_pattern{DisplacementPattern::Zero};
    DisplacementPattern displacement_pattern{DisplacementPattern::Zero};
    double spin_gc{};
    double displacement_gc{};
    bool tie{false};
    double onset_slope_ratio_spin{};         // X^2(2d)/X^2(d), 2 for a linear onset
    double onset_slope_ratio_displacement{};  // A^2(2d)/A^2(d)
    std::optional<double> amplitude_ratio;  // A^2 / X^2, diagnostic only
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Checks that the spin picture and the optical displacements agree on the
/// sign pattern, the onset coupling, and a linear onset of the squared order parameters.
inline SpinDisplacementReport compare_to_displacements(const ModelParams& p, double g) {
    SpinDisplacementReport r;
    r.spin = best_spin_branch(p, g);
    const auto choice = dominant_branch(p);
    r.tie = choice.tie;
    SpinBranch sb = r.spin.branch;
    if (r.spin.below_critical) {
        // normal phase: every branch sits at X = 0; follow the one that condenses first
        sb = choice.branch == MomentumBranch::zero()
                 ? SpinBranch::I
                 : (choice.branch == MomentumBranch::pi() ? SpinBranch::II : SpinBranch::III);
    }
    r.spin_gc = critical_coupling(p, spin_branch_momentum(sb));
    r.displacement_gc = choice.g_c;
    r.spin_pattern = r.spin.config.pattern();
    const auto set = srp_displacements(p, g, choice.branch);
    if (!set.below_critical) r.displacement_branch = choice.branch;
    r.displacement_pattern = set.solutions.front().pattern();

    if (r.spin_pattern != r.displacement_pattern && !r.tie)
        r.failures.push_back(std::string("sign pattern: spin ") + to_string(r.spin_pattern) + " vs displacement " +
                             to_string(r.displacement_pattern));
    if (std::abs(r.spin_gc - r.displacement_gc) > kBranchTieTolerance * r.displacement_gc)
        r.failures.push_back("onset: spin g_c " + std::to_string(r.spin_gc) + " vs displacement g_c " +
                             std::to_string(r.displacement_gc));

    const double d = 1e-7;
    const double gc = r.displacement_gc;
    const double xs1 = std::pow(spin_branch_solution(p, gc + d, sb).x_value, 2);
    const double xs2 = std::pow(spin_branch_solution(p, gc + 2 * d, sb).x_value, 2);
    const double a1 = srp_amplitude_squared(p, gc + d, choice.branch);
    const double a2 = srp_amplitude_squared(p, gc + 2 * d, choice.branch);
    r.onset_slope_ratio_spin = xs2 / xs1;
    r.onset_slope_ratio_displacement = a2 / a1;
    if (std::abs(r.onset_slope_ratio_spin - 2.0) > 1e-4)
        r.failures.push_back("spin order parameter onset is not linear in g - g_c");
    if (std::abs(r.onset_slope_ratio_displacement - 2.0) > 1e-4)
        r.failures.push_back("displacement order parameter onset is not linear in g - g_c");
    if (!r.spin.below_critical && r.spin.x_value > 0.0 && !set.below_critical)
        r.amplitude_ratio = set.amplitude * set.amplitude / (r.spin.x_value * r.spin.x_value);
    return r;
}

}  // namespace qrs
