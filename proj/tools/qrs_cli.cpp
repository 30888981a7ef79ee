// qrs: command-line driver for the quantum Rabi square toolkit.
// Exit codes: 0 ok, 1 usage, 2 domain error, 3 verification failure, 4 no convergence.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qrs/errors.hpp"
#include "qrs/fock.hpp"
#include "qrs/gauge.hpp"
#include "qrs/meanfield.hpp"
#include "qrs/model.hpp"
#include "qrs/parallel.hpp"
#include "qrs/report.hpp"
#include "qrs/spin.hpp"
#include "qrs/state_io.hpp"
#include "qrs/validity.hpp"

using namespace qrs;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitCheck = 3;
constexpr int kExitNoConvergence = 4;

struct Options {
    double omega{1.0};
    double Omega{50.0};
    std::optional<double> ratio;
    std::optional<double> g;
    std::optional<double> lambda;
    double j1{0.05};
    double j2{0.02};
    double j10{0.05};
    double theta{std::numbers::pi / 2};
    int nc{3};
    std::string method{"analytic"};
    int steps{41};
    double g_min{0.3};
    double g_max{0.7};
    int j2_steps{11};
    double j2_min{0.0};
    double j2_max{0.1};
    double delta_min{1e-6};
    double delta_max{1e-3};
    std::string out{"-"};
    std::string format{"csv"};
    std::uint64_t seed{20240601};
    int starts{64};
    double memory_cap_mb{4096};
    unsigned threads{default_workers()};
    std::string dump_dir;
    bool verbose{false};

    ModelParams params() const {
        ModelParams p{omega, ratio ? *ratio * omega : Omega, 0.0, j1, j2};
        p.validate();
        return p;
    }
    /// Single coupling from --g or --lambda, if given.
    std::optional<double> coupling() const {
        if (g) return *g;
        if (lambda) {
            const auto p = params();
            return *lambda / std::sqrt(p.Omega * p.omega);
        }
        return std::nullopt;
    }
    EigenOptions eigen() const { return {}; }
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw UsageError("steps must be >= 2");
    if (!(lo < hi)) throw UsageError("range minimum must be below its maximum");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    return v;
}

std::vector<double> g_axis(const Options& o) {
    if (auto g = o.coupling()) return {*g};
    return linspace(o.g_min, o.g_max, o.steps);
}

void echo_common(Report& r, const Options& o) {
    const auto p = o.params();
    r.add_config("omega", p.omega);
    r.add_config("Omega", p.Omega);
    r.add_config("j1", p.j1);
    r.add_config("j2", p.j2);
}

void echo_g_axis(Report& r, const Options& o) {
    if (auto g = o.coupling()) {
        r.add_config("g", *g);
    } else {
        r.add_config("g_min", o.g_min);
        r.add_config("g_max", o.g_max);
        r.add_config("steps", o.steps);
    }
}

unsigned ed_workers(const Options& o, const FockSpace& f) {
    const auto e = o.eigen();
    const double job = static_cast<double>(ed_job_bytes(f.dim(), e.krylov_dim, e.dense_limit));
    const double cap = o.memory_cap_mb * 1024.0 * 1024.0;
    if (job > cap)
        throw Error(ErrorKind::DimensionOverflow, "one ED job needs ~" + format_double(std::ceil(job / 1048576.0)) +
                                                      " MB, above --memory-cap " + format_double(o.memory_cap_mb));
    return std::max(1u, std::min(o.threads, static_cast<unsigned>(cap / job)));
}

std::string branch_name(const std::optional<MomentumBranch>& q) { return q ? q->name() : ""; }

// ---------------------------------------------------------------------------

Report run_critical(const Options& o) {
    Report r;
    r.command = "critical";
    echo_common(r, o);
    const auto p = o.params();
    r.columns = {"branch_q", "q", "g_c", "dominant", "tie"};
    const auto choice = dominant_branch(p);  // NoCriticalPoint names the branch
    for (auto q : MomentumBranch::all()) {
        const double gc = critical_coupling(p, q);
        const auto rep = q == MomentumBranch::three_half_pi() ? MomentumBranch::half_pi() : q;
        const bool dominant = rep == choice.branch;
        bool tied = dominant && choice.tie;
        for (auto t : choice.tied_with) tied = tied || t == rep;
        r.rows.push_back({q.name(), q.q(), gc, dominant, tied});
    }
    return r;
}

Report run_sweep(const Options& o) {
    Report r;
    r.command = "sweep";
    echo_common(r, o);
    echo_g_axis(r, o);
    r.add_config("method", o.method);
    const bool analytic = o.method != "ed", ed = o.method != "analytic";
    if (ed) r.add_config("nc", o.nc);
    const auto base = o.params();
    if (analytic) r.columns = {"g", "phase", "branch_q", "E_g", "abs_alpha", "corr", "eps_min"};
    else r.columns = {"g", "branch_q"};
    if (ed) {
        for (auto c : {"E_g_ed", "abs_alpha_ed", "condensed_ed"}) r.columns.emplace_back(c);
        if (analytic) {
            r.columns.emplace_back("dE");
            r.columns.emplace_back("dalpha");
        }
    }
    r.columns.emplace_back("error");

    const auto gs = g_axis(o);
    std::optional<FockSpace> f;
    unsigned workers = o.threads;
    if (ed) {
        f.emplace(o.nc);
        workers = ed_workers(o, *f);
    }
    r.rows = parallel_map<std::vector<Cell>>(gs.size(), workers, [&](std::size_t i) {
        const double g = gs[i];
        const ModelParams p = at_coupling(base, g);
        std::vector<Cell> row{g};
        double e_an = std::numeric_limits<double>::quiet_NaN(), a_an = e_an;
        try {
            if (analytic) {
                const auto pt = classify_phase(p, g);
                e_an = pt.branch ? srp_ground_energy(p, g, *pt.branch) : np_ground_energy(p, g);
                a_an = pt.abs_alpha;
                double eps = std::numeric_limits<double>::infinity();
                for (auto q : MomentumBranch::all())
                    eps = std::min(eps, pt.branch ? srp_excitation_energy(p, g, *pt.branch, q)
                                                  : np_excitation_energy(p, g, q));
                row.insert(row.end(), {std::string(to_string(pt.label)), branch_name(pt.branch), e_an, a_an,
                                       pt.corr, eps});
            } else {
                row.emplace_back(dominant_branch(p).branch.name());
            }
            if (ed) {
                const auto q0 = dominant_branch(p).branch;
                EdOrderOptions eo;
                eo.eigen = o.eigen();
                const auto res = ed_order_parameter(p, g, *f, q0, eo);
                row.insert(row.end(), {res.energy, res.amplitude, res.condensed});
                if (analytic) row.insert(row.end(), {res.energy - e_an, res.amplitude - a_an});
            }
            row.emplace_back(std::string{});
        } catch (const Error& e) {
            row.resize(r.columns.size() - 1);
            row.emplace_back(std::string(e.what()));
        }
        if (o.verbose) std::cerr << "sweep g=" << format_double(g) << " done\n";
        return row;
    });
    return r;
}

Report run_phase_diagram(const Options& o) {
    Report r;
    r.command = "phase-diagram";
    const auto base = o.params();
    r.add_config("omega", base.omega);
    r.add_config("Omega", base.Omega);
    r.add_config("j1", base.j1);
    r.add_config("j2_min", o.j2_min);
    r.add_config("j2_max", o.j2_max);
    r.add_config("j2_steps", o.j2_steps);
    echo_g_axis(r, o);
    r.columns = {"g", "J2", "phase", "branch_q", "abs_alpha", "corr", "boundary", "error"};
    const auto gs = g_axis(o);
    const auto js = linspace(o.j2_min, o.j2_max, o.j2_steps);
    const double dg = gs.size() > 1 ? gs[1] - gs[0] : 0.0, dj = js[1] - js[0];
    r.rows = parallel_map<std::vector<Cell>>(gs.size() * js.size(), o.threads, [&](std::size_t k) {
        const double g = gs[k / js.size()], j2 = js[k % js.size()];
        ModelParams p = base;
        p.j2 = j2;
        p = at_coupling(p, g);
        try {
            const auto pt = classify_phase(p, g);
            const double gc = dominant_branch(p).g_c;
            std::string boundary;
            if (std::abs(g - gc) <= 0.5 * dg) boundary = "critical";
            else if (pt.branch && std::abs(j2 - p.j1) <= 0.5 * dj && p.j1 > 0) boundary = "first-order";
            return std::vector<Cell>{g, j2, std::string(to_string(pt.label)), branch_name(pt.branch), pt.abs_alpha,
                                     pt.corr, boundary, std::string{}};
        } catch (const Error& e) {
            return std::vector<Cell>{g, j2, {}, {}, {}, {}, {}, std::string(e.what())};
        }
    });
    return r;
}

Report run_scaling(const Options& o) {
    Report r;
    r.command = "scaling";
    echo_common(r, o);
    r.add_config("delta_min", o.delta_min);
    r.add_config("delta_max", o.delta_max);
    const auto p = o.params();
    const auto q0 = dominant_branch(p).branch;
    r.columns = {"side", "delta", "g", "eps"};
    const double gc = critical_coupling(p, q0);
    for (auto side : {PhaseSide::NP, PhaseSide::SRP}) {
        const auto fit = scaling_fit(p, q0, side, o.delta_min, o.delta_max);
        const std::string name = side == PhaseSide::NP ? "NP" : "SRP";
        for (std::size_t i = 0; i < fit.delta.size(); ++i) {
            const double g = side == PhaseSide::NP ? gc - fit.delta[i] : gc + fit.delta[i];
            r.rows.push_back({name, fit.delta[i], g, fit.epsilon[i]});
        }
        r.add_check("exponent_" + name, std::abs(fit.exponent - 0.5) <= 0.02, fit.exponent,
                    "branch " + q0.name() + ", expect 0.5 +- 0.02");
    }
    return r;
}

void echo_gauge(Report& r, const Options& o) {
    const auto p = o.params();
    r.add_config("omega", p.omega);
    r.add_config("Omega", p.Omega);
    r.add_config("j1", p.j1);
    r.add_config("j10", o.j10);
    r.add_config("theta", o.theta);
}

Report run_gauge_afrp(const Options& o) {
    Report r;
    r.command = "gauge map-afrp";
    echo_gauge(r, o);
    const GaugeParams gp{o.j10, o.theta};
    gp.validate();
    ModelParams sq = o.params();
    sq.j2 = map_afrp(sq.j1, gp);
    const double gc_sq = critical_coupling(sq, MomentumBranch::pi());
    const double gc_ring = qrr_critical_coupling(gp, sq, MomentumBranch::pi());
    r.columns = {"j1", "j10", "theta", "j2", "g_c_square_pi", "g_c_ring_pi"};
    r.rows.push_back({sq.j1, o.j10, o.theta, sq.j2, gc_sq, gc_ring});
    r.add_check("g_c_pi_match", std::abs(gc_sq - gc_ring) < 1e-12, std::abs(gc_sq - gc_ring));
    return r;
}

Report run_gauge_frustrated(const Options& o) {
    Report r;
    r.command = "gauge map-frustrated";
    echo_gauge(r, o);
    echo_g_axis(r, o);
    const GaugeParams gp{o.j10, o.theta};
    gp.validate();
    const auto p = o.params();
    const double gc = qrr_critical_coupling(gp, p, MomentumBranch::three_half_pi());
    r.add_config("g_c_ring", gc);
    r.columns = {"g", "regime", "j2", "eps_square", "eps_ring", "residual", "g_prime_mismatch", "error"};
    double worst = 0.0;
    for (double g : g_axis(o)) {
        const Regime regime = g < gc ? Regime::NP : Regime::SRP;
        try {
            const auto c = verify_equivalence(gp, p, g, GaugeMap::Frustrated, regime);
            worst = std::max(worst, c.residual);
            Cell mismatch;
            if (c.g_prime_mismatch) mismatch = *c.g_prime_mismatch;
            r.rows.push_back({g, std::string(to_string(regime)), c.j2, c.square_energy, c.ring_energy, c.residual,
                              mismatch, std::string{}});
        } catch (const Error& e) {
            r.rows.push_back({g, std::string(to_string(regime)), {}, {}, {}, {}, {}, std::string(e.what())});
        }
    }
    r.add_check("eps_3pi2_residual", worst < 1e-12, worst);
    return r;
}

Report run_gauge_triple(const Options& o) {
    Report r;
    r.command = "gauge triple";
    r.add_config("omega", o.omega);
    r.add_config("j10", o.j10);
    const auto tp = triple_point(o.j10, o.omega);
    r.columns = {"j10", "theta_c", "j1", "j1_from_sin"};
    r.rows.push_back({o.j10, tp.theta_c, tp.j1_from_cos, tp.j1_from_sin});
    const double d = std::abs(tp.j1_from_cos - tp.j1_from_sin);
    r.add_check("j1_consistency", d < 1e-12, d, "2 J10 cos = 4 J10^2 sin^2 / omega");
    return r;
}

Report run_gauge_verify(const Options& o) {
    Report r;
    r.command = "gauge verify";
    echo_gauge(r, o);
    const GaugeParams gp{o.j10, o.theta};
    gp.validate();
    const auto p = o.params();
    r.columns = {"map", "regime", "g_lo", "g_hi", "points", "max_residual"};
    auto add = [&](GaugeMap map, double gc) {
        for (auto regime : {Regime::NP, Regime::SRP}) {
            const double lo = regime == Regime::NP ? 0.0 : gc + 1e-3;
            const double hi = regime == Regime::NP ? gc - 1e-3 : 1.0;
            const double res = equivalence_residual(gp, p, map, regime, lo, hi, 50);
            r.rows.push_back({std::string(to_string(map)), std::string(to_string(regime)), lo, hi,
                              std::int64_t{50}, res});
            r.add_check(std::string(to_string(map)) + "_" + to_string(regime), res < 1e-12, res);
        }
    };
    ModelParams sq = p;
    sq.j2 = map_afrp(p.j1, gp);
    add(GaugeMap::AFRP, critical_coupling(sq, MomentumBranch::pi()));
    if (p.j1 < 0) {
        sq.j2 = negative_j1_map(p.j1, gp);
        add(GaugeMap::FRP, critical_coupling(sq, MomentumBranch::zero()));
    }
    add(GaugeMap::Frustrated, qrr_critical_coupling(gp, p, MomentumBranch::three_half_pi()));
    return r;
}

Report run_spin(const Options& o) {
    Report r;
    r.command = "spin";
    const auto base = o.params();
    r.add_config("omega", base.omega);
    r.add_config("Omega", base.Omega);
    r.add_config("j1", base.j1);
    r.add_config("j2_min", o.j2_min);
    r.add_config("j2_max", o.j2_max);
    r.add_config("j2_steps", o.j2_steps);
    echo_g_axis(r, o);
    r.add_config("seed", static_cast<std::int64_t>(o.seed));
    r.add_config("starts", o.starts);
    r.columns = {"g", "J2", "branch", "x_value", "e_branch", "e_min", "delta", "grad_norm", "spin_pattern",
                 "displacement_pattern", "match", "error"};
    const auto gs = g_axis(o);
    const auto js = linspace(o.j2_min, o.j2_max, o.j2_steps);
    SpinMinimizerOptions mo;
    mo.seed = o.seed;
    mo.starts = o.starts;
    struct Out {
        std::vector<Cell> row;
        double delta{};
        bool srp{false}, match{true}, failed{false};
    };
    const auto outs = parallel_map<Out>(gs.size() * js.size(), o.threads, [&](std::size_t k) {
        Out out;
        const double g = gs[k / js.size()], j2 = js[k % js.size()];
        ModelParams p = base;
        p.j2 = j2;
        p = at_coupling(p, g);
        try {
            const auto best = best_spin_branch(p, g);
            const auto m = minimize_spin_energy(p, g, mo);
            const auto cmp = compare_to_displacements(p, g);
            out.delta = std::abs(m.energy - best.energy);
            out.srp = cmp.displacement_branch.has_value();
            if (out.srp && !cmp.tie) out.match = cmp.ok() && m.config.pattern(1e-4) == cmp.displacement_pattern;
            else out.match = cmp.ok();
            out.row = {g,
                       j2,
                       std::string(best.below_critical ? "NP" : to_string(best.branch)),
                       best.x_value,
                       best.energy,
                       m.energy,
                       out.delta,
                       m.gradient_norm,
                       std::string(to_string(m.config.pattern(1e-4))),
                       std::string(to_string(cmp.displacement_pattern)),
                       out.match,
                       std::string{}};
        } catch (const Error& e) {
            out.failed = true;
            out.row = {g, j2, {}, {}, {}, {}, {}, {}, {}, {}, {}, std::string(e.what())};
        }
        return out;
    });
    double worst = 0.0;
    int mismatches = 0, errors = 0;
    for (const auto& out : outs) {
        r.rows.push_back(out.row);
        worst = std::max(worst, out.delta);
        mismatches += !out.match;
        errors += out.failed;
    }
    r.add_check("minimizer_vs_branch", worst < 1e-8 && errors == 0, worst, "max |E_min - E_branch|");
    r.add_check("sign_patterns", mismatches == 0, mismatches, "points where spin and displacement patterns differ");
    return r;
}

Report run_ed_compare(const Options& o) {
    Report r;
    r.command = "ed-compare";
    echo_common(r, o);
    echo_g_axis(r, o);
    r.add_config("nc", o.nc);
    const auto base = o.params();
    const FockSpace f(o.nc);
    const double gc = dominant_branch(base).g_c;
    r.add_config("g_c", gc);
    r.columns = {"g", "frame", "branch_q", "infidelity", "manifold_dim", "E_ed", "E_mf", "unitarity_loss", "warning",
                 "error"};
    const auto gs = g_axis(o);
    if (!o.dump_dir.empty()) std::filesystem::create_directories(o.dump_dir);
    struct Out {
        std::vector<Cell> row;
        double infidelity{std::numeric_limits<double>::quiet_NaN()};
    };
    const auto outs = parallel_map<Out>(gs.size(), ed_workers(o, f), [&](std::size_t i) {
        Out out;
        const double g = gs[i];
        try {
            const auto v = meanfield_validity(base, g, f, o.eigen());
            out.infidelity = v.infidelity;
            out.row = {g,
                       std::string(to_string(v.frame)),
                       branch_name(v.branch),
                       v.infidelity,
                       std::int64_t{v.manifold_dim},
                       v.ed_energy,
                       v.mf_energy,
                       v.unitarity_loss,
                       v.warning,
                       std::string{}};
            if (!o.dump_dir.empty())
                save_state(o.dump_dir + "/ground_" + std::to_string(i) + ".qrs", f, v.ground);
            if (o.verbose) std::cerr << "ed-compare g=" << format_double(g) << " " << v.seconds << " s\n";
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NoConvergence) throw;
            out.row = {g, {}, {}, {}, {}, {}, {}, {}, {}, std::string(e.what())};
        }
        return out;
    });
    double worst_far = 0.0, peak = -1.0, g_peak = 0.0;
    int errors = 0;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        r.rows.push_back(outs[i].row);
        const double inf = outs[i].infidelity;
        if (std::isnan(inf)) {
            ++errors;
            continue;
        }
        if (std::abs(gs[i] - gc) > 0.1) worst_far = std::max(worst_far, inf);
        if (inf > peak) {
            peak = inf;
            g_peak = gs[i];
        }
    }
    r.add_check("infidelity_far_from_gc", worst_far < 0.05 && errors == 0, worst_far, "max 1-f for |g-g_c|>0.1");
    if (gs.size() > 2) {
        const double spacing = (gs.back() - gs.front()) / static_cast<double>(gs.size() - 1);
        const double window = std::max(0.05, spacing);
        r.add_check("infidelity_peak_near_gc", std::abs(g_peak - gc) <= window, g_peak,
                    "argmax 1-f within " + format_double(window) + " of g_c");
    }
    return r;
}

// ---------------------------------------------------------------------------

int emit(const Report& r, const Options& o) {
    auto write = [&](std::ostream& os) {
        if (o.format == "json") write_json(os, r);
        else write_csv(os, r);
    };
    if (o.out == "-") {
        write(std::cout);
    } else {
        std::ofstream os(o.out);
        if (!os) {
            std::cerr << "qrs: cannot open " << o.out << "\n";
            return kExitUsage;
        }
        write(os);
    }
    for (const auto& c : r.checks)
        if (!c.pass) std::cerr << "qrs: check failed: " << c.name << " (" << format_double(c.value) << ")\n";
    return r.all_pass() ? 0 : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Rabi square: critical points, sweeps, gauge maps, spin picture and ED checks"};
    app.fallthrough();
    app.require_subcommand(1);
    Options o;

    auto* omega_grp = app.add_option_group("frequencies");
    omega_grp->add_option("--omega", o.omega, "cavity frequency")->check(CLI::PositiveNumber);
    auto* big = omega_grp->add_option("--Omega", o.Omega, "qubit splitting")->check(CLI::PositiveNumber);
    omega_grp->add_option("--ratio", o.ratio, "Omega/omega (sets Omega)")->excludes(big)->check(CLI::PositiveNumber);
    auto* g_opt = app.add_option("--g", o.g, "single dimensionless coupling");
    app.add_option("--lambda", o.lambda, "single bare coupling (g = lambda / sqrt(Omega omega))")->excludes(g_opt);
    app.add_option("--j1", o.j1, "nearest-neighbour hopping");
    app.add_option("--j2", o.j2, "diagonal hopping");
    app.add_option("--j10", o.j10, "ring hopping magnitude");
    app.add_option("--theta", o.theta, "ring gauge phase in [0, 2 pi)");
    app.add_option("--nc", o.nc, "photon states per cavity")->check(CLI::Range(2, 12));
    app.add_option("--method", o.method, "analytic | ed | both")->check(CLI::IsMember({"analytic", "ed", "both"}));
    app.add_option("--steps", o.steps, "points on the g axis");
    app.add_option("--g-min", o.g_min);
    app.add_option("--g-max", o.g_max);
    app.add_option("--j2-steps", o.j2_steps, "points on the J2 axis");
    app.add_option("--j2-min", o.j2_min);
    app.add_option("--j2-max", o.j2_max);
    app.add_option("--delta-min", o.delta_min, "scaling window lower offset");
    app.add_option("--delta-max", o.delta_max, "scaling window upper offset");
    app.add_option("--out", o.out, "output file, - for stdout");
    app.add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", o.seed, "spin minimiser seed");
    app.add_option("--starts", o.starts, "spin minimiser starts")->check(CLI::PositiveNumber);
    app.add_option("--memory-cap", o.memory_cap_mb, "MB available to concurrent ED jobs")->check(CLI::PositiveNumber);
    app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", o.verbose, "progress on stderr");

    Report (*selected)(const Options&) = nullptr;
    auto sub = [&](CLI::App* parent, const char* name, const char* help, Report (*fn)(const Options&)) {
        parent->add_subcommand(name, help)->callback([&selected, fn] { selected = fn; });
    };
    sub(&app, "critical", "g_c per branch and the dominant branch", run_critical);
    sub(&app, "sweep", "phase, E_g, |alpha|, corr and eps_min over g", run_sweep);
    sub(&app, "phase-diagram", "(J2, g) grid of phases", run_phase_diagram);
    sub(&app, "scaling", "critical exponent of the gap on both sides", run_scaling);
    auto* gauge = app.add_subcommand("gauge", "ring-square gauge correspondence");
    gauge->require_subcommand(1);
    sub(gauge, "map-afrp", "J2 matching the pi branch", run_gauge_afrp);
    sub(gauge, "map-frustrated", "J2(g) matching the 3pi/2 branch", run_gauge_frustrated);
    sub(gauge, "triple", "triple point of the ring", run_gauge_triple);
    sub(gauge, "verify", "spectral residuals of the maps on 50-point grids", run_gauge_verify);
    sub(&app, "spin", "spin-picture minimiser vs analytic branches", run_spin);
    auto* edc = app.add_subcommand("ed-compare", "mean-field fidelity against exact diagonalisation");
    edc->add_option("--dump-dir", o.dump_dir, "write ED ground states as QRS1 dumps");
    edc->callback([&selected] { selected = run_ed_compare; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        return emit(selected(o), o);
    } catch (const UsageError& e) {
        std::cerr << "qrs: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "qrs: " << e.what() << "\n";
        return e.kind() == ErrorKind::NoConvergence ? kExitNoConvergence : kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "qrs: " << e.what() << "\n";
        return kExitDomain;
    }
}
