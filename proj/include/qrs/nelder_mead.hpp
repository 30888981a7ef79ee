// nelder_mead.hpp: derivative-free simplex minimiser with restarts

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace qrs {

struct NelderMeadOptions {
    double initial_step{0.5};
    double f_tol{1e-15};    // relative spread of simplex values
    double x_tol{1e-12};    // simplex diameter
    int max_evaluations{200000};
    int restarts{6};        // rebuild the simplex around the best vertex
};

struct NelderMeadResult {
    std::vector<double> x;
    double value{};
    int evaluations{};
};

template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    std::vector<double> best = x0;
    double best_value = eval(best);
    double step = opt.initial_step;

    for (int round = 0; round <= opt.restarts; ++round) {
        std::vector<std::vector<double>> simplex(n + 1, best);
        std::vector<double> values(n + 1);
        values[0] = best_value;
        for (std::size_t i = 0; i < n; ++i) {
            simplex[i + 1][i] += step;
            values[i + 1] = eval(simplex[i + 1]);
        }
        std::vector<std::size_t> order(n + 1);
        std::vector<double> centroid(n), trial(n), trial2(n);

        while (evals < opt.max_evaluations) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
            const std::size_t lo = order.front(), hi = order.back(), next_hi = order[n - 1];

            double diameter = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[lo][k]));
            const double spread = std::abs(values[hi] - values[lo]);
            if (spread <= opt.f_tol * (std::abs(values[lo]) + 1e-300) && diameter <= opt.x_tol)
                break;
            if (diameter <= 1e-3 * opt.x_tol) break;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == hi) continue;
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / n;
            }
            for (std::size_t k = 0; k < n; ++k)
                trial[k] = centroid[k] + (centroid[k] - simplex[hi][k]);
            const double fr = eval(trial);
            if (fr < values[lo]) {
                for (std::size_t k = 0; k < n; ++k)
                    trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[hi][k]);
                const double fe = eval(trial2);
                if (fe < fr) {
                    simplex[hi] = trial2;
                    values[hi] = fe;
                } else {
                    simplex[hi] = trial;
                    values[hi] = fr;
                }
                continue;
            }
            if (fr < values[next_hi]) {
                simplex[hi] = trial;
                values[hi] = fr;
                continue;
            }
            const bool outside = fr < values[hi];
            for (std::size_t k = 0; k < n; ++k) {
                const double toward = outside ? trial[k] : simplex[hi][k];
                trial2[k] = centroid[k] + 0.5 * (toward - centroid[k]);
            }
            const double fc = eval(trial2);
            if (fc < std::min(fr, values[hi])) {
                simplex[hi] = trial2;
                values[hi] = fc;
                continue;
            }
            // shrink toward the best vertex
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == lo) continue;
                for (std::size_t k = 0; k < n; ++k)
                    simplex[i][k] = simplex[lo][k] + 0.5 * (simplex[i][k] - simplex[lo][k]);
                values[i] = eval(simplex[i]);
            }
        }
        const auto it = std::min_element(values.begin(), values.end());
        const std::size_t lo = static_cast<std::size_t>(it - values.begin());
        const bool improved = values[lo] < best_value;
        if (values[lo] <= best_value) {
            best_value = values[lo];
            best = simplex[lo];
        }
        if (!improved && round > 0) break;
        step = std::max(1e-4, 0.1 * step);
    }
    return {best, best_value, evals};
}

}  // namespace qrs
