#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>

#include "jmix/errors.hpp"
#include "jmix/parallel.hpp"

namespace jmix {

struct SimplexOptions {
    int restarts = 8;
    std::uint64_t seed = 20240611;
    int max_evaluations = 4000;  // per restart
    double size_tolerance = 1e-9; // simplex size in the unbounded coordinates
    double initial_step = 0.2;
    int polish_rounds = 2; // re-seed the simplex at the optimum this many times
    bool concurrent = true;
};

struct OptimizeResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
    int evaluations = 0;
    int best_restart = -1;
};

namespace detail {

// x = lo + (hi - lo)(1 + sin u)/2 keeps every trial point inside the box.
struct BoxMap {
    std::vector<double> lo, hi;
    [[nodiscard]] double to_box(std::size_t i, double u) const { return lo[i] + (hi[i] - lo[i]) * 0.5 * (1.0 + std::sin(u)); }
    [[nodiscard]] double to_free(std::size_t i, double x) const {
        const double t = std::clamp(2.0 * (x - lo[i]) / (hi[i] - lo[i]) - 1.0, -1.0, 1.0);
        return std::asin(t);
    }
};

struct GslCall {
    const std::function<double(const std::vector<double>&)>* f;
    const BoxMap* map;
    std::vector<double> x;
    int evaluations = 0;
};

inline double gsl_trampoline(const gsl_vector* u, void* params) {
    auto* c = static_cast<GslCall*>(params);
    for (std::size_t i = 0; i < c->x.size(); ++i) c->x[i] = c->map->to_box(i, gsl_vector_get(u, i));
    ++c->evaluations;
    const double v = (*c->f)(c->x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

inline OptimizeResult simplex_run(const std::function<double(const std::vector<double>&)>& f, const BoxMap& map,
                                  const std::vector<double>& start, const SimplexOptions& opt) {
    const std::size_t n = start.size();
    GslCall call{&f, &map, std::vector<double>(n), 0};
    OptimizeResult res;
    if (n == 0) {
        res.x = start;
        res.value = f(start);
        res.evaluations = 1;
        res.converged = true;
        return res;
    }
    gsl_multimin_function fn{&gsl_trampoline, n, &call};
    gsl_vector* u = gsl_vector_alloc(n);
    gsl_vector* step = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(u, i, map.to_free(i, start[i]));
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    bool converged = false;
    for (int round = 0; round <= opt.polish_rounds && call.evaluations < opt.max_evaluations; ++round) {
        gsl_vector_set_all(step, round == 0 ? opt.initial_step : opt.initial_step * 0.1);
        gsl_multimin_fminimizer_set(s, &fn, u, step);
        converged = false;
        while (call.evaluations < opt.max_evaluations) {
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.size_tolerance) == GSL_SUCCESS) {
                converged = true;
                break;
            }
        }
        gsl_vector_memcpy(u, gsl_multimin_fminimizer_x(s));
    }
    res.value = gsl_multimin_fminimizer_minimum(s);
    res.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.x[i] = map.to_box(i, gsl_vector_get(u, i));
    res.converged = converged;
    res.evaluations = call.evaluations;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(u);
    return res;
}

} // namespace detail

// Bounded Nelder-Mead with deterministic multistart. Restart 0 starts at x0;
// the others start from seeded uniform draws in the box. Returns every
// restart's end point in restart order.
[[nodiscard]] inline std::vector<OptimizeResult> minimize_bounded_runs(
    const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x0,
    const std::vector<double>& lower, const std::vector<double>& upper, const SimplexOptions& opt = {}) {
    const std::size_t n = x0.size();
    if (lower.size() != n || upper.size() != n) throw infeasible_bounds_error("bound vectors differ in length from x0");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] < upper[i])) throw infeasible_bounds_error("lower bound must be below upper bound");
        if (!(x0[i] >= lower[i] && x0[i] <= upper[i])) throw infeasible_bounds_error("initial point is outside the bounds");
    }
    if (opt.restarts < 1) throw domain_error("at least one restart is required");
    gsl_set_error_handler_off();
    const detail::BoxMap map{lower, upper};

    std::vector<std::vector<double>> starts(static_cast<std::size_t>(opt.restarts), x0);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t r = 1; r < starts.size(); ++r)
        for (std::size_t i = 0; i < n; ++i) starts[r][i] = lower[i] + (upper[i] - lower[i]) * unit(rng);

    std::vector<OptimizeResult> runs(starts.size());
    parallel_for(
        starts.size(), [&](std::size_t r) { runs[r] = detail::simplex_run(f, map, starts[r], opt); },
        opt.concurrent ? thread_count() : 1u);
    for (std::size_t r = 0; r < runs.size(); ++r) runs[r].best_restart = static_cast<int>(r);
    return runs;
}

// Best of the runs (ties to the lower index), or x0 itself if nothing beats it.
[[nodiscard]] inline OptimizeResult select_best(const std::vector<OptimizeResult>& runs, const std::vector<double>& x0,
                                                double value_at_x0) {
    OptimizeResult best;
    best.x = x0;
    best.value = value_at_x0;
    int evaluations = 1;
    for (const auto& run : runs) {
        evaluations += run.evaluations;
        if (run.value < best.value) best = run;
    }
    if (best.x == x0 && best.best_restart < 0) {
        best.best_restart = -1;
        best.converged = !runs.empty() && runs[0].converged;
    }
    best.evaluations = evaluations;
    return best;
}

[[nodiscard]] inline OptimizeResult minimize_bounded(const std::function<double(const std::vector<double>&)>& f,
                                                     const std::vector<double>& x0, const std::vector<double>& lower,
                                                     const std::vector<double>& upper, const SimplexOptions& opt = {}) {
    const auto runs = minimize_bounded_runs(f, x0, lower, upper, opt);
    return select_best(runs, x0, f(x0));
}

namespace detail {
struct LsqCall {
    const std::function<std::vector<double>(const std::vector<double>&)>* r;
    const BoxMap* map;
    std::vector<double> x;
    std::size_t n_resid = 0;
    int evaluations = 0;
};

inline int lsq_trampoline(const gsl_vector* u, void* params, gsl_vector* out) {
    auto* c = static_cast<LsqCall*>(params);
    for (std::size_t i = 0; i < c->x.size(); ++i) c->x[i] = c->map->to_box(i, gsl_vector_get(u, i));
    ++c->evaluations;
    const auto r = (*c->r)(c->x);
    if (r.size() != c->n_resid) return GSL_EBADLEN;
    for (std::size_t k = 0; k < r.size(); ++k) gsl_vector_set(out, k, std::isfinite(r[k]) ? r[k] : 1e30);
    return GSL_SUCCESS;
}
// Forward differences with a fixed step in the unbounded coordinates; GSL's
// default step is relative to |u| and collapses near the box centre (u = 0).
inline int lsq_jacobian(const gsl_vector* u, void* params, gsl_matrix* jac) {
    auto* c = static_cast<LsqCall*>(params);
    constexpr double h = 1e-6;
    const std::size_t p = u->size;
    gsl_vector* base = gsl_vector_alloc(c->n_resid);
    gsl_vector* bumped = gsl_vector_alloc(c->n_resid);
    gsl_vector* up = gsl_vector_alloc(p);
    int status = lsq_trampoline(u, params, base);
    for (std::size_t j = 0; j < p && status == GSL_SUCCESS; ++j) {
        gsl_vector_memcpy(up, u);
        gsl_vector_set(up, j, gsl_vector_get(u, j) + h);
        status = lsq_trampoline(up, params, bumped);
        for (std::size_t k = 0; k < c->n_resid; ++k)
            gsl_matrix_set(jac, k, j, (gsl_vector_get(bumped, k) - gsl_vector_get(base, k)) / h);
    }
    gsl_vector_free(up);
    gsl_vector_free(bumped);
    gsl_vector_free(base);
    return status;
}
} // namespace detail

// Trust-region Levenberg-Marquardt with a finite-difference Jacobian, run in
// the same box-mapped coordinates as the simplex. Used to finish a simplex
// search on sum-of-squares objectives; the caller keeps whichever is better.
[[nodiscard]] inline OptimizeResult polish_least_squares(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals, const std::vector<double>& x0,
    const std::vector<double>& lower, const std::vector<double>& upper, int max_iterations = 200) {
    const std::size_t p = x0.size();
    OptimizeResult res;
    res.x = x0;
    const auto r0 = residuals(x0);
    auto sum_sq = [](const std::vector<double>& r) {
        double s = 0.0;
        for (double v : r) s += v * v;
        return s;
    };
    res.value = sum_sq(r0);
    res.evaluations = 1;
    if (p == 0 || r0.size() < p) return res;
    gsl_set_error_handler_off();
    const detail::BoxMap map{lower, upper};
    detail::LsqCall call{&residuals, &map, std::vector<double>(p), r0.size(), 0};
    gsl_multifit_nlinear_fdf fdf{};
    fdf.f = &detail::lsq_trampoline;
    fdf.df = &detail::lsq_jacobian;
    fdf.fvv = nullptr;
    fdf.n = r0.size();
    fdf.p = p;
    fdf.params = &call;
    auto params = gsl_multifit_nlinear_default_parameters();
    gsl_multifit_nlinear_workspace* w = gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, fdf.n, p);
    gsl_vector* u = gsl_vector_alloc(p);
    for (std::size_t i = 0; i < p; ++i) {
        // Keep strictly inside the box so the sine map has a nonzero slope.
        const double t = std::clamp(2.0 * (x0[i] - lower[i]) / (upper[i] - lower[i]) - 1.0, -0.999, 0.999);
        gsl_vector_set(u, i, std::asin(t));
    }
    int info = 0;
    if (gsl_multifit_nlinear_init(u, &fdf, w) == GSL_SUCCESS) {
        const int status = gsl_multifit_nlinear_driver(static_cast<std::size_t>(max_iterations), 1e-14, 1e-14, 1e-14,
                                                       nullptr, nullptr, &info, w);
        const gsl_vector* x = gsl_multifit_nlinear_position(w);
        std::vector<double> xb(p);
        for (std::size_t i = 0; i < p; ++i) xb[i] = map.to_box(i, gsl_vector_get(x, i));
        const double v = sum_sq(residuals(xb));
        if (v < res.value) {
            res.x = xb;
            res.value = v;
        }
        res.converged = status == GSL_SUCCESS;
    }
    res.evaluations += call.evaluations;
    gsl_vector_free(u);
    gsl_multifit_nlinear_free(w);
    return res;
}

} // namespace jmix
