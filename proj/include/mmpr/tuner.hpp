#pragma once
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>
#include <mmpr/metrics.hpp>
#include <mmpr/model.hpp>
#include <mmpr/solver.hpp>

namespace mmpr {

/// Smallest omega tried by the similarity search after omega = 0.
inline constexpr double omega_search_floor = 1e-4;

struct PathSpec
{
    int models = 1;
    int c = 1;
    int d = 1;
    std::vector<double> lambda_grid;  // empty: default_lambda_grid(lambda_max)
    double rho_thresh = 0.3;
    double omega_max = 1e6;
    double omega_tol = 1e-2;
    double eps = 1e-6;
    int max_sweeps = 10000;
    /// Start policy for every probe; the warm start is filled in by the tuner.
    SolveControls controls;

    PenaltyConfig penalty(double lambda, double omega) const
    {
        return {models, c, d, lambda, omega, eps, max_sweeps};
    }

    void validate() const
    {
        penalty(0.0, 0.0).validate();
        if (!(rho_thresh >= 0.0 && rho_thresh <= 1.0)) throw InvalidConfig("rho_thresh must lie in [0, 1]");
        if (!(omega_max > omega_search_floor)) throw InvalidConfig("omega_max must exceed 1e-4");
        if (!(omega_tol > 0.0)) throw InvalidConfig("omega_tol must be > 0");
        for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
            if (!(lambda_grid[g] > 0.0) || !std::isfinite(lambda_grid[g]))
                throw InvalidConfig("lambda grid values must be positive and finite");
            if (g > 0 && !(lambda_grid[g] < lambda_grid[g - 1]))
                throw InvalidConfig("lambda grid must be strictly descending");
        }
    }
};

struct PathRecord
{
    double lambda = 0.0;
    double omega = 0.0;
    CoefficientSet coef;
    double max_pairwise_similarity = 0.0;
    Vector per_model_sse;
    double objective = 0.0;
    bool converged = false;
    bool omega_capped = false;
    bool monotone_violation = false;  // a smaller omega also met the ceiling
    int sweeps = 0;
};

struct PathResult
{
    std::vector<PathRecord> records;
};

/**
 * 2 max_k |x_k' ys|: for c = 1 and omega = 0 the all-zero fit is a fixed
 * point of every coordinate update exactly when lambda >= this value.
 * For c = 2 the same number only anchors the grid.
 */
inline double lambda_max(const StandardizedDesign& design, int /*c*/)
{
    // same column-wise reduction as the coordinate update, so the boundary is exact
    double m = 0.0;
    for (Index k = 0; k < design.p(); ++k) m = std::max(m, std::abs(design.Xs.col(k).dot(design.ys)));
    return 2.0 * m;
}

/// count log-spaced values from lmax down to min_ratio * lmax.
inline std::vector<double> default_lambda_grid(double lmax, int count = 50, double min_ratio = 1e-3)
{
    if (!(lmax > 0.0))
        throw Error(ErrorClass::data, "DegenerateResponse",
                    "response is uncorrelated with every covariate; no lambda grid exists");
    if (count < 1) throw InvalidConfig("lambda grid needs at least one point");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw InvalidConfig("lambda min ratio must lie in (0, 1)");
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double lo = std::log(min_ratio);
    for (int g = 0; g < count; ++g) {
        const double t = count == 1 ? 0.0 : static_cast<double>(g) / (count - 1);
        grid[static_cast<std::size_t>(g)] = lmax * std::exp(t * lo);
    }
    grid.front() = lmax;
    return grid;
}

inline std::vector<double> resolve_grid(const StandardizedDesign& design, const PathSpec& spec)
{
    if (!spec.lambda_grid.empty()) return spec.lambda_grid;
    return default_lambda_grid(lambda_max(design, spec.c));
}

struct TuneResult
{
    double omega = 0.0;
    SolveResult fit;
    double max_similarity = 0.0;
    bool omega_capped = false;
    bool monotone_violation = false;
    int probes = 0;
};

/**
 * Smallest omega whose fit keeps max_{i<j} cos(|b_i|, |b_j|) <= rho_thresh.
 *
 * Tries omega = 0, then doubles from 1e-4 until the ceiling holds or
 * omega_max is reached, then bisects (geometrically) the bracketing pair
 * until its relative width is below omega_tol. The satisfying end is
 * returned. If even omega_max violates the ceiling the omega_max fit comes
 * back with omega_capped set.
 */
inline TuneResult tune_omega(const StandardizedDesign& design, double lambda, const PathSpec& spec,
                             const std::optional<CoefficientSet>& warm = std::nullopt)
{
    if (!(lambda > 0.0)) throw InvalidConfig("lambda must be > 0 for omega tuning");
    SolveControls controls = spec.controls;
    if (warm) controls.warm = warm;

    TuneResult out;
    auto probe = [&](double omega) {
        ++out.probes;
        auto fit = solve(design, spec.penalty(lambda, omega), controls);
        const double sim = max_pairwise_similarity(fit.coef);
        return std::pair{std::move(fit), sim};
    };
    auto ok = [&](double sim) { return sim <= spec.rho_thresh; };
    auto accept = [&](double omega, SolveResult fit, double sim) {
        out.omega = omega;
        out.fit = std::move(fit);
        out.max_similarity = sim;
    };

    auto [fit0, sim0] = probe(0.0);
    if (ok(sim0) || spec.models == 1) {
        accept(0.0, std::move(fit0), sim0);
        return out;
    }

    double lo = 0.0;
    double hi = omega_search_floor;
    std::optional<std::pair<SolveResult, double>> hi_fit;
    while (true) {
        auto res = probe(hi);
        if (ok(res.second)) {
            hi_fit = std::move(res);
            break;
        }
        if (hi >= spec.omega_max) {
            accept(hi, std::move(res.first), res.second);
            out.omega_capped = true;
            return out;
        }
        lo = hi;
        hi = std::min(2.0 * hi, spec.omega_max);
    }

    if (lo > 0.0) {
        while (hi - lo > spec.omega_tol * hi) {
            const double mid = std::sqrt(lo * hi);
            auto res = probe(mid);
            if (ok(res.second)) {
                hi = mid;
                hi_fit = std::move(res);
            } else {
                lo = mid;
            }
        }
    }
    accept(hi, std::move(hi_fit->first), hi_fit->second);

    if (hi > omega_search_floor) {
        auto below = probe(hi / (1.0 + 2.0 * spec.omega_tol));
        out.monotone_violation = ok(below.second);
    }
    return out;
}

inline PathRecord make_record(const StandardizedDesign& design, double lambda, TuneResult tuned)
{
    PathRecord rec;
    rec.lambda = lambda;
    rec.omega = tuned.omega;
    rec.max_pairwise_similarity = tuned.max_similarity;
    rec.per_model_sse = per_model_sse(design, tuned.fit.coef);
    rec.objective = tuned.fit.objective;
    rec.converged = tuned.fit.converged;
    rec.omega_capped = tuned.omega_capped;
    rec.monotone_violation = tuned.monotone_violation;
    rec.sweeps = tuned.fit.sweeps;
    rec.coef = std::move(tuned.fit.coef);
    return rec;
}

/**
 * Regularization path from the largest to the smallest lambda. Each lambda
 * gets its own omega search, warm-started from the previous record.
 */
inline PathResult fit_path(const StandardizedDesign& design, const PathSpec& spec)
{
    spec.validate();
    const auto grid = resolve_grid(design, spec);
    PathResult path;
    path.records.reserve(grid.size());
    std::optional<CoefficientSet> warm;
    for (const double lambda : grid) {
        path.records.push_back(make_record(design, lambda, tune_omega(design, lambda, spec, warm)));
        warm = path.records.back().coef;
    }
    return path;
}

} // namespace mmpr
