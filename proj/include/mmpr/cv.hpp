#pragma once
#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>
#include <mmpr/model.hpp>
#include <mmpr/rng.hpp>
#include <mmpr/solver.hpp>
#include <mmpr/tuner.hpp>

namespace mmpr {

struct CvResult
{
    double lambda = 0.0;
    std::size_t index = 0;
    std::vector<double> grid;
    std::vector<double> cv_mse;
};

/// Seeded shuffle of 0..n-1 cut into contiguous blocks; returns the fold of each row.
inline std::vector<int> shuffled_folds(Index n, int folds, std::uint64_t seed)
{
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    for (Index pos = 0; pos < n; ++pos)
        fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] =
            static_cast<int>((pos * folds) / n);
    return fold_of;
}

/**
 * K-fold cross-validated single-model lasso (M = 1, c = 1) over a descending
 * lambda grid. Training folds keep the full-data column scaling and are
 * re-centered, so lambda means the same thing in every fold.
 */
inline CvResult lasso_cv(const StandardizedDesign& design, const std::vector<int>& fold_of,
                         std::vector<double> grid = {}, double eps = 1e-6, int max_sweeps = 10000)
{
    const Index n = design.n();
    const Index p = design.p();
    if (static_cast<Index>(fold_of.size()) != n) throw DimensionMismatch("fold assignment length differs from n");
    const int folds = fold_of.empty() ? 0 : *std::max_element(fold_of.begin(), fold_of.end()) + 1;
    if (folds < 2) throw InvalidConfig("cross-validation needs at least 2 folds");
    if (grid.empty()) grid = default_lambda_grid(lambda_max(design, 1));

    CvResult out;
    out.grid = grid;
    out.cv_mse.assign(grid.size(), 0.0);
    int used = 0;
    for (int f = 0; f < folds; ++f) {
        std::vector<Index> train, test;
        for (Index l = 0; l < n; ++l) (fold_of[static_cast<std::size_t>(l)] == f ? test : train).push_back(l);
        if (test.empty()) continue;
        if (train.size() < 2) throw InvalidConfig("fold " + std::to_string(f) + " leaves fewer than 2 training rows");
        ++used;

        const auto nt = static_cast<Index>(train.size());
        StandardizedDesign td;
        td.Xs.resize(nt, p);
        td.ys.resize(nt);
        for (Index a = 0; a < nt; ++a) {
            td.Xs.row(a) = design.Xs.row(train[static_cast<std::size_t>(a)]);
            td.ys(a) = design.ys(train[static_cast<std::size_t>(a)]);
        }
        const Vector xmean = td.Xs.colwise().mean().transpose();
        const double ymean = td.ys.mean();
        td.Xs.rowwise() -= xmean.transpose();
        td.ys.array() -= ymean;
        td.col_norms = Vector::Ones(p);
        td.col_means = Vector::Zero(p);

        SolveControls controls;
        controls.zeros_start = false;
        CoefficientSet current = CoefficientSet::zeros(1, p);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            controls.warm = current;
            const auto fit = solve(td, PenaltyConfig{1, 1, 1, grid[g], 0.0, eps, max_sweeps}, controls);
            current = fit.coef;
            const Vector b = current.beta.row(0).transpose();
            double err = 0.0;
            for (const Index l : test) {
                const double pred = (design.Xs.row(l).transpose() - xmean).dot(b) + ymean;
                const double e = design.ys(l) - pred;
                err += e * e;
            }
            out.cv_mse[g] += err;
        }
    }
    if (used < 2) throw InvalidConfig("cross-validation needs at least 2 non-empty folds");
    for (auto& e : out.cv_mse) e /= static_cast<double>(n);

    out.index = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (out.cv_mse[g] < out.cv_mse[out.index]) out.index = g;
    out.lambda = grid[out.index];
    return out;
}

inline CvResult lasso_cv(const StandardizedDesign& design, int folds, std::uint64_t seed,
                         std::vector<double> grid = {})
{
    if (folds < 2 || folds > design.n()) throw InvalidConfig("need 2 <= folds <= n");
    return lasso_cv(design, shuffled_folds(design.n(), folds, seed), std::move(grid));
}

/// Lambda minimizing k-fold CV error of the single-model lasso.
inline double lasso_cv_lambda(const StandardizedDesign& design, int folds = 10, std::uint64_t seed = 0)
{
    return lasso_cv(design, folds, seed).lambda;
}

} // namespace mmpr
