#pragma once
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>
#include <mmpr/model.hpp>

namespace mmpr {

/// a.b / (|a| |b|); 0 when either vector is all zero.
template <class A, class B>
double cosine_similarity(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    if (a.size() != b.size())
        throw LengthMismatch(static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (Index k = 0; k < a.size(); ++k) {
        dot += a(k) * b(k);
        na += a(k) * a(k);
        nb += b(k) * b(k);
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

/// Cosine similarities of |b_i| for every model pair, M x M.
inline Matrix abs_coef_similarity(const CoefficientSet& coef)
{
    const Index m = coef.models();
    const Matrix a = coef.beta.cwiseAbs();
    Matrix s(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = i; j < m; ++j)
            s(i, j) = s(j, i) = cosine_similarity(a.row(i), a.row(j));
    return s;
}

/// max_{i<j} cos(|b_i|, |b_j|); 0 for a single model.
inline double max_pairwise_similarity(const CoefficientSet& coef)
{
    const Index m = coef.models();
    const Matrix a = coef.beta.cwiseAbs();
    double mx = 0.0;
    for (Index i = 0; i < m; ++i)
        for (Index j = i + 1; j < m; ++j)
            mx = std::max(mx, cosine_similarity(a.row(i), a.row(j)));
    return mx;
}

/// Pearson correlation; 0 when either input is constant.
template <class A, class B>
double pearson(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    if (a.size() != b.size())
        throw LengthMismatch(static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()));
    const double ma = a.mean(), mb = b.mean();
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (Index l = 0; l < a.size(); ++l) {
        const double da = a(l) - ma, db = b(l) - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    const double scale = std::max(std::abs(ma), std::abs(mb)) + 1.0;
    const double tiny = 1e-24 * scale * scale * static_cast<double>(a.size());
    if (saa <= tiny || sbb <= tiny) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

struct DiversityReport
{
    Matrix coef_similarity;
    Matrix pred_correlation;
    Vector per_model_mse;
    Vector per_model_sse;
};

inline DiversityReport diversity_report(const StandardizedDesign& design, const CoefficientSet& coef)
{
    check_shapes(design, coef);
    const Index m = coef.models();
    DiversityReport rep;
    rep.coef_similarity = abs_coef_similarity(coef);
    const Matrix fitted = design.Xs * coef.beta.transpose();
    rep.pred_correlation.resize(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = i; j < m; ++j)
            rep.pred_correlation(i, j) = rep.pred_correlation(j, i) =
                pearson(fitted.col(i), fitted.col(j));
    rep.per_model_sse = per_model_sse(design, coef);
    rep.per_model_mse = rep.per_model_sse / static_cast<double>(design.n());
    return rep;
}

/**
 * Canonical model order: descending coefficient L2 norm, ties broken by
 * descending explained sum of squares, then by original index.
 * Returns perm with aligned row r = original row perm[r].
 */
inline std::vector<Index> canonical_order(const StandardizedDesign& design, const CoefficientSet& coef)
{
    const Index m = coef.models();
    Vector norms(m), explained(m);
    const double tss = design.ys.squaredNorm();
    for (Index i = 0; i < m; ++i) {
        norms(i) = coef.beta.row(i).norm();
        explained(i) = tss - model_sse(design, coef.beta.row(i));
    }
    std::vector<Index> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) {
        const double tol = 1e-12 * std::max({1.0, norms(a), norms(b)});
        if (std::abs(norms(a) - norms(b)) > tol) return norms(a) > norms(b);
        return explained(a) > explained(b);
    });
    return perm;
}

inline CoefficientSet align_models(const StandardizedDesign& design, const CoefficientSet& coef)
{
    const auto perm = canonical_order(design, coef);
    CoefficientSet out = coef;
    for (std::size_t r = 0; r < perm.size(); ++r)
        out.beta.row(static_cast<Index>(r)) = coef.beta.row(perm[r]);
    return out;
}

/// Nonzero-coefficient frequencies over aligned replicate fits.
struct InclusionTable
{
    Matrix proportions;   // M x p
    Vector any_model;     // fraction of replicates with the covariate in at least one model
    Vector max_over_models;  // column max of proportions, free of model labels
    int replicates = 0;
    double zero_tol = 1e-8;
};

inline InclusionTable tabulate_inclusion(const std::vector<CoefficientSet>& aligned, double zero_tol = 1e-8)
{
    if (aligned.empty()) throw InvalidConfig("need at least one replicate fit");
    const Index m = aligned.front().models();
    const Index p = aligned.front().covariates();
    InclusionTable t;
    t.replicates = static_cast<int>(aligned.size());
    t.zero_tol = zero_tol;
    t.proportions = Matrix::Zero(m, p);
    t.any_model = Vector::Zero(p);
    for (const auto& fit : aligned) {
        if (fit.models() != m || fit.covariates() != p)
            throw DimensionMismatch("replicate fits have inconsistent shapes");
        for (Index k = 0; k < p; ++k) {
            bool any = false;
            for (Index i = 0; i < m; ++i) {
                const bool nz = std::abs(fit.beta(i, k)) > zero_tol;
                if (nz) t.proportions(i, k) += 1.0;
                any = any || nz;
            }
            if (any) t.any_model(k) += 1.0;
        }
    }
    t.proportions /= static_cast<double>(t.replicates);
    t.any_model /= static_cast<double>(t.replicates);
    t.max_over_models = t.proportions.colwise().maxCoeff().transpose();
    return t;
}

} // namespace mmpr
