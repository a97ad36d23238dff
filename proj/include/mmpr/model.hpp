#pragma once
#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>
#include <Eigen/Dense>
#include <mmpr/errors.hpp>

namespace mmpr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raw covariates X (n x p), response y and covariate labels.
struct Dataset
{
    Matrix X;
    Vector y;
    std::vector<std::string> names;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    /// Throws on empty data, shape mismatch, non-finite entries or duplicate names.
    void validate() const
    {
        if (X.rows() < 1 || X.cols() < 1)
            throw DimensionMismatch("dataset needs n >= 1 and p >= 1");
        if (y.size() != X.rows())
            throw DimensionMismatch("response length " + std::to_string(y.size()) +
                                    " does not match " + std::to_string(X.rows()) + " rows");
        if (static_cast<Index>(names.size()) != X.cols())
            throw DimensionMismatch("expected " + std::to_string(X.cols()) + " covariate names");
        if (!X.allFinite() || !y.allFinite())
            throw Error(ErrorClass::data, "NonFinite", "dataset contains non-finite values");
        std::unordered_set<std::string> seen;
        for (const auto& nm : names)
            if (!seen.insert(nm).second)
                throw Error(ErrorClass::data, "DuplicateName", "duplicate covariate name: " + nm);
    }
};

/// Default labels x1..xp.
inline std::vector<std::string> default_names(Index p)
{
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(p));
    for (Index k = 0; k < p; ++k) out.push_back("x" + std::to_string(k + 1));
    return out;
}

/**
 * Centered response and centered, unit-L2-norm covariates.
 *
 * col_means and col_norms are the per-column centering and scaling
 * applied to the raw X (norms taken after centering), so that
 * Xs(:,k) = (X(:,k) - col_means(k)) / col_norms(k).
 */
struct StandardizedDesign
{
    Matrix Xs;
    Vector ys;
    Vector col_norms;
    Vector col_means;
    double y_mean = 0.0;
    std::vector<std::string> names;

    Index n() const { return Xs.rows(); }
    Index p() const { return Xs.cols(); }
};

enum class Scale { standardized, raw };

inline const char* to_string(Scale s) { return s == Scale::raw ? "raw" : "standardized"; }

/// Weights and powers of the multi-model objective plus solver limits.
struct PenaltyConfig
{
    int models = 1;
    int c = 1;          // sparsity power: 1 lasso, 2 ridge
    int d = 1;          // similarity power
    double lambda = 0.0;
    double omega = 0.0;
    double eps = 1e-6;
    int max_sweeps = 10000;

    void validate() const
    {
        if (models < 1) throw InvalidConfig("model count must be >= 1");
        if (c != 1 && c != 2) throw InvalidConfig("sparsity power c must be 1 or 2");
        if (d != 1 && d != 2) throw InvalidConfig("similarity power d must be 1 or 2");
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidConfig("lambda must be finite and >= 0");
        if (!(omega >= 0.0) || !std::isfinite(omega)) throw InvalidConfig("omega must be finite and >= 0");
        if (!(eps > 0.0)) throw InvalidConfig("eps must be > 0");
        if (max_sweeps < 1) throw InvalidConfig("max_sweeps must be >= 1");
    }
};

/// M x p coefficient matrix; row i is model i.
struct CoefficientSet
{
    Matrix beta;
    Scale scale = Scale::standardized;

    static CoefficientSet zeros(Index models, Index p)
    {
        return {Matrix::Zero(models, p), Scale::standardized};
    }

    Index models() const { return beta.rows(); }
    Index covariates() const { return beta.cols(); }
};

/// Raw-scale coefficients with one intercept per model.
struct RawFit
{
    CoefficientSet coef;
    Vector intercepts;
};

/// |x|^power for power in {1, 2}.
inline double pow_abs(double x, int power)
{
    return power == 1 ? std::abs(x) : x * x;
}

inline StandardizedDesign standardize(const Dataset& data)
{
    data.validate();
    const Index n = data.n();
    const Index p = data.p();

    StandardizedDesign out;
    out.names = data.names;
    out.y_mean = data.y.mean();
    out.ys = data.y.array() - out.y_mean;
    out.col_means = data.X.colwise().mean().transpose();
    out.col_norms.resize(p);
    out.Xs.resize(n, p);
    for (Index k = 0; k < p; ++k) {
        Vector col = data.X.col(k).array() - out.col_means(k);
        const double nrm = col.norm();
        // relative test: a constant column leaves only rounding noise after centering
        const double scale = data.X.col(k).cwiseAbs().maxCoeff();
        if (!(nrm > 0.0) || nrm <= 1e-12 * scale * std::sqrt(static_cast<double>(n)))
            throw ConstantColumn(static_cast<std::size_t>(k));
        out.col_norms(k) = nrm;
        out.Xs.col(k) = col / nrm;
    }
    return out;
}

/// Sum_k |a_k|^d |b_k|^d.
template <class A, class B>
double similarity_penalty(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, int d)
{
    if (a.size() != b.size())
        throw LengthMismatch(static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()));
    if (d != 1 && d != 2) throw InvalidConfig("similarity power d must be 1 or 2");
    double s = 0.0;
    for (Index k = 0; k < a.size(); ++k)
        s += pow_abs(a(k), d) * pow_abs(b(k), d);
    return s;
}

/// Sum_k |b_k|^c.
template <class B>
double sparsity_penalty(const Eigen::MatrixBase<B>& b, int c)
{
    if (c != 1 && c != 2) throw InvalidConfig("sparsity power c must be 1 or 2");
    double s = 0.0;
    for (Index k = 0; k < b.size(); ++k) s += pow_abs(b(k), c);
    return s;
}

/// ||ys - Xs beta||^2 for one coefficient vector (row or column).
template <class B>
double model_sse(const StandardizedDesign& design, const Eigen::MatrixBase<B>& beta)
{
    if (beta.size() != design.p())
        throw DimensionMismatch("coefficient vector has " + std::to_string(beta.size()) +
                                " entries, design has " + std::to_string(design.p()) + " columns");
    Vector b(design.p());
    for (Index k = 0; k < design.p(); ++k) b(k) = beta(k);
    return (design.ys - design.Xs * b).squaredNorm();
}

/// Per-model SSE vector.
inline Vector per_model_sse(const StandardizedDesign& design, const CoefficientSet& coef)
{
    Vector out(coef.models());
    for (Index i = 0; i < coef.models(); ++i)
        out(i) = model_sse(design, coef.beta.row(i).transpose());
    return out;
}

inline void check_shapes(const StandardizedDesign& design, const CoefficientSet& coef)
{
    if (coef.covariates() != design.p())
        throw DimensionMismatch("coefficient set has " + std::to_string(coef.covariates()) +
                                " covariates, design has " + std::to_string(design.p()));
    if (coef.scale != Scale::standardized)
        throw ScaleMismatch("expected standardized-scale coefficients");
}

/**
 * Sum_i ||ys - Xs b_i||^2 + omega Sum_{i<j} P1(b_i, b_j) + lambda Sum_i P2(b_i).
 * Model count is taken from coef; cfg.models is not consulted.
 */
inline double objective(const StandardizedDesign& design, const CoefficientSet& coef,
                        const PenaltyConfig& cfg)
{
    check_shapes(design, coef);
    const Index m = coef.models();
    double sse = 0.0, sim = 0.0, spars = 0.0;
    for (Index i = 0; i < m; ++i) {
        sse += model_sse(design, coef.beta.row(i).transpose());
        spars += sparsity_penalty(coef.beta.row(i), cfg.c);
        for (Index j = i + 1; j < m; ++j)
            sim += similarity_penalty(coef.beta.row(i), coef.beta.row(j), cfg.d);
    }
    return sse + cfg.omega * sim + cfg.lambda * spars;
}

/**
 * Maps standardized coefficients back to raw units.
 * raw_ik = b_ik / col_norm_k, intercept_i = y_mean - Sum_k col_mean_k raw_ik.
 */
inline RawFit destandardize(const CoefficientSet& coef, const StandardizedDesign& design)
{
    if (coef.scale == Scale::raw) throw ScaleMismatch("coefficients are already on the raw scale");
    if (coef.covariates() != design.p())
        throw DimensionMismatch("coefficient set does not match design width");
    RawFit out;
    out.coef.scale = Scale::raw;
    out.coef.beta = coef.beta.array().rowwise() / design.col_norms.transpose().array();
    out.intercepts = (design.y_mean - (out.coef.beta * design.col_means).array()).matrix();
    return out;
}

/// Raw-scale fitted values X b_i + a_i, one column per model.
inline Matrix raw_fitted(const Matrix& X, const RawFit& fit)
{
    Matrix f = X * fit.coef.beta.transpose();
    f.rowwise() += fit.intercepts.transpose();
    return f;
}

} // namespace mmpr
