#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>
#include <mmpr/model.hpp>
#include <mmpr/rng.hpp>

namespace mmpr {

/// State passed to SolveControls::on_update. sweep == 0 is the start value, before any update.
struct UpdateEvent
{
    const StandardizedDesign& design;
    const PenaltyConfig& cfg;
    int start_id;
    int sweep;
    Index model;
    Index covariate;
    const CoefficientSet& coef;
};

using UpdateObserver = std::function<void(const UpdateEvent&)>;

/// How coefficients present in a subset start are initialized.
enum class InitRule { ridge, lasso, ols };

/**
 * Start-value policy and observers for one solve.
 *
 * Starts are tried in a fixed order: zeros, warm, every support subset
 * (exhaustive), then random subsets. The start_id of a result indexes this
 * sequence.
 */
struct SolveControls
{
    bool zeros_start = true;
    std::optional<CoefficientSet> warm;
    bool exhaustive_subsets = false;  // 2^(M p) starts, needs M p <= 14
    int random_starts = 0;
    std::uint64_t seed = 0;
    InitRule init = InitRule::ridge;
    double init_ridge = 1.0;  // ridge weight for InitRule::ridge

    /// Called once per start and after every single coordinate update.
    UpdateObserver on_update;
};

inline constexpr Index max_exhaustive_params = 14;

struct SolveResult
{
    CoefficientSet coef;
    double objective = 0.0;
    int sweeps = 0;
    bool converged = false;
    int start_id = 0;
};

/// sign(rho) * max(|rho| - gamma/2, 0).
inline double soft_threshold(double rho, double gamma)
{
    const double mag = std::abs(rho) - 0.5 * gamma;
    if (mag <= 0.0) return 0.0;
    return rho > 0.0 ? mag : -mag;
}

namespace detail {

struct UpdateTerms
{
    double gamma;
    double theta;
};

// threshold and denominator of the exact one-coordinate minimizer
inline UpdateTerms update_terms(const PenaltyConfig& cfg, double z_k, double others)
{
    return {(2 - cfg.c) * cfg.lambda + (2 - cfg.d) * cfg.omega * others,
            z_k + (cfg.c - 1) * cfg.lambda + (cfg.d - 1) * cfg.omega * others};
}

inline double others_sum(const Matrix& beta, Index i, Index k, int d)
{
    double s = 0.0;
    for (Index j = 0; j < beta.rows(); ++j)
        if (j != i) s += pow_abs(beta(j, k), d);
    return s;
}

struct CdOutcome
{
    int sweeps = 0;
    bool converged = false;
};

/**
 * Cyclic coordinate descent over rows [first, last) of coef, models outer and
 * covariates inner. Other rows stay fixed. Residuals are maintained
 * incrementally and rebuilt once at entry.
 */
inline CdOutcome run_cd(const StandardizedDesign& design, const PenaltyConfig& cfg,
                        CoefficientSet& coef, Index first, Index last,
                        const UpdateObserver& on_update = {}, int start_id = 0)
{
    const Index p = design.p();
    Vector z(p);
    for (Index k = 0; k < p; ++k) z(k) = design.Xs.col(k).squaredNorm();

    Matrix resid(design.n(), last - first);
    for (Index i = first; i < last; ++i)
        resid.col(i - first) = design.ys - design.Xs * coef.beta.row(i).transpose();

    if (on_update) on_update(UpdateEvent{design, cfg, start_id, 0, first, -1, coef});
    CdOutcome out;
    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Index i = first; i < last; ++i) {
            auto r = resid.col(i - first);
            for (Index k = 0; k < p; ++k) {
                const double old = coef.beta(i, k);
                const double rho = design.Xs.col(k).dot(r) + z(k) * old;
                const auto t = update_terms(cfg, z(k), others_sum(coef.beta, i, k, cfg.d));
                const double updated = soft_threshold(rho, t.gamma) / t.theta;
                const double delta = updated - old;
                if (delta != 0.0) {
                    r -= delta * design.Xs.col(k);
                    coef.beta(i, k) = updated;
                }
                max_delta = std::max(max_delta, std::abs(delta));
                if (on_update) on_update(UpdateEvent{design, cfg, start_id, sweep, i, k, coef});
            }
        }
        out.sweeps = sweep;
        if (max_delta < cfg.eps) {
            out.converged = true;
            break;
        }
    }
    return out;
}

// single-model initial values on a column subset
inline Vector init_on_subset(const StandardizedDesign& design, const PenaltyConfig& cfg,
                             const SolveControls& controls, const std::vector<Index>& cols)
{
    Vector full = Vector::Zero(design.p());
    if (cols.empty()) return full;
    const auto s = static_cast<Index>(cols.size());
    Matrix Xsub(design.n(), s);
    for (Index a = 0; a < s; ++a) Xsub.col(a) = design.Xs.col(cols[static_cast<std::size_t>(a)]);

    Vector sub;
    if (controls.init == InitRule::lasso) {
        StandardizedDesign d2{Xsub, design.ys, Vector::Ones(s), Vector::Zero(s), 0.0, {}};
        PenaltyConfig one = cfg;
        one.models = 1;
        one.omega = 0.0;
        one.c = 1;
        CoefficientSet c1 = CoefficientSet::zeros(1, s);
        run_cd(d2, one, c1, 0, 1);
        sub = c1.beta.row(0).transpose();
    } else {
        Matrix gram = Xsub.transpose() * Xsub;
        const Vector rhs = Xsub.transpose() * design.ys;
        if (controls.init == InitRule::ols) {
            Eigen::LDLT<Matrix> ldlt(gram);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
                sub = ldlt.solve(rhs);
                if (sub.allFinite()) {
                    for (Index a = 0; a < s; ++a) full(cols[static_cast<std::size_t>(a)]) = sub(a);
                    return full;
                }
            }
        }
        // ridge, and the fallback when OLS does not exist
        const double r = controls.init == InitRule::ridge ? controls.init_ridge : 1e-8;
        gram.diagonal().array() += r;
        sub = gram.ldlt().solve(rhs);
    }
    for (Index a = 0; a < s; ++a) full(cols[static_cast<std::size_t>(a)]) = sub(a);
    return full;
}

inline CoefficientSet start_from_mask(const StandardizedDesign& design, const PenaltyConfig& cfg,
                                      const SolveControls& controls, Index models,
                                      const std::vector<bool>& included)
{
    const Index p = design.p();
    CoefficientSet start = CoefficientSet::zeros(models, p);
    std::vector<Index> cols;
    for (Index i = 0; i < models; ++i) {
        cols.clear();
        for (Index k = 0; k < p; ++k)
            if (included[static_cast<std::size_t>(i * p + k)]) cols.push_back(k);
        start.beta.row(i) = init_on_subset(design, cfg, controls, cols).transpose();
    }
    return start;
}

} // namespace detail

/**
 * Exact minimizer of the objective in b_ik with everything else fixed,
 * computed from scratch: S(rho_ik, gamma_k) / theta_k with
 * rho_ik = x_k' (ys - Sum_{h != k} b_ih x_h), z_k = ||x_k||^2,
 * gamma_k = (2-c) lambda + (2-d) omega Sum_{j != i} |b_jk|^d and
 * theta_k = z_k + (c-1) lambda + (d-1) omega Sum_{j != i} |b_jk|^d.
 */
inline double coordinate_update(const StandardizedDesign& design, const CoefficientSet& coef,
                                const PenaltyConfig& cfg, Index i, Index k)
{
    check_shapes(design, coef);
    if (i < 0 || i >= coef.models() || k < 0 || k >= design.p())
        throw DimensionMismatch("coordinate index out of range");
    const auto xk = design.Xs.col(k);
    Vector partial = design.ys - design.Xs * coef.beta.row(i).transpose();
    partial += coef.beta(i, k) * xk;
    const double rho = xk.dot(partial);
    const double z = xk.squaredNorm();
    const auto t = detail::update_terms(cfg, z, detail::others_sum(coef.beta, i, k, cfg.d));
    return soft_threshold(rho, t.gamma) / t.theta;
}

/// All start values implied by controls, in start_id order.
inline std::vector<CoefficientSet> build_starts(const StandardizedDesign& design,
                                                const PenaltyConfig& cfg,
                                                const SolveControls& controls)
{
    const Index m = cfg.models;
    const Index p = design.p();
    std::vector<CoefficientSet> starts;
    if (controls.zeros_start) starts.push_back(CoefficientSet::zeros(m, p));
    if (controls.warm) {
        check_shapes(design, *controls.warm);
        if (controls.warm->models() != m)
            throw DimensionMismatch("warm start has " + std::to_string(controls.warm->models()) +
                                    " models, expected " + std::to_string(m));
        starts.push_back(*controls.warm);
    }
    const Index params = m * p;
    if (controls.exhaustive_subsets) {
        if (params > max_exhaustive_params)
            throw InvalidConfig("exhaustive subset starts need M*p <= 14, got " + std::to_string(params));
        std::vector<bool> inc(static_cast<std::size_t>(params));
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << params); ++mask) {
            for (Index b = 0; b < params; ++b) inc[static_cast<std::size_t>(b)] = (mask >> b) & 1u;
            starts.push_back(detail::start_from_mask(design, cfg, controls, m, inc));
        }
    }
    if (controls.random_starts > 0) {
        Rng rng(controls.seed);
        std::vector<bool> inc(static_cast<std::size_t>(params));
        for (int r = 0; r < controls.random_starts; ++r) {
            for (Index b = 0; b < params; ++b) inc[static_cast<std::size_t>(b)] = rng.coin();
            starts.push_back(detail::start_from_mask(design, cfg, controls, m, inc));
        }
    }
    if (starts.empty()) throw InvalidConfig("no start values selected");
    return starts;
}

/**
 * Minimizes the multi-model objective for fixed (lambda, omega) by coordinate
 * descent from every start, keeping the lowest objective. Equal objectives
 * (within 1e-10) go to the lowest start_id. A run that hits max_sweeps is
 * returned with converged = false.
 */
inline SolveResult solve(const StandardizedDesign& design, const PenaltyConfig& cfg,
                         const SolveControls& controls = {})
{
    cfg.validate();
    const auto starts = build_starts(design, cfg, controls);

    std::optional<SolveResult> best;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        CoefficientSet coef = starts[s];
        const auto cd = detail::run_cd(design, cfg, coef, 0, coef.models(), controls.on_update,
                                       static_cast<int>(s));
        const double obj = objective(design, coef, cfg);
        if (!best || obj < best->objective - 1e-10)
            best = SolveResult{std::move(coef), obj, cd.sweeps, cd.converged, static_cast<int>(s)};
    }
    return *best;
}

struct ConditionalResult
{
    Vector beta;
    int sweeps = 0;
    bool converged = false;
};

/**
 * Solves for model 1 with models 2..M held at `fixed` (M-1 rows). Observer
 * events see the stacked M-row state.
 * For (c,d) = (1,1) this is an adaptive lasso with weights
 * lambda + omega Sum_j |b_jk|; (1,2) and (2,1) are adaptive elastic nets and
 * (2,2) is adaptive ridge.
 */
inline ConditionalResult conditional_solve(const StandardizedDesign& design,
                                           const CoefficientSet& fixed,
                                           const PenaltyConfig& cfg,
                                           const std::optional<Vector>& start = std::nullopt,
                                           const UpdateObserver& on_update = {})
{
    cfg.validate();
    check_shapes(design, fixed);
    const Index p = design.p();
    CoefficientSet all = CoefficientSet::zeros(fixed.models() + 1, p);
    all.beta.bottomRows(fixed.models()) = fixed.beta;
    if (start) {
        if (start->size() != p) throw LengthMismatch(static_cast<std::size_t>(start->size()),
                                                     static_cast<std::size_t>(p));
        all.beta.row(0) = start->transpose();
    }
    const auto cd = detail::run_cd(design, cfg, all, 0, 1, on_update);
    return {all.beta.row(0).transpose(), cd.sweeps, cd.converged};
}

} // namespace mmpr
