#pragma once
#include <cstdint>
#include <vector>
#include <mmpr/cv.hpp>
#include <mmpr/metrics.hpp>
#include <mmpr/simgen.hpp>
#include <mmpr/tuner.hpp>

namespace mmpr {

/// How each replicate picks its lambda.
struct LambdaRule
{
    enum class Kind { cv_lasso, fixed };
    Kind kind = Kind::cv_lasso;
    double value = 0.0;  // used by Kind::fixed
    int folds = 10;

    static LambdaRule cv(int folds = 10) { return {Kind::cv_lasso, 0.0, folds}; }
    static LambdaRule fixed(double v) { return {Kind::fixed, v, 10}; }
};

struct ReplicateFit
{
    std::uint64_t seed = 0;
    double lambda = 0.0;
    PathRecord record;        // at the selected lambda
    CoefficientSet aligned;   // canonical model order
};

struct InclusionStudy
{
    InclusionTable table;
    std::vector<ReplicateFit> fits;
};

/// Multi-model fit at one lambda with omega tuned, using the start policy in spec.controls (no path warm start).
inline PathRecord fit_at_lambda(const StandardizedDesign& design, const PathSpec& spec, double lambda)
{
    spec.validate();
    return make_record(design, lambda, tune_omega(design, lambda, spec));
}

/**
 * Replicate r samples sc with seed base_seed + r, selects lambda by rule
 * (CV folds seeded the same way), fits, aligns model labels and counts
 * nonzero coefficients.
 */
inline InclusionStudy inclusion_study(const SimCase& sc, int replicates, std::uint64_t base_seed,
                                      const PathSpec& spec, const LambdaRule& rule = LambdaRule::cv(),
                                      double zero_tol = 1e-8)
{
    if (replicates < 1) throw InvalidConfig("replicates must be >= 1");
    InclusionStudy study;
    std::vector<CoefficientSet> aligned;
    for (int r = 0; r < replicates; ++r) {
        SimCase rc = sc;
        rc.seed = base_seed + static_cast<std::uint64_t>(r);
        const auto sim = sample(rc);
        const auto design = standardize(sim.data);
        const double lambda = rule.kind == LambdaRule::Kind::fixed
                                  ? rule.value
                                  : lasso_cv(design, rule.folds, rc.seed).lambda;
        ReplicateFit rf;
        rf.seed = rc.seed;
        rf.lambda = lambda;
        rf.record = fit_at_lambda(design, spec, lambda);
        rf.aligned = align_models(design, rf.record.coef);
        aligned.push_back(rf.aligned);
        study.fits.push_back(std::move(rf));
    }
    study.table = tabulate_inclusion(aligned, zero_tol);
    return study;
}

inline InclusionStudy inclusion_study(int case_id, int replicates, std::uint64_t base_seed,
                                      const PathSpec& spec, const LambdaRule& rule = LambdaRule::cv())
{
    return inclusion_study(paper_case_settings(case_id, base_seed), replicates, base_seed, spec, rule);
}

} // namespace mmpr
