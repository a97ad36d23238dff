// Simulate a correlated design, pick lambda by cross-validation and fit three
// dissimilar models at it.

#include <iostream>

#include <mmpr/mmpr.hpp>

int main()
{
    using namespace mmpr;

    const auto sim = paper_case(4, 7);
    const auto design = standardize(sim.data);
    const double lambda = lasso_cv_lambda(design, 10, 7);

    PathSpec spec;
    spec.models = 3;
    const auto rec = fit_at_lambda(design, spec, lambda);
    const auto aligned = align_models(design, rec.coef);
    const auto report = diversity_report(design, aligned);

    std::cout << "lambda " << lambda << "  omega " << rec.omega << (rec.omega_capped ? " (capped)" : "") << '\n';
    const Eigen::IOFormat row(4, 0, " ", "\n", "  ", "");
    std::cout << "standardized coefficients, one model per row\n" << aligned.beta.format(row) << '\n';
    std::cout << "coefficient similarity\n" << report.coef_similarity.format(row) << '\n';
    std::cout << "per-model MSE " << report.per_model_mse.transpose() << '\n';

    const auto raw = destandardize(aligned, design);
    std::cout << "intercepts on the original scale " << raw.intercepts.transpose() << '\n';
}
