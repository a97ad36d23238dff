#pragma once
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <mmpr/io.hpp>
#include <mmpr/model.hpp>

namespace mmpr {

/**
 * Square grid over (b21, b22) in [-bound, bound]^2 for the second of two
 * models with p = 2. penalty(a, b) and sse(a, b) are evaluated at
 * (axis(a), axis(b)).
 */
struct ContourGrid
{
    Vector axis;
    Matrix penalty;
    std::optional<Matrix> sse;
    Eigen::Vector2d beta1 = Eigen::Vector2d::Zero();
    int c = 1;
    int d = 1;
    double lambda = 0.0;
    double omega = 0.0;
    /// Grid cell minimizing sse + penalty (penalty alone without an SSE surface).
    Eigen::Vector2d min_point = Eigen::Vector2d::Zero();
    /// Exact least-squares point, set by sse_surface.
    std::optional<Eigen::Vector2d> ls_point;

    Index resolution() const { return axis.size(); }
};

inline Vector contour_axis(double bound, int resolution)
{
    if (resolution < 2) throw InvalidConfig("surface resolution must be >= 2");
    if (!(bound > 0.0) || !std::isfinite(bound)) throw InvalidConfig("surface bound must be positive");
    return Vector::LinSpaced(resolution, -bound, bound);
}

namespace detail {

inline void locate_minimum(ContourGrid& g)
{
    double best = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < g.resolution(); ++a)
        for (Index b = 0; b < g.resolution(); ++b) {
            const double v = g.penalty(a, b) + (g.sse ? (*g.sse)(a, b) : 0.0);
            if (v < best) {
                best = v;
                g.min_point = {g.axis(a), g.axis(b)};
            }
        }
}

} // namespace detail

/// omega Sum_k |b1k|^d |b2k|^d + lambda Sum_k |b2k|^c on every cell.
inline ContourGrid penalty_surface(const Eigen::Vector2d& beta1, int c, int d, double lambda, double omega,
                                   double bound = 2.0, int resolution = 201)
{
    PenaltyConfig{2, c, d, lambda, omega}.validate();
    ContourGrid g;
    g.axis = contour_axis(bound, resolution);
    g.beta1 = beta1;
    g.c = c;
    g.d = d;
    g.lambda = lambda;
    g.omega = omega;
    g.penalty.resize(resolution, resolution);
    for (Index a = 0; a < resolution; ++a)
        for (Index b = 0; b < resolution; ++b) {
            const Eigen::Vector2d b2(g.axis(a), g.axis(b));
            g.penalty(a, b) = omega * similarity_penalty(beta1, b2, d) + lambda * sparsity_penalty(b2, c);
        }
    detail::locate_minimum(g);
    return g;
}

/// ||ys - Xs b||^2 on the grid, plus the exact least-squares point.
inline ContourGrid sse_surface(const StandardizedDesign& design, double bound = 2.0, int resolution = 201)
{
    if (design.p() != 2)
        throw WrongDimension("SSE surface needs exactly 2 covariates, got " + std::to_string(design.p()));
    ContourGrid g;
    g.axis = contour_axis(bound, resolution);
    g.penalty = Matrix::Zero(resolution, resolution);
    Matrix sse(resolution, resolution);
    for (Index a = 0; a < resolution; ++a)
        for (Index b = 0; b < resolution; ++b)
            sse(a, b) = model_sse(design, Eigen::Vector2d(g.axis(a), g.axis(b)));
    g.sse = std::move(sse);
    const Eigen::Matrix2d gram = design.Xs.transpose() * design.Xs;
    const Eigen::Vector2d rhs = design.Xs.transpose() * design.ys;
    Eigen::LDLT<Eigen::Matrix2d> ldlt(gram);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && std::abs(gram.determinant()) > 1e-14)
        g.ls_point = ldlt.solve(rhs);
    detail::locate_minimum(g);
    return g;
}

/// Both surfaces on one grid; min_point is the grid minimizer of sse + penalty.
inline ContourGrid contour_grid(const StandardizedDesign& design, const Eigen::Vector2d& beta1, int c, int d,
                                double lambda, double omega, double bound = 2.0, int resolution = 201)
{
    ContourGrid g = penalty_surface(beta1, c, d, lambda, omega, bound, resolution);
    const ContourGrid s = sse_surface(design, bound, resolution);
    g.sse = s.sse;
    g.ls_point = s.ls_point;
    detail::locate_minimum(g);
    return g;
}

/// Columns beta21,beta22,penalty,sse; sse cells are empty when no SSE surface was computed.
inline void write_contour_csv(std::ostream& out, const ContourGrid& g)
{
    out << "beta21,beta22,penalty,sse\n";
    for (Index a = 0; a < g.resolution(); ++a)
        for (Index b = 0; b < g.resolution(); ++b) {
            out << detail::format_double(g.axis(a)) << ',' << detail::format_double(g.axis(b)) << ','
                << detail::format_double(g.penalty(a, b)) << ',';
            if (g.sse) out << detail::format_double((*g.sse)(a, b));
            out << '\n';
        }
}

} // namespace mmpr
