#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <mmpr/penalty_viz.hpp>
#include <mmpr/simgen.hpp>

using namespace mmpr;

namespace {

// ys = Xs b for an exactly orthonormal, centered two-column design
StandardizedDesign orthonormal_design(const Eigen::Vector2d& b)
{
    StandardizedDesign s;
    s.Xs.resize(4, 2);
    s.Xs << 0.5, 0.5, 0.5, -0.5, -0.5, 0.5, -0.5, -0.5;
    s.ys = s.Xs * b;
    s.col_norms = Vector::Ones(2);
    s.col_means = Vector::Zero(2);
    s.names = {"x1", "x2"};
    return s;
}

} // namespace

TEST(PenaltySurface, SingleActiveCovariateGivesStrips)
{
    const auto g = penalty_surface({1.0, 0.0}, 1, 1, 0.0, 1.0, 2.0, 41);
    for (Index a = 0; a < 41; ++a)
        for (Index b = 0; b < 41; ++b) {
            EXPECT_NEAR(g.penalty(a, b), std::abs(g.axis(a)), 1e-12);
            EXPECT_EQ(g.penalty(a, b), g.penalty(a, 0));
        }
}

TEST(PenaltySurface, DiamondAndEllipseLevelSets)
{
    const auto dia = penalty_surface({1.0, 1.0}, 1, 1, 0.0, 2.0, 2.0, 21);
    const auto ell = penalty_surface({1.0, 1.0}, 1, 2, 0.0, 2.0, 2.0, 21);
    for (Index a = 0; a < 21; ++a)
        for (Index b = 0; b < 21; ++b) {
            const double x = dia.axis(a), y = dia.axis(b);
            EXPECT_NEAR(dia.penalty(a, b), 2.0 * (std::abs(x) + std::abs(y)), 1e-12);
            EXPECT_NEAR(ell.penalty(a, b), 2.0 * (x * x + y * y), 1e-12);
        }
}

TEST(PenaltySurface, SignFlipSymmetry)
{
    for (int c : {1, 2})
        for (int d : {1, 2}) {
            const auto g = penalty_surface({0.7, -1.3}, c, d, 0.4, 1.1, 2.0, 31);
            for (Index a = 0; a < 31; ++a)
                for (Index b = 0; b < 31; ++b) {
                    EXPECT_NEAR(g.penalty(a, b), g.penalty(30 - a, b), 1e-12);
                    EXPECT_NEAR(g.penalty(a, b), g.penalty(a, 30 - b), 1e-12);
                }
        }
}

TEST(PenaltySurface, CoerciveWithSparsityTerm)
{
    const auto g = penalty_surface({1.0, 0.0}, 1, 1, 0.5, 1.0, 2.0, 41);
    const double center = g.penalty(20, 20);
    double ring = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < 41; ++t)
        ring = std::min({ring, g.penalty(0, t), g.penalty(40, t), g.penalty(t, 0), g.penalty(t, 40)});
    EXPECT_GT(ring, center);
    EXPECT_THROW(penalty_surface({1.0, 0.0}, 1, 1, 0.5, 1.0, 2.0, 1), InvalidConfig);
}

TEST(SseSurface, OrthonormalCircles)
{
    const auto g = sse_surface(orthonormal_design({1.0, 1.0}), 2.0, 41);
    ASSERT_TRUE(g.ls_point.has_value());
    EXPECT_NEAR((*g.ls_point - Eigen::Vector2d(1.0, 1.0)).norm(), 0.0, 1e-12);
    EXPECT_NEAR((g.min_point - Eigen::Vector2d(1.0, 1.0)).norm(), 0.0, 1e-12);
    for (Index a = 0; a < 41; ++a)
        for (Index b = 0; b < 41; ++b) {
            const double dx = g.axis(a) - 1.0, dy = g.axis(b) - 1.0;
            EXPECT_NEAR((*g.sse)(a, b), dx * dx + dy * dy, 1e-12);
        }
}

TEST(SseSurface, CorrelatedDesignTiltsEllipses)
{
    SimCase sc;
    sc.rho = 0.9;
    sc.blocks = 1;
    sc.block_size = 2;
    sc.structure = BlockStructure::cs;
    sc.beta0 = Eigen::Vector2d(1.0, 0.5);
    sc.seed = 4;
    const auto s = standardize(sample(sc).data);
    const auto g = sse_surface(s, 2.0, 201);

    // Hessian of the grid values by central differences at the centre cell
    const double h = g.axis(1) - g.axis(0);
    const Matrix& f = *g.sse;
    Eigen::Matrix2d H;
    H(0, 0) = (f(101, 100) - 2 * f(100, 100) + f(99, 100)) / (h * h);
    H(1, 1) = (f(100, 101) - 2 * f(100, 100) + f(100, 99)) / (h * h);
    H(0, 1) = H(1, 0) = (f(101, 101) - f(101, 99) - f(99, 101) + f(99, 99)) / (4 * h * h);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> grid_eig(H);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> gram_eig(2.0 * s.Xs.transpose() * s.Xs);
    EXPECT_NEAR(grid_eig.eigenvalues()(0), gram_eig.eigenvalues()(0), 1e-6);
    EXPECT_NEAR(grid_eig.eigenvalues()(1), gram_eig.eigenvalues()(1), 1e-6);
    // long axis of the ellipse is the soft eigendirection, along (1, -1)
    const Eigen::Vector2d soft = grid_eig.eigenvectors().col(0);
    EXPECT_NEAR(std::abs(soft.dot(gram_eig.eigenvectors().col(0))), 1.0, 1e-9);
    EXPECT_NEAR(std::abs(soft.dot(Eigen::Vector2d(1, -1).normalized())), 1.0, 1e-9);
    EXPECT_GT(gram_eig.eigenvalues()(1) / gram_eig.eigenvalues()(0), 5.0);

    const Index ia = static_cast<Index>(std::lround((g.min_point(0) + 2.0) / h));
    const Index ib = static_cast<Index>(std::lround((g.min_point(1) + 2.0) / h));
    EXPECT_EQ(f(ia, ib), f.minCoeff());
}

TEST(SseSurface, NeedsTwoCovariates)
{
    SimCase sc;
    sc.seed = 1;
    EXPECT_THROW(sse_surface(standardize(sample(sc).data)), WrongDimension);
}

TEST(ContourGrid, CombinedMinimumAndCsv)
{
    const auto s = orthonormal_design({1.0, 0.2});
    const auto g = contour_grid(s, {1.0, 0.0}, 1, 1, 0.0, 1.2, 2.0, 41);
    ASSERT_TRUE(g.sse.has_value());
    // similarity weight pushes b21 towards zero; SSE alone keeps b22 at 0.2
    EXPECT_NEAR(g.min_point(0), 0.4, 1e-12);
    EXPECT_NEAR(g.min_point(1), 0.2, 1e-12);

    std::ostringstream os;
    write_contour_csv(os, g);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "beta21,beta22,penalty,sse");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 41 * 41);

    std::ostringstream bare;
    write_contour_csv(bare, penalty_surface({1.0, 0.0}, 1, 1, 0.0, 1.0, 1.0, 2));
    EXPECT_EQ(bare.str(), "beta21,beta22,penalty,sse\n-1,-1,1,\n-1,1,1,\n1,-1,1,\n1,1,1,\n");
}
