#pragma once
#include <cmath>
#include <cstdint>
#include <string>
#include <Eigen/Cholesky>
#include <mmpr/errors.hpp>
#include <mmpr/model.hpp>
#include <mmpr/rng.hpp>

namespace mmpr {

enum class BlockStructure { identity, cs, ar1 };

inline const char* to_string(BlockStructure t)
{
    switch (t) {
    case BlockStructure::cs: return "cs";
    case BlockStructure::ar1: return "ar1";
    default: return "identity";
    }
}

inline BlockStructure parse_structure(const std::string& s)
{
    if (s == "cs") return BlockStructure::cs;
    if (s == "ar1") return BlockStructure::ar1;
    if (s == "identity" || s == "-") return BlockStructure::identity;
    throw InvalidConfig("unknown block structure: " + s);
}

/// Block-correlated Gaussian regression design, covariance I_b (x) Gamma_s.
struct SimCase
{
    double rho = 0.0;
    int blocks = 1;
    int block_size = 6;
    BlockStructure structure = BlockStructure::identity;
    int n = 80;
    Vector beta0 = (Vector(6) << 1, 1, 1, 0, 0, 0).finished();
    double sigma2 = 9.0;
    std::uint64_t seed = 0;

    int p() const { return blocks * block_size; }
};

struct SimDataset
{
    Dataset data;
    SimCase sim;
    std::uint64_t seed = 0;
};

/// I_b (x) Gamma_s, with Gamma_s compound symmetric, AR(1) or identity.
inline Matrix block_correlation(double rho, int blocks, int block_size, BlockStructure t)
{
    if (!(std::abs(rho) < 1.0)) throw InvalidConfig("block correlation needs |rho| < 1");
    if (blocks < 1 || block_size < 1) throw InvalidConfig("block count and size must be >= 1");
    Matrix block = Matrix::Identity(block_size, block_size);
    if (t != BlockStructure::identity) {
        for (int a = 0; a < block_size; ++a)
            for (int b = 0; b < block_size; ++b)
                if (a != b) block(a, b) = t == BlockStructure::cs ? rho : std::pow(rho, std::abs(a - b));
    }
    const int p = blocks * block_size;
    Matrix gamma = Matrix::Zero(p, p);
    for (int g = 0; g < blocks; ++g)
        gamma.block(g * block_size, g * block_size, block_size, block_size) = block;

    Eigen::LLT<Matrix> llt(gamma);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("correlation matrix is not positive definite (rho = " +
                                  std::to_string(rho) + ")");
    return gamma;
}

inline Matrix block_correlation(const SimCase& sc)
{
    return block_correlation(sc.rho, sc.blocks, sc.block_size, sc.structure);
}

/**
 * Draws n rows x = L z with z ~ N(0, I) and L the lower Cholesky factor of
 * the block correlation, then y = X beta0 + sigma e. X is drawn row by row
 * before the noise, all from one stream seeded with sc.seed.
 */
inline SimDataset sample(const SimCase& sc)
{
    if (sc.n < 1) throw InvalidConfig("sample size must be >= 1");
    if (!(sc.sigma2 >= 0.0)) throw InvalidConfig("noise variance must be >= 0");
    const Matrix gamma = block_correlation(sc);
    const int p = sc.p();
    if (sc.beta0.size() != p)
        throw DimensionMismatch("beta0 has " + std::to_string(sc.beta0.size()) +
                                " entries, design has " + std::to_string(p));
    Eigen::LLT<Matrix> llt(gamma);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorization failed");
    const Matrix L = llt.matrixL();

    Rng rng(sc.seed);
    Matrix X(sc.n, p);
    Vector z(p);
    for (int l = 0; l < sc.n; ++l) {
        for (int k = 0; k < p; ++k) z(k) = rng.normal();
        X.row(l) = (L * z).transpose();
    }
    const double sigma = std::sqrt(sc.sigma2);
    Vector y = X * sc.beta0;
    for (int l = 0; l < sc.n; ++l) y(l) += sigma * rng.normal();

    return {Dataset{std::move(X), std::move(y), default_names(p)}, sc, sc.seed};
}

/// Settings of the seven reference simulation cases; n = 80, beta0 = (1,1,1,0,0,0), sigma^2 = 9.
inline SimCase paper_case_settings(int case_id, std::uint64_t seed)
{
    SimCase sc;
    sc.seed = seed;
    switch (case_id) {
    case 1: sc.rho = 0.0; sc.blocks = 1; sc.block_size = 6; sc.structure = BlockStructure::identity; break;
    case 2: sc.rho = 0.5; sc.blocks = 1; sc.block_size = 6; sc.structure = BlockStructure::ar1; break;
    case 3: sc.rho = 0.9; sc.blocks = 1; sc.block_size = 6; sc.structure = BlockStructure::ar1; break;
    case 4: sc.rho = 0.5; sc.blocks = 2; sc.block_size = 3; sc.structure = BlockStructure::cs; break;
    case 5: sc.rho = 0.9; sc.blocks = 2; sc.block_size = 3; sc.structure = BlockStructure::cs; break;
    case 6: sc.rho = 0.5; sc.blocks = 3; sc.block_size = 2; sc.structure = BlockStructure::cs; break;
    case 7: sc.rho = 0.9; sc.blocks = 3; sc.block_size = 2; sc.structure = BlockStructure::cs; break;
    default: throw InvalidConfig("simulation case must be 1..7, got " + std::to_string(case_id));
    }
    return sc;
}

inline SimDataset paper_case(int case_id, std::uint64_t seed)
{
    return sample(paper_case_settings(case_id, seed));
}

} // namespace mmpr
