#include "onsager/degree_engine.hpp"
#include "onsager/errors.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace onsager {
namespace {

using testing::kPi;

OperatorContext make_ctx(double lambda, int n = 8, int grid = 0) {
    return OperatorContext(onsager_kernel(32), lambda, n, grid);
}

MultistartConfig fast_cfg(int starts = 256) {
    MultistartConfig cfg;
    cfg.n_starts = starts;
    return cfg;
}

std::vector<int> indices(const std::vector<Zero>& zeros) {
    std::vector<int> out;
    for (const Zero& z : zeros) {
        out.push_back(z.jacobian_sign);
    }
    return out;
}

TEST(Domain, SupBallLevelAndSampling) {
    const Domain d = Domain::sup_ball(2.0);
    EXPECT_LT(d.level(SpectralFn::zero(4, 64)), 0.0);
    EXPECT_GT(d.level(SpectralFn::basis(4, 64, 1, 2.5 * std::sqrt(kPi))), 0.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        const Eigen::VectorXd c = d.sample_boundary(rng, 4, 64);
        EXPECT_NEAR(d.level(SpectralFn(c, 64)), 0.0, 1e-9);
    }
}

TEST(Domain, CoeffBallLevel) {
    const Domain d = Domain::coeff_ball(Eigen::Vector2d(1.0, 0.0), 0.5);
    EXPECT_NEAR(d.level(SpectralFn(std::vector<double>{1.0, 0.2}, 16)), -0.3, 1e-15);
    EXPECT_NEAR(d.level(SpectralFn(std::vector<double>{2.0, 0.0}, 16)), 0.5, 1e-15);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        EXPECT_LT(d.level(SpectralFn(d.sample_interior(rng, 2), 16)), 0.0);
    }
}

TEST(JacobianSign, TrivialZero) {
    EXPECT_EQ(jacobian_sign(make_ctx(1.0).zero(), make_ctx(1.0)), 1);
    EXPECT_EQ(jacobian_sign(make_ctx(6.0).zero(), make_ctx(6.0)), -1);
    EXPECT_EQ(jacobian_sign(make_ctx(25.0).zero(), make_ctx(25.0)), 1);
}

TEST(FindZeros, SubcriticalHasOnlyTrivialZero) {
    for (double lambda : {0.0, 0.5, 1.0, 1.4, 3.0}) {
        const OperatorContext ctx = make_ctx(lambda);
        const DegreeReport r = brouwer_degree(ctx, apriori_radius(ctx), fast_cfg());
        ASSERT_EQ(r.zeros.size(), 1u) << "lambda " << lambda;
        EXPECT_LT(r.zeros[0].u.coeffs().norm(), 1e-10);
        EXPECT_EQ(r.zeros[0].jacobian_sign, 1);
        EXPECT_EQ(r.degree, 1);
        EXPECT_TRUE(r.certified);
        ASSERT_TRUE(r.matches_global_degree.has_value());
        EXPECT_TRUE(*r.matches_global_degree);
    }
}

TEST(FindZeros, ThreeZerosPastFirstBifurcation) {
    const OperatorContext ctx = make_ctx(6.0);
    const DegreeReport r = brouwer_degree(ctx, apriori_radius(ctx), fast_cfg());
    ASSERT_EQ(r.zeros.size(), 3u);
    EXPECT_EQ(indices(r.zeros), (std::vector<int>{-1, 1, 1}));
    EXPECT_EQ(r.degree, 1);
    EXPECT_TRUE(r.certified);
    EXPECT_NEAR(r.zeros[1].sup_norm, r.zeros[2].sup_norm, 1e-9);
    EXPECT_NEAR(r.zeros[1].u.coeff(1), -r.zeros[2].u.coeff(1), 1e-9);
    for (const Zero& z : r.zeros) {
        EXPECT_LT(z.residual_norm, 1e-10);
        const BoundCheck b = check_bounds(z.u, ctx);
        EXPECT_TRUE(b.apriori_ok);
        EXPECT_TRUE(b.regularity_ok);
    }
}

TEST(FindZeros, SignStableUnderGridRefinement) {
    const OperatorContext coarse = make_ctx(6.0);
    const OperatorContext fine = make_ctx(6.0, 8, 2 * coarse.grid_size());
    const DegreeReport a = brouwer_degree(coarse, apriori_radius(coarse), fast_cfg());
    const DegreeReport b = brouwer_degree(fine, apriori_radius(fine), fast_cfg());
    ASSERT_EQ(a.zeros.size(), b.zeros.size());
    for (std::size_t i = 0; i < a.zeros.size(); ++i) {
        EXPECT_EQ(a.zeros[i].jacobian_sign, b.zeros[i].jacobian_sign);
        EXPECT_LT((a.zeros[i].u.coeffs() - b.zeros[i].u.coeffs()).norm(), 1e-8);
    }
}

TEST(FindZeros, Deterministic) {
    const OperatorContext ctx = make_ctx(6.0);
    const ZeroSearch a = find_zeros(ctx, Domain::sup_ball(apriori_radius(ctx)), fast_cfg(128));
    const ZeroSearch b = find_zeros(ctx, Domain::sup_ball(apriori_radius(ctx)), fast_cfg(128));
    ASSERT_EQ(a.zeros.size(), b.zeros.size());
    EXPECT_EQ(a.failed_starts, b.failed_starts);
    for (std::size_t i = 0; i < a.zeros.size(); ++i) {
        EXPECT_EQ(a.zeros[i].u.coeffs(), b.zeros[i].u.coeffs());
        EXPECT_EQ(a.zeros[i].hits, b.zeros[i].hits);
    }
}

TEST(FindZeros, PairingsAgreeAcrossLevels) {
    for (double lambda : {1.0, 6.0}) {
        for (int n = 2; n <= 12; ++n) {
            const OperatorContext ctx(onsager_kernel(32), lambda, n);
            const double r = apriori_radius(ctx);
            const DegreeReport x = brouwer_degree(ctx, r, fast_cfg(32 * n), Pairing::X);
            const DegreeReport y = brouwer_degree(ctx, r, fast_cfg(32 * n), Pairing::Y);
            EXPECT_EQ(x.degree, y.degree) << "lambda " << lambda << " N " << n;
            ASSERT_EQ(x.zeros.size(), y.zeros.size()) << "lambda " << lambda << " N " << n;
            for (std::size_t i = 0; i < x.zeros.size(); ++i) {
                EXPECT_LT((x.zeros[i].u.coeffs() - y.zeros[i].u.coeffs()).norm(), 1e-8);
            }
        }
    }
}

TEST(FindZeros, NearBifurcationRefused) {
    const OperatorContext ctx = make_ctx(1.5 * kPi);
    EXPECT_THROW(find_zeros(ctx, apriori_radius(ctx), fast_cfg()), NearBifurcation);
}

TEST(FindZeros, ZeroOnBoundaryRefused) {
    const OperatorContext ctx = make_ctx(6.0);
    EXPECT_THROW(find_zeros(ctx, 1.965509391936354, fast_cfg()), BoundaryZero);
}

TEST(Degree, SmallBallExcludesNontrivialZeros) {
    const OperatorContext ctx = make_ctx(6.0);
    const DegreeReport r = brouwer_degree(ctx, 1.0, fast_cfg());
    ASSERT_EQ(r.zeros.size(), 1u);
    EXPECT_EQ(r.degree, -1);
    EXPECT_TRUE(r.certified);
    EXPECT_FALSE(r.matches_global_degree.has_value());
}

TEST(Degree, EmptyCoefficientBallHasDegreeZero) {
    const OperatorContext ctx = make_ctx(6.0);
    Eigen::VectorXd center = Eigen::VectorXd::Zero(8);
    center[1] = 1.5;
    const DegreeReport r = brouwer_degree(ctx, Domain::coeff_ball(center, 0.5), fast_cfg(64));
    EXPECT_TRUE(r.zeros.empty());
    EXPECT_EQ(r.degree, 0);
}

TEST(Degree, SolvabilityProperty) {
    // Certified nonzero degree implies at least one zero was found.
    for (double lambda : {0.3, 2.0, 5.0, 8.0, 12.0}) {
        const OperatorContext ctx = make_ctx(lambda, 6);
        const DegreeReport r = brouwer_degree(ctx, apriori_radius(ctx), fast_cfg(192));
        if (r.certified && r.degree != 0) {
            EXPECT_FALSE(r.zeros.empty());
        }
        EXPECT_EQ(r.degree, 1) << "lambda " << lambda;
    }
}

TEST(Stabilization, ConstantFromSmallLevels) {
    for (double lambda : {1.0, 6.0}) {
        const StabilizationTable t = degree_stabilization(onsager_kernel(32), lambda, 0.5, fast_cfg(), 2, 16);
        ASSERT_EQ(t.rows.size(), 15u);
        for (const StabilizationRow& row : t.rows) {
            EXPECT_EQ(row.degree, 1) << "lambda " << lambda << " N " << row.level;
            EXPECT_TRUE(row.certified);
        }
        EXPECT_TRUE(t.constant);
        EXPECT_EQ(t.stable_from, 2);
    }
}

TEST(Decomposition, AdditiveAtSix) {
    const OperatorContext ctx = make_ctx(6.0);
    const DecompositionReport r = domain_decomposition_check(ctx, apriori_radius(ctx), fast_cfg());
    EXPECT_EQ(r.sub_degrees, (std::vector<int>{-1, 1, 1}));
    EXPECT_EQ(r.remainder_degree, 0);
    EXPECT_EQ(r.total_degree, 1);
    EXPECT_TRUE(r.consistent);
}

TEST(Decomposition, SingleZeroAtOne) {
    const OperatorContext ctx = make_ctx(1.0);
    const DecompositionReport r = domain_decomposition_check(ctx, apriori_radius(ctx), fast_cfg());
    EXPECT_EQ(r.sub_degrees, (std::vector<int>{1}));
    EXPECT_EQ(r.remainder_zeros, 0);
    EXPECT_TRUE(r.consistent);
}

TEST(Homotopy, ConstantOnFixedDomain) {
    for (double lambda : {1.0, 6.0}) {
        const OperatorContext ctx = make_ctx(lambda);
        const HomotopyReport h = convex_homotopy_check(ctx, apriori_radius(ctx), fast_cfg(), 11);
        ASSERT_EQ(h.rows.size(), 11u);
        EXPECT_EQ(h.rows.front().t, 0.0);
        EXPECT_EQ(h.rows.front().degree, 1);
        for (const HomotopyRow& row : h.rows) {
            EXPECT_EQ(row.degree, 1) << "t " << row.t;
            EXPECT_TRUE(row.certified);
        }
        EXPECT_TRUE(h.constant);
    }
}

TEST(Homotopy, RefusesWhenPathCrossesBifurcationValue) {
    // t = 0.5 lands on lambda_1.
    const OperatorContext ctx = make_ctx(3.0 * kPi);
    try {
        convex_homotopy_check(ctx, apriori_radius(ctx), fast_cfg(), 11);
        FAIL() << "expected refusal";
    } catch (const NearBifurcation& e) {
        EXPECT_NE(std::string(e.what()).find("t = 0.5"), std::string::npos) << e.what();
    }
}

}  // namespace
}  // namespace onsager
