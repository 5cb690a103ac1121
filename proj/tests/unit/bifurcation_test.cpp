#include "onsager/bifurcation.hpp"
#include "onsager/errors.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace onsager {
namespace {

using testing::kPi;

OperatorContext make_ctx(int n = 8) { return OperatorContext(onsager_kernel(32), 1.0, n); }

TEST(BifurcationPoints, ClosedForm) {
    const auto points = bifurcation_points(onsager_kernel(32), 25.0);
    ASSERT_EQ(points.size(), 2u);
    EXPECT_NEAR(points[0], 4.712389, 1e-6);
    EXPECT_NEAR(points[1], 23.561945, 1e-6);
    for (int n = 1; n <= 2; ++n) {
        EXPECT_NEAR(points[n - 1], testing::onsager_lambda_closed(n), 1e-10);
    }
    EXPECT_TRUE(bifurcation_points(onsager_kernel(32), 4.7).empty());
}

TEST(BifurcationPoints, DeterminantDetectorAgrees) {
    const auto detected = bifurcation_points_by_determinant(onsager_kernel(32), 8, 0.5, 25.0);
    const auto closed = bifurcation_points(onsager_kernel(32), 25.0);
    ASSERT_EQ(detected.size(), closed.size());
    for (std::size_t i = 0; i < closed.size(); ++i) {
        EXPECT_NEAR(detected[i], closed[i], 1e-8);
    }
}

TEST(TrivialStability, BelowAndAboveFirstValue) {
    const TrivialStability low = trivial_stability(onsager_kernel(32), 4.0);
    EXPECT_TRUE(low.stable);
    EXPECT_NEAR(low.smallest, 1.0 - 8.0 / (3.0 * kPi), 1e-12);
    EXPECT_NEAR(low.smallest, 0.1512, 1e-4);
    EXPECT_EQ(low.negative_count, 0);

    const TrivialStability high = trivial_stability(onsager_kernel(32), 6.0);
    EXPECT_FALSE(high.stable);
    EXPECT_NEAR(high.smallest, -0.27324, 1e-5);
    EXPECT_EQ(high.negative_count, 1);

    EXPECT_TRUE(trivial_stability(onsager_kernel(32), 1e-6).stable);
    EXPECT_THROW(trivial_stability(onsager_kernel(32), 1.5 * kPi), NearBifurcation);
}

TEST(TrivialStability, FlipsExactlyOnceBeforeSecondValue) {
    int flips = 0;
    bool previous = true;
    for (int i = 1; i <= 200; ++i) {
        const double lambda = 0.1 * i + 0.013;
        const bool stable = trivial_stability(onsager_kernel(32), lambda).stable;
        if (stable != previous) {
            ++flips;
            EXPECT_GT(lambda, 1.5 * kPi);
            EXPECT_LT(lambda, 1.5 * kPi + 0.1);
        }
        previous = stable;
    }
    EXPECT_EQ(flips, 1);
}

TEST(ZeroEigenvalue, OneCrossingPerMode) {
    for (int mode = 1; mode <= 2; ++mode) {
        const ZeroEigenvalueCertificate c = zero_eigenvalue_certificate(make_ctx(), mode);
        EXPECT_LT(c.sigma_min, 1e-10) << "mode " << mode;
        EXPECT_EQ(c.crossing_count, 1) << "mode " << mode;
    }
}

TEST(QuarterRotation, FlipsOddMultiples) {
    const SpectralFn u(std::vector<double>{0.3, 0.0, 0.1, 0.0, -0.2, 0.0}, 64);
    const SpectralFn r1 = quarter_rotation(u, 1);
    EXPECT_EQ(r1.coeffs(), (Eigen::VectorXd(6) << -0.3, 0.0, -0.1, 0.0, 0.2, 0.0).finished());

    const SpectralFn v(std::vector<double>{0.0, 0.4, 0.0, 0.1, 0.0, 0.05}, 64);
    const SpectralFn r2 = quarter_rotation(v, 2);
    EXPECT_EQ(r2.coeffs(), (Eigen::VectorXd(6) << 0.0, -0.4, 0.0, 0.1, 0.0, -0.05).finished());
    EXPECT_THROW(quarter_rotation(u, 2), std::invalid_argument);
}

TEST(QuarterRotation, AgreesWithPointwiseShift) {
    const std::vector<double> c{0.0, 0.4, 0.0, 0.1, 0.0, 0.05};
    const SpectralFn r = quarter_rotation(SpectralFn(c, 64), 2);
    const std::vector<double> rc(r.coeffs().data(), r.coeffs().data() + 6);
    for (double t : {0.0, 0.3, 1.1, 2.5}) {
        EXPECT_NEAR(testing::series_value(rc, t), testing::series_value(c, t + kPi / 4), 1e-14);
    }
}

class ModeOneBranch : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        plus_ = new Branch(continue_branch(make_ctx(), 1, +1, 10.0));
        minus_ = new Branch(continue_branch(make_ctx(), 1, -1, 10.0));
    }
    static void TearDownTestSuite() {
        delete plus_;
        delete minus_;
    }
    static Branch* plus_;
    static Branch* minus_;
};
Branch* ModeOneBranch::plus_ = nullptr;
Branch* ModeOneBranch::minus_ = nullptr;

TEST_F(ModeOneBranch, ReachesEndAndSolvesEquation) {
    EXPECT_TRUE(plus_->complete) << plus_->failure;
    EXPECT_FALSE(plus_->fold_detected);
    ASSERT_GT(plus_->samples.size(), 10u);
    EXPECT_GE(plus_->samples.back().lambda, 10.0 - 1e-9);
    const KernelSpec kernel = onsager_kernel(32);
    for (const BranchSample& s : plus_->samples) {
        EXPECT_LT(s.residual_norm, 1e-10);
        EXPECT_LE(s.amplitude, s.lambda * kernel.sup_norm() + 1e-6) << "lambda " << s.lambda;
    }
}

TEST_F(ModeOneBranch, AmplitudeIncreasesAlongBranch) {
    for (std::size_t i = 1; i < plus_->samples.size(); ++i) {
        EXPECT_GT(plus_->samples[i].lambda, plus_->samples[i - 1].lambda);
        EXPECT_GT(plus_->samples[i].amplitude, plus_->samples[i - 1].amplitude);
    }
}

TEST_F(ModeOneBranch, PitchforkScaling) {
    const PitchforkFit fit = pitchfork_fit(*plus_, 1.5 * kPi);
    EXPECT_GT(fit.r_squared, 0.99);
    EXPECT_NEAR(fit.exponent, 0.5, 0.05);
    EXPECT_GT(fit.slope, 0.0);
    EXPECT_GT(plus_->samples.front().leading, 0.0);
    EXPECT_LT(minus_->samples.front().leading, 0.0);
}

TEST_F(ModeOneBranch, SignedBranchesAreRotations) {
    ASSERT_EQ(plus_->samples.size(), minus_->samples.size());
    for (std::size_t i = 0; i < plus_->samples.size(); ++i) {
        const BranchSample& p = plus_->samples[i];
        const BranchSample& m = minus_->samples[i];
        EXPECT_NEAR(p.lambda, m.lambda, 1e-10);
        const SpectralFn rotated = quarter_rotation(p.u, 1);
        EXPECT_LT((rotated.coeffs() - m.u.coeffs()).norm(), 1e-9) << "sample " << i;
        const OperatorContext ctx = make_ctx().with_lambda(p.lambda);
        EXPECT_LT(residual(rotated, ctx).coeffs().norm(), 1e-10);
    }
}

TEST_F(ModeOneBranch, StableOnceAwayFromOnset) {
    EXPECT_TRUE(plus_->samples.back().stable);
}

TEST(Branch, SecondModeUnstable) {
    const Branch b = continue_branch(make_ctx(), 2, +1, 25.0);
    ASSERT_FALSE(b.samples.empty());
    EXPECT_GE(b.samples.front().lambda, 7.5 * kPi - 1e-6);
    for (const BranchSample& s : b.samples) {
        EXPECT_FALSE(s.stable);
        EXPECT_LT(s.residual_norm, 1e-10);
    }
    const PitchforkFit fit = pitchfork_fit(b, 7.5 * kPi);
    EXPECT_NEAR(fit.exponent, 0.5, 0.05);
}

TEST(Diagram, BelowFirstValueHasOnlyTrivialBranch) {
    const BifurcationDiagram d = assemble_diagram(make_ctx(), 3.0);
    EXPECT_TRUE(d.lambda_points.empty());
    EXPECT_TRUE(d.branches.empty());
    EXPECT_TRUE(d.complete);
    for (const TrivialSample& s : d.trivial_branch) {
        EXPECT_TRUE(s.stable);
    }
}

TEST(Diagram, OnePitchforkUpToTen) {
    const BifurcationDiagram d = assemble_diagram(make_ctx(), 10.0);
    ASSERT_EQ(d.lambda_points.size(), 1u);
    ASSERT_EQ(d.branches.size(), 2u);
    EXPECT_EQ(d.branches[0].parent_mode, 1);
    EXPECT_EQ(d.branches[0].sign * d.branches[1].sign, -1);
    EXPECT_TRUE(d.complete);
    int flips = 0;
    for (std::size_t i = 1; i < d.trivial_branch.size(); ++i) {
        flips += d.trivial_branch[i].stable != d.trivial_branch[i - 1].stable;
    }
    EXPECT_EQ(flips, 1);
}

TEST(Diagram, TwoPitchforksUpToTwentyFive) {
    const BifurcationDiagram d = assemble_diagram(make_ctx(), 25.0);
    ASSERT_EQ(d.lambda_points.size(), 2u);
    EXPECT_EQ(d.branches.size(), 4u);
    EXPECT_TRUE(d.complete);
}

TEST(Diagram, IncompleteWhenModeExceedsLevel) {
    const BifurcationDiagram d = assemble_diagram(make_ctx(1), 25.0);
    EXPECT_FALSE(d.complete);
    EXPECT_FALSE(d.notes.empty());
}

}  // namespace
}  // namespace onsager
