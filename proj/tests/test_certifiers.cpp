#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "chetaev/certifiers.hpp"
#include "chetaev/errors.hpp"
#include "chetaev/problems.hpp"

namespace chetaev {
namespace {

const double kSqrt5 = std::sqrt(5.0);

// S is the whole space, so every sample lies on S and nothing is usable.
class FlatProblem final : public ProblemOracle {
 public:
  std::string id() const override { return "flat"; }
  std::size_t dim() const override { return 2; }
  const ProblemPoint& reference_point() const override { return x_star_; }
  double neighborhood_radius() const override { return 1.0; }
  double objective(const ProblemPoint&) const override { return 0.0; }
  DenseVector subgradient(const ProblemPoint&) const override { return DenseVector::zeros(2); }
  double dist_S(const ProblemPoint&) const override { return 0.0; }
  ProblemPoint project_S(const ProblemPoint& x) const override { return x; }
  DenseVector tangent_project(const ProblemPoint&, const DenseVector& v) const override {
    return v;
  }
  DenseVector riemannian_grad(const ProblemPoint&) const override {
    return DenseVector::zeros(2);
  }
  double chetaev(const ProblemPoint&) const override { return 0.0; }
  double theta1() const override { return 0.0; }
  double c1(double) const override { return 0.0; }
  bool near_nonsmooth_locus(const ProblemPoint&, double) const override { return false; }

 private:
  ProblemPoint x_star_ = DenseVector::zeros(2);
};

RpcaL1Problem synthetic_rpca() {
  return build_spurious_min(synthetic_rpca_matrix(8, 6, 2, 2024), 2);
}

Trajectory relu_trajectory(double alpha = 0.1) {
  return run(ReluL1Problem{}, DenseVector{1, 1, 1e-3}, {alpha, 0.5, 500});
}

// ---------------------------------------------------------------- subregularity

TEST(Subregularity, ReluBoundedBelowWithUnitConstant) {
  const ReluL1Problem p;
  const CertificateReport r = certify_subregularity(p, 2000, 1);
  EXPECT_EQ(r.verdict, Verdict::BoundedBelowRegime);
  EXPECT_LE(r.statistic, 1.0);
  EXPECT_GE(r.extras.at("min_grad_norm"), 0.74);
}

TEST(Subregularity, AbsControlBoundedBelow) {
  const CertificateReport r = certify_subregularity(AbsControlProblem{}, 1000, 2);
  EXPECT_EQ(r.verdict, Verdict::BoundedBelowRegime);
  EXPECT_GE(r.extras.at("min_grad_norm"), 1.0 - 1e-15);
}

TEST(Subregularity, QuadraticFitsLinearExponent) {
  const CertificateReport r = certify_subregularity(QuadraticProblem{}, 1000, 3);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_NEAR(r.extras.at("theta"), 1.0, 1e-9);
  EXPECT_NEAR(r.statistic, 1.0, 1e-12);
}

TEST(Subregularity, NoUsableSamplesIsInconclusive) {
  const CertificateReport r = certify_subregularity(FlatProblem{}, 200, 4);
  EXPECT_EQ(r.verdict, Verdict::Inconclusive);
  EXPECT_EQ(r.checked, 0u);
  EXPECT_EQ(r.skipped, 200u);
}

TEST(Subregularity, TooFewSamples) {
  EXPECT_THROW(certify_subregularity(ReluL1Problem{}, 10, 1), std::invalid_argument);
}

// ---------------------------------------------------------------- Verdier

TEST(Verdier, ReluConstantIsSqrt5) {
  const CertificateReport r = certify_verdier(ReluL1Problem{}, 2000, 1);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  ASSERT_TRUE(r.constant.has_value());
  EXPECT_LE(*r.constant, kSqrt5 + 1e-9);
  EXPECT_GE(*r.constant, kSqrt5 * 0.99);
}

TEST(Verdier, ReluClosedFormRatio) {
  const ReluL1Problem p;
  const DenseVector y{1.1, 0.95, 0};
  for (double x3 : {-1e-3, -1e-6, 1e-4}) {
    const DenseVector x{1.1, 0.95, x3};
    const double expected = x3 < 0 ? kSqrt5 : 1.0;
    EXPECT_NEAR(verdier_ratio(p, x, y), expected, 1e-12);
  }
}

TEST(Verdier, FailureDetected) {
  const CertificateReport r = certify_verdier(VerdierFailProblem{}, 2000, 1);
  EXPECT_EQ(r.verdict, Verdict::Violated);
  EXPECT_GT(r.extras.at("max_ratio.scale_1e-4"), 100.0);
}

TEST(Verdier, FailureClosedForm) {
  const VerdierFailProblem p;
  const double x1 = 0.01;
  const DenseVector y{x1, 0};
  const DenseVector x{x1, x1 * x1 + 1e-12};
  EXPECT_NEAR(verdier_ratio(p, x, y), 2.0 / x1, 1e-3 * 2.0 / x1);
}

TEST(Verdier, RpcaFiniteConstant) {
  const CertificateReport r = certify_verdier(synthetic_rpca(), 700, 1);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  ASSERT_TRUE(r.constant.has_value());
  EXPECT_TRUE(std::isfinite(*r.constant));
}

// ---------------------------------------------------------------- Chetaev audit

TEST(ChetaevAudit, ReluEqualityCase) {
  const ReluL1Problem p;
  const Trajectory t = relu_trajectory();
  const CertificateReport r = audit_chetaev(p, t);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_GT(r.checked, 0u);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
}

TEST(ChetaevAudit, RpcaPositiveIncrements) {
  const RpcaL1Problem p = synthetic_rpca();
  Rng rng(9);
  const Trajectory t = run(p, sample_initial(p, 1e-3, rng).x, {0.005, 10.0, 500});
  const CertificateReport r = audit_chetaev(p, t);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_GT(r.checked, 0u);
  EXPECT_GT(r.extras.at("c1"), 0.0);
  EXPECT_EQ(r.extras.at("theta1"), 0.0);
}

TEST(ChetaevAudit, TamperedTrajectoryViolates) {
  const ReluL1Problem p;
  Trajectory t = relu_trajectory();
  // Move x1 of iterate 3 so C drops across step 2 -> 3.
  StepRecord& r3 = t.records[3];
  r3.x.set(0, r3.x[0] + 0.01);
  r3.chetaev = p.chetaev(r3.x);
  const CertificateReport r = audit_chetaev(p, t);
  EXPECT_EQ(r.verdict, Verdict::Violated);
  ASSERT_TRUE(r.failing_step.has_value());
  EXPECT_EQ(*r.failing_step, 2u);
}

TEST(ChetaevAudit, WrongProblemAndControls) {
  const Trajectory t = relu_trajectory();
  EXPECT_THROW(audit_chetaev(AbsControlProblem{}, t), MismatchError);
  const AbsControlProblem abs;
  const Trajectory ta = run(abs, DenseVector{1e-3, 1e-3}, {1e-4, 0.5, 50});
  EXPECT_EQ(audit_chetaev(abs, ta).verdict, Verdict::Inconclusive);
}

// ---------------------------------------------------------------- monotonicity

TEST(Monotonicity, ReluQuarterStepThreshold) {
  const ReluL1Problem p;
  const Trajectory t = relu_trajectory();
  const CertificateReport r = audit_distance_monotonicity(p, t, 0.1 / 4);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_GE(r.extras.at("largest_valid_threshold"), 0.1 / 4);
}

TEST(Monotonicity, LargeThresholdViolatesSomewhere) {
  const ReluL1Problem p;
  std::size_t violated = 0;
  for (double alpha : {0.05, 0.08, 0.1, 0.12, 0.15}) {
    const Trajectory t = run(p, DenseVector{1, 1, 1e-3}, {alpha, 0.5, 500});
    if (audit_distance_monotonicity(p, t, 10 * alpha).verdict == Verdict::Violated) ++violated;
  }
  EXPECT_GT(violated, 0u);
}

TEST(Monotonicity, TrajectoryOnSIsVacuous) {
  const ReluL1Problem p;
  const Trajectory t = run(p, DenseVector{1, 1, 0}, {0.1, 0.5, 10});
  const CertificateReport r = audit_distance_monotonicity(p, t, 0.025);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_EQ(r.checked, 0u);
  EXPECT_THROW(audit_distance_monotonicity(p, t, 0.0), std::invalid_argument);
}

TEST(ProjectionRatio, ReluWithinBound) {
  const ReluL1Problem p;
  const CertificateReport r = audit_projection_ratio(p, relu_trajectory(), kSqrt5);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_LE(r.statistic, 1 + 0.1 * kSqrt5);
}

// ---------------------------------------------------------------- local minimality

TEST(LocalMin, Relu) {
  const CertificateReport r = probe_local_min(ReluL1Problem{}, 1000, 1);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_EQ(r.extras.at("spurious"), 1.0);
  EXPECT_EQ(r.extras.at("witness_objective"), 0.0);
  EXPECT_EQ(r.witnesses.back(), DenseVector({-1, 1, 1}));
}

TEST(LocalMin, RpcaSmallExample) {
  const RpcaL1Problem p = build_spurious_min({{0, 0}, {2, 0}, {0, -3}}, 1);
  const CertificateReport r = probe_local_min(p, 1000, 1);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_EQ(r.extras.at("reference_objective"), 5.0);
  EXPECT_EQ(r.extras.at("witness_objective"), 2.0);
}

TEST(LocalMin, AbsControlHasNoWitness) {
  const CertificateReport r = probe_local_min(AbsControlProblem{}, 1000, 1);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_EQ(r.extras.at("spurious"), 0.0);
}

TEST(LocalMin, NotALocalMinimumIsViolated) {
  // f = -x^2 has a strict local maximum at 0.
  class Concave final : public ProblemOracle {
   public:
    std::string id() const override { return "concave"; }
    std::size_t dim() const override { return 1; }
    const ProblemPoint& reference_point() const override { return x_; }
    double neighborhood_radius() const override { return 1.0; }
    double objective(const ProblemPoint& x) const override { return -x[0] * x[0]; }
    DenseVector subgradient(const ProblemPoint& x) const override {
      return DenseVector{-2 * x[0]};
    }
    double dist_S(const ProblemPoint& x) const override { return std::abs(x[0]); }
    ProblemPoint project_S(const ProblemPoint&) const override { return x_; }
    DenseVector tangent_project(const ProblemPoint&, const DenseVector&) const override {
      return DenseVector{0.0};
    }
    DenseVector riemannian_grad(const ProblemPoint&) const override { return DenseVector{0.0}; }
    double chetaev(const ProblemPoint& x) const override { return x[0] * x[0]; }
    double theta1() const override { return 0.0; }
    double c1(double) const override { return 0.0; }
    bool near_nonsmooth_locus(const ProblemPoint&, double) const override { return false; }

   private:
    ProblemPoint x_{0.0};
  };
  const Concave p;
  const CertificateReport r = probe_local_min(p, 1000, 1);
  EXPECT_EQ(r.verdict, Verdict::Violated);
  EXPECT_LT(r.statistic, 0.0);
}

// ---------------------------------------------------------------- reports

TEST(Reports, WitnessesReproduceStatistics) {
  const ReluL1Problem relu;
  const Trajectory t = relu_trajectory();
  std::vector<CertificateReport> reports = {
      certify_subregularity(relu, 500, 5),  certify_verdier(relu, 500, 5),
      probe_local_min(relu, 1000, 5),       audit_chetaev(relu, t),
      audit_distance_monotonicity(relu, t, 0.025),
      audit_projection_ratio(relu, t, kSqrt5),
      certify_verdier(VerdierFailProblem{}, 500, 5)};
  for (const CertificateReport& r : reports) {
    std::unique_ptr<ProblemOracle> p = make_problem(ProblemSpec{r.problem_id});
    ASSERT_FALSE(r.witnesses.empty()) << r.name;
    EXPECT_NEAR(evaluate_witness(*p, r), r.statistic, 1e-12) << r.name;
  }
  const RpcaL1Problem rpca = synthetic_rpca();
  const CertificateReport lm = probe_local_min(rpca, 1000, 5);
  EXPECT_NEAR(evaluate_witness(rpca, lm), lm.statistic, 1e-12);
}

TEST(Reports, TextRoundTrip) {
  const CertificateReport r = certify_verdier(ReluL1Problem{}, 300, 6);
  std::stringstream s;
  write_report(s, r);
  const CertificateReport back = parse_report(s);
  EXPECT_EQ(back.name, r.name);
  EXPECT_EQ(back.problem_id, r.problem_id);
  EXPECT_EQ(back.verdict, r.verdict);
  EXPECT_EQ(back.samples, r.samples);
  EXPECT_EQ(back.checked, r.checked);
  EXPECT_EQ(back.statistic, r.statistic);
  EXPECT_EQ(back.constant, r.constant);
  EXPECT_EQ(back.witnesses, r.witnesses);
  EXPECT_EQ(back.extras, r.extras);
  EXPECT_EQ(back.notes, r.notes);
  EXPECT_EQ(evaluate_witness(ReluL1Problem{}, back), r.statistic);
}

TEST(Reports, MalformedText) {
  std::istringstream missing("problem = relu-l1\n");
  EXPECT_THROW(parse_report(missing), MalformedInputError);
  std::istringstream junk("name = verdier\nverdict = Maybe\n");
  EXPECT_THROW(parse_report(junk), MalformedInputError);
}

TEST(Reports, NestedSamplingIsMonotone) {
  const ReluL1Problem relu;
  const VerdierFailProblem vf;
  double prev_relu = 0.0;
  double prev_vf = 0.0;
  for (std::size_t n : {250, 500, 1000, 2000}) {
    const double a = *certify_verdier(relu, n, 8).constant;
    EXPECT_GE(a, prev_relu);
    prev_relu = a;
    const CertificateReport b = certify_verdier(vf, n, 8);
    double overall = 0.0;
    for (const auto& [k, v] : b.extras) {
      if (k.starts_with("max_ratio.")) overall = std::max(overall, v);
    }
    EXPECT_GE(overall, prev_vf);
    prev_vf = overall;
  }
}

}  // namespace
}  // namespace chetaev
