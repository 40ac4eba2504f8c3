#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "hmi/ahp/ahp.hpp"
#include "hmi/harness/config.hpp"

using namespace hmi;
using namespace hmi::ahp;

namespace {

struct EigenOracle {
  std::vector<double> w;
  double lambda = 0.0;
};

// Principal eigenpair from a general eigensolver.
EigenOracle eigen_oracle(const PairwiseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < n; ++k)
    if (es.eigenvalues()[k].real() > es.eigenvalues()[best].real()) best = k;
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  v /= v.sum();
  EigenOracle o;
  o.lambda = es.eigenvalues()[best].real();
  for (Eigen::Index i = 0; i < n; ++i) o.w.push_back(v(i));
  return o;
}

PairwiseMatrix consistent_from(const std::vector<double>& w) {
  PairwiseMatrix m(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) m.set(i, j, w[i] / w[j]);
  return m;
}

}  // namespace

TEST(Ahp, AllOnesIsUniform) {
  for (std::size_t n = 1; n <= 9; ++n) {
    const auto pr = priority_weights(PairwiseMatrix(n));
    for (double w : pr.vector.weights) EXPECT_NEAR(w, 1.0 / static_cast<double>(n), 1e-12);
    EXPECT_NEAR(pr.consistency.cr, 0.0, 1e-12);
  }
}

TEST(Ahp, TwoByTwo) {
  PairwiseMatrix m(2);
  m.set(0, 1, 3.0);
  const auto pr = priority_weights(m);
  EXPECT_NEAR(pr.vector.weights[0], 0.75, 1e-12);
  EXPECT_NEAR(pr.vector.weights[1], 0.25, 1e-12);
  EXPECT_EQ(pr.consistency.cr, 0.0);
}

TEST(Ahp, ConsistentThreeByThree) {
  const auto m = parse_matrix("3\n1 2 4\n1/2 1 2\n1/4 1/2 1\n");
  const auto pr = priority_weights(m);
  EXPECT_NEAR(pr.vector.weights[0], 4.0 / 7, 1e-12);
  EXPECT_NEAR(pr.vector.weights[1], 2.0 / 7, 1e-12);
  EXPECT_NEAR(pr.vector.weights[2], 1.0 / 7, 1e-12);
  EXPECT_NEAR(pr.consistency.lambda_max, 3.0, 1e-12);
  EXPECT_NEAR(pr.consistency.cr, 0.0, 1e-12);
}

TEST(Ahp, BundledCriticalityMatrix) {
  const auto m = parse_matrix(read_text_file(bundled_data_path("criticality.ahp")));
  const auto pr = priority_weights(m);
  const auto o = eigen_oracle(m);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(pr.vector.weights[i], o.w[i], 1e-6);
  EXPECT_NEAR(pr.consistency.lambda_max, o.lambda, 1e-9);
  EXPECT_NEAR(pr.vector.weights[0], 0.6370, 1e-4);
  EXPECT_NEAR(pr.vector.weights[1], 0.2583, 1e-4);
  EXPECT_NEAR(pr.vector.weights[2], 0.1047, 1e-4);
  EXPECT_NEAR(pr.consistency.cr, (o.lambda - 3.0) / 2.0 / 0.58, 1e-9);
  EXPECT_LT(pr.consistency.cr, kAcceptableCR);

  const auto ranked = rank_tiers({"safety", "conflict-reduction", "performance"}, m);
  EXPECT_EQ(ranked[0].name, "safety");
  EXPECT_EQ(ranked[1].name, "conflict-reduction");
  EXPECT_EQ(ranked[2].name, "performance");
}

TEST(AhpOracle, RandomReciprocalMatrices) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> un(3, 9), uj(1, 9);
  std::bernoulli_distribution flip(0.5);
  for (int run = 0; run < 200; ++run) {
    const auto n = static_cast<std::size_t>(un(rng));
    PairwiseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = uj(rng);
        m.set(i, j, flip(rng) ? v : 1.0 / v);
      }
    const auto pr = priority_weights(m);
    const auto o = eigen_oracle(m);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(pr.vector.weights[i], o.w[i], 1e-6) << "run " << run;
    ASSERT_NEAR(pr.consistency.lambda_max, o.lambda, 1e-6);
    ASSERT_GE(pr.consistency.lambda_max, static_cast<double>(n) - 1e-9);
  }
}

TEST(AhpProperty, ConsistentMatricesHaveZeroCr) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uw(0.1, 10.0);
  std::uniform_int_distribution<int> un(1, 9);
  for (int run = 0; run < 200; ++run) {
    std::vector<double> w(static_cast<std::size_t>(un(rng)));
    for (auto& v : w) v = uw(rng);
    double sum = 0.0;
    for (double v : w) sum += v;
    const auto pr = priority_weights(consistent_from(w));
    EXPECT_NEAR(pr.consistency.cr, 0.0, 1e-9);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(pr.vector.weights[i], w[i] / sum, 1e-9);
  }
}

TEST(AhpProperty, SetKeepsReciprocity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uv(0.11, 9.0);
  PairwiseMatrix m(6);
  for (int k = 0; k < 500; ++k) {
    const auto i = static_cast<std::size_t>(rng() % 6), j = static_cast<std::size_t>(rng() % 6);
    if (i == j) continue;
    m.set(i, j, uv(rng));
    for (std::size_t a = 0; a < 6; ++a) {
      EXPECT_EQ(m(a, a), 1.0);
      for (std::size_t b = 0; b < 6; ++b) EXPECT_NEAR(m(a, b) * m(b, a), 1.0, 1e-12);
    }
  }
}

// Scaling every judgement by a common exponent keeps the ranking.
TEST(AhpProperty, RankingStableUnderPowerScaling) {
  const auto m = parse_matrix(read_text_file(bundled_data_path("criticality.ahp")));
  PairwiseMatrix sq(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) sq.set(i, j, std::sqrt(m(i, j)));
  const auto a = priority_weights(m).vector.weights, b = priority_weights(sq).vector.weights;
  EXPECT_GT(b[0], b[1]);
  EXPECT_GT(b[1], b[2]);
  EXPECT_GT(a[0], b[0]);  // sharper judgements, more weight on the top item
}

TEST(RankTiers, TiesKeepInputOrder) {
  const auto ranked = rank_tiers({"a", "b", "c"}, PairwiseMatrix(3));
  EXPECT_EQ(ranked[0].name, "a");
  EXPECT_EQ(ranked[1].name, "b");
  EXPECT_EQ(ranked[2].name, "c");
}

TEST(RankTiers, ReordersByWeight) {
  const auto ranked = rank_tiers({"x", "y", "z"}, parse_matrix("3\n1 1/4 1/2\n4 1 2\n2 1/2 1\n"));
  EXPECT_EQ(ranked[0].name, "y");
  EXPECT_EQ(ranked[1].name, "z");
  EXPECT_EQ(ranked[2].name, "x");
  EXPECT_EQ(ranked[0].input_index, 1u);
}

TEST(RankTiers, RejectsInconsistentJudgements) {
  // a > b > c > a
  const auto m = parse_matrix("3\n1 9 1/9\n1/9 1 9\n9 1/9 1\n");
  EXPECT_GE(priority_weights(m).consistency.cr, 0.1);
  EXPECT_THROW((void)rank_tiers({"a", "b", "c"}, m), AhpError);
  EXPECT_THROW((void)rank_tiers({"a", "b"}, m), AhpError);
}

TEST(ParseMatrix, FractionsAndComments) {
  const auto m = parse_matrix("# header\n2   # dimension\n1 3/2\n2/3 1\n");
  EXPECT_DOUBLE_EQ(m(0, 1), 1.5);
  EXPECT_DOUBLE_EQ(m(1, 0), 1.0 / 1.5);
}

TEST(ParseMatrix, Errors) {
  EXPECT_THROW((void)parse_matrix(""), AhpError);
  EXPECT_THROW((void)parse_matrix("10\n"), AhpError);
  EXPECT_THROW((void)parse_matrix("2.5\n"), AhpError);
  EXPECT_THROW((void)parse_matrix("2\n1 2\n"), AhpError);
  EXPECT_THROW((void)parse_matrix("2\n1 2\n1/2\n"), AhpError);
  EXPECT_THROW((void)parse_matrix("2\n1 2\n1/3 1\n"), AhpError);  // not reciprocal
  EXPECT_THROW((void)parse_matrix("2\n2 2\n1/2 1\n"), AhpError);  // diagonal
  EXPECT_THROW((void)parse_matrix("2\n1 -2\n-1/2 1\n"), AhpError);
  EXPECT_THROW((void)parse_matrix("2\n1 1/0\n0 1\n"), AhpError);
  EXPECT_THROW((void)parse_matrix("2\n1 x\n1 1\n"), ConfigError);
}
