#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "thermoq/fisher.hpp"

namespace {

using namespace thermoq;
using thermoq::testing::Gen;
using thermoq::testing::rel_err;

Matrix bloch(const Eigen::Vector3d& r) {
  return 0.5 * (Matrix::Identity(2, 2) + r(0) * sigma_x() + r(1) * sigma_y() +
                r(2) * sigma_z());
}

// Mixed-qubit QFI in Bloch coordinates.
double bloch_qfi(const Eigen::Vector3d& r, const Eigen::Vector3d& dr) {
  const double rr = r.squaredNorm();
  return dr.squaredNorm() + std::pow(r.dot(dr), 2) / (1.0 - rr);
}

TEST(ClassicalFisher, Binary) {
  const OutcomeDistribution d({0.25, 0.75}, {0.5, -0.5});
  EXPECT_DOUBLE_EQ(classical_fisher(d), 0.25 / 0.25 + 0.25 / 0.75);
}

TEST(ClassicalFisher, ZeroProbabilityConventions) {
  EXPECT_DOUBLE_EQ(classical_fisher(OutcomeDistribution({0.0, 1.0}, {0.0, 0.0})),
                   0.0);
  EXPECT_THROW(classical_fisher(OutcomeDistribution({0.0, 1.0}, {1e-6, -1e-6})),
               IllDefinedFisher);
}

TEST(ClassicalFisher, Validation) {
  EXPECT_THROW(OutcomeDistribution({0.5, 0.6}, {0.0, 0.0}), DomainError);
  EXPECT_THROW(OutcomeDistribution({0.5, 0.5}, {0.1, 0.0}), DomainError);
  EXPECT_THROW(OutcomeDistribution({1.5, -0.5}, {0.0, 0.0}), DomainError);
  EXPECT_THROW(OutcomeDistribution({1.0}, {0.0, 0.0}), DomainError);
  EXPECT_THROW(OutcomeDistribution({}, {}), DomainError);
}

TEST(ClassicalFisher, FiniteDifferenceOfLogLikelihood) {
  // Geometric-like family p_k(T) proportional to exp(-k/T), k = 0..4.
  auto dist = [](double T) {
    std::vector<double> p(5);
    double z = 0.0;
    for (int k = 0; k < 5; ++k) z += p[k] = std::exp(-k / T);
    for (double& x : p) x /= z;
    return p;
  };
  const double T = 1.3, h = 1e-5;
  const auto p = dist(T), up = dist(T + h), dn = dist(T - h);
  std::vector<double> dp(5);
  double sum = 0.0;
  for (int k = 0; k < 5; ++k) dp[k] = (up[k] - dn[k]) / (2 * h);
  for (int k = 0; k < 4; ++k) sum += dp[k];
  dp[4] = -sum;
  // Energy variance / T^4 for a Gibbs family.
  double e = 0.0, e2 = 0.0;
  for (int k = 0; k < 5; ++k) {
    e += k * p[k];
    e2 += k * k * p[k];
  }
  EXPECT_LT(rel_err(classical_fisher(OutcomeDistribution(p, dp)),
                    (e2 - e * e) / std::pow(T, 4)),
            1e-8);
}

TEST(Qfi, PureStateOracle) {
  Gen gen(31);
  for (int k = 0; k < 15; ++k) {
    const Eigen::Index d = 2 + k % 4;
    const Vector psi = gen.state(d);
    Vector dpsi = gen.complex_gaussian(d, 1);
    // Keep the path normalized to first order.
    dpsi -= psi * cplx(psi.dot(dpsi).real(), 0.0);
    const Matrix rho = psi * psi.adjoint();
    const Matrix drho = dpsi * psi.adjoint() + psi * dpsi.adjoint();
    const double want =
        4.0 * (dpsi.squaredNorm() - std::norm(psi.dot(dpsi)));
    EXPECT_LT(rel_err(qfi(rho, drho), want), 1e-10);
  }
}

TEST(Qfi, MixedQubitBlochOracle) {
  Gen gen(32);
  for (int k = 0; k < 20; ++k) {
    Eigen::Vector3d r(gen.normal(), gen.normal(), gen.normal());
    r *= gen.uniform(0.05, 0.95) / r.norm();
    const Eigen::Vector3d dr(gen.normal(), gen.normal(), gen.normal());
    const Matrix drho =
        0.5 * (dr(0) * sigma_x() + dr(1) * sigma_y() + dr(2) * sigma_z());
    EXPECT_LT(rel_err(qfi(bloch(r), drho), bloch_qfi(r, dr)), 1e-10);
  }
}

TEST(Qfi, CommutingCaseIsClassical) {
  const double p[] = {0.2, 0.3, 0.5};
  const double dp[] = {0.1, -0.3, 0.2};
  const HermitianOperator rho = HermitianOperator::diagonal(p);
  const HermitianOperator drho = HermitianOperator::diagonal(dp);
  const double cf =
      classical_fisher(OutcomeDistribution({0.2, 0.3, 0.5}, {0.1, -0.3, 0.2}));
  EXPECT_NEAR(qfi(rho.matrix(), drho.matrix()), cf, 1e-14);
}

TEST(Qfi, SldSolvesLyapunovEquation) {
  Gen gen(33);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index d = 2 + k % 3;
    const Matrix rho = gen.density(d);
    Matrix drho = gen.hermitian(d).matrix();
    drho -= drho.trace() / static_cast<double>(d) * Matrix::Identity(d, d);
    const QfiResult r = qfi_with_sld(rho, drho);
    EXPECT_LT((0.5 * (r.sld * rho + rho * r.sld) - drho).cwiseAbs().maxCoeff(),
              1e-10);
    EXPECT_NEAR(r.value, (rho * r.sld * r.sld).trace().real(), 1e-9);
  }
}

TEST(Qfi, DominatesEveryProjectiveMeasurement) {
  Gen gen(34);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index d = 2 + k % 3;
    const Matrix rho = gen.density(d);
    Matrix drho = gen.hermitian(d).matrix();
    drho -= drho.trace() / static_cast<double>(d) * Matrix::Identity(d, d);
    const Matrix u = gen.unitary(d);
    std::vector<double> p(d), dp(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      p[i] = (u.col(i).adjoint() * rho * u.col(i))(0, 0).real();
      dp[i] = (u.col(i).adjoint() * drho * u.col(i))(0, 0).real();
    }
    const double cf = classical_fisher(OutcomeDistribution(p, dp));
    EXPECT_LE(cf, qfi(rho, drho) * (1 + 1e-12));
  }
}

TEST(Qfi, UnitaryInvariantAndQuadratic) {
  Gen gen(35);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index d = 3;
    const Matrix rho = gen.density(d);
    Matrix drho = gen.hermitian(d).matrix();
    drho -= drho.trace() / 3.0 * Matrix::Identity(d, d);
    const Matrix u = gen.unitary(d);
    const double f = qfi(rho, drho);
    EXPECT_LT(rel_err(qfi(u * rho * u.adjoint(), u * drho * u.adjoint()), f),
              1e-10);
    EXPECT_LT(rel_err(qfi(rho, 2.5 * drho), 6.25 * f), 1e-12);
  }
}

TEST(Qfi, SupportLeakIsIllDefined) {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  // Population moving into |1> from a pure |0>: infinite information.
  Matrix drho = Matrix::Zero(2, 2);
  drho(0, 0) = -1e-3;
  drho(1, 1) = 1e-3;
  EXPECT_THROW(qfi(rho, drho), IllDefinedFisher);
  drho.setZero();
  EXPECT_EQ(qfi(rho, drho), 0.0);
}

TEST(Qfi, Validation) {
  EXPECT_THROW(qfi(0.5 * Matrix::Identity(2, 2), sigma_x() + Matrix::Identity(2, 2)),
               DomainError);
  EXPECT_THROW(qfi(0.5 * Matrix::Identity(2, 2), Matrix::Zero(3, 3)), DomainError);
}

TEST(QfiRate, GibbsStateHasStaticInformation) {
  // The thermal state is stationary; after many relaxation times rho_t
  // carries the Gibbs information (w/T^2)^2 p(1-p) while F/t -> 0.
  const double w = 1.0, T = 0.8;
  const LindbladModel m = qubit_model(w, T, {1.0, 1.0, 5.0});
  Vector psi(2);
  psi << 1.0, 0.0;
  const DensityOperator rho0 = DensityOperator::pure(psi);
  const double ts[] = {40.0};
  const double p = 1.0 / (1.0 + std::exp(w / T));
  const double gibbs = std::pow(w / (T * T), 2) * p * (1 - p);
  const auto rate = qfi_rate_vs_time(m, rho0, ts);
  EXPECT_LT(rel_err(rate[0] * 40.0, gibbs), 1e-8);
  const double bad[] = {0.0};
  EXPECT_THROW(qfi_rate_vs_time(m, rho0, bad), DomainError);
}

}  // namespace
