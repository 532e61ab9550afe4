#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "thermoq/operators.hpp"

namespace {

using namespace thermoq;
using thermoq::testing::Gen;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Taylor series with scaling and squaring, independent of Eigen's Pade.
Matrix series_expm(const Matrix& a) {
  int s = 0;
  double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.5) {
    nrm /= 2;
    ++s;
  }
  const Matrix b = a / std::pow(2.0, s);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

TEST(HermitianOperator, SymmetrizesSmallNoise) {
  Matrix m = sigma_x();
  m(0, 1) += 1e-14;
  const HermitianOperator h(m);
  EXPECT_EQ(h.matrix(), h.matrix().adjoint());
}

TEST(HermitianOperator, RejectsNonHermitian) {
  EXPECT_THROW(HermitianOperator{sigma_minus()}, DomainError);
  EXPECT_THROW(HermitianOperator{Matrix::Zero(2, 3)}, DomainError);
}

TEST(HermitianOperator, ToleranceIsRelativeToScale) {
  Matrix m = 1e6 * sigma_z();
  m(0, 1) = 1e-7;
  EXPECT_NO_THROW(HermitianOperator{m});
  Matrix small = sigma_z();
  small(0, 1) = 1e-7;
  EXPECT_THROW(HermitianOperator{small}, DomainError);
}

TEST(HermitianOperator, Arithmetic) {
  const double d[] = {1.0, -2.0};
  const HermitianOperator a = HermitianOperator::diagonal(d);
  const HermitianOperator b = 2.0 * HermitianOperator::identity(2) + a;
  EXPECT_NEAR(b.matrix()(0, 0).real(), 3.0, 1e-15);
  EXPECT_NEAR(b.matrix()(1, 1).real(), 0.0, 1e-15);
  EXPECT_EQ(HermitianOperator::zero(3).matrix().norm(), 0.0);
  EXPECT_THROW(a + HermitianOperator::identity(3), DomainError);
}

TEST(DensityOperator, Validation) {
  EXPECT_NO_THROW(DensityOperator(0.5 * Matrix::Identity(2, 2)));
  EXPECT_THROW(DensityOperator(Matrix::Identity(2, 2)), DomainError);
  Matrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityOperator{neg}, DomainError);
  Vector z = Vector::Zero(2);
  EXPECT_THROW(DensityOperator::pure(z), DomainError);
}

TEST(DensityOperator, PureNormalizes) {
  Vector v(2);
  v << 3.0, cplx(0, 4.0);
  const DensityOperator r = DensityOperator::pure(v);
  EXPECT_NEAR(r.matrix().trace().real(), 1.0, 1e-15);
  EXPECT_NEAR(max_abs(r.matrix() * r.matrix() - r.matrix()), 0.0, 1e-15);
}

TEST(HermitianEig, ReconstructsRandomOperators) {
  Gen gen(1);
  for (int k = 0; k < 20; ++k) {
    const HermitianOperator h = gen.hermitian(1 + k % 6);
    const EigenDecomposition ed = hermitian_eig(h);
    const Matrix back = ed.vectors * ed.values.cast<cplx>().asDiagonal() *
                        ed.vectors.adjoint();
    EXPECT_LT(max_abs(back - h.matrix()), 1e-12);
    for (Eigen::Index i = 1; i < ed.values.size(); ++i) {
      EXPECT_LE(ed.values(i - 1), ed.values(i));
    }
  }
}

TEST(HermitianEig, RealFastPathAgreesWithComplexSolver) {
  Gen gen(2);
  const Matrix g = gen.complex_gaussian(5, 5).real().cast<cplx>();
  const Matrix sym = g + g.transpose();
  const EigenDecomposition ed = hermitian_eig(sym);
  Eigen::SelfAdjointEigenSolver<Matrix> ref(sym);
  EXPECT_LT((ed.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OperatorNorm, PsdOnly) {
  const double d[] = {0.0, 2.5, 1.0};
  EXPECT_DOUBLE_EQ(operator_norm_psd(HermitianOperator::diagonal(d)), 2.5);
  EXPECT_THROW(operator_norm_psd(HermitianOperator(sigma_z())), DomainError);
}

TEST(ExpmAction, MatchesTaylorSeriesOracle) {
  Gen gen(3);
  for (int k = 0; k < 10; ++k) {
    const Matrix g = gen.complex_gaussian(4, 4);
    const Vector v = gen.state(4);
    const double t = gen.uniform(0.1, 3.0);
    const Vector got = expm_action(g, v, t);
    const Vector want = series_expm(t * g) * v;
    EXPECT_LT((got - want).norm(), 1e-10 * std::max(1.0, want.norm()));
  }
}

TEST(ExpmAction, RealGeneratorAndDimensionCheck) {
  RealMatrix g(2, 2);
  g << 0, 1, -1, 0;
  RealVector v(2);
  v << 1, 0;
  const RealVector out = expm_action(g, v, std::numbers::pi / 2);
  EXPECT_NEAR(out(0), 0.0, 1e-14);
  EXPECT_NEAR(out(1), -1.0, 1e-14);
  RealVector bad(3);
  EXPECT_THROW(expm_action(g, bad, 1.0), DomainError);
}

TEST(Tensor, ProbeFirstOrdering) {
  const Matrix k = tensor(sigma_minus(), Matrix::Identity(2, 2));
  // |0>|b><1|b| for b = 0, 1.
  EXPECT_EQ(k(0, 2), cplx(1.0));
  EXPECT_EQ(k(1, 3), cplx(1.0));
  EXPECT_EQ(k.cwiseAbs().sum(), 2.0);
}

TEST(Tensor, MixedProductProperty) {
  Gen gen(4);
  const Matrix a = gen.complex_gaussian(2, 2), b = gen.complex_gaussian(3, 3);
  const Matrix c = gen.complex_gaussian(2, 2), d = gen.complex_gaussian(3, 3);
  EXPECT_LT(max_abs(tensor(a, b) * tensor(c, d) - tensor(a * c, b * d)), 1e-12);
}

TEST(ProjectorFamily, FromHamiltonianGroupsDegeneracies) {
  const double d[] = {1.0, 0.0, 1.0 + 1e-11, -2.0};
  const ProjectorFamily f =
      ProjectorFamily::from_hamiltonian(HermitianOperator::diagonal(d));
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f.dim(), 4u);
  EXPECT_NEAR(f.label(0), -2.0, 1e-15);
  EXPECT_NEAR(f.label(2), 1.0, 1e-10);
  EXPECT_EQ(f.basis(2).cols(), 2);
  EXPECT_EQ(f.offset(2), 2);
  EXPECT_EQ(f.index_of(0.0), 1u);
  EXPECT_THROW(f.index_of(0.5), DomainError);
}

TEST(ProjectorFamily, ResolvesIdentity) {
  Gen gen(6);
  for (int k = 0; k < 10; ++k) {
    const Matrix u = gen.unitary(4);
    RealVector ev(4);
    ev << 0.0, 1.0, 1.0, 3.0;
    const HermitianOperator h(u * ev.cast<cplx>().asDiagonal() * u.adjoint());
    const ProjectorFamily f = ProjectorFamily::from_hamiltonian(h);
    ASSERT_EQ(f.size(), 3u);
    Matrix sum = Matrix::Zero(4, 4);
    Matrix recon = Matrix::Zero(4, 4);
    for (std::size_t b = 0; b < f.size(); ++b) {
      const Matrix p = f.projector(b);
      EXPECT_LT(max_abs(p * p - p), 1e-12);
      sum += p;
      recon += f.label(b) * p;
    }
    EXPECT_LT(max_abs(sum - Matrix::Identity(4, 4)), 1e-12);
    EXPECT_LT(max_abs(recon - h.matrix()), 1e-12);
    const Matrix s = f.stacked_basis();
    EXPECT_LT(max_abs(s.adjoint() * s - Matrix::Identity(4, 4)), 1e-12);
  }
}

TEST(ProjectorFamily, FromBasesValidates) {
  const Matrix i2 = Matrix::Identity(2, 2);
  EXPECT_NO_THROW(ProjectorFamily::from_bases({0.0, 1.0}, {i2.col(0), i2.col(1)}));
  EXPECT_THROW(ProjectorFamily::from_bases({0.0, 0.0}, {i2.col(0), i2.col(1)}),
               DomainError);
  EXPECT_THROW(ProjectorFamily::from_bases({0.0}, {i2.col(0)}), DomainError);
  Matrix skew(2, 1);
  skew << 1.0, 1.0;
  EXPECT_THROW(ProjectorFamily::from_bases({0.0, 1.0}, {i2.col(0), skew}),
               DomainError);
}

TEST(ProjectorFamily, FromProjectors) {
  const Matrix p0 = basis_vector(3, 0) * basis_vector(3, 0).adjoint();
  const Matrix p12 = Matrix::Identity(3, 3) - p0;
  const std::vector<Matrix> ps{p0, p12};
  const ProjectorFamily f = ProjectorFamily::from_projectors({-1.0, 2.0}, ps);
  EXPECT_EQ(f.basis(1).cols(), 2);
  EXPECT_LT(max_abs(f.projector(1) - p12), 1e-12);
  const std::vector<Matrix> bad{p0, sigma_x()};
  EXPECT_THROW(ProjectorFamily::from_projectors({0.0, 1.0}, bad), DomainError);
}

TEST(SpanMembership, PauliBasis) {
  const std::vector<HermitianOperator> basis{
      HermitianOperator::identity(2), HermitianOperator(sigma_z())};
  const SpanResult in = span_membership(
      HermitianOperator(3.0 * sigma_z() - Matrix::Identity(2, 2)), basis);
  EXPECT_TRUE(in.in_span);
  EXPECT_NEAR(in.coefficients[0], -1.0, 1e-12);
  EXPECT_NEAR(in.coefficients[1], 3.0, 1e-12);
  const SpanResult out = span_membership(HermitianOperator(sigma_y()), basis);
  EXPECT_FALSE(out.in_span);
  EXPECT_NEAR(out.residual, std::sqrt(2.0), 1e-12);
}

TEST(SpanMembership, EmptyBasis) {
  const std::vector<HermitianOperator> none;
  EXPECT_TRUE(span_membership(HermitianOperator::zero(2), none).in_span);
  EXPECT_FALSE(span_membership(HermitianOperator::identity(2), none).in_span);
}

TEST(SpanMembership, RandomCombinationsAreMembers) {
  Gen gen(7);
  for (int k = 0; k < 15; ++k) {
    std::vector<HermitianOperator> basis;
    for (int i = 0; i < 3; ++i) basis.push_back(gen.hermitian(3));
    HermitianOperator m = HermitianOperator::zero(3);
    for (const auto& b : basis) m += gen.normal() * b;
    EXPECT_TRUE(span_membership(m, basis).in_span);
    // Nine real dimensions, three used: a random Hermitian operator is out.
    EXPECT_FALSE(span_membership(gen.hermitian(3), basis).in_span);
  }
}

TEST(PauliHelpers, Algebra) {
  const Matrix i2 = Matrix::Identity(2, 2);
  EXPECT_LT(max_abs(sigma_x() * sigma_x() - i2), 1e-15);
  EXPECT_LT(max_abs(sigma_x() * sigma_y() - cplx(0, 1) * sigma_z()), 1e-15);
  // sigma_minus lowers |1> (excited) to |0> (ground).
  EXPECT_LT((sigma_minus() * basis_vector(2, 1) - basis_vector(2, 0)).norm(),
            1e-15);
  EXPECT_LT(max_abs(sigma_plus() - sigma_minus().adjoint()), 1e-15);
  EXPECT_THROW(basis_vector(2, 2), DomainError);
}

TEST(DickeHelpers, CommutationRelations) {
  for (std::size_t N : {1u, 2u, 5u, 8u}) {
    const Matrix jp = dicke_j_plus(N), jm = dicke_j_minus(N), jz = dicke_j_z(N);
    EXPECT_LT(max_abs(jz * jp - jp * jz - jp), 1e-12);
    EXPECT_LT(max_abs(jp * jm - jm * jp - 2.0 * jz), 1e-12);
    // Casimir j(j+1) with j = N/2.
    const Matrix jx = 0.5 * dicke_sum_sigma_x(N);
    const Matrix jy = (jp - jm) / cplx(0, 2);
    const Matrix c = jx * jx + jy * jy + jz * jz;
    const double j = N / 2.0;
    EXPECT_LT(max_abs(c - j * (j + 1) * Matrix::Identity(N + 1, N + 1)), 1e-10);
  }
}

TEST(DickeHelpers, LadderRates) {
  const Matrix jp = dicke_j_plus(4);
  for (Eigen::Index n = 1; n <= 4; ++n) {
    EXPECT_NEAR(std::norm(jp(n, n - 1)), static_cast<double>(n * (5 - n)), 1e-12);
  }
}

}  // namespace
