// Copyright 2026 The qcurriculum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "qcurriculum/dense.hpp"
#include "qcurriculum/errors.hpp"
#include "qcurriculum/pauli.hpp"
#include "qcurriculum/spin_models.hpp"
#include "qcurriculum/state_vector.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

namespace qc = qcurriculum;
using qc::Complex;
using qc::PauliTerm;
using qc::StateVector;

namespace {

StateVector bell() {
  const double h = 1.0 / std::sqrt(2.0);
  return StateVector(2, {h, 0.0, 0.0, h});
}

}  // namespace

TEST(Pauli, ParsesLettersWithQubitZeroMostSignificant) {
  const PauliTerm t(3, "XIZ");
  EXPECT_EQ(t.letters(), "XIZ");
  EXPECT_EQ(t.letter(0), qc::Pauli::X);
  EXPECT_EQ(t.letter(2), qc::Pauli::Z);
  EXPECT_EQ(t.x_mask(), 0b100U);
  EXPECT_EQ(t.z_mask(), 0b001U);
  EXPECT_EQ(t.weight(), 2U);
  EXPECT_THROW(PauliTerm(2, "XYZ"), std::invalid_argument);
  EXPECT_THROW(PauliTerm(2, "XA"), std::invalid_argument);
}

TEST(Pauli, SingleSiteProducts) {
  const auto xy = PauliTerm(1, "X") * PauliTerm(1, "Y");
  EXPECT_EQ(xy.letters(), "Z");
  EXPECT_EQ(xy.coefficient(), Complex(0, 1));
  const auto yx = PauliTerm(1, "Y") * PauliTerm(1, "X");
  EXPECT_EQ(yx.coefficient(), Complex(0, -1));
  const auto zz = PauliTerm(1, "Z") * PauliTerm(1, "Z");
  EXPECT_TRUE(zz.is_identity());
  EXPECT_EQ(zz.coefficient(), Complex(1, 0));
}

TEST(Pauli, ProductMatchesDenseMatrices) {
  qc::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = testing_support::random_term(3, rng);
    const auto b = testing_support::random_term(3, rng);
    const auto ab = a * b;
    const oracle::Mat expected =
        oracle::string_matrix(a.letters()) * oracle::string_matrix(b.letters());
    const oracle::Mat got = ab.coefficient() * oracle::string_matrix(ab.letters());
    EXPECT_LT((expected - got).norm(), 1e-12);
  }
}

TEST(Pauli, CommutatorClosureProperty) {
  qc::Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = testing_support::random_term(5, rng);
    const auto b = testing_support::random_term(5, rng);
    const auto c = qc::commutator(a, b);
    const auto ab = a * b;
    if (a.commutes_with(b)) {
      EXPECT_FALSE(c.has_value());
    } else {
      ASSERT_TRUE(c.has_value());
      EXPECT_TRUE(c->same_letters(ab));
      EXPECT_EQ(c->coefficient(), 2.0 * ab.coefficient());
      // Hermitian strings that anticommute have an anti-Hermitian product,
      // so the commutator coefficient is 2i or -2i.
      const Complex c0 = c->coefficient();
      EXPECT_TRUE(c0 == Complex(0, 2) || c0 == Complex(0, -2));
    }
  }
}

TEST(Pauli, CommutatorOfAnticommutingPairIsImaginaryMultiple) {
  // [X, Z] = -2iY
  const auto c = qc::commutator(PauliTerm(1, "X"), PauliTerm(1, "Z"));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->letters(), "Y");
  EXPECT_EQ(c->coefficient(), Complex(0, -2));
}

TEST(OperatorSum, MergesEqualPatternsAndDropsZeros) {
  qc::OperatorSum op(2);
  op.add(PauliTerm(2, "XZ", 1.5));
  op.add(PauliTerm(2, "XZ", -0.5));
  op.add(PauliTerm(2, "YY", 2.0));
  op.add(PauliTerm(2, "YY", -2.0));
  EXPECT_EQ(op.size(), 1U);
  EXPECT_EQ(op.coefficient(PauliTerm(2, "XZ")), Complex(1.0, 0.0));
  EXPECT_TRUE(op.hermitian());
  op.add(PauliTerm(2, "ZZ", Complex(0, 1)));
  EXPECT_FALSE(op.hermitian());
}

TEST(PauliApply, Examples) {
  const auto z0 = qc::pauli_apply(PauliTerm(1, "Z"), StateVector::basis(1, 0));
  EXPECT_EQ(z0[0], Complex(1, 0));
  EXPECT_EQ(z0[1], Complex(0, 0));
  const auto xx = qc::pauli_apply(PauliTerm(2, "XX"), StateVector::basis(2, 0));
  EXPECT_EQ(xx[3], Complex(1, 0));
  EXPECT_EQ(xx[0], Complex(0, 0));
  const auto y0 = qc::pauli_apply(PauliTerm(1, "Y"), StateVector::basis(1, 0));
  EXPECT_EQ(y0[1], Complex(0, 1));
  EXPECT_THROW(qc::pauli_apply(PauliTerm(2, "XX"), StateVector::basis(1, 0)),
               std::invalid_argument);
}

TEST(PauliApply, PreservesNormForUnitCoefficient) {
  qc::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto psi = testing_support::random_state(4, rng);
    auto t = testing_support::random_term(4, rng).with_coefficient(std::polar(1.0, rng.uniform()));
    EXPECT_NEAR(qc::pauli_apply(t, psi).norm(), 1.0, 1e-12);
  }
}

TEST(StateVector, RejectsBadInput) {
  EXPECT_THROW(StateVector(2, {1.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(StateVector(1, {1.0, 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(StateVector(1, {1.0, 0.0}));
}

TEST(Expectation, Examples) {
  EXPECT_DOUBLE_EQ(qc::expectation(qc::OperatorSum(1, {PauliTerm(1, "Z")}), StateVector::basis(1, 0)),
                   1.0);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(qc::expectation(qc::OperatorSum(1, {PauliTerm(1, "X")}), StateVector(1, {h, h})), 1.0,
              1e-15);
  const auto cluster = qc::build_cluster(8, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(qc::expectation(cluster, StateVector::basis(8, 255)), -8.0);
  qc::OperatorSum non_hermitian(1, {PauliTerm(1, "Z", Complex(0, 1))});
  EXPECT_THROW(qc::expectation(non_hermitian, StateVector::basis(1, 0)), std::invalid_argument);
  EXPECT_THROW(qc::expectation(cluster, StateVector::basis(2, 0)), std::invalid_argument);
}

TEST(Expectation, AgreesWithDenseMatrixProperty) {
  qc::Rng rng(21);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      qc::OperatorSum h(n);
      for (int k = 0; k < 6; ++k) {
        h.add(testing_support::random_term(n, rng).with_coefficient(rng.uniform(-2.0, 2.0)));
      }
      const auto psi = testing_support::random_state(n, rng);
      oracle::Vec v(static_cast<Eigen::Index>(psi.dimension()));
      for (std::size_t i = 0; i < psi.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
      const double dense = (v.adjoint() * oracle::dense(h) * v)(0, 0).real();
      EXPECT_NEAR(qc::expectation(h, psi), dense, 1e-9);
    }
  }
}

TEST(DenseMatrix, Examples) {
  const auto z = qc::dense_matrix(qc::OperatorSum(1, {PauliTerm(1, "Z")}));
  EXPECT_EQ(z(0, 0), Complex(1, 0));
  EXPECT_EQ(z(1, 1), Complex(-1, 0));
  EXPECT_EQ(z(0, 1), Complex(0, 0));
  // X on qubit 0 of two qubits is X (x) I.
  const auto x0 = qc::dense_matrix(qc::OperatorSum(2, {PauliTerm(2, "XI")}));
  EXPECT_LT((x0 - oracle::kron(oracle::pauli2('X'), oracle::pauli2('I'))).norm(), 1e-15);
  EXPECT_THROW(qc::dense_matrix(qc::OperatorSum(13, {PauliTerm::identity(13)})),
               std::invalid_argument);
}

TEST(DenseMatrix, MatchesKroneckerOracleAndIsHermitian) {
  qc::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    qc::OperatorSum h(3);
    for (int k = 0; k < 8; ++k) {
      h.add(testing_support::random_term(3, rng).with_coefficient(rng.uniform(-1.0, 1.0)));
    }
    const auto m = qc::dense_matrix(h);
    EXPECT_LT((m - oracle::dense(h)).norm(), 1e-12);
    EXPECT_LT((m - m.adjoint()).norm(), 1e-12);
  }
}

TEST(GroundState, Examples) {
  const auto z = qc::ground_state(qc::OperatorSum(1, {PauliTerm(1, "Z")}));
  EXPECT_NEAR(z.energy, -1.0, 1e-12);
  EXPECT_NEAR(std::abs(z.state[1]), 1.0, 1e-12);
  EXPECT_EQ(z.state[1].imag(), 0.0);
  EXPECT_GT(z.state[1].real(), 0.0);

  const auto cluster = qc::ground_state(qc::build_cluster(8, 0.0, 0.0));
  EXPECT_NEAR(cluster.energy, -8.0, 1e-10);
  EXPECT_NEAR(cluster.state[255].real(), 1.0, 1e-10);
}

TEST(GroundState, XxzDecoupledSingletsMatchOracle) {
  const auto h = qc::build_xxz(4, 1.0, 0.0, 1.0);
  const auto gs = qc::ground_state(h);
  const auto [oracle_energy, oracle_state] = oracle::lowest(oracle::dense(h));
  // The oracle's real embedding doubles each eigenvalue's multiplicity, not
  // its value.
  EXPECT_NEAR(oracle_energy, -6.0, 1e-10);
  EXPECT_NEAR(gs.energy, -6.0, 1e-10);
  EXPECT_LT(gs.residual, 1e-8);
}

TEST(GroundState, ResidualAndPhaseConventionOnRandomHamiltonians) {
  qc::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    qc::OperatorSum h(4);
    for (int k = 0; k < 10; ++k) {
      h.add(testing_support::random_term(4, rng).with_coefficient(rng.uniform(-1.0, 1.0)));
    }
    const auto gs = qc::ground_state(h);
    EXPECT_LT(gs.residual, 1e-8);
    for (std::size_t i = 0; i < gs.state.dimension(); ++i) {
      if (std::abs(gs.state[i]) > 1e-8) {
        EXPECT_EQ(gs.state[i].imag(), 0.0);
        EXPECT_GT(gs.state[i].real(), 0.0);
        break;
      }
    }
  }
}

TEST(MarginalProbs, Examples) {
  const std::vector<std::size_t> both{0, 1};
  const auto p00 = qc::marginal_probs(StateVector::basis(2, 0), both);
  EXPECT_EQ(p00, (std::vector<double>{1, 0, 0, 0}));
  const std::vector<std::size_t> first{0};
  const auto pb = qc::marginal_probs(bell(), first);
  EXPECT_NEAR(pb[0], 0.5, 1e-15);
  EXPECT_NEAR(pb[1], 0.5, 1e-15);
  const double h = 1.0 / std::sqrt(2.0);
  std::vector<Complex> ghz(16, 0.0);
  ghz[0] = h;
  ghz[15] = h;
  const auto pg = qc::marginal_probs(StateVector(4, ghz), both);
  EXPECT_NEAR(pg[0], 0.5, 1e-15);
  EXPECT_NEAR(pg[3], 0.5, 1e-15);
  EXPECT_EQ(pg[1], 0.0);
  EXPECT_EQ(pg[2], 0.0);
  const std::vector<std::size_t> dup{0, 0};
  EXPECT_THROW(qc::marginal_probs(bell(), dup), std::invalid_argument);
  const std::vector<std::size_t> out_of_range{2};
  EXPECT_THROW(qc::marginal_probs(bell(), out_of_range), std::invalid_argument);
}

TEST(MarginalProbs, OrderOfListedQubitsSetsBitOrder) {
  // |01>: qubit 0 = 0, qubit 1 = 1.
  const std::vector<std::size_t> reversed{1, 0};
  const auto p = qc::marginal_probs(StateVector::basis(2, 1), reversed);
  EXPECT_EQ(p, (std::vector<double>{0, 0, 1, 0}));
}

TEST(MarginalProbs, FullSetReproducesSquaredAmplitudes) {
  qc::Rng rng(4);
  const auto psi = testing_support::random_state(5, rng);
  const std::vector<std::size_t> all{0, 1, 2, 3, 4};
  const auto p = qc::marginal_probs(psi, all);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], std::norm(psi[i]));
}
