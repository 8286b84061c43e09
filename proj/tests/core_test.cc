// Copyright 2026 The qref Authors
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

#include "qref/core.h"
#include "test_util.h"

using namespace qref;
using qref::testing::random_state;
using qref::testing::random_traceless_hermitian;

namespace {

int bit(long i, int q, int n) { return int((i >> (n - 1 - q)) & 1); }

Vec ket(std::initializer_list<cplx> v) {
    Vec out(long(v.size()));
    long i = 0;
    for (cplx c : v) {
        out(i++) = c;
    }
    return out;
}

}  // namespace

TEST(Kron, TwoByTwoExample) {
    Mat a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 0, 5, 6, 7;
    Mat k = kron(a, b);
    ASSERT_EQ(k.rows(), 4);
    EXPECT_EQ(k(0, 1), cplx(5));
    EXPECT_EQ(k(1, 2), cplx(12));
    EXPECT_EQ(k(3, 3), cplx(28));
    EXPECT_EQ(k(2, 0), cplx(0));
}

TEST(Kron, MixedProductOnVectors) {
    RngStream rng(3, 0);
    Mat a = qref::testing::random_matrix(2, rng), b = qref::testing::random_matrix(4, rng);
    Mat x = qref::testing::random_matrix(2, rng).col(0), y = qref::testing::random_matrix(4, rng).col(0);
    EXPECT_LT(max_abs(kron(a, b) * kron(x, y) - kron(a * x, b * y)), 1e-12);
}

TEST(Kron, AxisGuard) {
    Mat big = Mat::Identity(1L << 9, 1L << 9);
    EXPECT_THROW(kron(big, big), std::length_error);
}

TEST(Kron, RejectsNonFinite) {
    Mat a = Mat::Identity(2, 2);
    a(0, 0) = std::nan("");
    EXPECT_THROW(kron(a, a), std::invalid_argument);
}

TEST(DensityMatrix, Validation) {
    Mat m = Mat::Identity(2, 2);
    EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);  // trace 2
    Mat nh = Mat::Identity(2, 2) / 2.0;
    nh(0, 1) = 0.3;
    EXPECT_THROW(DensityMatrix{nh}, std::invalid_argument);
    Mat neg = Mat::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_THROW(DensityMatrix{neg}, std::invalid_argument);
    EXPECT_THROW(DensityMatrix{Mat::Identity(3, 3) / 3.0}, std::invalid_argument);
    EXPECT_NO_THROW(DensityMatrix::from_polarization(0.3));
}

TEST(PartialTrace, ProductState) {
    RngStream rng(11, 0);
    for (int na = 1; na <= 4; na++) {
        for (int nb = 1; nb <= 4; nb++) {
            DensityMatrix a = random_state(na, rng), b = random_state(nb, rng);
            Mat full = kron(a.matrix(), b.matrix());
            QubitSubset keep_a = QubitSubset::full(na);
            EXPECT_LT(max_abs(partial_trace(full, na + nb, keep_a) - a.matrix()), 1e-12);
            QubitSubset keep_b(QubitSubset::full(na + nb).minus(keep_a));
            EXPECT_LT(max_abs(partial_trace(full, na + nb, keep_b) - b.matrix()), 1e-12);
        }
    }
}

TEST(PartialTrace, BellStateGivesMaximallyMixed) {
    DensityMatrix bell = DensityMatrix::pure(ket({1, 0, 0, 1}) / std::sqrt(2.0));
    DensityMatrix r = partial_trace(bell, QubitSubset::of({0}));
    EXPECT_LT(max_abs(r.matrix() - Mat::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, ThreeQubitIndexOracle) {
    RngStream rng(5, 1);
    DensityMatrix rho = random_state(3, rng);
    Mat got = partial_trace(rho.matrix(), 3, QubitSubset::of({0, 2}));
    Mat want = Mat::Zero(4, 4);
    for (int a0 = 0; a0 < 2; a0++)
        for (int a2 = 0; a2 < 2; a2++)
            for (int b0 = 0; b0 < 2; b0++)
                for (int b2 = 0; b2 < 2; b2++)
                    for (int c = 0; c < 2; c++)
                        want(a0 * 2 + a2, b0 * 2 + b2) += rho.matrix()(a0 * 4 + c * 2 + a2, b0 * 4 + c * 2 + b2);
    EXPECT_LT(max_abs(got - want), 1e-14);
}

TEST(PartialTrace, KeepOutsideQubitsThrows) {
    DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    EXPECT_THROW(partial_trace(rho, QubitSubset::of({2})), std::invalid_argument);
}

TEST(Norms, TraceNorm) {
    EXPECT_EQ(trace_norm(Mat::Zero(3, 3)), 0.0);
    Mat diff = DensityMatrix::basis(2, 0).matrix() - DensityMatrix::basis(2, 3).matrix();
    EXPECT_NEAR(trace_norm(diff), 2.0, 1e-14);
    EXPECT_NEAR(trace_norm_hermitian(diff), 2.0, 1e-14);
    EXPECT_THROW(trace_norm(Mat::Zero(2, 3)), std::invalid_argument);

    RngStream rng(8, 0);
    Mat h = random_traceless_hermitian(8, rng);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    double want = es.eigenvalues().cwiseAbs().sum();
    EXPECT_NEAR(trace_norm(h), want, 1e-12);
    EXPECT_NEAR(trace_norm_hermitian(h), want, 1e-12);
}

TEST(Norms, HilbertSchmidt) {
    EXPECT_EQ(hs_norm_sq(Mat::Zero(2, 2)), 0.0);
    EXPECT_NEAR(hs_norm_sq(Mat::Identity(4, 4)), 4.0, 1e-15);
    Mat diff = DensityMatrix::basis(1, 0).matrix() - DensityMatrix::basis(1, 1).matrix();
    EXPECT_NEAR(hs_norm_sq(diff), 2.0, 1e-15);
}

TEST(Norms, TraceVersusHilbertSchmidtInequalities) {
    RngStream rng(21, 0);
    for (int n = 1; n <= 3; n++) {
        long d = 1L << n;
        for (int t = 0; t < 50; t++) {
            Mat h = random_traceless_hermitian(d, rng);
            h /= trace_norm(h);  // ||h||_1 = 1
            double tn = trace_norm(h), s = hs_norm_sq(h);
            EXPECT_LE(s, tn + 1e-12);
            EXPECT_LE(tn * tn, double(d) * s + 1e-12);
        }
    }
}

TEST(Rng, ReproducibleAndStreamsDiffer) {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 10; i++) {
        double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        EXPECT_NE(x, c.uniform());
    }
}

TEST(Haar, UnitaryAndDimOne) {
    RngStream rng(1, 0);
    for (long d : {1, 2, 3, 8, 16}) {
        for (int t = 0; t < 20; t++) {
            Mat u = haar_unitary(d, rng);
            EXPECT_LT(max_abs(u.adjoint() * u - Mat::Identity(d, d)), 1e-10);
        }
    }
    Mat u1 = haar_unitary(1, rng);
    EXPECT_NEAR(std::abs(u1(0, 0)), 1.0, 1e-14);
    EXPECT_THROW(haar_unitary(0, rng), std::invalid_argument);
}

TEST(Haar, FirstAndSecondMomentsDim2) {
    const long trials = 100000;
    RngStream rng(2024, 0);
    double s2 = 0, s2sq = 0, s4 = 0, s4sq = 0;
    for (long t = 0; t < trials; t++) {
        double p = std::norm(haar_unitary(2, rng)(0, 0));
        s2 += p;
        s2sq += p * p;
        s4 += p * p;
        s4sq += p * p * p * p;
    }
    double m2 = s2 / trials, m4 = s4 / trials;
    double se2 = std::sqrt((s2sq / trials - m2 * m2) / trials);
    double se4 = std::sqrt((s4sq / trials - m4 * m4) / trials);
    EXPECT_LT(std::abs(m2 - 0.5), 3 * se2);
    EXPECT_LT(std::abs(m4 - 1.0 / 3.0), 3 * se4);
}

TEST(PauliZ, Expectations) {
    EXPECT_NEAR(pauli_z_expectation(DensityMatrix::basis(1, 0), 0), 1.0, 1e-15);
    EXPECT_NEAR(pauli_z_expectation(DensityMatrix::maximally_mixed(1), 0), 0.0, 1e-15);
    EXPECT_NEAR(pauli_z_expectation(DensityMatrix::from_polarization(0.3), 0), 0.3, 1e-15);
    // |01>: qubit 0 is |0>, qubit 1 is |1>.
    DensityMatrix s = DensityMatrix::basis(2, 1);
    EXPECT_NEAR(pauli_z_expectation(s, 0), 1.0, 1e-15);
    EXPECT_NEAR(pauli_z_expectation(s, 1), -1.0, 1e-15);
    EXPECT_THROW(pauli_z_expectation(s, 2), std::out_of_range);
}

TEST(Diagonalize, Examples) {
    Diagonalization mixed = diagonalize_state(DensityMatrix::maximally_mixed(1));
    EXPECT_LT(max_abs(mixed.unitary - Mat::Identity(2, 2)), 1e-15);

    Diagonalization one = diagonalize_state(DensityMatrix::basis(1, 1));
    EXPECT_NEAR(pauli_z_expectation(one.rho_diag, 0), 1.0, 1e-14);

    Mat x_state = (Mat::Identity(2, 2) + 0.4 * pauli_x()) / 2.0;
    Diagonalization dx = diagonalize_state(DensityMatrix(x_state));
    Mat want = (Mat::Identity(2, 2) + 0.4 * pauli_z()) / 2.0;
    EXPECT_LT(max_abs(dx.rho_diag.matrix() - want), 1e-12);
    EXPECT_LT(max_abs(dx.unitary * x_state * dx.unitary.adjoint() - want), 1e-12);
}

TEST(Diagonalize, NeverDecreasesPolarization) {
    RngStream rng(77, 0);
    for (int t = 0; t < 200; t++) {
        DensityMatrix rho = random_state(1, rng);
        Diagonalization d = diagonalize_state(rho);
        EXPECT_TRUE(is_unitary(d.unitary));
        double z_diag = pauli_z_expectation(d.rho_diag, 0);
        double bloch = std::sqrt(2 * hs_norm_sq(rho.matrix()) - 1);
        EXPECT_GE(z_diag, pauli_z_expectation(rho, 0) - 1e-12);
        EXPECT_NEAR(z_diag, bloch, 1e-10);
    }
}

TEST(Embedding, ApplyLeftMatchesFullOperator) {
    RngStream rng(9, 0);
    const int n = 3;
    Mat op = qref::testing::random_matrix(4, rng);
    Mat x = qref::testing::random_matrix(8, rng);
    std::vector<int> qs = {2, 0};
    Mat full = Mat::Zero(8, 8);
    for (long i = 0; i < 8; i++) {
        for (long j = 0; j < 8; j++) {
            if (bit(i, 1, n) != bit(j, 1, n)) {
                continue;
            }
            long a = bit(i, 2, n) * 2 + bit(i, 0, n);
            long b = bit(j, 2, n) * 2 + bit(j, 0, n);
            full(i, j) = op(a, b);
        }
    }
    Mat y = x;
    apply_left(y, op, qs, n);
    EXPECT_LT(max_abs(y - full * x), 1e-12);
    Mat z = x;
    conjugate_in_place(z, op, qs, n);
    EXPECT_LT(max_abs(z - full * x * full.adjoint()), 1e-12);
    EXPECT_THROW(apply_left(y, op, {0, 0}, n), std::invalid_argument);
    EXPECT_THROW(apply_left(y, op, {0, 3}, n), std::invalid_argument);
}

TEST(Embedding, SuperopMatchesKraus) {
    RngStream rng(10, 0);
    KrausChannel ch = qref::testing::random_channel(1, 3, rng);
    Mat x = random_state(3, rng).matrix();
    for (int q = 0; q < 3; q++) {
        Mat y = x;
        apply_superop_1q(y, ch.superop(), q, 3);
        Mat want = Mat::Zero(8, 8);
        for (const Mat &k : ch.ops()) {
            Mat kx = x;
            conjugate_in_place(kx, k, {q}, 3);
            want += kx;
        }
        EXPECT_LT(max_abs(y - want), 1e-12);
    }
}

TEST(QubitSubset, SetOperations) {
    QubitSubset a = QubitSubset::of({0, 2}), b = QubitSubset::of({2, 3});
    EXPECT_EQ((a | b).size(), 3);
    EXPECT_EQ((a & b), QubitSubset::of({2}));
    EXPECT_EQ(a.minus(b), QubitSubset::of({0}));
    EXPECT_TRUE(QubitSubset::of({2}).subset_of(a));
    EXPECT_FALSE(b.subset_of(a));
    EXPECT_EQ(a.qubits(), (std::vector<int>{0, 2}));
    EXPECT_TRUE(QubitSubset().empty());
    EXPECT_EQ(QubitSubset::full(4).size(), 4);
}
