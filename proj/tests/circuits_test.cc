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

#include "qref/circuits.h"
#include "qref/weingarten.h"
#include "test_util.h"

using namespace qref;
using qref::testing::random_channel;

namespace {

KrausChannel depolarizing(double g) { return replacement_channel(g, DensityMatrix::maximally_mixed(1)); }

// u, v for a 2-qubit gate with G cap Omega = {first local qubit}, by explicit index sums.
UV uv_oracle_half(const std::vector<Mat> &kraus) {
    Mat s = Mat::Zero(4, 4);
    for (const Mat &k : kraus) {
        s += k * k.adjoint();
    }
    double u = 0;
    for (int a = 0; a < 2; a++) {
        for (int b = 0; b < 2; b++) {
            cplx t = 0;
            for (int c = 0; c < 2; c++) {
                t += s(a * 2 + c, b * 2 + c);
            }
            u += std::norm(t);
        }
    }
    double v = 0;
    for (const Mat &ki : kraus) {
        for (const Mat &kj : kraus) {
            Mat p = ki * kj.adjoint();
            for (int c = 0; c < 2; c++) {
                for (int d = 0; d < 2; d++) {
                    cplx t = 0;
                    for (int a = 0; a < 2; a++) {
                        t += p(a * 2 + c, a * 2 + d);
                    }
                    v += std::norm(t);
                }
            }
        }
    }
    return {u / 8.0, v / 8.0};
}

// Marginal distances of a random traceless Hermitian X, so every S is realizable.
SubsetDistanceVector random_vector(int n, const std::set<QubitSubset> &family, RngStream &rng) {
    Mat x = qref::testing::random_traceless_hermitian(1L << n, rng);
    SubsetDistanceVector s(n);
    for (QubitSubset g : family) {
        if (!g.empty()) {
            s.set(g, 0.5 * hs_norm_sq(partial_trace(x, n, g)));
        }
    }
    return s;
}

}  // namespace

TEST(Architecture, Brickwork) {
    Architecture a = brickwork1d(5, 3);
    ASSERT_EQ(a.layers.size(), 3u);
    EXPECT_EQ(a.layers[0], (Layer{{0, 1}, {2, 3}}));
    EXPECT_EQ(a.layers[1], (Layer{{1, 2}, {3, 4}}));
    EXPECT_EQ(alltoall(3, 2).layers[1], (Layer{{0, 1, 2}}));
    EXPECT_THROW(custom_architecture(3, {{{0, 1}, {1, 2}}}), std::invalid_argument);
    EXPECT_THROW(custom_architecture(3, {{{0, 3}}}), std::invalid_argument);
}

TEST(SubsetVector, BitstringsAndGuards) {
    std::set<QubitSubset> fam = {QubitSubset::of({0}), QubitSubset::of({1}), QubitSubset::of({0, 1})};
    SubsetDistanceVector s = SubsetDistanceVector::from_bitstrings(3, 0b000, 0b100, fam);
    EXPECT_EQ(s.get(QubitSubset::of({0})), 1.0);
    EXPECT_EQ(s.get(QubitSubset::of({1})), 0.0);
    EXPECT_EQ(s.get(QubitSubset::of({0, 1})), 1.0);
    EXPECT_EQ(s.get(QubitSubset()), 0.0);
    EXPECT_THROW(s.get(QubitSubset::of({2})), std::out_of_range);
    EXPECT_THROW(s.set(QubitSubset::of({0}), -1e-6), std::domain_error);
    s.set(QubitSubset::of({0}), -1e-14);
    EXPECT_EQ(s.get(QubitSubset::of({0})), 0.0);
}

TEST(TransferRule, UvMatchesIndexOracle) {
    RngStream rng(1, 0);
    std::vector<KrausChannel> chans = {tensor_power(depolarizing(0.1), 2), random_channel(2, 3, rng),
                                       tensor_product(generalized_damping(0.3, 0.4), random_channel(1, 2, rng))};
    for (const KrausChannel &ch : chans) {
        UV got = uv_params(ch.ops(), QubitSubset::of({1, 2}), QubitSubset::of({1, 3}));
        UV want = uv_oracle_half(ch.ops());
        EXPECT_NEAR(got.u, want.u, 1e-12);
        EXPECT_NEAR(got.v, want.v, 1e-12);
    }
    EXPECT_THROW(uv_params({Mat::Identity(2, 2)}, QubitSubset(), QubitSubset()), std::invalid_argument);
}

TEST(TransferRule, IdentityValues) {
    for (QubitSubset g : {QubitSubset::of({0}), QubitSubset::of({0, 1}), QubitSubset::of({2})}) {
        UV uv = uv_params({Mat::Identity(4, 4)}, QubitSubset::of({0, 1}), g);
        EXPECT_NEAR(uv.u, 1.0, 1e-15);
        EXPECT_NEAR(uv.v, 1.0, 1e-15);
    }
    StepCoefficients c = step_coefficients(4, 2, 2, 1, 1);
    EXPECT_NEAR(c.c1, 0.4, 1e-15);
    EXPECT_NEAR(c.c2, 0.4, 1e-15);
    EXPECT_THROW(step_coefficients(4, 2, 3, 1, 1), std::invalid_argument);
}

TEST(TransferRule, SymmetricCaseGivesEqualCoefficients) {
    StepCoefficients c = step_coefficients(16, 4, 4, 0.7, 0.7);
    EXPECT_NEAR(c.c1, c.c2, 1e-15);
}

TEST(TransferRule, CompletenessFixesDiagonalOfV) {
    // With a single Kraus operator the i = j term is all of v.
    RngStream rng(2, 0);
    Mat u = haar_unitary(4, rng);
    UV uv = uv_params({u}, QubitSubset::of({0, 1}), QubitSubset::of({0}));
    EXPECT_NEAR(uv.u, 1.0, 1e-12);
    EXPECT_NEAR(uv.v, 1.0, 1e-12);
}

TEST(TransferRule, TwoQubitParamsMatchGeneralRule) {
    RngStream rng(3, 0);
    std::vector<KrausChannel> chans = {tensor_power(depolarizing(0.2), 2), tensor_power(generalized_damping(0.3, 0.6), 2),
                                       tensor_power(random_channel(1, 3, rng), 2)};
    for (const KrausChannel &ch : chans) {
        TwoQubitNoiseParams p = two_qubit_params(ch);
        StepCoefficients c1 = step_coefficients_for(ch, QubitSubset::of({0, 1}), QubitSubset::of({0, 1}));
        StepCoefficients c2 = step_coefficients_for(ch, QubitSubset::of({0, 1}), QubitSubset::of({0}));
        EXPECT_NEAR(p.a, c1.v, 1e-12);
        EXPECT_NEAR(p.b, c1.u, 1e-12);
        EXPECT_NEAR(p.A, c2.v, 1e-12);
        EXPECT_NEAR(p.B, c2.u, 1e-12);
        EXPECT_NEAR(p.case1_r, c1.c2, 1e-12);
        EXPECT_NEAR(p.case1_alpha, c1.c1 + c1.c2, 1e-12);
        EXPECT_NEAR(p.case2_beta, c2.c1 + c2.c2, 1e-12);
        EXPECT_NEAR(p.case2_mu, c2.c1 - c2.c2, 1e-12);
        EXPECT_NEAR(p.gamma_lower, -std::log(std::min(p.case1_r, 0.25 * (p.case2_beta * p.case2_beta -
                                                                        p.case2_mu * p.case2_mu))),
                    1e-12);
        EXPECT_NEAR(p.gamma_upper, -std::log(std::max(p.case1_alpha, p.case2_beta)), 1e-12);
    }
}

TEST(TransferRule, UnitaryNoiseParams) {
    RngStream rng(4, 0);
    Mat u = haar_unitary(2, rng);
    TwoQubitNoiseParams p = two_qubit_params(KrausChannel({kron(u, u)}));
    for (double x : {p.a, p.b, p.A, p.B, p.case1_r, p.case1_alpha}) {
        EXPECT_NEAR(x, 1.0, 1e-12);
    }
    EXPECT_NEAR(p.case2_beta, 0.8, 1e-12);
    EXPECT_NEAR(p.case2_mu, 0.0, 1e-12);
    EXPECT_THROW(two_qubit_params(tensor_product(generalized_damping(0.3, 0.5), identity_channel(1))),
                 std::invalid_argument);
}

TEST(TransferRule, GammaMonotoneInDamping) {
    double prev = -1;
    for (double g = 0.02; g <= 0.5; g += 0.02) {
        double gl = two_qubit_params(tensor_power(generalized_damping(g, 1.0), 2)).gamma_lower;
        EXPECT_GE(gl, prev - 1e-12) << g;
        prev = gl;
    }
}

TEST(TransferRule, EvolveCasesAgreeWithGeneralFormula) {
    RngStream rng(5, 0);
    const int n = 4;
    const QubitSubset omega = QubitSubset::of({1, 2});
    Architecture arch = custom_architecture(n, {{{1, 2}}});
    std::set<QubitSubset> targets = {QubitSubset::of({0}), QubitSubset::of({1}), QubitSubset::of({1, 2}),
                                     QubitSubset::of({0, 1, 2}), QubitSubset::of({0, 3}), QubitSubset::of({2, 3})};
    std::set<QubitSubset> fam = closed_family(targets, arch);
    for (int t = 0; t < 5; t++) {
        KrausChannel ch = random_channel(2, 3, rng);
        SubsetDistanceVector s = random_vector(n, fam, rng);
        SubsetDistanceVector out = evolve_subset(s, omega, ch);
        for (QubitSubset g : targets) {
            double want;
            if ((g & omega).empty()) {
                want = s.get(g);
            } else {
                StepCoefficients c = step_coefficients_for(ch, omega, g);
                want = c.c1 * s.get(g.minus(omega)) + c.c2 * s.get(g | omega);
            }
            EXPECT_NEAR(out.get(g), want, 1e-12) << g.str();
        }
    }
}

TEST(TransferRule, ClosureErrors) {
    SubsetDistanceVector s(3);
    s.set(QubitSubset::of({0}), 1.0);
    EXPECT_THROW(evolve_subset(s, QubitSubset::of({0, 1}), tensor_power(depolarizing(0.1), 2)), std::logic_error);
    std::set<QubitSubset> all;
    for (uint32_t m = 1; m < (1u << 8); m++) {
        all.insert(QubitSubset(m));
    }
    EXPECT_THROW(closed_family(all, brickwork1d(8, 2), 16), std::length_error);
}

TEST(TransferRule, UnitaryNoiseCaseOneUnchanged) {
    RngStream rng(6, 0);
    Mat u = haar_unitary(4, rng);
    SubsetDistanceVector s(2);
    s.set(QubitSubset::of({0}), 0.3);
    s.set(QubitSubset::of({1}), 0.2);
    s.set(QubitSubset::of({0, 1}), 0.9);
    SubsetDistanceVector out = evolve_subset(s, QubitSubset::of({0, 1}), KrausChannel({u}));
    EXPECT_NEAR(out.get(QubitSubset::of({0, 1})), 0.9, 1e-12);
}

TEST(TransferRule, BrickworkPredictionMatchesMonteCarlo) {
    Architecture arch = brickwork1d(4, 3);
    KrausChannel noise = depolarizing(0.2);
    QubitSubset g = QubitSubset::of({0, 1});
    double pred = predict_subset_distances(arch, noise, 0, 8, {g}).back().get(g);
    Stat mc = mc_subset_distance(arch, noise, g, 20000, 17);
    EXPECT_LT(std::abs(mc.mean - pred), 3 * mc.stderr) << mc.mean << " vs " << pred;
}

TEST(TransferRule, SingleGateMonteCarlo) {
    Architecture arch = custom_architecture(4, {{{0, 1}}});
    KrausChannel noise = depolarizing(0.2);
    QubitSubset g = QubitSubset::of({0});
    double pred = predict_subset_distances(arch, noise, 0, 8, {g}).back().get(g);
    Stat mc = mc_subset_distance(arch, noise, g, 20000, 23);
    EXPECT_LT(std::abs(mc.mean - pred), 3 * mc.stderr);
}

TEST(MonteCarlo, DepthZeroAndNoiseless) {
    McOptions opt;
    opt.trials = 200;
    opt.subsets = {QubitSubset::of({0}), QubitSubset::of({1, 2}), QubitSubset::full(4)};
    auto res = mc_run(brickwork1d(4, 4), identity_channel(1), opt);
    EXPECT_EQ(res[0].subsets.at(QubitSubset::of({0})).mean, 1.0);
    EXPECT_EQ(res[0].subsets.at(QubitSubset::of({1, 2})).mean, 0.0);
    for (const auto &d : res) {
        EXPECT_NEAR(d.subsets.at(QubitSubset::full(4)).mean, 1.0, 1e-12);
        EXPECT_NEAR(d.trace_distance.mean, 1.0, 1e-12);
    }
    EXPECT_THROW(mc_run(brickwork1d(9, 1), identity_channel(1), opt), std::invalid_argument);
}

TEST(MonteCarlo, AllToAllLimits) {
    EXPECT_NEAR(mc_alltoall_distance(3, 0, depolarizing(0.5), 20, 1).mean, 1.0, 1e-12);
    EXPECT_NEAR(mc_alltoall_distance(3, 3, identity_channel(1), 50, 1).mean, 1.0, 1e-10);
    KrausChannel full = replacement_channel(1.0, DensityMatrix::from_polarization(0.4));
    EXPECT_NEAR(mc_alltoall_distance(4, 1, full, 50, 1).mean, 0.0, 1e-10);
    EXPECT_THROW(mc_alltoall_distance(7, 1, full, 2, 1), std::invalid_argument);
}

TEST(MonteCarlo, DeterministicAcrossRuns) {
    McOptions opt;
    opt.trials = 600;
    opt.seed = 99;
    opt.subsets = {QubitSubset::of({0, 1})};
    auto a = mc_run(brickwork1d(4, 2), depolarizing(0.3), opt);
    auto b = mc_run(brickwork1d(4, 2), depolarizing(0.3), opt);
    EXPECT_EQ(a.back().trace_distance.mean, b.back().trace_distance.mean);
    EXPECT_EQ(a.back().subsets.at(QubitSubset::of({0, 1})).stderr, b.back().subsets.at(QubitSubset::of({0, 1})).stderr);
}

TEST(MonteCarlo, HaarInvarianceUnderConjugatedNoise) {
    RngStream rng(7, 0);
    Mat v = haar_unitary(2, rng);
    const int n = 4;
    KrausChannel noise = generalized_damping(0.3, 0.5);
    Mat x0 = Mat::Zero(16, 16);
    x0(0, 0) = 1.0;
    x0(8, 8) = -1.0;
    Mat vn = kron_all({v, v, v, v});
    McOptions a, b;
    a.trials = b.trials = 4000;
    a.seed = 1;
    b.seed = 2;
    a.trace_distance = b.trace_distance = false;
    a.subsets = b.subsets = {QubitSubset::of({0, 1}), QubitSubset::of({2})};
    a.initial_difference = x0;
    b.initial_difference = Mat(vn * x0 * vn.adjoint());
    auto ra = mc_run(brickwork1d(n, 3), noise, a);
    auto rb = mc_run(brickwork1d(n, 3), conjugated(noise, v), b);
    for (QubitSubset g : a.subsets) {
        Stat sa = ra.back().subsets.at(g), sb = rb.back().subsets.at(g);
        EXPECT_LT(std::abs(sa.mean - sb.mean), 3 * std::hypot(sa.stderr, sb.stderr)) << g.str();
    }
}

TEST(Bounds, CurvesAtDepthZero) {
    TwoQubitNoiseParams p = two_qubit_params(tensor_power(depolarizing(0.3), 2));
    EXPECT_EQ(lower_bound_curve(p, 0), 1.0);
    EXPECT_NEAR(upper_bound_curve(p, 4, 0), 4.0, 1e-12);
    EXPECT_NEAR(lower_bound_curve(p, 3), std::exp(-3 * p.gamma_lower), 1e-15);
    EXPECT_NEAR(upper_bound_curve(p, 6, 2), 8.0 * std::exp(-2 * p.gamma_upper), 1e-12);
}

TEST(Bounds, LowerAndUpperHoldInMonteCarlo) {
    const int n = 4;
    for (KrausChannel noise : {generalized_damping(0.2, 1.0), depolarizing(0.3), identity_channel(1)}) {
        TwoQubitNoiseParams p = two_qubit_params(tensor_power(noise, 2));
        McOptions opt;
        opt.trials = 1500;
        opt.seed = 5;
        opt.subsets = all_pairs(n);
        auto res = mc_run(brickwork1d(n, 8), noise, opt);
        for (int d = 0; d <= 8; d++) {
            PairMax pm = max_pair(res[d]);
            EXPECT_GE(pm.stat.mean, lower_bound_curve(p, d) - 3 * pm.stat.stderr) << d;
            EXPECT_LE(res[d].trace_distance.mean,
                      upper_bound_curve(p, n, d) + 3 * res[d].trace_distance.stderr) << d;
        }
    }
}

TEST(AllToAll, IdentityCoefficients) {
    for (int n : {1, 2, 4}) {
        AllToAllCoeffs c = alltoall_coeffs(identity_channel(1), n);
        EXPECT_NEAR(c.alpha_n, 1.0, 1e-12);
        EXPECT_NEAR(c.omega_n, 0.0, 1e-12);
        EXPECT_NEAR(c.delta_n, 1.0, 1e-12);
    }
    EXPECT_THROW(alltoall_coeffs(identity_channel(1), 65), std::invalid_argument);
    EXPECT_NO_THROW(alltoall_coeffs(depolarizing(0.5), 64));
}

TEST(AllToAll, MatchesTwirlCoefficients) {
    RngStream rng(8, 0);
    std::vector<KrausChannel> chans = {depolarizing(0.3), replacement_channel(0.4, DensityMatrix::from_polarization(0.6)),
                                       generalized_damping(0.25, 0.7), random_channel(1, 2, rng)};
    for (const KrausChannel &ch : chans) {
        for (int n = 1; n <= 6; n++) {
            AllToAllCoeffs a = alltoall_coeffs(ch, n);
            TwirlCoefficients t = twirl_coefficients(ch, n);
            double scale = std::max(1.0, std::abs(t.alpha));
            EXPECT_NEAR(a.alpha_n, t.alpha, 1e-12 * scale);
            EXPECT_NEAR(a.beta_n, t.beta, 1e-12 * std::max(1.0, std::abs(t.beta)));
            EXPECT_NEAR(a.omega_n, t.omega, 1e-12 * std::max(1.0, std::abs(t.omega)));
            EXPECT_NEAR(a.delta_n, twirl_delta(ch, n), 1e-12);
        }
    }
}

TEST(AllToAll, BoundAlgebra) {
    AllToAllCoeffs id = alltoall_coeffs(identity_channel(1), 3);
    AllToAllBound b1 = alltoall_bound(id, 3, 1);
    EXPECT_NEAR(b1.a, 1.0, 1e-12);
    EXPECT_NEAR(b1.b, 0.0, 1e-12);
    EXPECT_NEAR(b1.bound, 1.0, 1e-12);

    AllToAllCoeffs deg;
    deg.alpha_n = deg.delta_n = 0.5;
    deg.omega_n = 0.1;
    EXPECT_NEAR(alltoall_bound(deg, 2, 3).b, 0.1 * 3 * 0.25, 1e-15);
    AllToAllCoeffs near = deg;
    near.alpha_n = 0.5 + 1e-7;
    EXPECT_NEAR(alltoall_bound(near, 2, 3).b, 0.075, 1e-6);

    // Transfer-matrix powers reproduce A and B.
    AllToAllCoeffs c = alltoall_coeffs(depolarizing(0.4), 3);
    Eigen::Matrix2d t = c.transfer;
    Eigen::Matrix2d p = Eigen::Matrix2d::Identity();
    for (int d = 1; d <= 5; d++) {
        p = t * p;
        AllToAllBound b = alltoall_bound(c, 3, d);
        EXPECT_NEAR(b.a, p(0, 0), 1e-14);
        EXPECT_NEAR(b.b, p(1, 0), 1e-14);
    }
}

TEST(AllToAll, MonteCarloSecondMomentAndBound) {
    const int n = 3;
    KrausChannel noise = replacement_channel(0.5, DensityMatrix::from_polarization(0.5));
    AllToAllCoeffs c = alltoall_coeffs(noise, n);
    McOptions opt;
    opt.trials = 3000;
    opt.seed = 4;
    auto res = mc_run(alltoall(n, 4), noise, opt);
    for (int d = 1; d <= 4; d++) {
        AllToAllBound b = alltoall_bound(c, n, d);
        EXPECT_LT(std::abs(res[d].tr_x2.mean - b.predicted_tr_x2), 3 * res[d].tr_x2.stderr) << d;
        EXPECT_LE(res[d].trace_distance.mean, b.bound) << d;
    }
}
