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

#ifndef QREF_WEINGARTEN_H
#define QREF_WEINGARTEN_H

#include <array>

#include "qref/channels.h"
#include "qref/core.h"

namespace qref {

/// E[U_{i1 j1} conj(U_{i2 j2}) U_{i3 j3} conj(U_{i4 j4})] over Haar U(N), idx = {i1,j1,...,i4,j4}.
double haar_fourth_moment(long n, const std::array<long, 8> &idx);

using EValues = std::array<double, 6>;

/// The six pairwise Kraus trace sums E1..E6, complex.
std::array<cplx, 6> e_invariants_complex(const std::vector<Mat> &kraus);
/// Real parts. E1, E2, E3, E6 are always real and E5 = conj(E4), so only E4 and E5 can
/// lose an imaginary part (non-unital channels with complex Kraus operators).
EValues e_invariants(const KrausChannel &ch);

EValues e_closed_form_replacement(double gamma, double eta);
EValues e_closed_form_damping(double gamma, double eta);

struct TwirlCoefficients {
    int m = 0;
    double alpha = 0, beta = 0, omega = 0, delta = 0;
    EValues e{};
};
/// Coefficients of E_U U^dag N(U X U^dag)^2 U = alpha X^2 + beta (Tr X)^2 I + omega Tr(X^2) I
/// for N = ch^(x)m, and E Tr N(U X U^dag)^2 = delta Tr X^2.
TwirlCoefficients twirl_coefficients(const KrausChannel &ch, int m);
double twirl_delta(const KrausChannel &ch, int m);

struct TwirlReport {
    int m = 0;
    long trials = 0;
    TwirlCoefficients coeffs;
    Mat lhs_mean;
    Mat lhs_stderr;  // real part stderr in .real(), imaginary in .imag()
    Mat rhs;
    double delta_lhs_mean = 0, delta_lhs_stderr = 0, delta_rhs = 0;
    double max_sigma_dev = 0;  // over all matrix entries and the delta scalar
    bool pass(double sigmas = 3.0) const { return max_sigma_dev <= sigmas; }
};
/// Monte Carlo check of both twirl identities. X must be traceless, 1 <= m <= 3.
TwirlReport mc_verify_twirl(const KrausChannel &ch, int m, const Mat &x, long trials, uint64_t seed);

}  // namespace qref

#endif
