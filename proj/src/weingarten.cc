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

#include "qref/weingarten.h"

#include <cmath>
#include <stdexcept>

#include "qref/stats.h"

namespace qref {

double haar_fourth_moment(long n, const std::array<long, 8> &idx) {
    if (n < 2) {
        throw std::invalid_argument("haar_fourth_moment: N must be >= 2");
    }
    for (long i : idx) {
        if (i < 0 || i >= n) {
            throw std::invalid_argument("haar_fourth_moment: index out of range");
        }
    }
    // Unconjugated entries (i1,j1), (i3,j3); conjugated (i2,j2), (i4,j4).
    const long ri[2] = {idx[0], idx[4]}, ci[2] = {idx[1], idx[5]};
    const long rc[2] = {idx[2], idx[6]}, cc[2] = {idx[3], idx[7]};
    const double nn = double(n);
    const double wg_id = 1.0 / (nn * nn - 1);
    const double wg_swap = -1.0 / (nn * (nn * nn - 1));
    double out = 0;
    for (int s = 0; s < 2; s++) {
        if (ri[0] != rc[s] || ri[1] != rc[1 - s]) {
            continue;
        }
        for (int t = 0; t < 2; t++) {
            if (ci[0] != cc[t] || ci[1] != cc[1 - t]) {
                continue;
            }
            out += (s == t) ? wg_id : wg_swap;
        }
    }
    return out;
}

std::array<cplx, 6> e_invariants_complex(const std::vector<Mat> &kraus) {
    std::array<cplx, 6> e{};
    for (const auto &ki : kraus) {
        Mat kid = ki.adjoint();
        cplx tri = ki.trace();
        Mat kki = ki * kid;
        for (const auto &kj : kraus) {
            Mat kjd = kj.adjoint();
            cplx trjd = kjd.trace();
            Mat kkj = kj * kjd;
            cplx tr_id_j = (kid * kj).trace();
            e[0] += tri * tr_id_j * trjd;
            e[1] += (kki * kkj).trace();
            e[2] += (kjd * kid * kj * ki).trace();
            e[3] += tri * (kid * kkj).trace();
            e[4] += (kki * kj).trace() * trjd;
            e[5] += tr_id_j * (kjd * ki).trace();
        }
    }
    return e;
}

EValues e_invariants(const KrausChannel &ch) {
    if (ch.num_qubits() != 1) {
        throw std::invalid_argument("e_invariants: single-qubit channel required");
    }
    auto c = e_invariants_complex(ch.ops());
    EValues out{};
    for (int k = 0; k < 6; k++) {
        out[k] = c[k].real();
    }
    return out;
}

EValues e_closed_form_replacement(double g, double eta) {
    double e2 = eta * eta, g2 = g * g;
    return {8 - 12 * g + 0.5 * (9 + e2) * g2,
            2 * (1 + e2 * g2),
            2 + 0.5 * (e2 - 3) * g2,
            4 - 3 * g + e2 * g2,
            4 - 3 * g + e2 * g2,
            4 - 6 * g + (3 + e2) * g2};
}

EValues e_closed_form_damping(double g, double eta) {
    double s = std::sqrt(1 - g), e2 = eta * eta, g2 = g * g;
    return {-2 * (s + 2) * g + 4 * (s + 1) + 0.5 * g2 * (e2 + 1),
            2 * (1 + g2 * e2),
            2 * (s - 1) * g + 0.5 * g2 * (e2 + 1) + 2,
            -g + 2 * s + g2 * e2 + 2,
            -g + 2 * s + g2 * e2 + 2,
            -4 * g + g2 * (e2 + 1) + 4};
}

namespace {

double real_or_throw(cplx z, const char *what) {
    if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z.real()))) {
        throw std::runtime_error(std::string("twirl coefficient ") + what + " is not real");
    }
    return z.real();
}

}  // namespace

double twirl_delta(const KrausChannel &ch, int m) {
    if (ch.num_qubits() != 1 || m < 1 || m > 64) {
        throw std::invalid_argument("twirl_delta: single-qubit channel and 1 <= m <= 64 required");
    }
    auto e = e_invariants_complex(ch.ops());
    double d = std::ldexp(1.0, m);
    cplx val = (d * std::pow(e[5], m) - std::pow(e[1], m)) / (d * (d * d - 1));
    return real_or_throw(val, "delta");
}

TwirlCoefficients twirl_coefficients(const KrausChannel &ch, int m) {
    if (ch.num_qubits() != 1 || m < 1 || m > 64) {
        throw std::invalid_argument("twirl_coefficients: single-qubit channel and 1 <= m <= 64 required");
    }
    auto e = e_invariants_complex(ch.ops());
    TwirlCoefficients c;
    c.m = m;
    for (int k = 0; k < 6; k++) {
        c.e[k] = e[k].real();
    }
    c.delta = twirl_delta(ch, m);
    if (m == 1) {
        // d^4 - 5d^2 + 4 vanishes; for traceless 2x2 X only alpha/2 + omega = delta/2 is defined.
        c.alpha = c.delta;
        c.beta = c.omega = 0;
        return c;
    }
    std::array<cplx, 6> p;
    for (int k = 0; k < 6; k++) {
        p[k] = std::pow(e[k], m);
    }
    double d = std::ldexp(1.0, m);
    double d2 = d * d;
    double norm = d * (d2 * d2 - 5 * d2 + 4);
    cplx s456 = p[3] + p[4] + p[5];
    cplx s123 = p[0] + p[1] + p[2];
    c.alpha = real_or_throw((d2 * p[0] + 4.0 * p[1] + d2 * p[2] - 2 * d * s456) / norm, "alpha");
    c.beta = real_or_throw((2.0 * p[0] + (d2 - 2) * p[1] + 2.0 * p[2] - d * s456) / norm, "beta");
    c.omega = real_or_throw((2.0 * p[3] + 2.0 * p[4] + (d2 - 2) * p[5] - d * s123) / norm, "omega");
    return c;
}

TwirlReport mc_verify_twirl(const KrausChannel &ch, int m, const Mat &x, long trials, uint64_t seed) {
    if (m < 1 || m > 3) {
        throw std::invalid_argument("mc_verify_twirl: m must be in [1, 3]");
    }
    if (trials < 2) {
        throw std::invalid_argument("mc_verify_twirl: need at least 2 trials");
    }
    const long d = 1L << m;
    if (x.rows() != d || x.cols() != d) {
        throw std::invalid_argument("mc_verify_twirl: X has the wrong dimension");
    }
    if (std::abs(x.trace()) > 1e-12 * std::max(1.0, x.norm())) {
        throw std::invalid_argument("mc_verify_twirl: X must be traceless");
    }
    KrausChannel big = tensor_power(ch, m);

    TwirlReport r;
    r.m = m;
    r.trials = trials;
    r.coeffs = twirl_coefficients(ch, m);
    const Mat x2 = x * x;
    const double tr_x2 = x2.trace().real();
    r.rhs = r.coeffs.alpha * x2 + r.coeffs.omega * tr_x2 * Mat::Identity(d, d);
    r.delta_rhs = r.coeffs.delta * tr_x2;

    const size_t cells = size_t(d * d);
    auto acc = chunked_welford(trials, 2 * cells + 1, [&](long trial, std::vector<Welford> &w) {
        RngStream rng(seed, uint64_t(trial));
        Mat u = haar_unitary(d, rng);
        Mat y = big.apply(u * x * u.adjoint());
        Mat y2 = y * y;
        Mat lhs = u.adjoint() * y2 * u;
        for (long i = 0; i < d; i++) {
            for (long j = 0; j < d; j++) {
                size_t c = size_t(i * d + j);
                w[2 * c].add(lhs(i, j).real());
                w[2 * c + 1].add(lhs(i, j).imag());
            }
        }
        w[2 * cells].add(y2.trace().real());
    });

    // A zero-variance cell (e.g. the identity channel) is judged against a 1e-12 floor.
    auto sigma_dev = [](double diff, double se) { return std::abs(diff) / std::max(se, 1e-12); };
    r.lhs_mean = Mat::Zero(d, d);
    r.lhs_stderr = Mat::Zero(d, d);
    double worst = 0;
    for (long i = 0; i < d; i++) {
        for (long j = 0; j < d; j++) {
            size_t c = size_t(i * d + j);
            const Welford &re = acc[2 * c], &im = acc[2 * c + 1];
            r.lhs_mean(i, j) = cplx(re.mean, im.mean);
            r.lhs_stderr(i, j) = cplx(re.stderr_of_mean(), im.stderr_of_mean());
            worst = std::max(worst, sigma_dev(re.mean - r.rhs(i, j).real(), re.stderr_of_mean()));
            worst = std::max(worst, sigma_dev(im.mean - r.rhs(i, j).imag(), im.stderr_of_mean()));
        }
    }
    r.delta_lhs_mean = acc[2 * cells].mean;
    r.delta_lhs_stderr = acc[2 * cells].stderr_of_mean();
    worst = std::max(worst, sigma_dev(r.delta_lhs_mean - r.delta_rhs, r.delta_lhs_stderr));
    r.max_sigma_dev = worst;
    return r;
}

}  // namespace qref
