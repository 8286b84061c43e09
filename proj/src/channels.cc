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

#include "qref/channels.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace qref {

KrausChannel::KrausChannel(std::vector<Mat> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) {
        throw std::invalid_argument("channel needs at least one Kraus operator");
    }
    long d = ops_[0].rows();
    m_ = qubit_count(d);
    Mat acc = Mat::Zero(d, d);
    for (const auto &k : ops_) {
        if (k.rows() != d || k.cols() != d) {
            throw std::invalid_argument("Kraus operators must share one square dimension");
        }
        if (!k.allFinite()) {
            throw std::invalid_argument("Kraus operator has non-finite entries");
        }
        acc += k.adjoint() * k;
    }
    double err = max_abs(acc - Mat::Identity(d, d));
    if (err > 1e-10) {
        throw std::invalid_argument("Kraus operators are not complete (max |sum K^dag K - I| = " +
                                    std::to_string(err) + ")");
    }
}

Mat KrausChannel::apply(const Mat &x) const {
    Mat out = Mat::Zero(x.rows(), x.cols());
    for (const auto &k : ops_) {
        out += k * x * k.adjoint();
    }
    return out;
}

Superop1 KrausChannel::superop() const {
    if (m_ != 1) {
        throw std::invalid_argument("superop: single-qubit channel required");
    }
    Superop1 s = Superop1::Zero();
    for (const auto &k : ops_) {
        for (int a = 0; a < 2; a++) {
            for (int b = 0; b < 2; b++) {
                for (int c = 0; c < 2; c++) {
                    for (int d = 0; d < 2; d++) {
                        s(2 * a + b, 2 * c + d) += k(a, c) * std::conj(k(b, d));
                    }
                }
            }
        }
    }
    return s;
}

KrausChannel identity_channel(int num_qubits) {
    long d = 1L << num_qubits;
    return KrausChannel({Mat::Identity(d, d)});
}

KrausChannel conjugated(const KrausChannel &ch, const Mat &u) {
    std::vector<Mat> ops;
    for (const auto &k : ch.ops()) {
        ops.push_back(u * k * u.adjoint());
    }
    return KrausChannel(ops);
}

KrausChannel tensor_product(const KrausChannel &a, const KrausChannel &b) {
    std::vector<Mat> ops;
    for (const auto &ka : a.ops()) {
        for (const auto &kb : b.ops()) {
            ops.push_back(kron(ka, kb));
        }
    }
    return KrausChannel(ops);
}

KrausChannel tensor_power(const KrausChannel &ch, int m) {
    if (m < 1) {
        throw std::invalid_argument("tensor_power: m must be >= 1");
    }
    KrausChannel out = ch;
    for (int i = 1; i < m; i++) {
        out = tensor_product(out, ch);
    }
    return out;
}

void apply_in_place(Mat &x, const KrausChannel &ch, const std::vector<int> &qubits, int num_qubits) {
    if (int(qubits.size()) != ch.num_qubits()) {
        throw std::invalid_argument("channel arity does not match target qubit count");
    }
    if (ch.num_qubits() == 1) {
        apply_superop_1q(x, ch.superop(), qubits[0], num_qubits);
        return;
    }
    Mat acc = Mat::Zero(x.rows(), x.cols());
    for (const auto &k : ch.ops()) {
        Mat y = x;
        conjugate_in_place(y, k, qubits, num_qubits);
        acc += y;
    }
    x = std::move(acc);
}

DensityMatrix apply(const KrausChannel &ch, const DensityMatrix &rho, QubitSubset on) {
    if (on.size() != ch.num_qubits()) {
        throw std::invalid_argument("apply: |on| does not match channel arity");
    }
    if (!on.subset_of(QubitSubset::full(rho.num_qubits()))) {
        throw std::invalid_argument("apply: target qubits outside the state");
    }
    Mat x = rho.matrix();
    apply_in_place(x, ch, on.qubits(), rho.num_qubits());
    x = (x + x.adjoint()) / 2.0;
    return DensityMatrix(x);
}

KrausChannel replacement_channel(double gamma, const DensityMatrix &sigma_star) {
    if (!(gamma > 0 && gamma <= 1)) {
        throw std::invalid_argument("replacement_channel: gamma must lie in (0, 1]");
    }
    if (sigma_star.dim() != 2) {
        throw std::invalid_argument("replacement_channel: sigma* must be a qubit state");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma_star.matrix());
    Vec psi0 = es.eigenvectors().col(1);
    Vec psi1 = es.eigenvectors().col(0);
    double eta = std::clamp(es.eigenvalues()(1) - es.eigenvalues()(0), 0.0, 1.0);
    double hi = std::sqrt(gamma * (1 + eta) / 2);
    double lo = std::sqrt(gamma * (1 - eta) / 2);
    std::vector<Mat> ops{
        std::sqrt(1 - gamma) * Mat::Identity(2, 2),
        hi * psi0 * psi0.adjoint(),
        hi * psi0 * psi1.adjoint(),
        lo * psi1 * psi0.adjoint(),
        lo * psi1 * psi1.adjoint(),
    };
    return KrausChannel(ops);
}

KrausChannel generalized_damping(double gamma, double eta) {
    if (!(gamma > 0 && gamma <= 1)) {
        throw std::invalid_argument("generalized_damping: gamma must lie in (0, 1]");
    }
    if (!(eta >= 0 && eta <= 1)) {
        throw std::invalid_argument("generalized_damping: eta must lie in [0, 1]");
    }
    double p = std::sqrt((1 + eta) / 2);
    double q = std::sqrt((1 - eta) / 2);
    double s = std::sqrt(1 - gamma);
    double g = std::sqrt(gamma);
    Mat k1 = Mat::Zero(2, 2), k2 = Mat::Zero(2, 2), k3 = Mat::Zero(2, 2), k4 = Mat::Zero(2, 2);
    k1(0, 0) = p;
    k1(1, 1) = p * s;
    k2(0, 0) = q * s;
    k2(1, 1) = q;
    k3(0, 1) = p * g;
    k4(1, 0) = q * g;
    return KrausChannel({k1, k2, k3, k4});
}

BlochAffine bloch_affine(const KrausChannel &ch) {
    if (ch.num_qubits() != 1) {
        throw std::invalid_argument("bloch_affine: single-qubit channel required");
    }
    const Mat paulis[3] = {pauli_x(), pauli_y(), pauli_z()};
    BlochAffine b;
    Mat ni = ch.apply(Mat::Identity(2, 2));
    for (int i = 0; i < 3; i++) {
        b.offset(i) = 0.5 * (paulis[i] * ni).trace().real();
        for (int j = 0; j < 3; j++) {
            b.linear(i, j) = 0.5 * (paulis[i] * ch.apply(paulis[j])).trace().real();
        }
    }
    return b;
}

DensityMatrix fixed_point(const KrausChannel &ch) {
    if (ch.num_qubits() != 1) {
        throw std::invalid_argument("fixed_point: single-qubit channel required");
    }
    // Uniqueness from the spectrum of the 4x4 transfer matrix.
    Superop1 s = ch.superop();
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(s, false);
    int near_one = 0;
    for (int i = 0; i < 4; i++) {
        if (std::abs(es.eigenvalues()(i) - cplx(1.0)) <= 1e-8) {
            near_one++;
        }
    }
    if (near_one != 1) {
        throw std::domain_error("fixed_point: channel does not have a unique fixed point");
    }
    BlochAffine b = bloch_affine(ch);
    Eigen::Vector3d r = (Eigen::Matrix3d::Identity() - b.linear).fullPivLu().solve(b.offset);
    Mat m = Mat::Identity(2, 2);
    m += r(0) * pauli_x() + r(1) * pauli_y() + r(2) * pauli_z();
    return DensityMatrix(m / 2.0);
}

double purity_eta(const DensityMatrix &sigma) {
    double p = (sigma.matrix() * sigma.matrix()).trace().real();
    return std::sqrt(std::max(0.0, 2 * p - 1));
}

KrausChannel diagonalized_form(const KrausChannel &ch) {
    DensityMatrix sigma = fixed_point(ch);
    return conjugated(ch, diagonalize_state(sigma).unitary);
}

double chi(const KrausChannel &ch_diag) {
    Mat z = pauli_z();
    return 0.5 * (z * ch_diag.apply(z)).trace().real();
}

double nonunitality(const KrausChannel &ch) {
    long d = ch.dim();
    Mat id = Mat::Identity(d, d);
    Mat x = ch.apply(id) - id;
    return trace_norm_hermitian((x + x.adjoint()) / 2.0);
}

namespace {

// (N - I) (x) I on a 2-qubit operator, system = first factor.
Mat diamond_map(const std::vector<Mat> &lifted, const Mat &p) {
    Mat out = -p;
    for (const auto &k : lifted) {
        out += k * p * k.adjoint();
    }
    return out;
}

Mat diamond_map_adjoint(const std::vector<Mat> &lifted, const Mat &s) {
    Mat out = -s;
    for (const auto &k : lifted) {
        out += k.adjoint() * s * k;
    }
    return out;
}

std::vector<Mat> lift(const KrausChannel &ch) {
    std::vector<Mat> out;
    for (const auto &k : ch.ops()) {
        out.push_back(kron(k, Mat::Identity(2, 2)));
    }
    return out;
}

}  // namespace

double diamond_objective(const KrausChannel &ch, const Vec &psi) {
    Vec p = psi / psi.norm();
    Mat m = diamond_map(lift(ch), p * p.adjoint());
    return trace_norm_hermitian((m + m.adjoint()) / 2.0);
}

DiamondEstimate diamond_distance_estimate(const KrausChannel &ch, int restarts, RngStream &rng) {
    if (ch.num_qubits() != 1) {
        throw std::invalid_argument("diamond_distance_estimate: single-qubit channel required");
    }
    std::vector<Mat> lifted = lift(ch);
    DiamondEstimate best;
    best.maximizer = Vec::Zero(4);
    best.maximizer(0) = 1.0;
    best.restarts = restarts;
    for (int r = 0; r < restarts; r++) {
        Vec psi(4);
        for (int i = 0; i < 4; i++) {
            psi(i) = rng.complex_normal();
        }
        psi /= psi.norm();
        double f = -1;
        for (int it = 0; it < 500; it++) {
            Mat m = diamond_map(lifted, psi * psi.adjoint());
            m = (m + m.adjoint()) / 2.0;
            Eigen::SelfAdjointEigenSolver<Mat> es(m);
            double fn = es.eigenvalues().cwiseAbs().sum();
            if (fn > best.value) {
                best.value = fn;
                best.maximizer = psi;
            }
            if (fn - f < 1e-12) {
                break;
            }
            f = fn;
            // Alternating ascent: S = sign(M), then psi = top eigenvector of Phi^dag(S).
            Mat s = Mat::Zero(4, 4);
            for (int i = 0; i < 4; i++) {
                double sg = es.eigenvalues()(i) >= 0 ? 1.0 : -1.0;
                s += sg * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
            }
            Mat a = diamond_map_adjoint(lifted, s);
            Eigen::SelfAdjointEigenSolver<Mat> ea((a + a.adjoint()) / 2.0);
            psi = ea.eigenvectors().col(3);
        }
    }
    return best;
}

ContractionInfo contraction_delta(const KrausChannel &ch, double kappa) {
    if (!(kappa > 0)) {
        throw std::invalid_argument("contraction_delta: kappa must be positive");
    }
    BlochAffine b = bloch_affine(ch);
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(b.linear);
    ContractionInfo info;
    info.max_ratio = svd.singularValues()(0);
    info.contracting = info.max_ratio < 1 - 1e-12;
    info.delta = info.contracting ? (1 - info.max_ratio) / kappa : 0.0;
    return info;
}

CharacterizedChannel::CharacterizedChannel(KrausChannel ch, const MetricsOptions &opt) : ch_(std::move(ch)) {
    if (ch_.num_qubits() != 1) {
        throw std::invalid_argument("CharacterizedChannel: single-qubit channel required");
    }
    RngStream rng(opt.seed, 0);
    metrics_.kappa = diamond_distance_estimate(ch_, opt.diamond_restarts, rng).value;
    metrics_.fixed_point = fixed_point(ch_);
    metrics_.eta = purity_eta(metrics_.fixed_point);
    metrics_.chi = chi(diagonalized_form(ch_));
    metrics_.chi_negative = metrics_.chi < 0;
    metrics_.nonunitality = nonunitality(ch_);
    if (metrics_.kappa > 0) {
        ContractionInfo c = contraction_delta(ch_, metrics_.kappa);
        metrics_.delta_contraction = c.delta;
        metrics_.contracting = c.contracting;
    }
}

}  // namespace qref
