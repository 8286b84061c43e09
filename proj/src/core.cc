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

#include "qref/core.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace qref {

RngStream::RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(stream), uint32_t(stream >> 32), 0x71e5u};
    eng_.seed(seq);
}

double RngStream::uniform() { return uniform_(eng_); }

double RngStream::normal() { return normal_(eng_); }

cplx RngStream::complex_normal() {
    double re = normal_(eng_);
    double im = normal_(eng_);
    return cplx(re, im) * M_SQRT1_2;
}

QubitSubset QubitSubset::of(std::initializer_list<int> qubits) {
    return of(std::vector<int>(qubits));
}

QubitSubset QubitSubset::of(const std::vector<int> &qubits) {
    QubitSubset s;
    for (int q : qubits) {
        if (q < 0 || q >= 30) {
            throw std::invalid_argument("qubit index out of range: " + std::to_string(q));
        }
        s.mask |= 1u << q;
    }
    return s;
}

std::vector<int> QubitSubset::qubits() const {
    std::vector<int> out;
    for (int q = 0; q < 32; q++) {
        if (contains(q)) {
            out.push_back(q);
        }
    }
    return out;
}

std::string QubitSubset::str() const {
    std::string s = "{";
    bool first = true;
    for (int q : qubits()) {
        if (!first) {
            s += ",";
        }
        s += std::to_string(q);
        first = false;
    }
    return s + "}";
}

int qubit_count(long dim) {
    if (dim < 1 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("dimension is not a power of two: " + std::to_string(dim));
    }
    int n = 0;
    while ((1L << n) < dim) {
        n++;
    }
    return n;
}

double max_abs(const Mat &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw std::invalid_argument("density matrix must be square");
    }
    n_ = qubit_count(m_.rows());
    if (!m_.allFinite()) {
        throw std::invalid_argument("density matrix has non-finite entries");
    }
    if (max_abs(m_ - m_.adjoint()) > kTolHerm) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(m_.trace() - cplx(1.0)) > kTolTrace) {
        throw std::invalid_argument("density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kTolPsd) {
        throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::pure(const Vec &psi) {
    Vec p = psi / psi.norm();
    return DensityMatrix(p * p.adjoint());
}

DensityMatrix DensityMatrix::basis(int num_qubits, uint64_t index) {
    long d = 1L << num_qubits;
    Mat m = Mat::Zero(d, d);
    m(long(index), long(index)) = 1.0;
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    long d = 1L << num_qubits;
    return DensityMatrix(Mat::Identity(d, d) / double(d));
}

DensityMatrix DensityMatrix::from_polarization(double z) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = (1 + z) / 2;
    m(1, 1) = (1 - z) / 2;
    return DensityMatrix(m);
}

Mat kron(const Mat &a, const Mat &b) {
    if (!a.allFinite() || !b.allFinite()) {
        throw std::invalid_argument("kron: non-finite input");
    }
    long r = a.rows() * b.rows();
    long c = a.cols() * b.cols();
    if (r > kMaxAxis || c > kMaxAxis) {
        throw std::length_error("kron: result exceeds maximum axis size");
    }
    Mat out(r, c);
    for (long i = 0; i < a.rows(); i++) {
        for (long j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Mat kron_all(const std::vector<Mat> &ms) {
    Mat out = Mat::Identity(1, 1);
    for (const auto &m : ms) {
        out = kron(out, m);
    }
    return out;
}

Mat pauli_x() {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = m(1, 0) = 1.0;
    return m;
}

Mat pauli_y() {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = cplx(0, -1);
    m(1, 0) = cplx(0, 1);
    return m;
}

Mat pauli_z() {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

namespace {

// Bit position of qubit q inside a basis index.
inline int bitpos(int q, int n) { return n - 1 - q; }

// Packs the bits of `index` at the kept qubits into a dense index.
inline long compress(long index, const std::vector<int> &kept, int n) {
    long out = 0;
    for (int q : kept) {
        out = (out << 1) | ((index >> bitpos(q, n)) & 1);
    }
    return out;
}

}  // namespace

Mat partial_trace(const Mat &x, int num_qubits, QubitSubset keep) {
    if (x.rows() != x.cols() || x.rows() != (1L << num_qubits)) {
        throw std::invalid_argument("partial_trace: operator dimension does not match qubit count");
    }
    if (!keep.subset_of(QubitSubset::full(num_qubits))) {
        throw std::invalid_argument("partial_trace: keep set " + keep.str() + " is not a subset of the qubits");
    }
    std::vector<int> kept = keep.qubits();
    long traced_mask = 0;
    for (int q = 0; q < num_qubits; q++) {
        if (!keep.contains(q)) {
            traced_mask |= 1L << bitpos(q, num_qubits);
        }
    }
    long dk = 1L << kept.size();
    Mat out = Mat::Zero(dk, dk);
    long d = x.rows();
    std::vector<long> packed(d);
    for (long i = 0; i < d; i++) {
        packed[i] = compress(i, kept, num_qubits);
    }
    for (long j = 0; j < d; j++) {
        for (long i = 0; i < d; i++) {
            if ((i & traced_mask) == (j & traced_mask)) {
                out(packed[i], packed[j]) += x(i, j);
            }
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix &rho, QubitSubset keep) {
    return DensityMatrix(partial_trace(rho.matrix(), rho.num_qubits(), keep));
}

double trace_norm(const Mat &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("trace_norm: matrix is not square");
    }
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

double trace_norm_hermitian(const Mat &m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double hs_norm_sq(const Mat &m) { return m.squaredNorm(); }

Mat haar_unitary(long dim, RngStream &rng) {
    if (dim < 1) {
        throw std::invalid_argument("haar_unitary: dim must be positive");
    }
    Mat g(dim, dim);
    for (long j = 0; j < dim; j++) {
        for (long i = 0; i < dim; i++) {
            g(i, j) = rng.complex_normal();
        }
    }
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat &r = qr.matrixQR();
    for (long j = 0; j < dim; j++) {
        cplx d = r(j, j);
        double a = std::abs(d);
        q.col(j) *= a > 0 ? d / a : cplx(1.0);
    }
    return q;
}

double pauli_z_expectation(const DensityMatrix &rho, int qubit) {
    int n = rho.num_qubits();
    if (qubit < 0 || qubit >= n) {
        throw std::out_of_range("pauli_z_expectation: qubit index out of range");
    }
    int p = bitpos(qubit, n);
    double z = 0;
    for (long i = 0; i < rho.dim(); i++) {
        double s = ((i >> p) & 1) ? -1.0 : 1.0;
        z += s * rho.matrix()(i, i).real();
    }
    return z;
}

Diagonalization diagonalize_state(const DensityMatrix &rho) {
    if (rho.dim() != 2) {
        throw std::invalid_argument("diagonalize_state: single-qubit state required");
    }
    const Mat &m = rho.matrix();
    double offdiag = std::abs(m(0, 1));
    Mat u = Mat::Identity(2, 2);
    if (offdiag <= 1e-14) {
        if (m(1, 1).real() > m(0, 0).real()) {
            u = pauli_x();
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(m);
        // Ascending eigenvalues: the larger one goes to |0>.
        Mat v(2, 2);
        v.col(0) = es.eigenvectors().col(1);
        v.col(1) = es.eigenvectors().col(0);
        u = v.adjoint();
    }
    Mat d = u * m * u.adjoint();
    d(0, 1) = d(1, 0) = 0.0;
    d(0, 0) = d(0, 0).real();
    d(1, 1) = d(1, 1).real();
    return {u, DensityMatrix(d)};
}

bool is_unitary(const Mat &u, double tol) {
    if (u.rows() != u.cols()) {
        return false;
    }
    return max_abs(u.adjoint() * u - Mat::Identity(u.rows(), u.cols())) < tol;
}

namespace {

struct Embedding {
    std::vector<long> offsets;  // index offset of each local basis state
    std::vector<long> bases;    // indices with all target bits cleared
};

Embedding make_embedding(const std::vector<int> &qubits, int n) {
    Embedding e;
    int k = int(qubits.size());
    long mask = 0;
    for (int q : qubits) {
        if (q < 0 || q >= n) {
            throw std::invalid_argument("operator qubit out of range");
        }
        long bit = 1L << bitpos(q, n);
        if (mask & bit) {
            throw std::invalid_argument("repeated qubit in operator target list");
        }
        mask |= bit;
    }
    e.offsets.resize(1L << k);
    for (long a = 0; a < (1L << k); a++) {
        long off = 0;
        for (int j = 0; j < k; j++) {
            if ((a >> (k - 1 - j)) & 1) {
                off |= 1L << bitpos(qubits[j], n);
            }
        }
        e.offsets[a] = off;
    }
    long d = 1L << n;
    for (long i = 0; i < d; i++) {
        if ((i & mask) == 0) {
            e.bases.push_back(i);
        }
    }
    return e;
}

void check_op(const Mat &x, const Mat &op, const std::vector<int> &qubits, int n) {
    if (x.rows() != (1L << n) || x.cols() != (1L << n)) {
        throw std::invalid_argument("operator dimension does not match qubit count");
    }
    if (op.rows() != (1L << qubits.size()) || op.cols() != op.rows()) {
        throw std::invalid_argument("local operator dimension does not match its qubit list");
    }
}

}  // namespace

void apply_left(Mat &x, const Mat &op, const std::vector<int> &qubits, int num_qubits) {
    check_op(x, op, qubits, num_qubits);
    Embedding e = make_embedding(qubits, num_qubits);
    long k = op.rows();
    std::vector<cplx> buf(k);
    for (long c = 0; c < x.cols(); c++) {
        for (long base : e.bases) {
            for (long a = 0; a < k; a++) {
                buf[a] = x(base + e.offsets[a], c);
            }
            for (long a = 0; a < k; a++) {
                cplx s = 0;
                for (long b = 0; b < k; b++) {
                    s += op(a, b) * buf[b];
                }
                x(base + e.offsets[a], c) = s;
            }
        }
    }
}

void apply_right_adjoint(Mat &x, const Mat &op, const std::vector<int> &qubits, int num_qubits) {
    check_op(x, op, qubits, num_qubits);
    Embedding e = make_embedding(qubits, num_qubits);
    long k = op.rows();
    Mat opc = op.conjugate();
    std::vector<cplx> buf(k);
    for (long base : e.bases) {
        for (long r = 0; r < x.rows(); r++) {
            for (long b = 0; b < k; b++) {
                buf[b] = x(r, base + e.offsets[b]);
            }
            for (long a = 0; a < k; a++) {
                cplx s = 0;
                for (long b = 0; b < k; b++) {
                    s += buf[b] * opc(a, b);
                }
                x(r, base + e.offsets[a]) = s;
            }
        }
    }
}

void conjugate_in_place(Mat &x, const Mat &op, const std::vector<int> &qubits, int num_qubits) {
    apply_left(x, op, qubits, num_qubits);
    apply_right_adjoint(x, op, qubits, num_qubits);
}

void apply_superop_1q(Mat &x, const Superop1 &s, int q, int num_qubits) {
    if (x.rows() != (1L << num_qubits) || x.cols() != x.rows()) {
        throw std::invalid_argument("apply_superop_1q: dimension mismatch");
    }
    if (q < 0 || q >= num_qubits) {
        throw std::invalid_argument("apply_superop_1q: qubit out of range");
    }
    long st = 1L << bitpos(q, num_qubits);
    long d = x.rows();
    for (long c = 0; c < d; c++) {
        if (c & st) {
            continue;
        }
        for (long r = 0; r < d; r++) {
            if (r & st) {
                continue;
            }
            cplx b00 = x(r, c), b01 = x(r, c + st), b10 = x(r + st, c), b11 = x(r + st, c + st);
            x(r, c) = s(0, 0) * b00 + s(0, 1) * b01 + s(0, 2) * b10 + s(0, 3) * b11;
            x(r, c + st) = s(1, 0) * b00 + s(1, 1) * b01 + s(1, 2) * b10 + s(1, 3) * b11;
            x(r + st, c) = s(2, 0) * b00 + s(2, 1) * b01 + s(2, 2) * b10 + s(2, 3) * b11;
            x(r + st, c + st) = s(3, 0) * b00 + s(3, 1) * b01 + s(3, 2) * b10 + s(3, 3) * b11;
        }
    }
}

}  // namespace qref
