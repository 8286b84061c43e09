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

#ifndef QREF_CORE_H
#define QREF_CORE_H

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qref {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kTolHerm = 1e-10;
inline constexpr double kTolTrace = 1e-10;
inline constexpr double kTolPsd = 1e-9;
inline constexpr double kTolUnit = 1e-10;
inline constexpr long kMaxAxis = 1L << 16;

/// Reproducible random source keyed by (seed, stream id).
class RngStream {
   public:
    RngStream(uint64_t seed, uint64_t stream);

    double uniform();
    double normal();
    /// Standard complex normal, E|z|^2 = 1.
    cplx complex_normal();

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }
    std::mt19937_64 &engine() { return eng_; }

   private:
    uint64_t seed_;
    uint64_t stream_;
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Bitmask over qubits 0..n-1. Qubit 0 is the most significant tensor factor.
struct QubitSubset {
    uint32_t mask = 0;

    constexpr QubitSubset() = default;
    constexpr explicit QubitSubset(uint32_t m) : mask(m) {}
    static QubitSubset of(std::initializer_list<int> qubits);
    static QubitSubset of(const std::vector<int> &qubits);
    static constexpr QubitSubset full(int n) { return QubitSubset(n >= 32 ? 0xFFFFFFFFu : ((1u << n) - 1u)); }

    bool contains(int q) const { return (mask >> q) & 1u; }
    int size() const { return __builtin_popcount(mask); }
    bool empty() const { return mask == 0; }
    bool subset_of(QubitSubset o) const { return (mask & ~o.mask) == 0; }
    std::vector<int> qubits() const;

    QubitSubset operator|(QubitSubset o) const { return QubitSubset(mask | o.mask); }
    QubitSubset operator&(QubitSubset o) const { return QubitSubset(mask & o.mask); }
    QubitSubset minus(QubitSubset o) const { return QubitSubset(mask & ~o.mask); }
    bool operator==(const QubitSubset &o) const = default;
    auto operator<=>(const QubitSubset &o) const = default;

    std::string str() const;
};

/// Hermitian, unit-trace, PSD matrix on n qubits.
class DensityMatrix {
   public:
    /// Validates against the global tolerances; throws std::invalid_argument.
    explicit DensityMatrix(Mat m);

    static DensityMatrix pure(const Vec &psi);
    static DensityMatrix basis(int num_qubits, uint64_t index);
    static DensityMatrix maximally_mixed(int num_qubits);
    /// (I + z Z)/2.
    static DensityMatrix from_polarization(double z);

    int num_qubits() const { return n_; }
    long dim() const { return m_.rows(); }
    const Mat &matrix() const { return m_; }

   private:
    Mat m_;
    int n_;
};

/// Returns log2(dim); throws if dim is not a power of two.
int qubit_count(long dim);

Mat kron(const Mat &a, const Mat &b);
Mat kron_all(const std::vector<Mat> &ms);

Mat pauli_x();
Mat pauli_y();
Mat pauli_z();

/// Tr over the qubits not in `keep` of an arbitrary 2^n x 2^n operator.
Mat partial_trace(const Mat &x, int num_qubits, QubitSubset keep);
DensityMatrix partial_trace(const DensityMatrix &rho, QubitSubset keep);

double trace_norm(const Mat &m);
/// Faster trace norm for Hermitian input (sum of |eigenvalues|).
double trace_norm_hermitian(const Mat &m);
double hs_norm_sq(const Mat &m);

Mat haar_unitary(long dim, RngStream &rng);

double pauli_z_expectation(const DensityMatrix &rho, int qubit);

struct Diagonalization {
    Mat unitary;
    DensityMatrix rho_diag;
};
/// U with U rho U^dag diagonal and rho'_00 >= rho'_11, so the polarization is >= 0.
Diagonalization diagonalize_state(const DensityMatrix &rho);

bool is_unitary(const Mat &u, double tol = kTolUnit);
double max_abs(const Mat &m);

// In-place application of a 2^k x 2^k operator on `qubits` of a 2^n-dim operator.
// qubits[0] is the most significant factor of `op`.
void apply_left(Mat &x, const Mat &op, const std::vector<int> &qubits, int num_qubits);
/// x <- x * op^dag.
void apply_right_adjoint(Mat &x, const Mat &op, const std::vector<int> &qubits, int num_qubits);
/// x <- op x op^dag.
void conjugate_in_place(Mat &x, const Mat &op, const std::vector<int> &qubits, int num_qubits);

/// 4x4 superoperator acting on vec(B) = (B00, B01, B10, B11) of a 2x2 block.
using Superop1 = Eigen::Matrix4cd;
/// Applies a single-qubit linear map, given as a superoperator, to qubit q of x.
void apply_superop_1q(Mat &x, const Superop1 &s, int q, int num_qubits);

}  // namespace qref

#endif
