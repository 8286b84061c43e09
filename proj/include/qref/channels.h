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

#ifndef QREF_CHANNELS_H
#define QREF_CHANNELS_H

#include <optional>
#include <vector>

#include "qref/core.h"

namespace qref {

/// CPTP map given by Kraus operators on m qubits.
class KrausChannel {
   public:
    /// Throws std::invalid_argument unless sum K^dag K = I within 1e-10.
    explicit KrausChannel(std::vector<Mat> ops);

    int num_qubits() const { return m_; }
    long dim() const { return 1L << m_; }
    const std::vector<Mat> &ops() const { return ops_; }

    /// Action on an operator of the channel's own dimension.
    Mat apply(const Mat &x) const;
    /// 4x4 superoperator (single-qubit channels only).
    Superop1 superop() const;

   private:
    std::vector<Mat> ops_;
    int m_;
};

KrausChannel identity_channel(int num_qubits);
/// Kraus ops U K_i U^dag.
KrausChannel conjugated(const KrausChannel &ch, const Mat &u);
/// Product Kraus list of ch^{(x)m}.
KrausChannel tensor_power(const KrausChannel &ch, int m);
KrausChannel tensor_product(const KrausChannel &a, const KrausChannel &b);

/// Applies ch to the qubits in `on` (ascending order) of rho.
DensityMatrix apply(const KrausChannel &ch, const DensityMatrix &rho, QubitSubset on);
/// Raw in-place version, qubits listed in the order matching the Kraus factors.
void apply_in_place(Mat &x, const KrausChannel &ch, const std::vector<int> &qubits, int num_qubits);

KrausChannel replacement_channel(double gamma, const DensityMatrix &sigma_star);
KrausChannel generalized_damping(double gamma, double eta);

DensityMatrix fixed_point(const KrausChannel &ch);
double purity_eta(const DensityMatrix &sigma);
KrausChannel diagonalized_form(const KrausChannel &ch);
/// (1/2) Tr(Z N(Z)); meaningful for a channel in diagonalized form.
double chi(const KrausChannel &ch_diag);
/// ||N(I) - I||_1.
double nonunitality(const KrausChannel &ch);

/// Bloch representation r -> T r + t.
struct BlochAffine {
    Eigen::Matrix3d linear;
    Eigen::Vector3d offset;
};
BlochAffine bloch_affine(const KrausChannel &ch);

struct DiamondEstimate {
    double value = 0;
    Vec maximizer;  // 2-qubit input, system qubit first
    int restarts = 0;
};
/// Variational lower bound on ||N - I||_diamond. Monotone in `restarts` for a given stream.
DiamondEstimate diamond_distance_estimate(const KrausChannel &ch, int restarts, RngStream &rng);
/// ||((N - I) (x) I)(|psi><psi|)||_1 for a 2-qubit psi.
double diamond_objective(const KrausChannel &ch, const Vec &psi);

struct ContractionInfo {
    double delta = 0;
    double max_ratio = 1;
    bool contracting = false;
};
ContractionInfo contraction_delta(const KrausChannel &ch, double kappa);

struct NoiseMetrics {
    double kappa = 0;
    double eta = 0;
    double chi = 0;
    double delta_contraction = 0;
    bool contracting = false;
    bool chi_negative = false;
    DensityMatrix fixed_point = DensityMatrix::maximally_mixed(1);
    double nonunitality = 0;
};

struct MetricsOptions {
    int diamond_restarts = 64;
    uint64_t seed = 1;
};

/// Single-qubit channel together with its eagerly computed metrics.
class CharacterizedChannel {
   public:
    CharacterizedChannel(KrausChannel ch, const MetricsOptions &opt = {});
    const KrausChannel &channel() const { return ch_; }
    const NoiseMetrics &metrics() const { return metrics_; }

   private:
    KrausChannel ch_;
    NoiseMetrics metrics_;
};

}  // namespace qref

#endif
