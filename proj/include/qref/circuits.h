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

#ifndef QREF_CIRCUITS_H
#define QREF_CIRCUITS_H

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qref/channels.h"
#include "qref/core.h"
#include "qref/stats.h"

namespace qref {

/// One parallel layer: disjoint gate supports.
using Layer = std::vector<std::vector<int>>;

struct Architecture {
    std::string kind;  // "brickwork1d", "alltoall" or "custom"
    int n = 0;
    std::vector<Layer> layers;
};

/// Open-boundary 1-D brickwork: even layers pair (0,1),(2,3),..., odd layers (1,2),(3,4),...
Architecture brickwork1d(int n, int depth);
/// One n-qubit Haar gate per layer.
Architecture alltoall(int n, int depth);
Architecture custom_architecture(int n, std::vector<Layer> layers);

/// Haar-averaged marginal distances S_G, S_empty = 0 implicitly.
class SubsetDistanceVector {
   public:
    SubsetDistanceVector() = default;
    explicit SubsetDistanceVector(int n) : n_(n) {}

    /// S_{G,0} for two computational basis states, for every G in `family`.
    static SubsetDistanceVector from_bitstrings(int n, uint64_t a, uint64_t b, const std::set<QubitSubset> &family);

    int n() const { return n_; }
    bool tracks(QubitSubset g) const { return g.empty() || table_.count(g) > 0; }
    double get(QubitSubset g) const;
    void set(QubitSubset g, double v);
    const std::map<QubitSubset, double> &table() const { return table_; }

   private:
    int n_ = 0;
    std::map<QubitSubset, double> table_;
};

struct UV {
    double u = 0;
    double v = 0;
};
/// Kraus operators act on omega with factors in ascending qubit order.
UV uv_params(const std::vector<Mat> &kraus, QubitSubset omega, QubitSubset g);

struct StepCoefficients {
    double u = 0, v = 0, c1 = 0, c2 = 0;
};
StepCoefficients step_coefficients(double n_omega, double n_omega_minus_g, double n_g_cap_omega, double u, double v);
StepCoefficients step_coefficients_for(const KrausChannel &noise, QubitSubset omega, QubitSubset g);

/// One gate on omega followed by `noise` (acting on omega). Throws if the family is not closed.
SubsetDistanceVector evolve_subset(const SubsetDistanceVector &s, QubitSubset omega, const KrausChannel &noise);

/// Smallest family containing `targets` and closed under G -> G\O, G u O for every gate support.
std::set<QubitSubset> closed_family(const std::set<QubitSubset> &targets, const Architecture &arch,
                                    size_t cap = 4096);

/// Exact Haar-averaged S_G after every layer (index 0 = input). Noise on each gate is noise1q^(x)|O|.
std::vector<SubsetDistanceVector> predict_subset_distances(const Architecture &arch, const KrausChannel &noise1q,
                                                           uint64_t a, uint64_t b,
                                                           const std::set<QubitSubset> &targets);

std::set<QubitSubset> all_pairs(int n);

struct TwoQubitNoiseParams {
    double a = 0, b = 0, A = 0, B = 0;
    double case1_alpha = 0, case1_r = 0;
    double case2_beta = 0, case2_mu = 0;
    double gamma_lower = 0, gamma_upper = 0;
};
/// Requires a swap-symmetric 2-qubit channel.
TwoQubitNoiseParams two_qubit_params(const KrausChannel &ch2);

double lower_bound_curve(const TwoQubitNoiseParams &p, int depth);
double upper_bound_curve(const TwoQubitNoiseParams &p, int n, int depth);

struct AllToAllCoeffs {
    double alpha_n = 0, beta_n = 0, omega_n = 0, delta_n = 0;
    Eigen::Matrix2d transfer;
};
/// Log-space evaluation of the twirl coefficients at m = n.
AllToAllCoeffs alltoall_coeffs(const KrausChannel &noise1q, int n);

struct AllToAllBound {
    double a = 0;
    double b = 0;
    double predicted_tr_x2 = 0;  // E Tr X_d^2 for orthogonal pure inputs
    double bound = 0;            // 1/2-normalized trace distance bound
};
AllToAllBound alltoall_bound(const AllToAllCoeffs &c, int n, int depth);

struct McOptions {
    long trials = 1000;
    uint64_t seed = 1;
    uint64_t basis_a = 0;
    std::optional<uint64_t> basis_b;  // defaults to |10...0>
    std::optional<Mat> initial_difference;  // overrides the basis pair
    bool trace_distance = true;
    std::set<QubitSubset> subsets;
};

struct McDepthStats {
    Stat trace_distance;  // 1/2 ||X||_1
    Stat tr_x2;           // Tr X^2
    std::map<QubitSubset, Stat> subsets;  // 1/2 ||Tr_{F\G} X||_2^2
};

/// Evolves X = rho - sigma through fresh Haar gates per trial. Index 0 is the input.
std::vector<McDepthStats> mc_run(const Architecture &arch, const KrausChannel &noise1q, const McOptions &opt);

Stat mc_subset_distance(const Architecture &arch, const KrausChannel &noise1q, QubitSubset g, long trials,
                        uint64_t seed);
Stat mc_alltoall_distance(int n, int depth, const KrausChannel &noise1q, long trials, uint64_t seed);

/// max over pairs of the mean, with the stderr of the maximizing pair.
struct PairMax {
    QubitSubset pair;
    Stat stat;
};
PairMax max_pair(const McDepthStats &s);

}  // namespace qref

#endif
