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

#ifndef QREF_FRIDGE_H
#define QREF_FRIDGE_H

#include <string>
#include <vector>

#include "qref/channels.h"
#include "qref/core.h"

namespace qref {

inline const double kAlphaCqc = std::log(3.0) / std::log(2.0);
inline const double kMu0 = std::log(3.0) / std::log(1.5);

/// Polarization and depolarization of one compressor step.
struct CompressorRelation {
    double z_in = 0, z_out = 0;
    double p_in = 1, p_out = 1;
    static CompressorRelation from_z(double z_in, double z_out) {
        return {z_in, z_out, 1 - z_in, 1 - z_out};
    }
};

/// 8x8 permutation implementing the 3-qubit compressor. Output qubit is qubit 0.
Mat qcp_unitary();
/// The two gate layers whose product is qcp_unitary(): CNOT (target 1, control 2) then
/// SWAP(0,2) conditioned on qubit 1 being |0>.
Mat qcp_cnot_layer();
Mat qcp_cswap_layer();

double qcp_relation_z(double z_in);
/// Same map in p = 1 - z: p^2 (3 - p) / 2, which stays below 3 p^2.
double qcp_relation_p(double p_in);

/// Smallest k with the iterated relation reaching z_target. Capped at 64.
int exact_cycle_count(double z_in, double z_target);
/// Smallest k with the iterated p-relation reaching p_target or below.
int exact_cycle_count_p(double p_in, double p_target);

double cycle_bound_small_z(double z_in, double z_out);
double cycle_bound_small_p(double p_in, double p_out);

struct RatioBound {
    double r1 = 1, r2 = 1, r3 = 1;
    double product = 1;
    double delta = 0;        // exponent correction of stage 1 at z1
    double delta_prime = 0;  // exponent correction of stage 2 at z2
    double constant_c = 0;
    double closed_form = 0;  // C (-log 3(1 - z_out))^alpha / z_in^(mu0 + delta)
};
RatioBound ratio_bound_noiseless(double z_in, double z_out, double z1, double z2);

/// Exponent correction log3/log(3/2 - z^2/2) - mu0.
double delta_exponent(double z);

struct SettlingTrace {
    std::vector<double> z;         // z_0 = 0, then z after each step
    std::vector<double> z_rotated; // polarization after the rotation of each step
    double eta = 0;
    double chi = 0;
};
/// Settling in the diagonal frame: rho <- N'(D(rho)) starting from I/2.
SettlingTrace simulate_settling(const KrausChannel &ch, int steps);

/// Output polarization of qubit 0 after the noisy 3-qubit compressor on (I + z Z)/2 ^(x)3.
double simulate_noisy_qcp(const KrausChannel &ch, double z_in);
double simulate_noisy_qcp_p(const KrausChannel &ch, double p_in);

inline constexpr int kInfiniteDim = 0;
/// Depth of a compound compressor; d == kInfiniteDim means all-to-all.
long cqc_depth(long r, int d, int n_c, double c_swap);
/// Real-valued depth n_c log3 R + c_swap R^(1/d) log3 R.
double cqc_depth_real(double r, int d, int n_c, double c_swap);

struct CqcSchedule {
    int cycles = 0;
    long ratio = 1;
    int lattice_dim = 1;
    std::vector<long> swap_depth_per_cycle;
    long total_depth = 0;
};
CqcSchedule make_cqc_schedule(int cycles, int d, int n_c, double c_swap);

struct PlanConstants {
    double c_settle = 1;
    double c_swap = 1;      // swap distance constant in the CQC depth
    double c_swap_err = 1;  // constant of the swap term in kappa'
    double c_contract = 1;  // Delta in the settling model
    double c_out = 1;       // prefactor of 1 - z_out_reset
    double g = 0.1;
    double z1 = 0.1;
    double z2 = 0.95;
    int n_c = 2;
};

struct ResetPlan {
    double kappa = 0, eta = 0, mu = 0;
    int d = 1;
    double t_settle_real = 0, n_a_real = 0, t_res_real = 0;
    double t_settle = 0, n_a = 0, t_res = 0;  // ceilings
    double z_in = 0;
    double z_out_reset = 0;
    double kappa_prime = 0;
    double swap_parameter = 0;  // kappa N_a^(1/d)
    double qubit_overhead = 0;
    double depth_overhead = 0;
    bool feasible = false;
    std::string reason;
    PlanConstants constants;
};
/// Throws std::invalid_argument on preconditions (mu <= mu0, kappa or eta outside (0,1], d < 1).
ResetPlan plan_reset(double kappa, double eta, int d, double mu, const PlanConstants &c = {});

/// Largest feasible kappa at this eta, found by bisection in log kappa.
double feasibility_boundary(double eta, int d, double mu, const PlanConstants &c = {});
/// log of the same; stays finite where the boundary itself underflows a double.
double log_feasibility_boundary(double eta, int d, double mu, const PlanConstants &c = {});

struct FtOverheadParams {
    int n_code = 7;
    int n_ancilla = 7;
    int gadget_depth = 10;  // Q
    int max_gates = 10;     // N_O
    double c = 1;
};
struct FtOverhead {
    int levels = 0;
    double qubit_overhead = 1;
    double depth_overhead = 1;
    double kappa_threshold = 0;
};
FtOverhead ft_overhead(double n_logical, double depth, double epsilon, double kappa, const FtOverheadParams &p = {});

}  // namespace qref

#endif
