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

#include "qref/fridge.h"

#include <cmath>
#include <stdexcept>

namespace qref {

namespace {

// Permutation matrix with out(perm[b], b) = 1.
Mat permutation(const int *perm, int n) {
    Mat m = Mat::Zero(n, n);
    for (int b = 0; b < n; b++) {
        m(perm[b], b) = 1.0;
    }
    return m;
}

inline int bit(int b, int q) { return (b >> (2 - q)) & 1; }

}  // namespace

Mat qcp_unitary() {
    // Row i holds its single 1 in column kCol[i].
    static const int kCol[8] = {0, 4, 2, 1, 3, 7, 6, 5};
    Mat u = Mat::Zero(8, 8);
    for (int i = 0; i < 8; i++) {
        u(i, kCol[i]) = 1.0;
    }
    return u;
}

Mat qcp_cnot_layer() {
    int perm[8];
    for (int b = 0; b < 8; b++) {
        int q1 = bit(b, 1) ^ bit(b, 2);
        perm[b] = (bit(b, 0) << 2) | (q1 << 1) | bit(b, 2);
    }
    return permutation(perm, 8);
}

Mat qcp_cswap_layer() {
    int perm[8];
    for (int b = 0; b < 8; b++) {
        int q0 = bit(b, 0), q1 = bit(b, 1), q2 = bit(b, 2);
        if (q1 == 0) {
            std::swap(q0, q2);
        }
        perm[b] = (q0 << 2) | (q1 << 1) | q2;
    }
    return permutation(perm, 8);
}

double qcp_relation_z(double z_in) {
    if (std::abs(z_in) > 1) {
        throw std::invalid_argument("qcp_relation_z: |z_in| must be <= 1");
    }
    return 1.5 * z_in - 0.5 * z_in * z_in * z_in;
}

double qcp_relation_p(double p_in) {
    if (p_in < 0 || p_in > 1) {
        throw std::invalid_argument("qcp_relation_p: p_in must lie in [0, 1]");
    }
    return 0.5 * p_in * p_in * (3 - p_in);
}

int exact_cycle_count(double z_in, double z_target) {
    if (z_target >= 1) {
        throw std::domain_error("exact_cycle_count: target polarization >= 1 is unreachable");
    }
    if (!(z_in > 0) || z_target < z_in) {
        throw std::invalid_argument("exact_cycle_count: need 0 < z_in <= z_target");
    }
    double z = z_in;
    int k = 0;
    while (z < z_target) {
        z = qcp_relation_z(z);
        if (++k > 64) {
            throw std::domain_error("exact_cycle_count: more than 64 cycles");
        }
    }
    return k;
}

int exact_cycle_count_p(double p_in, double p_target) {
    if (!(p_target > 0) || p_target > p_in || p_in >= 1) {
        throw std::invalid_argument("exact_cycle_count_p: need 0 < p_target <= p_in < 1");
    }
    double p = p_in;
    int k = 0;
    while (p > p_target) {
        p = qcp_relation_p(p);
        if (++k > 64) {
            throw std::domain_error("exact_cycle_count_p: more than 64 cycles");
        }
    }
    return k;
}

double cycle_bound_small_z(double z_in, double z_out) {
    if (z_out >= 1) {
        throw std::domain_error("cycle_bound_small_z: z_out must be < 1");
    }
    if (!(z_in > 0) || z_out < z_in) {
        throw std::invalid_argument("cycle_bound_small_z: need 0 < z_in <= z_out");
    }
    return std::log(z_out / z_in) / std::log(1.5 - 0.5 * z_out * z_out);
}

double cycle_bound_small_p(double p_in, double p_out) {
    if (p_in >= 1.0 / 3.0) {
        throw std::domain_error("cycle_bound_small_p: requires p_in < 1/3");
    }
    if (!(p_out > 0) || p_out > p_in) {
        throw std::invalid_argument("cycle_bound_small_p: need 0 < p_out <= p_in");
    }
    return std::log2(std::log(3 * p_out) / std::log(3 * p_in));
}

double delta_exponent(double z) {
    return std::log(3.0) / std::log(1.5 - 0.5 * z * z) - kMu0;
}

RatioBound ratio_bound_noiseless(double z_in, double z_out, double z1, double z2) {
    if (!(0 < z_in && z_in < z1 && z1 < z2 && z2 < z_out && z_out < 1)) {
        throw std::invalid_argument("ratio_bound_noiseless: need 0 < z_in < z1 < z2 < z_out < 1");
    }
    if (z2 <= 2.0 / 3.0) {
        throw std::invalid_argument("ratio_bound_noiseless: z2 must exceed 2/3");
    }
    RatioBound rb;
    rb.delta = delta_exponent(z1);
    rb.delta_prime = delta_exponent(z2);
    double l2 = std::log(3 * (1 - z2));
    double lout = std::log(3 * (1 - z_out));
    rb.r1 = std::pow(z1 / z_in, kMu0 + rb.delta);
    rb.r2 = std::pow(z2 / z1, kMu0 + rb.delta_prime);
    rb.r3 = std::pow(lout / l2, kAlphaCqc);
    rb.product = rb.r1 * rb.r2 * rb.r3;
    rb.constant_c = std::pow(z1, rb.delta - rb.delta_prime) * std::pow(z2, kMu0 + rb.delta_prime) *
                    std::pow(-l2, -kAlphaCqc);
    rb.closed_form = rb.constant_c * std::pow(-lout, kAlphaCqc) / std::pow(z_in, kMu0 + rb.delta);
    return rb;
}

SettlingTrace simulate_settling(const KrausChannel &ch, int steps) {
    if (steps < 0) {
        throw std::invalid_argument("simulate_settling: negative step count");
    }
    KrausChannel nd = diagonalized_form(ch);
    SettlingTrace tr;
    tr.eta = purity_eta(fixed_point(nd));
    tr.chi = chi(nd);
    DensityMatrix rho = DensityMatrix::maximally_mixed(1);
    tr.z.push_back(0.0);
    for (int k = 0; k < steps; k++) {
        Diagonalization dg = diagonalize_state(rho);
        tr.z_rotated.push_back(pauli_z_expectation(dg.rho_diag, 0));
        Mat next = nd.apply(dg.rho_diag.matrix());
        rho = DensityMatrix((next + next.adjoint()) / 2.0);
        tr.z.push_back(pauli_z_expectation(rho, 0));
    }
    return tr;
}

double simulate_noisy_qcp(const KrausChannel &ch, double z_in) {
    if (ch.num_qubits() != 1) {
        throw std::invalid_argument("simulate_noisy_qcp: single-qubit channel required");
    }
    if (std::abs(z_in) > 1) {
        throw std::invalid_argument("simulate_noisy_qcp: |z_in| must be <= 1");
    }
    Mat r = DensityMatrix::from_polarization(z_in).matrix();
    Mat x = kron(kron(r, r), r);
    Superop1 s = ch.superop();
    for (const Mat &layer : {qcp_cnot_layer(), qcp_cswap_layer()}) {
        x = layer * x * layer.adjoint();
        for (int q = 0; q < 3; q++) {
            apply_superop_1q(x, s, q, 3);
        }
    }
    // Polarization of qubit 0: rows 0..3 carry +1, rows 4..7 carry -1.
    double z = 0;
    for (int i = 0; i < 8; i++) {
        z += (i < 4 ? 1.0 : -1.0) * x(i, i).real();
    }
    return z;
}

double simulate_noisy_qcp_p(const KrausChannel &ch, double p_in) {
    if (p_in < 0 || p_in > 1) {
        throw std::invalid_argument("simulate_noisy_qcp_p: p_in must lie in [0, 1]");
    }
    return 1 - simulate_noisy_qcp(ch, 1 - p_in);
}

namespace {

// Exact integer log3; -1 if r is not a power of three.
int log3_exact(long r) {
    if (r < 1) {
        return -1;
    }
    int k = 0;
    while (r % 3 == 0) {
        r /= 3;
        k++;
    }
    return r == 1 ? k : -1;
}

long swap_distance(double r, int d, double c_swap) {
    return long(std::ceil(c_swap * std::pow(r, 1.0 / d) - 1e-9));
}

}  // namespace

long cqc_depth(long r, int d, int n_c, double c_swap) {
    int k = log3_exact(r);
    if (k < 0) {
        throw std::invalid_argument("cqc_depth: R must be a power of 3");
    }
    if (d < 0) {
        throw std::invalid_argument("cqc_depth: lattice dimension must be >= 1 or infinite");
    }
    long depth = long(n_c) * k;
    if (d != kInfiniteDim) {
        depth += swap_distance(double(r), d, c_swap) * k;
    }
    return depth;
}

double cqc_depth_real(double r, int d, int n_c, double c_swap) {
    double k = std::log(r) / std::log(3.0);
    double depth = n_c * k;
    if (d != kInfiniteDim) {
        depth += c_swap * std::pow(r, 1.0 / d) * k;
    }
    return depth;
}

CqcSchedule make_cqc_schedule(int cycles, int d, int n_c, double c_swap) {
    if (cycles < 0) {
        throw std::invalid_argument("make_cqc_schedule: negative cycle count");
    }
    CqcSchedule s;
    s.cycles = cycles;
    s.lattice_dim = d;
    for (int i = 0; i < cycles; i++) {
        s.ratio *= 3;
    }
    long per = d == kInfiniteDim ? 0 : swap_distance(double(s.ratio), d, c_swap);
    s.swap_depth_per_cycle.assign(cycles, per);
    s.total_depth = cqc_depth(s.ratio, d, n_c, c_swap);
    return s;
}

namespace {

void check_plan_args(double eta, int d, double mu, const PlanConstants &c) {
    if (!(eta > 0 && eta <= 1)) {
        throw std::invalid_argument("plan_reset: eta must lie in (0, 1]");
    }
    if (d < 1) {
        throw std::invalid_argument("plan_reset: lattice dimension must be >= 1");
    }
    if (!(mu > kMu0)) {
        throw std::invalid_argument("plan_reset: mu must exceed mu0 = log3/log(3/2)");
    }
    if (!(c.z1 > 0 && c.z1 < c.z2 && c.z2 > 2.0 / 3.0 && c.z2 < 1)) {
        throw std::invalid_argument("plan_reset: stage constants need 0 < z1 < z2, 2/3 < z2 < 1");
    }
}

// Plan quantities that can leave double range for tiny kappa, kept as logarithms.
struct LogPlan {
    double log_t_settle;
    double log_z_in;
    double z_in;
    double p_out;
    double log_n_a;
    double log_swap;
};

LogPlan log_plan(double log_kappa, double eta, int d, double mu, const PlanConstants &c) {
    LogPlan lp;
    const double log_eta = std::log(eta);
    lp.log_t_settle = std::log(c.c_settle) - mu / (mu + d) * (log_kappa + log_eta);
    // z_in = eta (1 - (1 - Delta kappa)^T)
    double ck = c.c_contract * std::exp(log_kappa);
    double x = ck < 1e-8 ? std::exp(lp.log_t_settle + std::log(c.c_contract) + log_kappa)
                         : -std::exp(lp.log_t_settle) * std::log1p(-std::min(ck, 1.0));
    if (x < 1e-300) {
        lp.log_z_in = log_eta + lp.log_t_settle + std::log(c.c_contract) + log_kappa;
    } else {
        lp.log_z_in = log_eta + std::log(-std::expm1(-x));
    }
    lp.z_in = std::exp(lp.log_z_in);
    const double log_p_out = std::log(c.c_out) + double(d) / (mu + d) * (log_kappa - mu / d * log_eta);
    lp.p_out = std::exp(log_p_out);

    // Three-stage ratio; stage 1 uses the noisy exponent mu in place of mu0 + delta.
    const double z_out = 1 - lp.p_out;
    // Stage boundaries are fixed: stage 2 always runs z1 -> z2, whatever z_in and z_out are.
    double log_n_a = (kMu0 + delta_exponent(c.z2)) * std::log(c.z2 / c.z1);
    if (lp.log_z_in < std::log(c.z1)) {
        log_n_a += mu * (std::log(c.z1) - lp.log_z_in);
    }
    if (z_out > c.z2) {
        log_n_a += kAlphaCqc * std::log((std::log(3.0) + log_p_out) / std::log(3 * (1 - c.z2)));
    }
    lp.log_n_a = log_n_a;
    lp.log_swap = log_kappa + log_n_a / d;
    return lp;
}

bool log_plan_feasible(const LogPlan &lp, const PlanConstants &c) {
    return lp.p_out < 1 && std::isfinite(lp.log_z_in) && lp.log_swap <= std::log(c.g);
}

}  // namespace

ResetPlan plan_reset(double kappa, double eta, int d, double mu, const PlanConstants &c) {
    if (!(kappa > 0 && kappa <= 1)) {
        throw std::invalid_argument("plan_reset: kappa must lie in (0, 1]");
    }
    check_plan_args(eta, d, mu, c);
    LogPlan lp = log_plan(std::log(kappa), eta, d, mu, c);
    ResetPlan p;
    p.kappa = kappa;
    p.eta = eta;
    p.d = d;
    p.mu = mu;
    p.constants = c;

    p.t_settle_real = std::exp(lp.log_t_settle);
    p.t_settle = std::ceil(p.t_settle_real);
    p.z_in = lp.z_in;
    p.z_out_reset = 1 - lp.p_out;
    p.n_a_real = std::exp(lp.log_n_a);
    p.n_a = std::ceil(p.n_a_real - 1e-9);

    p.t_res_real = p.t_settle_real + cqc_depth_real(p.n_a_real, d, c.n_c, c.c_swap);
    p.t_res = std::ceil(p.t_res_real - 1e-9);
    p.swap_parameter = std::exp(lp.log_swap);
    p.kappa_prime = kappa * p.t_res_real + c.c_swap_err * p.swap_parameter;
    p.qubit_overhead = p.n_a;
    p.depth_overhead = p.t_res_real;

    if (!(lp.p_out < 1) || !std::isfinite(lp.log_z_in)) {
        p.feasible = false;
        p.reason = "no polarization gain possible";
    } else if (!log_plan_feasible(lp, c)) {
        p.feasible = false;
        p.reason = "kappa N_a^(1/d) exceeds g";
    } else {
        p.feasible = true;
    }
    return p;
}

double log_feasibility_boundary(double eta, int d, double mu, const PlanConstants &c) {
    check_plan_args(eta, d, mu, c);
    auto feasible = [&](double lk) { return log_plan_feasible(log_plan(lk, eta, d, mu, c), c); };
    if (feasible(0.0)) {
        return 0.0;
    }
    double lo = -1e5, hi = 0.0;
    if (!feasible(lo)) {
        return -INFINITY;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); i++) {
        double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double feasibility_boundary(double eta, int d, double mu, const PlanConstants &c) {
    return std::exp(log_feasibility_boundary(eta, d, mu, c));
}

FtOverhead ft_overhead(double n_logical, double depth, double epsilon, double kappa, const FtOverheadParams &p) {
    if (!(epsilon > 0 && epsilon < 1)) {
        throw std::invalid_argument("ft_overhead: epsilon must lie in (0, 1)");
    }
    if (!(n_logical >= 1 && depth >= 1)) {
        throw std::invalid_argument("ft_overhead: N' and D' must be >= 1");
    }
    double mu_c = p.c * (4.0 * p.max_gates * p.max_gates + 1);
    FtOverhead out;
    out.kappa_threshold = 1 / mu_c;
    if (!(kappa > 0) || kappa >= out.kappa_threshold) {
        throw std::domain_error("ft_overhead: kappa must lie in (0, kappa0)");
    }
    double x = std::log(n_logical * depth / epsilon) / std::log(1 / (mu_c * kappa));
    out.levels = x <= 1 ? 0 : int(std::ceil(std::log2(x) - 1e-12));
    int n_b = p.n_code + p.n_ancilla;
    out.qubit_overhead = std::pow(double(n_b), out.levels);
    out.depth_overhead = std::pow(double(p.gadget_depth), out.levels);
    return out;
}

}  // namespace qref
