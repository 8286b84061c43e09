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

#include "qref/circuits.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qref/weingarten.h"

namespace qref {

namespace {

constexpr int kMaxMcQubits = 8;
constexpr int kMaxAllToAllQubits = 6;

void validate(const Architecture &arch) {
    if (arch.n < 1 || arch.n > 30) {
        throw std::invalid_argument("architecture: n must be in [1, 30]");
    }
    for (size_t l = 0; l < arch.layers.size(); l++) {
        uint32_t used = 0;
        for (const auto &gate : arch.layers[l]) {
            if (gate.empty()) {
                throw std::invalid_argument("architecture: empty gate in layer " + std::to_string(l));
            }
            for (int q : gate) {
                if (q < 0 || q >= arch.n) {
                    throw std::invalid_argument("architecture: qubit " + std::to_string(q) + " out of range");
                }
                if ((used >> q) & 1u) {
                    throw std::invalid_argument("architecture: overlapping gates in layer " + std::to_string(l));
                }
                used |= 1u << q;
            }
        }
    }
}

int bit_of(uint64_t x, int q, int n) { return int((x >> (n - 1 - q)) & 1u); }

// Maps a subset of omega (global qubits) to the local mask over omega's ascending qubits.
QubitSubset localize(QubitSubset s, QubitSubset omega) {
    uint32_t out = 0;
    int pos = 0;
    for (int q : omega.qubits()) {
        if (s.contains(q)) {
            out |= 1u << pos;
        }
        pos++;
    }
    return QubitSubset(out);
}

}  // namespace

Architecture brickwork1d(int n, int depth) {
    if (n < 2 || depth < 0) {
        throw std::invalid_argument("brickwork1d: need n >= 2 and depth >= 0");
    }
    Architecture a{"brickwork1d", n, {}};
    for (int l = 0; l < depth; l++) {
        Layer layer;
        for (int q = l % 2; q + 1 < n; q += 2) {
            layer.push_back({q, q + 1});
        }
        a.layers.push_back(layer);
    }
    return a;
}

Architecture alltoall(int n, int depth) {
    if (n < 1 || depth < 0) {
        throw std::invalid_argument("alltoall: need n >= 1 and depth >= 0");
    }
    Architecture a{"alltoall", n, {}};
    std::vector<int> all(n);
    for (int q = 0; q < n; q++) {
        all[q] = q;
    }
    a.layers.assign(depth, Layer{all});
    return a;
}

Architecture custom_architecture(int n, std::vector<Layer> layers) {
    Architecture a{"custom", n, std::move(layers)};
    validate(a);
    return a;
}

SubsetDistanceVector SubsetDistanceVector::from_bitstrings(int n, uint64_t a, uint64_t b,
                                                           const std::set<QubitSubset> &family) {
    SubsetDistanceVector s(n);
    for (QubitSubset g : family) {
        if (g.empty()) {
            continue;
        }
        bool differ = false;
        for (int q : g.qubits()) {
            differ = differ || bit_of(a, q, n) != bit_of(b, q, n);
        }
        s.set(g, differ ? 1.0 : 0.0);
    }
    return s;
}

double SubsetDistanceVector::get(QubitSubset g) const {
    if (g.empty()) {
        return 0.0;
    }
    auto it = table_.find(g);
    if (it == table_.end()) {
        throw std::out_of_range("subset " + g.str() + " is not tracked");
    }
    return it->second;
}

void SubsetDistanceVector::set(QubitSubset g, double v) {
    if (!g.subset_of(QubitSubset::full(n_))) {
        throw std::invalid_argument("subset " + g.str() + " exceeds the qubit set");
    }
    if (g.empty()) {
        if (v != 0.0) {
            throw std::invalid_argument("S of the empty set is 0");
        }
        return;
    }
    if (v < -1e-12 || !std::isfinite(v)) {
        throw std::domain_error("negative marginal distance " + std::to_string(v) + " for " + g.str());
    }
    table_[g] = std::max(v, 0.0);
}

UV uv_params(const std::vector<Mat> &kraus, QubitSubset omega, QubitSubset g) {
    if (omega.empty()) {
        throw std::invalid_argument("uv_params: empty gate support");
    }
    int k = omega.size();
    long n_omega = 1L << k;
    for (const auto &op : kraus) {
        if (op.rows() != n_omega || op.cols() != n_omega) {
            throw std::invalid_argument("uv_params: Kraus operators do not act on the gate support");
        }
    }
    QubitSubset cap = localize(g & omega, omega);
    QubitSubset rest = localize(omega.minus(g), omega);
    double n_cap = double(1L << cap.size());
    double n_rest = double(1L << rest.size());

    Mat sum = Mat::Zero(n_omega, n_omega);
    for (const auto &op : kraus) {
        sum += op * op.adjoint();
    }
    UV r;
    r.u = hs_norm_sq(partial_trace(sum, k, cap)) / (double(n_omega) * n_rest);
    double acc = 0;
    for (const auto &ki : kraus) {
        for (const auto &kj : kraus) {
            acc += hs_norm_sq(partial_trace(Mat(ki * kj.adjoint()), k, rest));
        }
    }
    r.v = acc / (double(n_omega) * n_cap);
    return r;
}

StepCoefficients step_coefficients(double n_omega, double n_omega_minus_g, double n_g_cap_omega, double u, double v) {
    if (n_omega < 2 || std::abs(n_omega - n_omega_minus_g * n_g_cap_omega) > 1e-9 * n_omega) {
        throw std::invalid_argument("step_coefficients: need N_omega = N_(omega\\G) * N_(G cap omega) >= 2");
    }
    double den = n_omega * n_omega - 1;
    StepCoefficients c;
    c.u = u;
    c.v = v;
    c.c1 = n_g_cap_omega * (n_omega_minus_g * n_omega_minus_g * u - v) / den;
    c.c2 = n_omega_minus_g * (n_g_cap_omega * n_g_cap_omega * v - u) / den;
    return c;
}

StepCoefficients step_coefficients_for(const KrausChannel &noise, QubitSubset omega, QubitSubset g) {
    UV uv = uv_params(noise.ops(), omega, g);
    double n_omega = double(1L << omega.size());
    double n_rest = double(1L << omega.minus(g).size());
    double n_cap = double(1L << (g & omega).size());
    return step_coefficients(n_omega, n_rest, n_cap, uv.u, uv.v);
}

SubsetDistanceVector evolve_subset(const SubsetDistanceVector &s, QubitSubset omega, const KrausChannel &noise) {
    if (noise.num_qubits() != omega.size()) {
        throw std::invalid_argument("evolve_subset: noise acts on " + std::to_string(noise.num_qubits()) +
                                    " qubits, gate on " + std::to_string(omega.size()));
    }
    // c1, c2 depend on G only through G cap omega.
    std::map<QubitSubset, StepCoefficients> cache;
    std::set<QubitSubset> missing;
    SubsetDistanceVector out(s.n());
    for (const auto &[g, val] : s.table()) {
        if ((g & omega).empty()) {
            out.set(g, val);
            continue;
        }
        QubitSubset lo = g.minus(omega);
        QubitSubset hi = g | omega;
        if (!s.tracks(lo)) {
            missing.insert(lo);
        }
        if (!s.tracks(hi)) {
            missing.insert(hi);
        }
        if (!missing.empty()) {
            continue;
        }
        QubitSubset cap = g & omega;
        auto it = cache.find(cap);
        if (it == cache.end()) {
            it = cache.emplace(cap, step_coefficients_for(noise, omega, g)).first;
        }
        out.set(g, it->second.c1 * s.get(lo) + it->second.c2 * s.get(hi));
    }
    if (!missing.empty()) {
        std::ostringstream os;
        os << "evolve_subset: tracked family not closed under gate " << omega.str() << "; missing";
        for (QubitSubset m : missing) {
            os << ' ' << m.str();
        }
        throw std::logic_error(os.str());
    }
    return out;
}

std::set<QubitSubset> closed_family(const std::set<QubitSubset> &targets, const Architecture &arch, size_t cap) {
    std::set<QubitSubset> supports;
    for (const auto &layer : arch.layers) {
        for (const auto &gate : layer) {
            supports.insert(QubitSubset::of(gate));
        }
    }
    std::set<QubitSubset> family;
    std::vector<QubitSubset> work;
    for (QubitSubset t : targets) {
        if (!t.empty() && family.insert(t).second) {
            work.push_back(t);
        }
    }
    while (!work.empty()) {
        QubitSubset g = work.back();
        work.pop_back();
        for (QubitSubset omega : supports) {
            if ((g & omega).empty()) {
                continue;
            }
            for (QubitSubset next : {g.minus(omega), g | omega}) {
                if (!next.empty() && family.insert(next).second) {
                    work.push_back(next);
                }
            }
        }
        if (family.size() > cap) {
            throw std::length_error("closed_family: more than " + std::to_string(cap) + " tracked subsets");
        }
    }
    return family;
}

std::vector<SubsetDistanceVector> predict_subset_distances(const Architecture &arch, const KrausChannel &noise1q,
                                                           uint64_t a, uint64_t b,
                                                           const std::set<QubitSubset> &targets) {
    validate(arch);
    if (noise1q.num_qubits() != 1) {
        throw std::invalid_argument("predict_subset_distances: single-qubit noise required");
    }
    std::set<QubitSubset> family = closed_family(targets, arch);
    std::map<int, KrausChannel> powers;
    std::vector<SubsetDistanceVector> out;
    out.push_back(SubsetDistanceVector::from_bitstrings(arch.n, a, b, family));
    for (const auto &layer : arch.layers) {
        SubsetDistanceVector s = out.back();
        for (const auto &gate : layer) {
            int k = int(gate.size());
            auto it = powers.find(k);
            if (it == powers.end()) {
                it = powers.emplace(k, tensor_power(noise1q, k)).first;
            }
            s = evolve_subset(s, QubitSubset::of(gate), it->second);
        }
        out.push_back(s);
    }
    return out;
}

std::set<QubitSubset> all_pairs(int n) {
    std::set<QubitSubset> out;
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            out.insert(QubitSubset::of({i, j}));
        }
    }
    return out;
}

TwoQubitNoiseParams two_qubit_params(const KrausChannel &ch2) {
    if (ch2.num_qubits() != 2) {
        throw std::invalid_argument("two_qubit_params: two-qubit channel required");
    }
    Mat swap = Mat::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            Mat e = Mat::Zero(4, 4);
            e(i, j) = 1;
            Mat direct = ch2.apply(e);
            Mat swapped = swap * ch2.apply(swap * e * swap) * swap;
            if (max_abs(direct - swapped) > 1e-10) {
                throw std::invalid_argument("two_qubit_params: channel is not symmetric under qubit swap");
            }
        }
    }
    const double q = 2, q2 = 4, q4 = 16;
    QubitSubset omega = QubitSubset::of({0, 1});
    UV case1 = uv_params(ch2.ops(), omega, omega);
    UV case2 = uv_params(ch2.ops(), omega, QubitSubset::of({0}));

    TwoQubitNoiseParams p;
    p.a = case1.v;
    p.b = case1.u;
    p.A = case2.v;
    p.B = case2.u;
    p.case1_alpha = (q2 * p.a + p.b) / (q2 + 1);
    p.case1_r = (q4 * p.a - p.b) / (q4 - 1);
    p.case2_beta = q * (p.A + p.B) / (q2 + 1);
    p.case2_mu = q * (p.B - p.A) / (q2 - 1);
    double worst = std::min(p.case1_r, 0.25 * (p.case2_beta * p.case2_beta - p.case2_mu * p.case2_mu));
    p.gamma_lower = worst > 0 ? -std::log(worst) : INFINITY;
    p.gamma_upper = -std::log(std::max(p.case1_alpha, p.case2_beta));
    return p;
}

double lower_bound_curve(const TwoQubitNoiseParams &p, int depth) {
    if (depth < 0) {
        throw std::invalid_argument("lower_bound_curve: depth must be >= 0");
    }
    return depth == 0 ? 1.0 : std::exp(-p.gamma_lower * depth);
}

double upper_bound_curve(const TwoQubitNoiseParams &p, int n, int depth) {
    if (depth < 0) {
        throw std::invalid_argument("upper_bound_curve: depth must be >= 0");
    }
    return std::pow(2.0, 0.5 * n) * std::exp(-p.gamma_upper * depth);
}

namespace {

// Sum of terms coeff * E^m / norm, each carried as (log magnitude, phase).
struct LogTerm {
    double log_mag;
    double phase;
};

cplx log_space_sum(const std::vector<LogTerm> &terms) {
    double top = -INFINITY;
    for (const auto &t : terms) {
        top = std::max(top, t.log_mag);
    }
    if (!std::isfinite(top)) {
        return 0.0;
    }
    cplx acc = 0;
    for (const auto &t : terms) {
        acc += std::polar(std::exp(t.log_mag - top), t.phase);
    }
    return acc * std::exp(top);
}

// log|c| and phase of a real coefficient times E^m.
void push_term(std::vector<LogTerm> &terms, double log_abs_c, bool c_negative, cplx e, int m, double log_norm) {
    if (std::abs(e) == 0.0) {
        return;
    }
    double phase = m * std::arg(e) + (c_negative ? M_PI : 0.0);
    terms.push_back({log_abs_c + m * std::log(std::abs(e)) - log_norm, phase});
}

double checked_real(cplx z, const char *what) {
    if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z.real()))) {
        throw std::runtime_error(std::string("alltoall_coeffs: ") + what + " is not real");
    }
    return z.real();
}

}  // namespace

AllToAllCoeffs alltoall_coeffs(const KrausChannel &noise1q, int n) {
    if (noise1q.num_qubits() != 1) {
        throw std::invalid_argument("alltoall_coeffs: single-qubit noise required");
    }
    if (n < 1 || n > 64) {
        throw std::invalid_argument("alltoall_coeffs: n must be in [1, 64]");
    }
    std::array<cplx, 6> e = e_invariants_complex(noise1q.ops());
    const double ln2 = std::log(2.0);
    const double log_d = n * ln2;
    // log(d^2 - k) = 2 log d + log1p(-k/d^2)
    auto log_d2_minus = [&](double k) { return 2 * log_d + std::log1p(-k * std::exp(-2 * log_d)); };

    AllToAllCoeffs c;
    {
        // delta = (d E6^n - E2^n) / (d (d^2 - 1))
        double log_norm = log_d + log_d2_minus(1);
        std::vector<LogTerm> t;
        push_term(t, log_d, false, e[5], n, log_norm);
        push_term(t, 0.0, true, e[1], n, log_norm);
        c.delta_n = checked_real(log_space_sum(t), "delta");
    }
    if (n == 1) {
        c.alpha_n = c.delta_n;
        c.beta_n = c.omega_n = 0;
    } else {
        double log_norm = log_d + log_d2_minus(1) + log_d2_minus(4);
        double log_2d = ln2 + log_d;
        double log_d2m2 = log_d2_minus(2);
        std::vector<LogTerm> ta, tb, tw;
        push_term(ta, 2 * log_d, false, e[0], n, log_norm);
        push_term(ta, 2 * ln2, false, e[1], n, log_norm);
        push_term(ta, 2 * log_d, false, e[2], n, log_norm);
        for (int k : {3, 4, 5}) {
            push_term(ta, log_2d, true, e[k], n, log_norm);
        }
        push_term(tb, ln2, false, e[0], n, log_norm);
        push_term(tb, log_d2m2, false, e[1], n, log_norm);
        push_term(tb, ln2, false, e[2], n, log_norm);
        for (int k : {3, 4, 5}) {
            push_term(tb, log_d, true, e[k], n, log_norm);
        }
        push_term(tw, ln2, false, e[3], n, log_norm);
        push_term(tw, ln2, false, e[4], n, log_norm);
        push_term(tw, log_d2m2, false, e[5], n, log_norm);
        for (int k : {0, 1, 2}) {
            push_term(tw, log_d, true, e[k], n, log_norm);
        }
        c.alpha_n = checked_real(log_space_sum(ta), "alpha");
        c.beta_n = checked_real(log_space_sum(tb), "beta");
        c.omega_n = checked_real(log_space_sum(tw), "omega");
    }
    c.transfer << c.alpha_n, 0.0, c.omega_n, c.delta_n;
    return c;
}

AllToAllBound alltoall_bound(const AllToAllCoeffs &c, int n, int depth) {
    if (depth < 0) {
        throw std::invalid_argument("alltoall_bound: depth must be >= 0");
    }
    AllToAllBound r;
    double al = c.alpha_n, de = c.delta_n;
    r.a = std::pow(al, depth);
    if (depth == 0) {
        r.b = 0;
    } else if (std::abs(al - de) <= 1e-12 * std::max(std::abs(al), std::abs(de))) {
        r.b = c.omega_n * depth * std::pow(al, depth - 1);
    } else {
        r.b = c.omega_n * (r.a - std::pow(de, depth)) / (al - de);
    }
    double nh = std::pow(2.0, n);
    r.predicted_tr_x2 = 2 * r.a + 2 * nh * r.b;
    double b2 = std::max(0.0, 2 * r.b);
    r.bound = std::sqrt(std::max(0.0, r.a + 2 * r.b)) + (nh / 2 - 1) * std::sqrt(b2);
    return r;
}

std::vector<McDepthStats> mc_run(const Architecture &arch, const KrausChannel &noise1q, const McOptions &opt) {
    validate(arch);
    const int n = arch.n;
    if (n > kMaxMcQubits) {
        throw std::invalid_argument("mc_run: at most " + std::to_string(kMaxMcQubits) + " qubits");
    }
    if (noise1q.num_qubits() != 1) {
        throw std::invalid_argument("mc_run: single-qubit noise required");
    }
    if (opt.trials < 1) {
        throw std::invalid_argument("mc_run: trials must be >= 1");
    }
    const long dim = 1L << n;
    Mat x0;
    if (opt.initial_difference) {
        x0 = *opt.initial_difference;
        if (x0.rows() != dim || x0.cols() != dim) {
            throw std::invalid_argument("mc_run: initial difference has the wrong dimension");
        }
    } else {
        uint64_t a = opt.basis_a;
        uint64_t b = opt.basis_b.value_or(uint64_t(1) << (n - 1));
        if (a >= uint64_t(dim) || b >= uint64_t(dim)) {
            throw std::invalid_argument("mc_run: basis index out of range");
        }
        x0 = Mat::Zero(dim, dim);
        x0(a, a) += 1.0;
        x0(b, b) -= 1.0;
    }
    for (QubitSubset g : opt.subsets) {
        if (!g.subset_of(QubitSubset::full(n))) {
            throw std::invalid_argument("mc_run: subset " + g.str() + " exceeds the qubit set");
        }
    }

    const Superop1 s1 = noise1q.superop();
    const std::vector<QubitSubset> subsets(opt.subsets.begin(), opt.subsets.end());
    const size_t width = 2 + subsets.size();
    const size_t depth = arch.layers.size();

    auto record = [&](const Mat &x, std::vector<Welford> &acc, size_t d) {
        size_t base = d * width;
        if (opt.trace_distance) {
            acc[base].add(0.5 * trace_norm_hermitian(x));
        }
        acc[base + 1].add(hs_norm_sq(x));
        for (size_t i = 0; i < subsets.size(); i++) {
            double v = subsets[i].empty() ? 0.0 : 0.5 * hs_norm_sq(partial_trace(x, n, subsets[i]));
            acc[base + 2 + i].add(v);
        }
    };

    auto acc = chunked_welford(opt.trials, (depth + 1) * width, [&](long trial, std::vector<Welford> &w) {
        RngStream rng(opt.seed, uint64_t(trial));
        Mat x = x0;
        record(x, w, 0);
        for (size_t l = 0; l < depth; l++) {
            for (const auto &gate : arch.layers[l]) {
                Mat u = haar_unitary(1L << gate.size(), rng);
                conjugate_in_place(x, u, gate, n);
                for (int q : gate) {
                    apply_superop_1q(x, s1, q, n);
                }
            }
            record(x, w, l + 1);
        }
    });

    std::vector<McDepthStats> out(depth + 1);
    for (size_t d = 0; d <= depth; d++) {
        size_t base = d * width;
        out[d].trace_distance = Stat::of(acc[base]);
        out[d].tr_x2 = Stat::of(acc[base + 1]);
        for (size_t i = 0; i < subsets.size(); i++) {
            out[d].subsets[subsets[i]] = Stat::of(acc[base + 2 + i]);
        }
    }
    return out;
}

Stat mc_subset_distance(const Architecture &arch, const KrausChannel &noise1q, QubitSubset g, long trials,
                        uint64_t seed) {
    McOptions opt;
    opt.trials = trials;
    opt.seed = seed;
    opt.trace_distance = false;
    opt.subsets = {g};
    return mc_run(arch, noise1q, opt).back().subsets.at(g);
}

Stat mc_alltoall_distance(int n, int depth, const KrausChannel &noise1q, long trials, uint64_t seed) {
    if (n > kMaxAllToAllQubits) {
        throw std::invalid_argument("mc_alltoall_distance: at most " + std::to_string(kMaxAllToAllQubits) +
                                    " qubits");
    }
    McOptions opt;
    opt.trials = trials;
    opt.seed = seed;
    return mc_run(alltoall(n, depth), noise1q, opt).back().trace_distance;
}

PairMax max_pair(const McDepthStats &s) {
    PairMax best;
    bool found = false;
    for (const auto &[g, st] : s.subsets) {
        if (g.size() != 2) {
            continue;
        }
        if (!found || st.mean > best.stat.mean) {
            best = {g, st};
            found = true;
        }
    }
    if (!found) {
        throw std::invalid_argument("max_pair: no pair subsets were tracked");
    }
    return best;
}

}  // namespace qref
