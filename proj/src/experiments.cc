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

#include "qref/experiments.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "qref/circuits.h"
#include "qref/weingarten.h"

namespace qref {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; i++) {
        v[i] = n == 1 ? a : a + (b - a) * double(i) / double(n - 1);
    }
    if (n > 1) {
        v.front() = a;
        v.back() = b;
    }
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v = linspace(std::log(a), std::log(b), n);
    for (double &x : v) {
        x = std::exp(x);
    }
    if (n > 1) {
        v.front() = a;
        v.back() = b;
    }
    return v;
}

Fig2Data compute_fig2(double z_in, double p_in, int points, double z_max, double p_min) {
    if (!(0 < z_in && z_in < z_max && z_max < 1)) {
        throw std::invalid_argument("fig2: need 0 < z_in < z_max < 1");
    }
    if (!(0 < p_min && p_min < p_in && p_in < 1.0 / 3.0)) {
        throw std::invalid_argument("fig2: need 0 < p_min < p_in < 1/3");
    }
    if (points < 2) {
        throw std::invalid_argument("fig2: need at least 2 grid points");
    }
    Fig2Data f;
    f.z_in = z_in;
    f.p_in = p_in;
    for (double z : linspace(z_in, z_max, points)) {
        double b = cycle_bound_small_z(z_in, z);
        f.z_rows.push_back({z, exact_cycle_count(z_in, z), b, long(std::ceil(b))});
    }
    for (double p : logspace(p_in, p_min, points)) {
        double b = cycle_bound_small_p(p_in, p);
        f.p_rows.push_back({p, exact_cycle_count_p(p_in, p), b, long(std::ceil(b))});
    }
    return f;
}

std::vector<QcpSample> damping_sweep(double eta, double kappa_lo, double kappa_hi, int gamma_points,
                                     bool with_x_conjugate, int restarts, uint64_t seed) {
    std::vector<QcpSample> out;
    Mat x = pauli_x();
    // The diamond distance of generalized damping is within a small factor of gamma.
    for (double g : logspace(kappa_lo / 4, std::min(1.0, kappa_hi * 2), gamma_points)) {
        KrausChannel ch = generalized_damping(g, eta);
        RngStream rng(seed, uint64_t(out.size()));
        double kappa = diamond_distance_estimate(ch, restarts, rng).value;
        if (kappa < kappa_lo || kappa > kappa_hi) {
            continue;
        }
        double fp_eta = purity_eta(fixed_point(ch));
        out.push_back({g, kappa, fp_eta, ch});
        if (with_x_conjugate) {
            out.push_back({g, kappa, fp_eta, conjugated(ch, x)});
        }
    }
    return out;
}

QcpNoiseConstants fit_qcp_constants(const std::vector<QcpSample> &samples) {
    QcpNoiseConstants c;
    c.samples = samples.size();
    const std::vector<double> z_grid = linspace(0.0, 0.95, 20);
    const std::vector<double> p_grid = logspace(1e-4, 0.3, 20);
    for (const auto &s : samples) {
        if (s.eta > 0) {
            double dev = qcp_relation_z(0.0) - simulate_noisy_qcp(s.channel, 0.0);
            c.b = std::max(c.b, dev / (s.kappa * s.eta));
        }
    }
    for (const auto &s : samples) {
        for (double z : z_grid) {
            if (z == 0) {
                continue;
            }
            double dev = qcp_relation_z(z) - c.b * s.kappa * s.eta - simulate_noisy_qcp(s.channel, z);
            c.a = std::max(c.a, dev / (s.kappa * z));
        }
        for (double p : p_grid) {
            double excess = simulate_noisy_qcp_p(s.channel, p) - 3 * p * p;
            c.a_prime = std::max(c.a_prime, excess / s.kappa);
        }
    }
    return c;
}

LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_line: need at least two matching points");
    }
    double n = double(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); i++) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

BoundaryFit fit_boundary(int d, double mu, const std::vector<double> &etas, const PlanConstants &c) {
    BoundaryFit f;
    f.d = d;
    f.mu = mu;
    f.expected = mu / d;
    std::vector<double> lx, ly;
    for (double eta : etas) {
        double lk = log_feasibility_boundary(eta, d, mu, c);
        f.eta.push_back(eta);
        f.log10_kappa_star.push_back(lk / std::log(10.0));
        if (std::isfinite(lk) && lk < 0) {
            lx.push_back(std::log(eta));
            ly.push_back(lk);
        }
    }
    if (lx.size() < 2) {
        throw std::runtime_error("fit_boundary: fewer than two interior boundary points");
    }
    LineFit lf = fit_line(lx, ly);
    f.exponent = lf.slope;
    f.r2 = lf.r2;
    f.rel_error = std::abs(f.exponent - f.expected) / f.expected;
    return f;
}

namespace {

template <class T>
T cfg_get(const Json &cfg, const char *key, T fallback) {
    if (!cfg.contains(key)) {
        return fallback;
    }
    try {
        return cfg.at(key).get<T>();
    } catch (const Json::exception &) {
        throw ConfigError(std::string("config field \"") + key + "\" has the wrong type");
    }
}

// Unknown keys are almost always typos; reject them instead of silently using defaults.
void require_keys(const Json &cfg, std::initializer_list<const char *> allowed, const char *where) {
    if (!cfg.is_object()) {
        throw ConfigError(std::string(where) + " must be a JSON object");
    }
    for (const auto &item : cfg.items()) {
        bool known = item.key() == "experiment" || item.key() == "seed";
        for (const char *a : allowed) {
            known = known || item.key() == a;
        }
        if (!known) {
            throw ConfigError(std::string("unknown key \"") + item.key() + "\" in " + where);
        }
    }
}

std::string out_path(const RunOptions &opt, const std::string &name) {
    return (std::filesystem::path(opt.out_dir) / name).string();
}

void emit(RunResult &r, const RunOptions &opt, const std::string &name, const std::string &contents) {
    std::string p = out_path(opt, name);
    write_file(p, contents);
    r.files.push_back(p);
}

void check(RunResult &r, std::string name, bool pass, std::string detail) {
    r.checks.push_back({std::move(name), pass, std::move(detail)});
    if (!pass) {
        r.exit_code = 1;
    }
}

std::string num_or_blank(double v) { return std::isfinite(v) ? fmt_num(v) : ""; }

Mat random_traceless_hermitian(long d, RngStream &rng) {
    Mat g(d, d);
    for (long i = 0; i < d; i++) {
        for (long j = 0; j < d; j++) {
            g(i, j) = rng.complex_normal();
        }
    }
    Mat h = (g + g.adjoint()) / 2.0;
    h -= (h.trace() / double(d)) * Mat::Identity(d, d);
    return h;
}

KrausChannel single_qubit_channel(const Json &spec) {
    KrausChannel ch = channel_from_json(spec);
    if (ch.num_qubits() != 1) {
        throw ConfigError("a single-qubit channel is required here");
    }
    return ch;
}

std::string sig(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", x);
    return b;
}

}  // namespace

RunResult run_fig2(const Json &config, const RunOptions &opt) {
    require_keys(config, {"z_in", "p_in", "points", "z_max", "p_min"}, "fig2 config");
    double z_in = cfg_get(config, "z_in", 0.1);
    double p_in = cfg_get(config, "p_in", 0.3);
    int points = cfg_get(config, "points", 90);
    double z_max = cfg_get(config, "z_max", 0.99);
    double p_min = cfg_get(config, "p_min", 1e-12);
    uint64_t seed = opt.seed.value_or(cfg_get<uint64_t>(config, "seed", 0));
    Fig2Data f;
    try {
        f = compute_fig2(z_in, p_in, points, z_max, p_min);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    Json eff = {{"experiment", "fig2"}, {"z_in", z_in}, {"p_in", p_in}, {"points", points},
                {"z_max", z_max},       {"p_min", p_min}};
    std::string hash = config_hash(eff);

    RunResult r;
    auto table = [&](const std::vector<Fig2Row> &rows, const std::string &col) {
        CsvTable t({col, "exact_cycles", "bound", "bound_ceil"});
        for (const auto &row : rows) {
            t.add_row({fmt_num(row.target), std::to_string(row.exact), fmt_num(row.bound),
                       std::to_string(row.bound_ceil)});
        }
        return t.render(hash, seed);
    };
    emit(r, opt, "fig2a.csv", table(f.z_rows, "z_out"));
    emit(r, opt, "fig2b.csv", table(f.p_rows, "p_out"));

    auto plot = [&](const std::vector<Fig2Row> &rows, bool log_x, const std::string &title, const std::string &xl) {
        PlotSpec p;
        p.title = title;
        p.xlabel = xl;
        p.ylabel = "cycles";
        p.log_x = log_x;
        PlotSeries exact{"exact", {}, {}, "#1f77b4", false, true, false};
        PlotSeries bound{"bound", {}, {}, "#d62728", true, false, true};
        for (const auto &row : rows) {
            exact.x.push_back(row.target);
            exact.y.push_back(row.exact);
            bound.x.push_back(row.target);
            bound.y.push_back(row.bound);
        }
        p.series = {exact, bound};
        return render_svg(p);
    };
    emit(r, opt, "fig2a.svg", plot(f.z_rows, false, "cycles to reach z_out from z_in = " + sig(z_in), "z_out"));
    emit(r, opt, "fig2b.svg", plot(f.p_rows, true, "cycles to reach p_out from p_in = " + sig(p_in), "p_out"));

    auto verify = [&](const std::vector<Fig2Row> &rows, const std::string &name) {
        long worst_gap = 0;
        bool ok = true;
        for (const auto &row : rows) {
            ok = ok && row.bound_ceil >= row.exact;
            worst_gap = std::min(worst_gap, row.bound_ceil - row.exact);
        }
        check(r, name, ok, ok ? "ceil(bound) >= exact on all " + std::to_string(rows.size()) + " points"
                              : "exact exceeds ceil(bound) by " + std::to_string(-worst_gap));
    };
    verify(f.z_rows, "fig2a bound dominates exact count");
    verify(f.p_rows, "fig2b bound dominates exact count");
    return r;
}

RunResult run_contraction(const Json &config, const RunOptions &opt) {
    require_keys(config, {"channel", "architecture", "trials", "trace_distance"}, "contraction config");
    Json ch_spec = cfg_get<Json>(config, "channel", Json{{"kind", "damping"}, {"gamma", 0.2}, {"eta", 1.0}});
    Json arch_spec = cfg_get<Json>(config, "architecture", Json{{"kind", "brickwork1d"}, {"n", 4}, {"depth", 8}});
    long trials = opt.trials.value_or(cfg_get<long>(config, "trials", 1000));
    uint64_t seed = opt.seed.value_or(cfg_get<uint64_t>(config, "seed", 1));
    bool want_trace = cfg_get(config, "trace_distance", true);
    KrausChannel ch = single_qubit_channel(ch_spec);
    Architecture arch = architecture_from_json(arch_spec);
    if (arch.n > 6) {
        throw ConfigError("contraction: Monte Carlo is limited to n <= 6");
    }
    if (trials < 2) {
        throw ConfigError("contraction: trials must be >= 2");
    }
    Json eff = {{"experiment", "contraction"}, {"channel", ch_spec}, {"architecture", arch_spec},
                {"trials", trials},            {"trace_distance", want_trace}};
    std::string hash = config_hash(eff);

    RunResult r;
    long gates = 0;
    for (const auto &l : arch.layers) {
        gates += long(l.size());
    }
    if (double(trials) * double(gates) > 1e6) {
        r.warnings.push_back("estimated " + std::to_string(trials * gates) +
                             " gate applications exceed the 1e6 budget; this may take a while");
    }

    const int n = arch.n;
    const int depth = int(arch.layers.size());
    const bool all2all = arch.kind == "alltoall";
    McOptions mo;
    mo.trials = trials;
    mo.seed = seed;
    mo.trace_distance = want_trace;
    if (!all2all) {
        mo.subsets = all_pairs(n);
    }
    std::vector<McDepthStats> mc = mc_run(arch, ch, mo);

    std::vector<double> predicted(depth + 1, NAN), lower(depth + 1, NAN), upper(depth + 1, NAN),
        a2a_pred(depth + 1, NAN), mc_mean(depth + 1), mc_se(depth + 1);
    if (all2all) {
        AllToAllCoeffs co = alltoall_coeffs(ch, n);
        for (int d = 0; d <= depth; d++) {
            AllToAllBound b = alltoall_bound(co, n, d);
            predicted[d] = a2a_pred[d] = b.predicted_tr_x2;
            upper[d] = b.bound;
            mc_mean[d] = mc[d].tr_x2.mean;
            mc_se[d] = mc[d].tr_x2.stderr;
        }
    } else {
        auto pred = predict_subset_distances(arch, ch, 0, uint64_t(1) << (n - 1), all_pairs(n));
        bool two_qubit = true;
        for (const auto &l : arch.layers) {
            for (const auto &g : l) {
                two_qubit = two_qubit && g.size() == 2;
            }
        }
        std::optional<TwoQubitNoiseParams> tq;
        if (two_qubit) {
            tq = two_qubit_params(tensor_power(ch, 2));
        }
        for (int d = 0; d <= depth; d++) {
            double best = 0;
            for (QubitSubset p : all_pairs(n)) {
                best = std::max(best, pred[d].get(p));
            }
            predicted[d] = best;
            PairMax pm = max_pair(mc[d]);
            mc_mean[d] = pm.stat.mean;
            mc_se[d] = pm.stat.stderr;
            if (tq) {
                lower[d] = lower_bound_curve(*tq, d);
                upper[d] = upper_bound_curve(*tq, n, d);
            }
        }
    }

    CsvTable t({"depth", "predicted", "mc_mean", "mc_stderr", "bound_lower", "bound_upper", "mc_trace_mean",
                "mc_trace_stderr", "alltoall_prediction"});
    for (int d = 0; d <= depth; d++) {
        t.add_row({std::to_string(d), num_or_blank(predicted[d]), fmt_num(mc_mean[d]), fmt_num(mc_se[d]),
                   num_or_blank(lower[d]), num_or_blank(upper[d]),
                   want_trace ? fmt_num(mc[d].trace_distance.mean) : "",
                   want_trace ? fmt_num(mc[d].trace_distance.stderr) : "", num_or_blank(a2a_pred[d])});
    }
    emit(r, opt, "contraction.csv", t.render(hash, seed));

    PlotSpec p;
    p.title = all2all ? "all-to-all: E Tr X^2 and trace distance" : "brickwork: max-pair S and bounds";
    p.xlabel = "depth";
    p.ylabel = all2all ? "value" : "distance";
    p.log_y = true;
    std::vector<double> ds(depth + 1);
    for (int d = 0; d <= depth; d++) {
        ds[d] = d;
    }
    p.series.push_back({all2all ? "MC E Tr X^2" : "MC max-pair S", ds, mc_mean, "#1f77b4", true, true, false});
    p.series.push_back({"transfer prediction", ds, predicted, "#2ca02c", true, false, true});
    if (!all2all) {
        p.series.push_back({"lower bound", ds, lower, "#d62728", true, false, true});
    }
    p.series.push_back({"upper bound", ds, upper, "#9467bd", true, false, true});
    if (want_trace) {
        std::vector<double> tr(depth + 1);
        for (int d = 0; d <= depth; d++) {
            tr[d] = mc[d].trace_distance.mean;
        }
        p.series.push_back({"MC trace distance", ds, tr, "#ff7f0e", true, true, false});
    }
    emit(r, opt, "contraction.svg", render_svg(p));

    if (all2all) {
        double worst = 0;
        bool bound_ok = true;
        for (int d = 1; d <= depth; d++) {
            worst = std::max(worst, std::abs(mc_mean[d] - predicted[d]) / std::max(mc_se[d], 1e-12));
            if (want_trace) {
                bound_ok = bound_ok && mc[d].trace_distance.mean <= upper[d];
            }
        }
        check(r, "all-to-all E Tr X^2 equals transfer prediction", worst <= 3,
              "max deviation " + sig(worst) + " sigma");
        if (want_trace) {
            check(r, "all-to-all trace distance below bound", bound_ok, "");
        }
    } else if (!std::isnan(lower[0])) {
        bool lo_ok = true, up_ok = true;
        for (int d = 0; d <= depth; d++) {
            lo_ok = lo_ok && mc_mean[d] >= lower[d] - 3 * mc_se[d];
            if (want_trace) {
                up_ok = up_ok && mc[d].trace_distance.mean <= upper[d] + 3 * mc[d].trace_distance.stderr;
            }
        }
        check(r, "max-pair S above lower bound", lo_ok, "");
        if (want_trace) {
            check(r, "trace distance below upper bound", up_ok, "");
        }
    }
    return r;
}

RunResult run_plan(const Json &config, const RunOptions &opt) {
    require_keys(config, {"kappa", "eta", "d", "mu", "boundary_eta", "constants"}, "plan config");
    auto kappas = cfg_get(config, "kappa", logspace(1e-160, 1e-2, 80));
    auto etas = cfg_get(config, "eta", logspace(1e-3, 1.0, 7));
    auto ds = cfg_get(config, "d", std::vector<int>{1, 2, 3});
    auto mus = cfg_get(config, "mu", std::vector<double>{3.0, 4.0});
    auto boundary_etas = cfg_get(config, "boundary_eta", logspace(1e-3, 1.0, 13));
    uint64_t seed = opt.seed.value_or(cfg_get<uint64_t>(config, "seed", 0));
    PlanConstants pc;
    if (config.contains("constants")) {
        const Json &c = config["constants"];
        require_keys(c, {"c_settle", "c_swap", "c_swap_err", "c_contract", "c_out", "g", "z1", "z2", "n_c"},
                     "plan constants");
        pc.c_settle = cfg_get(c, "c_settle", pc.c_settle);
        pc.c_swap = cfg_get(c, "c_swap", pc.c_swap);
        pc.c_swap_err = cfg_get(c, "c_swap_err", pc.c_swap_err);
        pc.c_contract = cfg_get(c, "c_contract", pc.c_contract);
        pc.c_out = cfg_get(c, "c_out", pc.c_out);
        pc.g = cfg_get(c, "g", pc.g);
        pc.z1 = cfg_get(c, "z1", pc.z1);
        pc.z2 = cfg_get(c, "z2", pc.z2);
        pc.n_c = cfg_get(c, "n_c", pc.n_c);
    }
    if (kappas.empty() || etas.empty() || ds.empty() || mus.empty()) {
        throw ConfigError("plan: kappa, eta, d and mu grids must be non-empty");
    }
    for (int d : ds) {
        if (d < 1) {
            throw ConfigError("plan: lattice dimensions must be >= 1");
        }
    }
    if (boundary_etas.size() < 2) {
        throw ConfigError("plan: boundary_eta needs at least two points");
    }
    for (double e : boundary_etas) {
        if (!(e > 0 && e <= 1)) {
            throw ConfigError("plan: boundary_eta values must lie in (0, 1]");
        }
    }
    if (!(pc.z1 > 0 && pc.z1 < pc.z2 && pc.z2 > 2.0 / 3.0 && pc.z2 < 1)) {
        throw ConfigError("plan: stage constants need 0 < z1 < z2, 2/3 < z2 < 1");
    }
    Json eff = {{"experiment", "plan"}, {"kappa", kappas}, {"eta", etas}, {"d", ds}, {"mu", mus},
                {"boundary_eta", boundary_etas},
                {"constants",
                 {{"c_settle", pc.c_settle}, {"c_swap", pc.c_swap}, {"c_swap_err", pc.c_swap_err},
                  {"c_contract", pc.c_contract}, {"c_out", pc.c_out}, {"g", pc.g}, {"z1", pc.z1},
                  {"z2", pc.z2}, {"n_c", pc.n_c}}}};
    std::string hash = config_hash(eff);

    RunResult r;
    CsvTable t({"kappa", "eta", "d", "mu", "T_settle", "N_a", "T_RES", "kappa_prime", "feasible", "reason"});
    for (double mu : mus) {
        for (int d : ds) {
            for (double eta : etas) {
                for (double kappa : kappas) {
                    try {
                        ResetPlan p = plan_reset(kappa, eta, d, mu, pc);
                        t.add_row({fmt_num(kappa), fmt_num(eta), std::to_string(d), fmt_num(mu), fmt_num(p.t_settle),
                                   fmt_num(p.n_a), fmt_num(p.t_res), fmt_num(p.kappa_prime),
                                   p.feasible ? "1" : "0", p.reason});
                    } catch (const std::invalid_argument &e) {
                        t.add_row({fmt_num(kappa), fmt_num(eta), std::to_string(d), fmt_num(mu), "", "", "", "", "0",
                                   std::string("rejected: ") + e.what()});
                    }
                }
            }
        }
    }
    emit(r, opt, "plan.csv", t.render(hash, seed));

    CsvTable bt({"d", "mu", "fitted_exponent", "expected_mu_over_d", "rel_error", "r2"});
    PlotSpec plot;
    plot.title = "feasibility boundary kappa*(eta)";
    plot.xlabel = "eta";
    plot.ylabel = "log10 kappa*";
    plot.log_x = true;
    const char *colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    int ci = 0;
    for (double mu : mus) {
        if (!(mu > kMu0)) {
            continue;
        }
        for (int d : ds) {
            BoundaryFit f = fit_boundary(d, mu, boundary_etas, pc);
            bt.add_row({std::to_string(d), fmt_num(mu), fmt_num(f.exponent), fmt_num(f.expected),
                        fmt_num(f.rel_error), fmt_num(f.r2)});
            plot.series.push_back({"d=" + std::to_string(d) + " mu=" + sig(mu), f.eta, f.log10_kappa_star,
                                   colors[ci++ % 6], true, true, false});
            check(r, "boundary exponent d=" + std::to_string(d) + " mu=" + sig(mu), f.rel_error <= 0.1,
                  "fitted " + sig(f.exponent) + " vs " + sig(f.expected));
        }
    }
    emit(r, opt, "boundary_fit.csv", bt.render(hash, seed));
    emit(r, opt, "plan_boundary.svg", render_svg(plot));
    return r;
}

RunResult run_weingarten(const Json &config, const RunOptions &opt) {
    require_keys(config, {"channel", "m", "x", "trials"}, "weingarten config");
    Json ch_spec = cfg_get<Json>(config, "channel", Json{{"kind", "replacement"}, {"gamma", 0.3}, {"eta", 0.5}});
    int m = cfg_get(config, "m", 2);
    long trials = opt.trials.value_or(cfg_get<long>(config, "trials", 100000));
    uint64_t seed = opt.seed.value_or(cfg_get<uint64_t>(config, "seed", 1));
    KrausChannel ch = single_qubit_channel(ch_spec);
    if (m < 1 || m > 3) {
        throw ConfigError("weingarten: m must be in [1, 3]");
    }
    Mat x;
    if (config.contains("x")) {
        x = matrix_from_json(config["x"]);
    } else {
        x = kron_all(std::vector<Mat>(m, pauli_z()));
    }
    if (x.rows() != (1L << m) || x.cols() != x.rows() || std::abs(x.trace()) > 1e-12) {
        throw ConfigError("weingarten: x must be a traceless 2^m x 2^m matrix");
    }
    Json eff = {{"experiment", "weingarten"}, {"channel", ch_spec}, {"m", m}, {"x", matrix_to_json(x)},
                {"trials", trials}};

    TwirlReport rep = mc_verify_twirl(ch, m, x, trials, seed);
    RunResult r;
    Json out = {{"channel", ch_spec},
                {"m", m},
                {"config_hash", config_hash(eff)},
                {"seed", seed},
                {"coefficients",
                 {{"alpha", rep.coeffs.alpha}, {"beta", rep.coeffs.beta}, {"omega", rep.coeffs.omega},
                  {"delta", rep.coeffs.delta}}},
                {"e_values", rep.coeffs.e},
                {"mc",
                 {{"trials", trials},
                  {"max_sigma_dev", rep.max_sigma_dev},
                  {"delta_lhs", rep.delta_lhs_mean},
                  {"delta_lhs_stderr", rep.delta_lhs_stderr},
                  {"delta_rhs", rep.delta_rhs}}}};
    std::string kind = ch_spec.value("kind", "");
    if ((kind == "replacement" || kind == "damping") && !ch_spec.value("x_conjugated", false) &&
        !ch_spec.contains("sigma_star")) {
        double g = ch_spec.value("gamma", 0.0);
        double eta = ch_spec.value("eta", kind == "replacement" ? 0.5 : 0.0);
        EValues cf = kind == "replacement" ? e_closed_form_replacement(g, eta) : e_closed_form_damping(g, eta);
        double dev = 0;
        for (int k = 0; k < 6; k++) {
            dev = std::max(dev, std::abs(cf[k] - rep.coeffs.e[k]));
        }
        out["e_closed_form"] = cf;
        out["e_closed_form_max_dev"] = dev;
        check(r, "E1..E6 match closed forms", dev <= 1e-12, "max deviation " + sig(dev));
    }
    emit(r, opt, "weingarten.json", out.dump(2) + "\n");
    check(r, "twirl identities within 3 sigma", rep.pass(3.0), "max deviation " + sig(rep.max_sigma_dev) + " sigma");
    return r;
}

RunResult run_verify(const Json &config, const RunOptions &opt) {
    require_keys(config, {"channels", "trials"}, "verify config");
    long trials = opt.trials.value_or(cfg_get<long>(config, "trials", 20000));
    uint64_t seed = opt.seed.value_or(cfg_get<uint64_t>(config, "seed", 1));
    Json specs = cfg_get<Json>(config, "channels",
                               Json::array({Json{{"kind", "identity"}},
                                            Json{{"kind", "replacement"}, {"gamma", 0.3}, {"eta", 0.5}},
                                            Json{{"kind", "damping"}, {"gamma", 0.2}, {"eta", 0.6}},
                                            Json{{"kind", "depolarizing"}, {"gamma", 0.2}}}));
    if (!specs.is_array() || specs.empty()) {
        throw ConfigError("verify: \"channels\" must be a non-empty list");
    }
    // Validate everything before any Monte Carlo work.
    std::vector<KrausChannel> channels;
    for (const auto &s : specs) {
        channels.push_back(single_qubit_channel(s));
    }
    if (trials < 2) {
        throw ConfigError("verify: trials must be >= 2");
    }
    Json eff = {{"experiment", "verify"}, {"channels", specs}, {"trials", trials}};

    RunResult r;
    RngStream xrng(seed, 0xC0FFEE);
    const Mat zz = kron(pauli_z(), pauli_z());
    const Mat xr = random_traceless_hermitian(4, xrng);
    for (size_t i = 0; i < channels.size(); i++) {
        const std::string tag = specs[i].dump();
        for (int j = 0; j < 2; j++) {
            TwirlReport rep = mc_verify_twirl(channels[i], 2, j == 0 ? zz : xr, trials, seed + 17 * i + j);
            check(r, "weingarten m=2 " + std::string(j == 0 ? "X=ZZ " : "X=random ") + tag, rep.pass(3.0),
                  sig(rep.max_sigma_dev) + " sigma");
        }
    }

    // Transfer rule, one gate on {0,1} of 4 qubits, all alignment cases.
    Architecture one_gate = custom_architecture(4, {Layer{{0, 1}}});
    const std::vector<QubitSubset> gs = {QubitSubset::of({0}), QubitSubset::of({0, 1}), QubitSubset::of({0, 1, 2}),
                                         QubitSubset::of({2})};
    for (size_t i = 0; i < channels.size(); i++) {
        McOptions mo;
        mo.trials = trials;
        mo.seed = seed + 1000 + i;
        mo.trace_distance = false;
        mo.subsets = {gs.begin(), gs.end()};
        auto mc = mc_run(one_gate, channels[i], mo);
        auto pred = predict_subset_distances(one_gate, channels[i], 0, 8, mo.subsets);
        double worst = 0;
        for (QubitSubset g : gs) {
            const Stat &s = mc[1].subsets.at(g);
            worst = std::max(worst, std::abs(s.mean - pred[1].get(g)) / std::max(s.stderr, 1e-12));
        }
        check(r, "transfer rule n=4 " + specs[i].dump(), worst <= 3, sig(worst) + " sigma");
    }

    for (double g : {0.05, 0.2}) {
        for (double eta : {0.3, 0.8}) {
            SettlingTrace tr = simulate_settling(generalized_damping(g, eta), 60);
            double rec = 0, floor_gap = 0;
            for (size_t k = 0; k + 1 < tr.z.size(); k++) {
                rec = std::max(rec, std::abs(tr.z[k + 1] - (tr.eta + tr.chi * (tr.z[k] - tr.eta))));
            }
            for (size_t k = 0; k < tr.z.size(); k++) {
                floor_gap = std::min(floor_gap, tr.z[k] - tr.eta * (1 - std::pow(tr.chi, double(k))));
            }
            check(r, "settling gamma=" + sig(g) + " eta=" + sig(eta), rec <= 1e-9 && floor_gap >= -1e-9,
                  "recurrence error " + sig(rec));
        }
    }

    Json report = {{"config_hash", config_hash(eff)}, {"seed", seed}, {"trials", trials}, {"checks", Json::array()}};
    for (const auto &c : r.checks) {
        report["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    report["pass"] = r.exit_code == 0;
    emit(r, opt, "verify_report.json", report.dump(2) + "\n");
    return r;
}

}  // namespace qref
