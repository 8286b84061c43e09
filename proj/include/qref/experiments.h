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

#ifndef QREF_EXPERIMENTS_H
#define QREF_EXPERIMENTS_H

#include <optional>
#include <string>
#include <vector>

#include "qref/fridge.h"
#include "qref/io.h"

namespace qref {

struct Fig2Row {
    double target = 0;  // z_out or p_out
    int exact = 0;
    double bound = 0;
    long bound_ceil = 0;
};
struct Fig2Data {
    double z_in = 0.1, p_in = 0.3;
    std::vector<Fig2Row> z_rows, p_rows;
};
/// z_out on linspace(z_in, z_max, points); p_out log-spaced from p_in down to p_min.
Fig2Data compute_fig2(double z_in, double p_in, int points = 90, double z_max = 0.99, double p_min = 1e-12);

struct QcpSample {
    double gamma = 0;
    double kappa = 0;
    double eta = 0;
    KrausChannel channel = identity_channel(1);
};
/// Generalized damping at fixed eta over a log gamma grid, keeping channels whose diamond
/// estimate lies in [kappa_lo, kappa_hi]. Optionally adds the X-conjugated copy of each.
std::vector<QcpSample> damping_sweep(double eta, double kappa_lo, double kappa_hi, int gamma_points,
                                     bool with_x_conjugate, int restarts = 16, uint64_t seed = 1);

struct QcpNoiseConstants {
    double a = 0, b = 0, a_prime = 0;
    size_t samples = 0;
};
/// Tightest nonnegative a, b, a' with z_out >= qcp(z_in) - a k z_in - b k eta and
/// p_out <= 3 p_in^2 + a' k on fixed z_in / p_in grids.
QcpNoiseConstants fit_qcp_constants(const std::vector<QcpSample> &samples);

struct LineFit {
    double slope = 0, intercept = 0, r2 = 0;
};
LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y);

struct BoundaryFit {
    int d = 1;
    double mu = 0;
    double exponent = 0;
    double expected = 0;
    double rel_error = 0;
    double r2 = 0;
    std::vector<double> eta, log10_kappa_star;
};
/// Fits log kappa*(eta) against log eta. The boundary is solved in log space since it
/// underflows a double for d >= 2 with the default constants.
BoundaryFit fit_boundary(int d, double mu, const std::vector<double> &etas, const PlanConstants &c = {});

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);  // endpoints a and b, not exponents

struct RunOptions {
    std::string out_dir = ".";
    std::optional<uint64_t> seed;
    std::optional<long> trials;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    int exit_code = 0;  // 0 pass, 1 verification failure
    std::vector<std::string> files;
    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;
};

// Each runner throws ConfigError on invalid configuration before doing any work.
RunResult run_fig2(const Json &config, const RunOptions &opt);
RunResult run_contraction(const Json &config, const RunOptions &opt);
RunResult run_plan(const Json &config, const RunOptions &opt);
RunResult run_weingarten(const Json &config, const RunOptions &opt);
RunResult run_verify(const Json &config, const RunOptions &opt);

}  // namespace qref

#endif
