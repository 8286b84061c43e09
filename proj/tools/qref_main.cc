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

// qref: batch runner for the refrigerator / random-circuit experiments.
//
//   qref fig2|contraction|plan|weingarten|verify [--config PATH] [--seed N] [--out DIR] [--trials N]
//
// Exit codes: 0 all checks pass, 1 a verification check failed, 2 configuration error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>

#include "qref/experiments.h"

namespace {

using Runner = qref::RunResult (*)(const qref::Json &, const qref::RunOptions &);

qref::Json load_config(const std::string &path) {
    if (path.empty()) {
        return qref::Json::object();
    }
    std::ifstream f(path);
    if (!f) {
        throw qref::ConfigError("cannot read config file " + path);
    }
    try {
        qref::Json j = qref::Json::parse(f);
        if (!j.is_object()) {
            throw qref::ConfigError("config root must be a JSON object");
        }
        return j;
    } catch (const qref::Json::parse_error &e) {
        throw qref::ConfigError(std::string("config parse error: ") + e.what());
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qref: noisy refrigerator and random-circuit contraction experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    uint64_t seed = 0;
    long trials = 0;
    const std::map<std::string, std::pair<Runner, std::string>> commands = {
        {"fig2", {qref::run_fig2, "cycle counts vs bounds for the 3-qubit compressor"}},
        {"contraction", {qref::run_contraction, "Monte Carlo distances vs transfer prediction and bounds"}},
        {"plan", {qref::run_plan, "RESET planner feasibility sweep and boundary fit"}},
        {"weingarten", {qref::run_weingarten, "twirl coefficients and their Monte Carlo check"}},
        {"verify", {qref::run_verify, "all verification batteries"}},
    };
    std::map<std::string, CLI::App *> subs;
    for (const auto &[name, entry] : commands) {
        CLI::App *s = app.add_subcommand(name, entry.second);
        s->add_option("--config", config_path, "JSON config file");
        s->add_option("--seed", seed, "RNG seed (overrides config)");
        s->add_option("--out", out_dir, "output directory")->capture_default_str();
        s->add_option("--trials", trials, "Monte Carlo trials (overrides config)")->check(CLI::PositiveNumber);
        subs[name] = s;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    for (const auto &[name, s] : subs) {
        if (!s->parsed()) {
            continue;
        }
        qref::RunOptions opt;
        opt.out_dir = out_dir;
        if (s->count("--seed")) {
            opt.seed = seed;
        }
        if (s->count("--trials")) {
            opt.trials = trials;
        }
        try {
            qref::RunResult r = commands.at(name).first(load_config(config_path), opt);
            for (const auto &w : r.warnings) {
                std::cerr << "warning: " << w << '\n';
            }
            for (const auto &c : r.checks) {
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
                if (!c.detail.empty()) {
                    std::cout << " (" << c.detail << ')';
                }
                std::cout << '\n';
            }
            for (const auto &f : r.files) {
                std::cout << "wrote " << f << '\n';
            }
            return r.exit_code;
        } catch (const qref::ConfigError &e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception &e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return 2;
}
