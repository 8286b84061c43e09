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

#ifndef QREF_IO_H
#define QREF_IO_H

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qref/channels.h"
#include "qref/circuits.h"

namespace qref {

using Json = nlohmann::json;

/// Bad user configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

uint64_t fnv1a64(std::string_view bytes);
/// 16 hex digits of FNV-1a over the key-sorted compact dump.
std::string config_hash(const Json &config);

/// "%.17g"
std::string fmt_num(double x);

/// Channel spec: {"kind": "replacement"|"depolarizing"|"damping"|"custom", "gamma", "eta",
/// "sigma_star", "kraus", "x_conjugated"}. Complex numbers are [re, im] or plain reals.
KrausChannel channel_from_json(const Json &spec);
Mat matrix_from_json(const Json &m);
Json matrix_to_json(const Mat &m);

/// {"kind": "brickwork1d"|"alltoall", "n", "depth", "gates": [[[q, q], ...], ...]}
Architecture architecture_from_json(const Json &spec);

class CsvTable {
   public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(std::vector<std::string> cells);
    size_t rows() const { return rows_.size(); }
    /// Provenance comment, header, rows; '\n' line endings.
    std::string render(const std::string &config_hash, uint64_t seed) const;

   private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_file(const std::string &path, const std::string &contents);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    bool line = true;
    bool markers = false;
    bool dashed = false;
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    bool log_x = false, log_y = false;
    int width = 640, height = 420;
    std::vector<PlotSeries> series;
};

/// Standalone SVG with axes, ticks and a legend. No timestamps, so output is deterministic.
std::string render_svg(const PlotSpec &plot);

}  // namespace qref

#endif
