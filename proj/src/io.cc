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

#include "qref/io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace qref {

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const Json &config) {
    // nlohmann's object type is an ordered std::map, so dump() is already key-sorted.
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

cplx complex_from_json(const Json &v) {
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError("complex entry must be a number or [re, im]: " + v.dump());
}

double number(const Json &spec, const char *key, std::optional<double> fallback = std::nullopt) {
    if (!spec.contains(key)) {
        if (fallback) {
            return *fallback;
        }
        throw ConfigError(std::string("missing field \"") + key + "\"");
    }
    if (!spec[key].is_number()) {
        throw ConfigError(std::string("field \"") + key + "\" must be a number");
    }
    return spec[key].get<double>();
}

}  // namespace

Mat matrix_from_json(const Json &m) {
    if (!m.is_array() || m.empty()) {
        throw ConfigError("matrix must be a non-empty array of rows");
    }
    long rows = long(m.size());
    long cols = m[0].is_array() ? long(m[0].size()) : 0;
    Mat out(rows, cols);
    for (long i = 0; i < rows; i++) {
        if (!m[i].is_array() || long(m[i].size()) != cols) {
            throw ConfigError("matrix rows must have equal length");
        }
        for (long j = 0; j < cols; j++) {
            out(i, j) = complex_from_json(m[i][j]);
        }
    }
    return out;
}

Json matrix_to_json(const Mat &m) {
    Json rows = Json::array();
    for (long i = 0; i < m.rows(); i++) {
        Json row = Json::array();
        for (long j = 0; j < m.cols(); j++) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

void reject_unknown(const Json &spec, std::initializer_list<const char *> allowed, const char *what) {
    for (const auto &item : spec.items()) {
        bool known = false;
        for (const char *a : allowed) {
            known = known || item.key() == a;
        }
        if (!known) {
            throw ConfigError(std::string("unknown key \"") + item.key() + "\" in " + what);
        }
    }
}

}  // namespace

KrausChannel channel_from_json(const Json &spec) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
        throw ConfigError("channel spec needs a string \"kind\"");
    }
    reject_unknown(spec, {"kind", "gamma", "eta", "sigma_star", "kraus", "x_conjugated", "qubits"}, "channel spec");
    const std::string kind = spec["kind"].get<std::string>();
    try {
        KrausChannel ch = identity_channel(1);
        if (kind == "replacement") {
            double g = number(spec, "gamma");
            DensityMatrix sigma = spec.contains("sigma_star")
                                      ? DensityMatrix(matrix_from_json(spec["sigma_star"]))
                                      : DensityMatrix::from_polarization(number(spec, "eta", 0.5));
            ch = replacement_channel(g, sigma);
        } else if (kind == "depolarizing") {
            ch = replacement_channel(number(spec, "gamma"), DensityMatrix::maximally_mixed(1));
        } else if (kind == "damping") {
            ch = generalized_damping(number(spec, "gamma"), number(spec, "eta"));
        } else if (kind == "identity") {
            ch = identity_channel(int(number(spec, "qubits", 1.0)));
        } else if (kind == "custom") {
            if (!spec.contains("kraus") || !spec["kraus"].is_array() || spec["kraus"].empty()) {
                throw ConfigError("custom channel needs a non-empty \"kraus\" list");
            }
            std::vector<Mat> ops;
            for (const auto &k : spec["kraus"]) {
                ops.push_back(matrix_from_json(k));
            }
            ch = KrausChannel(std::move(ops));
        } else {
            throw ConfigError("unknown channel kind \"" + kind + "\"");
        }
        if (spec.value("x_conjugated", false)) {
            ch = conjugated(ch, kron_all(std::vector<Mat>(ch.num_qubits(), pauli_x())));
        }
        return ch;
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError("invalid channel spec: " + std::string(e.what()));
    }
}

Architecture architecture_from_json(const Json &spec) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
        throw ConfigError("architecture spec needs a string \"kind\"");
    }
    reject_unknown(spec, {"kind", "n", "depth", "gates"}, "architecture spec");
    const std::string kind = spec["kind"].get<std::string>();
    int n = int(number(spec, "n"));
    try {
        if (spec.contains("gates")) {
            std::vector<Layer> layers;
            for (const auto &layer : spec["gates"]) {
                Layer l;
                for (const auto &gate : layer) {
                    l.push_back(gate.get<std::vector<int>>());
                }
                layers.push_back(l);
            }
            Architecture a = custom_architecture(n, std::move(layers));
            a.kind = kind;
            return a;
        }
        int depth = int(number(spec, "depth"));
        if (kind == "brickwork1d") {
            return brickwork1d(n, depth);
        }
        if (kind == "alltoall") {
            return alltoall(n, depth);
        }
    } catch (const Json::exception &e) {
        throw ConfigError("invalid gate list: " + std::string(e.what()));
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown architecture kind \"" + kind + "\"");
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw std::invalid_argument("CsvTable: row has " + std::to_string(cells.size()) + " cells, header has " +
                                    std::to_string(header_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string CsvTable::render(const std::string &hash, uint64_t seed) const {
    std::string out = "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
    auto line = [&](const std::vector<std::string> &cells) {
        for (size_t i = 0; i < cells.size(); i++) {
            out += (i ? "," : "") + cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto &r : rows_) {
        line(r);
    }
    return out;
}

void write_file(const std::string &path, const std::string &contents) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    f << contents;
}

namespace {

std::string esc(const std::string &s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string px(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return b;
}

struct Axis {
    double lo, hi;
    bool log;
    double map(double v, double a, double b) const {
        double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
        return a + t * (b - a);
    }
    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            for (int e = int(std::floor(std::log10(lo))); e <= int(std::ceil(std::log10(hi))); e++) {
                double v = std::pow(10.0, e);
                if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) {
                    t.push_back(v);
                }
            }
            if (t.size() < 2) {
                t = {lo, hi};
            }
            return t;
        }
        double span = hi - lo;
        double step = std::pow(10.0, std::floor(std::log10(span / 5)));
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            if (span / (step * m) <= 6) {
                step *= m;
                break;
            }
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
            t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
        }
        return t;
    }
};

Axis make_axis(const std::vector<const std::vector<double> *> &data, bool log) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto *d : data) {
        for (double v : *d) {
            if (!std::isfinite(v) || (log && v <= 0)) {
                continue;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) {
        lo = log ? 0.1 : 0.0;
        hi = 1.0;
    }
    if (hi <= lo) {
        hi = log ? lo * 10 : lo + 1;
    }
    if (!log) {
        double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

std::string tick_label(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

}  // namespace

std::string render_svg(const PlotSpec &plot) {
    const double w = plot.width, h = plot.height;
    const double left = 70, right = w - 170, top = 40, bottom = h - 55;
    std::vector<const std::vector<double> *> xs, ys;
    for (const auto &s : plot.series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    Axis ax = make_axis(xs, plot.log_x), ay = make_axis(ys, plot.log_y);

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << px(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(plot.title)
      << "</text>\n";
    o << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(right - left) << "\" height=\""
      << px(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        double x = ax.map(t, left, right);
        o << "<line x1=\"" << px(x) << "\" y1=\"" << px(bottom) << "\" x2=\"" << px(x) << "\" y2=\""
          << px(bottom + 5) << "\" stroke=\"black\"/>";
        o << "<text x=\"" << px(x) << "\" y=\"" << px(bottom + 18) << "\" text-anchor=\"middle\">"
          << tick_label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        double y = ay.map(t, bottom, top);
        o << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(left) << "\" y2=\"" << px(y)
          << "\" stroke=\"black\"/>";
        o << "<text x=\"" << px(left - 8) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">" << tick_label(t)
          << "</text>\n";
    }
    o << "<text x=\"" << px((left + right) / 2) << "\" y=\"" << px(h - 15) << "\" text-anchor=\"middle\">"
      << esc(plot.xlabel) << "</text>\n";
    o << "<text transform=\"translate(18," << px((top + bottom) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << esc(plot.ylabel) << "</text>\n";

    int idx = 0;
    for (const auto &s : plot.series) {
        std::vector<std::pair<double, double>> pts;
        for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); i++) {
            bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) && !(plot.log_x && s.x[i] <= 0) &&
                      !(plot.log_y && s.y[i] <= 0);
            if (ok) {
                pts.emplace_back(ax.map(s.x[i], left, right), ay.map(s.y[i], bottom, top));
            }
        }
        if (s.line && pts.size() > 1) {
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
              << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
            for (const auto &[x, y] : pts) {
                o << px(x) << ',' << px(y) << ' ';
            }
            o << "\"/>\n";
        }
        if (s.markers) {
            for (const auto &[x, y] : pts) {
                o << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"2.5\" fill=\"" << s.color << "\"/>";
            }
            o << '\n';
        }
        double ly = top + 10 + 18 * idx++;
        o << "<line x1=\"" << px(right + 12) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(right + 36) << "\" y2=\""
          << px(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>";
        o << "<text x=\"" << px(right + 42) << "\" y=\"" << px(ly + 4) << "\">" << esc(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace qref
