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

#ifndef QREF_STATS_H
#define QREF_STATS_H

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

namespace qref {

/// Online mean/variance (Welford), mergeable in a fixed order.
struct Welford {
    long n = 0;
    double mean = 0;
    double m2 = 0;

    void add(double x) {
        n++;
        double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    void merge(const Welford &o) {
        if (o.n == 0) {
            return;
        }
        if (n == 0) {
            *this = o;
            return;
        }
        long t = n + o.n;
        double d = o.mean - mean;
        mean += d * double(o.n) / double(t);
        m2 += o.m2 + d * d * double(n) * double(o.n) / double(t);
        n = t;
    }
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
    double stderr_of_mean() const { return n > 0 ? std::sqrt(variance() / double(n)) : 0.0; }
};

struct Stat {
    double mean = 0;
    double stderr = 0;
    long count = 0;
    static Stat of(const Welford &w) { return {w.mean, w.stderr_of_mean(), w.n}; }
};

/// Runs fn(i) for i in [0, count) on all hardware threads. fn must only touch slot i.
inline void parallel_for(long count, const std::function<void(long)> &fn) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    long nt = std::min<long>(long(hw), count);
    if (nt <= 1) {
        for (long i = 0; i < count; i++) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (long t = 0; t < nt; t++) {
        pool.emplace_back([&, t] {
            for (long i = t; i < count; i += nt) {
                fn(i);
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
}

/// Trials are grouped into fixed-size chunks, so the reduction order never depends on
/// the thread count. per_trial(trial, acc) accumulates into a vector of `width` Welfords.
inline std::vector<Welford> chunked_welford(long trials, size_t width,
                                            const std::function<void(long, std::vector<Welford> &)> &per_trial,
                                            long chunk = 256) {
    long chunks = (trials + chunk - 1) / chunk;
    std::vector<std::vector<Welford>> parts(chunks, std::vector<Welford>(width));
    parallel_for(chunks, [&](long c) {
        long end = std::min(trials, (c + 1) * chunk);
        for (long t = c * chunk; t < end; t++) {
            per_trial(t, parts[c]);
        }
    });
    std::vector<Welford> out(width);
    for (const auto &p : parts) {
        for (size_t i = 0; i < width; i++) {
            out[i].merge(p[i]);
        }
    }
    return out;
}

}  // namespace qref

#endif
