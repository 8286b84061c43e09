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


#ifndef QREF_TESTS_TEST_UTIL_H
#define QREF_TESTS_TEST_UTIL_H

#include <cmath>
#include <vector>

#include "qref/channels.h"
#include "qref/core.h"

namespace qref::testing {

inline Mat random_matrix(long d, RngStream &rng) {
    Mat g(d, d);
    for (long i = 0; i < d; i++) {
        for (long j = 0; j < d; j++) {
            g(i, j) = rng.complex_normal();
        }
    }
    return g;
}

inline DensityMatrix random_state(int n, RngStream &rng) {
    Mat g = random_matrix(1L << n, rng);
    Mat r = g * g.adjoint();
    r /= r.trace().real();
    return DensityMatrix((r + r.adjoint()) / 2.0);
}

inline Mat random_traceless_hermitian(long d, RngStream &rng) {
    Mat g = random_matrix(d, rng);
    Mat h = (g + g.adjoint()) / 2.0;
    h -= (h.trace() / double(d)) * Mat::Identity(d, d);
    return h;
}

// Random channel from an isometry: K_i = rows i*d..(i+1)*d of a Haar unitary's first d columns.
inline KrausChannel random_channel(int n, int num_ops, RngStream &rng) {
    long d = 1L << n;
    Mat u = haar_unitary(d * num_ops, rng);
    std::vector<Mat> ops;
    for (int i = 0; i < num_ops; i++) {
        ops.push_back(u.block(i * d, 0, d, d));
    }
    return KrausChannel(ops);
}

inline Mat hadamard() {
    Mat h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

}  // namespace qref::testing

#endif
