// SPDX-License-Identifier: Apache-2.0
//
// risce - RIS-assisted mmWave uplink channel estimation toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISCE_NUMERICS_HPP
#define RISCE_NUMERICS_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace risce {

using cxd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Deterministic 64-bit generator. Every stochastic routine takes one by
// reference; there is no global RNG state anywhere in the library.
using Rng = std::mt19937_64;

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream keyed by (seed, a, b). Streams with different keys are
// statistically independent, so trials can run in any order or in parallel
// and still reproduce bit-identically.
inline Rng make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t u = mix64(seed);
    u = mix64(u ^ mix64(a + 0x517CC1B727220A95ULL));
    u = mix64(u ^ mix64(b + 0x6C62272E07BB0142ULL));
    return Rng(u);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline void require_finite(const CMatrix& m, const char* name) {
    if (!m.allFinite())
        throw std::invalid_argument(std::string(name) + " contains NaN/Inf entries");
}

// Minimum-Frobenius-norm solution of min_X ||A*X - B||_F.
// Rank is decided by an SVD with relative singular-value cutoff 1e-12, so a
// rank-deficient A yields pseudo-inverse semantics instead of garbage. An
// all-zero A gives X = 0.
inline CMatrix solve_least_squares(const CMatrix& A, const CMatrix& B,
                                   Eigen::Index* rank_out = nullptr) {
    if (A.rows() < 1 || A.cols() < 1)
        throw std::invalid_argument("solve_least_squares: A must be at least 1x1");
    if (A.rows() != B.rows())
        throw std::invalid_argument("solve_least_squares: A and B row counts differ");
    require_finite(A, "solve_least_squares: A");
    require_finite(B, "solve_least_squares: B");
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    if (rank_out)
        *rank_out = svd.rank();
    return svd.solve(B);
}

// n i.i.d. draws from CN(0, variance): real and imaginary parts are
// independent N(0, variance/2). Consumes exactly two generator words per
// draw (none when variance == 0), which keeps paired experiments aligned.
inline CVector sample_cn(double variance, Eigen::Index n, Rng& rng) {
    if (!(variance >= 0.0))
        throw std::invalid_argument("sample_cn: variance must be >= 0");
    CVector out = CVector::Zero(n);
    if (variance == 0.0)
        return out;
    const double scale = std::sqrt(variance / 2.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u1 = uniform01(rng);
        const double u2 = uniform01(rng);
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        out[i] = cxd(scale * r * std::cos(2.0 * kPi * u2),
                     scale * r * std::sin(2.0 * kPi * u2));
    }
    return out;
}

inline double dbm_to_watt(double dbm) {
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

} // namespace risce

#endif
