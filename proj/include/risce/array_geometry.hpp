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

#ifndef RISCE_ARRAY_GEOMETRY_HPP
#define RISCE_ARRAY_GEOMETRY_HPP

#include "risce/numerics.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace risce {

// Uniform linear array at the base station; spacing in wavelengths.
struct UlaConfig {
    std::size_t num_elements = 16;
    double spacing = 0.5;
};

// Uniform planar array at the RIS, ny x nz elements; spacing in wavelengths.
// Element n maps to (iy, iz) = (n / nz, n % nz).
struct UpaConfig {
    std::size_t ny = 16;
    std::size_t nz = 16;
    double spacing = 0.5;

    std::size_t size() const { return ny * nz; }
};

// Candidate-AoA grid at the base station. Index 0 is reserved for the known
// RIS-BS direction theta0, which need not be a uniform point; indices 1..K
// hold the uniform-in-sin grid, strictly increasing in sin space.
struct AoaGrid {
    double theta0 = 0.0;
    std::vector<double> points; // radians, indices 1..K

    std::size_t size() const { return points.size(); } // K

    double angle(std::size_t k) const {
        return k == 0 ? theta0 : points.at(k - 1);
    }

    // Largest |delta| such that theta_k + delta stays inside grid cell k,
    // where cells tile sin space with width 2/K. Symmetric in angle, so a
    // uniform draw in +-half_cell keeps grid point k the nearest one. Zero
    // at a point whose sin-cell is cut off by the +-1 boundary.
    double half_cell(std::size_t k) const {
        const std::size_t K = points.size();
        if (k < 1 || k > K)
            throw std::invalid_argument("AoaGrid::half_cell: index outside 1..K");
        const double theta = points[k - 1];
        const double s = std::sin(theta);
        const double hw = 1.0 / static_cast<double>(K);
        const double lo = std::asin(std::max(s - hw, -1.0));
        const double hi = std::asin(std::min(s + hw, 1.0));
        return std::min(theta - lo, hi - theta);
    }
};

// BS array response for a plane wave from angle theta: element m carries
// phase 2*pi*d*m*sin(theta). Unit modulus per element, norm sqrt(M).
inline CVector ula_steering(const UlaConfig& cfg, double theta) {
    CVector a(cfg.num_elements);
    const double step = 2.0 * kPi * cfg.spacing * std::sin(theta);
    for (std::size_t m = 0; m < cfg.num_elements; ++m)
        a[static_cast<Eigen::Index>(m)] = std::polar(1.0, step * static_cast<double>(m));
    return a;
}

// RIS array response: Kronecker product a_y(azimuth, elevation) (x) a_z(elevation)
// of the two axis responses, length ny*nz.
inline CVector upa_steering(const UpaConfig& cfg, double azimuth, double elevation) {
    const double step_y = 2.0 * kPi * cfg.spacing * std::sin(azimuth) * std::cos(elevation);
    const double step_z = 2.0 * kPi * cfg.spacing * std::sin(elevation);
    CVector a(cfg.size());
    for (std::size_t iy = 0; iy < cfg.ny; ++iy) {
        const cxd ay = std::polar(1.0, step_y * static_cast<double>(iy));
        for (std::size_t iz = 0; iz < cfg.nz; ++iz) {
            const cxd az = std::polar(1.0, step_z * static_cast<double>(iz));
            a[static_cast<Eigen::Index>(iy * cfg.nz + iz)] = ay * az;
        }
    }
    return a;
}

// K grid points uniform in sin over [-1, 1) with spacing 2/K, prepended with
// theta0 at index 0. A uniform point colliding with sin(theta0) (within
// 1e-12) is nudged by +1e-6 in sin space so dictionary columns stay distinct.
inline AoaGrid make_grid(std::size_t K, double theta0) {
    AoaGrid grid;
    grid.theta0 = theta0;
    grid.points.reserve(K);
    const double s0 = std::sin(theta0);
    for (std::size_t k = 0; k < K; ++k) {
        double s = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(K);
        if (std::abs(s - s0) < 1e-12)
            s += 1e-6;
        grid.points.push_back(std::asin(s));
    }
    return grid;
}

// Dictionary A of steering vectors at all K+1 grid angles; column 0 is the
// RIS-BS direction.
inline CMatrix build_dictionary(const UlaConfig& cfg, const AoaGrid& grid) {
    const std::size_t K = grid.size();
    CMatrix A(cfg.num_elements, K + 1);
    for (std::size_t k = 0; k <= K; ++k)
        A.col(static_cast<Eigen::Index>(k)) = ula_steering(cfg, grid.angle(k));
    return A;
}

// Dictionary with column k steered to theta_k + delta[k]. delta[0] must be
// zero: the RIS-BS direction is known exactly and carries no residual.
inline CMatrix build_corrected_dictionary(const UlaConfig& cfg, const AoaGrid& grid,
                                          const std::vector<double>& delta) {
    const std::size_t K = grid.size();
    if (delta.size() != K + 1)
        throw std::invalid_argument("build_corrected_dictionary: delta must have K+1 entries");
    if (delta[0] != 0.0)
        throw std::invalid_argument("build_corrected_dictionary: delta[0] must be 0");
    CMatrix A(cfg.num_elements, K + 1);
    for (std::size_t k = 0; k <= K; ++k)
        A.col(static_cast<Eigen::Index>(k)) = ula_steering(cfg, grid.angle(k) + delta[k]);
    return A;
}

} // namespace risce

#endif
