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

#include <catch2/catch_amalgamated.hpp>

#include "risce/array_geometry.hpp"

using namespace risce;

TEST_CASE("ula_steering: broadside gives the all-ones vector") {
    const CVector a = ula_steering(UlaConfig{8, 0.5}, 0.0);
    REQUIRE((a - CVector::Ones(8)).norm() < 1e-15);
}

TEST_CASE("ula_steering: endfire at half-wavelength spacing alternates sign") {
    const UlaConfig cfg{6, 0.5};
    const CVector a = ula_steering(cfg, kPi / 2.0);
    for (Eigen::Index m = 0; m < 6; ++m) {
        const double expected = (m % 2 == 0) ? 1.0 : -1.0;
        REQUIRE(std::abs(a[m] - cxd(expected, 0.0)) < 1e-12);
    }
}

TEST_CASE("ula_steering: norm is sqrt(M) and entries are unit modulus") {
    Rng rng(2);
    for (int i = 0; i < 10; ++i) {
        const double theta = uniform_in(rng, -kPi / 2, kPi / 2);
        const CVector a = ula_steering(UlaConfig{16, 0.5}, theta);
        REQUIRE(a.norm() == Catch::Approx(std::sqrt(16.0)).epsilon(1e-12));
        for (Eigen::Index m = 0; m < a.size(); ++m)
            REQUIRE(std::abs(std::abs(a[m]) - 1.0) < 1e-14);
    }
}

TEST_CASE("ula_steering: conjugate symmetry in the angle sign") {
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        const double theta = uniform_in(rng, -kPi / 2, kPi / 2);
        const CVector a = ula_steering(UlaConfig{16, 0.5}, theta);
        const CVector b = ula_steering(UlaConfig{16, 0.5}, -theta);
        REQUIRE((b - a.conjugate()).norm() < 1e-12);
    }
}

TEST_CASE("upa_steering: boresight gives all ones") {
    const CVector a = upa_steering(UpaConfig{4, 3, 0.5}, 0.0, 0.0);
    REQUIRE((a - CVector::Ones(12)).norm() < 1e-15);
}

TEST_CASE("upa_steering: 2x1 panel degenerates to a 2-element ULA") {
    Rng rng(4);
    for (int i = 0; i < 5; ++i) {
        const double az = uniform_in(rng, -kPi / 2, kPi / 2);
        const CVector upa = upa_steering(UpaConfig{2, 1, 0.5}, az, 0.0);
        const CVector ula = ula_steering(UlaConfig{2, 0.5}, az);
        REQUIRE((upa - ula).norm() < 1e-14);
    }
}

TEST_CASE("upa_steering: norm is sqrt(N) for random angles") {
    Rng rng(5);
    const UpaConfig cfg{5, 7, 0.5};
    for (int i = 0; i < 5; ++i) {
        const double az = uniform_in(rng, -kPi / 2, kPi / 2);
        const double el = uniform_in(rng, -kPi / 4, kPi / 4);
        REQUIRE(upa_steering(cfg, az, el).norm() ==
                Catch::Approx(std::sqrt(35.0)).epsilon(1e-12));
    }
}

TEST_CASE("make_grid: K=2 lands on sin values -1 and 0") {
    const AoaGrid grid = make_grid(2, 0.3);
    REQUIRE(grid.size() == 2);
    REQUIRE(grid.angle(0) == 0.3);
    REQUIRE(std::sin(grid.angle(1)) == Catch::Approx(-1.0).margin(1e-15));
    REQUIRE(std::sin(grid.angle(2)) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("make_grid: uniform spacing of 2/K in sin space") {
    const std::size_t K = 32;
    const AoaGrid grid = make_grid(K, 0.123);
    for (std::size_t k = 1; k < K; ++k) {
        const double gap = std::sin(grid.angle(k + 1)) - std::sin(grid.angle(k));
        REQUIRE(gap == Catch::Approx(2.0 / double(K)).margin(1e-12));
    }
}

TEST_CASE("make_grid: paper-scale grid has 33 dictionary angles") {
    const AoaGrid grid = make_grid(32, -0.7);
    REQUIRE(grid.size() == 32);
    const CMatrix dict = build_dictionary(UlaConfig{16, 0.5}, grid);
    REQUIRE(dict.cols() == 33);
}

TEST_CASE("make_grid: collision with theta0 perturbs the uniform point") {
    // theta0 = 0 coincides with the sin = 0 grid point for even K.
    const AoaGrid grid = make_grid(4, 0.0);
    bool found_near_zero = false;
    for (std::size_t k = 1; k <= 4; ++k) {
        const double s = std::sin(grid.angle(k));
        REQUIRE(std::abs(s - std::sin(grid.theta0)) > 1e-12);
        if (std::abs(s - 1e-6) < 1e-9)
            found_near_zero = true;
    }
    REQUIRE(found_near_zero);
    // Still strictly increasing in sin space.
    for (std::size_t k = 1; k < 4; ++k)
        REQUIRE(std::sin(grid.angle(k + 1)) > std::sin(grid.angle(k)));
}

TEST_CASE("half_cell: interior cells are symmetric, boundary cell collapses") {
    const AoaGrid grid = make_grid(8, 0.5);
    // Index 1 sits at sin = -1: no room on the left.
    REQUIRE(grid.half_cell(1) == 0.0);
    for (std::size_t k = 2; k <= 8; ++k) {
        const double hc = grid.half_cell(k);
        REQUIRE(hc > 0.0);
        // Stepping half a cell in either direction stays closest to point k in sin space.
        for (double sign : {-1.0, 1.0}) {
            const double theta = grid.angle(k) + sign * hc * 0.999;
            double best = 1e9;
            std::size_t best_k = 0;
            for (std::size_t j = 1; j <= 8; ++j) {
                const double d = std::abs(std::sin(theta) - std::sin(grid.angle(j)));
                if (d < best) {
                    best = d;
                    best_k = j;
                }
            }
            REQUIRE(best_k == k);
        }
    }
}

TEST_CASE("build_dictionary: empty grid yields the single RIS column") {
    const AoaGrid grid{0.42, {}};
    const CMatrix dict = build_dictionary(UlaConfig{16, 0.5}, grid);
    REQUIRE(dict.cols() == 1);
    REQUIRE((dict.col(0) - ula_steering(UlaConfig{16, 0.5}, 0.42)).norm() == 0.0);
}

TEST_CASE("build_dictionary: every column has norm sqrt(M)") {
    const CMatrix dict = build_dictionary(UlaConfig{16, 0.5}, make_grid(32, 0.2));
    for (Eigen::Index c = 0; c < dict.cols(); ++c)
        REQUIRE(dict.col(c).norm() == Catch::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("build_dictionary: mutual coherence matches an independent recomputation") {
    const UlaConfig ula{16, 0.5};
    const AoaGrid grid = make_grid(32, 0.2);
    const CMatrix dict = build_dictionary(ula, grid);

    // Recompute steering vectors directly from the angle list, bypassing the
    // dictionary builder, and scan all column pairs.
    double expected = 0.0;
    for (std::size_t j = 0; j <= 32; ++j)
        for (std::size_t k = 0; k < j; ++k) {
            cxd acc(0, 0);
            for (std::size_t m = 0; m < 16; ++m) {
                const double pj = 2.0 * kPi * 0.5 * double(m) * std::sin(grid.angle(j));
                const double pk = 2.0 * kPi * 0.5 * double(m) * std::sin(grid.angle(k));
                acc += std::conj(std::polar(1.0, pj)) * std::polar(1.0, pk);
            }
            expected = std::max(expected, std::abs(acc) / 16.0);
        }

    double got = 0.0;
    for (Eigen::Index j = 0; j < dict.cols(); ++j)
        for (Eigen::Index k = 0; k < j; ++k)
            got = std::max(got, std::abs(dict.col(j).dot(dict.col(k))) / 16.0);

    REQUIRE(got == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("build_corrected_dictionary: zero residuals reproduce the plain dictionary exactly") {
    const UlaConfig ula{16, 0.5};
    const AoaGrid grid = make_grid(16, -0.3);
    const CMatrix plain = build_dictionary(ula, grid);
    const CMatrix corrected = build_corrected_dictionary(ula, grid, std::vector<double>(17, 0.0));
    REQUIRE((plain - corrected).norm() == 0.0);
}

TEST_CASE("build_corrected_dictionary: a single residual touches only its column") {
    const UlaConfig ula{16, 0.5};
    const AoaGrid grid = make_grid(16, -0.3);
    std::vector<double> delta(17, 0.0);
    delta[5] = 0.01;
    const CMatrix plain = build_dictionary(ula, grid);
    const CMatrix corrected = build_corrected_dictionary(ula, grid, delta);
    for (Eigen::Index c = 0; c < 17; ++c) {
        if (c == 5)
            REQUIRE((plain.col(c) - corrected.col(c)).norm() > 0.0);
        else
            REQUIRE((plain.col(c) - corrected.col(c)).norm() == 0.0);
    }
    REQUIRE((corrected.col(5) - ula_steering(ula, grid.angle(5) + 0.01)).norm() == 0.0);
}

TEST_CASE("build_corrected_dictionary: nonzero residual at index 0 is rejected") {
    const AoaGrid grid = make_grid(4, 0.1);
    std::vector<double> delta(5, 0.0);
    delta[0] = 1e-3;
    REQUIRE_THROWS_AS(build_corrected_dictionary(UlaConfig{8, 0.5}, grid, delta),
                      std::invalid_argument);
}

TEST_CASE("build_corrected_dictionary: wrong residual length is rejected") {
    const AoaGrid grid = make_grid(4, 0.1);
    REQUIRE_THROWS_AS(build_corrected_dictionary(UlaConfig{8, 0.5}, grid,
                                                 std::vector<double>(4, 0.0)),
                      std::invalid_argument);
}
