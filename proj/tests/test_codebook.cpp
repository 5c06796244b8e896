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

#include "risce/codebook.hpp"

#include <cstdio>
#include <filesystem>

using namespace risce;

TEST_CASE("dft codebook: 2-point schedule is [1 1; 1 -1]") {
    const Codebook cb = build_dft_codebook(1, 2);
    REQUIRE(cb.v_tilde.rows() == 2);
    REQUIRE(cb.v_tilde.cols() == 2);
    REQUIRE(std::abs(cb.v_tilde(0, 0) - cxd(1, 0)) < 1e-15);
    REQUIRE(std::abs(cb.v_tilde(0, 1) - cxd(1, 0)) < 1e-15);
    REQUIRE(std::abs(cb.v_tilde(1, 0) - cxd(1, 0)) < 1e-15);
    REQUIRE(std::abs(cb.v_tilde(1, 1) - cxd(-1, 0)) < 1e-12);
}

TEST_CASE("dft codebook: activation rows sum to zero") {
    for (auto [g, l] : {std::pair<std::size_t, std::size_t>{3, 8},
                        {5, 6},
                        {7, 19},
                        {64, 65}}) {
        const Codebook cb = build_dft_codebook(g, l);
        for (Eigen::Index r = 1; r < cb.v_tilde.rows(); ++r)
            REQUIRE(std::abs(cb.v_tilde.row(r).sum()) < 1e-10);
    }
}

TEST_CASE("dft codebook: rows are mutually orthogonal, V*V^H = L*I") {
    const Codebook cb = build_dft_codebook(3, 8);
    const CMatrix gram = cb.v_tilde * cb.v_tilde.adjoint();
    REQUIRE((gram - 8.0 * CMatrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("dft codebook: unit modulus entries") {
    const Codebook cb = build_dft_codebook(6, 13);
    for (Eigen::Index r = 0; r < cb.v_tilde.rows(); ++r)
        for (Eigen::Index c = 0; c < cb.v_tilde.cols(); ++c)
            REQUIRE(std::abs(std::abs(cb.v_tilde(r, c)) - 1.0) < 1e-12);
}

TEST_CASE("dft codebook: too few slots are rejected") {
    REQUIRE_THROWS_AS(build_dft_codebook(4, 4), std::invalid_argument);
}

TEST_CASE("codebook from_rows: enforces the all-ones first row") {
    CMatrix vt = build_dft_codebook(2, 4).v_tilde;
    vt(0, 1) = cxd(0, 1);
    REQUIRE_THROWS_AS(Codebook::from_rows(vt), std::invalid_argument);
}

TEST_CASE("codebook from_rows: rejects rows correlated with the ones row") {
    CMatrix vt(2, 4);
    vt.row(0).setOnes();
    vt.row(1).setOnes(); // sums to L, not 0
    REQUIRE_THROWS_AS(Codebook::from_rows(vt), std::invalid_argument);
}

TEST_CASE("expand_groups: identity map passes phases through") {
    const GroupingMap map = identity_grouping(4);
    CVector v(4);
    v << cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1);
    REQUIRE((expand_groups(v, map) - v).norm() == 0.0);
}

TEST_CASE("expand_groups: single group broadcasts one phase") {
    GroupingMap map;
    map.num_groups = 1;
    map.group_of = {0, 0, 0, 0, 0};
    CVector v(1);
    v << cxd(0, 1);
    const CVector out = expand_groups(v, map);
    for (Eigen::Index n = 0; n < 5; ++n)
        REQUIRE(out[n] == cxd(0, 1));
}

TEST_CASE("expand_groups: two tiles of two elements") {
    GroupingMap map;
    map.num_groups = 2;
    map.group_of = {0, 0, 1, 1};
    CVector v(2);
    v << cxd(1, 0), cxd(0, 1);
    const CVector out = expand_groups(v, map);
    REQUIRE(out[0] == cxd(1, 0));
    REQUIRE(out[1] == cxd(1, 0));
    REQUIRE(out[2] == cxd(0, 1));
    REQUIRE(out[3] == cxd(0, 1));
}

TEST_CASE("expand_groups: size mismatch is rejected") {
    const GroupingMap map = identity_grouping(4);
    REQUIRE_THROWS_AS(expand_groups(CVector::Ones(3), map), std::invalid_argument);
}

TEST_CASE("grouping map: empty group is rejected") {
    GroupingMap map;
    map.num_groups = 3;
    map.group_of = {0, 0, 1, 1}; // group 2 empty
    REQUIRE_THROWS_AS(map.validate(), std::invalid_argument);
}

TEST_CASE("tiled grouping: 16x16 array in 64 groups gives 2x2 tiles") {
    const GroupingMap map = make_tiled_grouping(UpaConfig{16, 16, 0.5}, 64);
    REQUIRE(map.num_groups == 64);
    REQUIRE(map.num_elements() == 256);
    std::vector<std::size_t> counts(64, 0);
    for (std::size_t g : map.group_of)
        counts[g]++;
    for (std::size_t c : counts)
        REQUIRE(c == 4);
    // Elements (0,0), (0,1), (1,0), (1,1) share the first tile.
    REQUIRE(map.group_of[0] == map.group_of[1]);
    REQUIRE(map.group_of[0] == map.group_of[16]);
    REQUIRE(map.group_of[0] == map.group_of[17]);
    REQUIRE(map.group_of[0] != map.group_of[2]);
}

TEST_CASE("tiled grouping: G = N degenerates to the identity map") {
    const GroupingMap map = make_tiled_grouping(UpaConfig{4, 4, 0.5}, 16);
    for (std::size_t n = 0; n < 16; ++n)
        REQUIRE(map.group_of[n] == n);
}

TEST_CASE("tiled grouping: impossible factorization is rejected") {
    REQUIRE_THROWS_AS(make_tiled_grouping(UpaConfig{16, 16, 0.5}, 7), std::invalid_argument);
}

TEST_CASE("codebook csv round trip") {
    const Codebook cb = build_dft_codebook(5, 9);
    const std::string path =
        (std::filesystem::temp_directory_path() / "risce_codebook_test.csv").string();
    write_codebook_csv(cb, path);
    const Codebook back = read_codebook_csv(path);
    REQUIRE(back.num_groups == cb.num_groups);
    REQUIRE(back.num_slots == cb.num_slots);
    REQUIRE((back.v_tilde - cb.v_tilde).norm() == 0.0);
    std::remove(path.c_str());
}
