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

#ifndef RISCE_CODEBOOK_HPP
#define RISCE_CODEBOOK_HPP

#include "risce/array_geometry.hpp"
#include "risce/numerics.hpp"
#include "risce/text.hpp"

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

namespace risce {

// Assignment of the N RIS elements to G shared-phase groups.
struct GroupingMap {
    std::vector<std::size_t> group_of; // size N, values in [0, G)
    std::size_t num_groups = 0;

    std::size_t num_elements() const { return group_of.size(); }

    void validate() const {
        if (num_groups == 0)
            throw std::invalid_argument("GroupingMap: no groups");
        std::vector<bool> seen(num_groups, false);
        for (std::size_t g : group_of) {
            if (g >= num_groups)
                throw std::invalid_argument("GroupingMap: element mapped to nonexistent group");
            seen[g] = true;
        }
        for (std::size_t g = 0; g < num_groups; ++g)
            if (!seen[g])
                throw std::invalid_argument("GroupingMap: empty group");
    }
};

inline GroupingMap identity_grouping(std::size_t n) {
    GroupingMap map;
    map.num_groups = n;
    map.group_of.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        map.group_of[i] = i;
    return map;
}

// Partition the UPA into G contiguous rectangular tiles. G must factor as
// gy*gz with gy | ny and gz | nz; among valid factorizations the most
// square tile wins.
inline GroupingMap make_tiled_grouping(const UpaConfig& upa, std::size_t G) {
    std::size_t best_gy = 0, best_gz = 0;
    double best_score = -1.0;
    for (std::size_t gy = 1; gy <= G; ++gy) {
        if (G % gy != 0)
            continue;
        const std::size_t gz = G / gy;
        if (upa.ny % gy != 0 || upa.nz % gz != 0)
            continue;
        const double ty = static_cast<double>(upa.ny / gy);
        const double tz = static_cast<double>(upa.nz / gz);
        const double score = std::abs(ty - tz);
        if (best_score < 0.0 || score < best_score) {
            best_score = score;
            best_gy = gy;
            best_gz = gz;
        }
    }
    if (best_gy == 0)
        throw std::invalid_argument("make_tiled_grouping: G does not tile the ny x nz array");
    const std::size_t ty = upa.ny / best_gy;
    const std::size_t tz = upa.nz / best_gz;
    GroupingMap map;
    map.num_groups = G;
    map.group_of.resize(upa.size());
    for (std::size_t iy = 0; iy < upa.ny; ++iy)
        for (std::size_t iz = 0; iz < upa.nz; ++iz)
            map.group_of[iy * upa.nz + iz] = (iy / ty) * best_gz + (iz / tz);
    map.validate();
    return map;
}

// RIS activation schedule over L pilot slots, augmented with the constant
// all-ones row at index 0 that represents the always-present direct path.
// Every row j >= 1 is orthogonal to that row, which is what lets the direct
// path be isolated by averaging across slots.
struct Codebook {
    std::size_t num_groups = 0; // G
    std::size_t num_slots = 0;  // L
    CMatrix v_tilde;            // (G+1) x L

    // Rows 1..G: the per-group activation matrix V.
    CMatrix activation() const { return v_tilde.bottomRows(static_cast<Eigen::Index>(num_groups)); }

    // Wrap an arbitrary (G+1) x L activation matrix, enforcing the
    // invariants: all-ones first row, unit-modulus entries, and row sums
    // that vanish for rows 1..G.
    static Codebook from_rows(const CMatrix& vt) {
        if (vt.rows() < 2 || vt.cols() < 1)
            throw std::invalid_argument("Codebook: need at least 2 rows and 1 slot");
        require_finite(vt, "Codebook: v_tilde");
        const auto L = vt.cols();
        for (Eigen::Index i = 0; i < L; ++i)
            if (std::abs(vt(0, i) - cxd(1.0, 0.0)) > 1e-12)
                throw std::invalid_argument("Codebook: first row must be all ones");
        for (Eigen::Index r = 0; r < vt.rows(); ++r) {
            for (Eigen::Index i = 0; i < L; ++i)
                if (std::abs(std::abs(vt(r, i)) - 1.0) > 1e-12)
                    throw std::invalid_argument("Codebook: entries must have unit modulus");
            if (r >= 1 && std::abs(vt.row(r).sum()) > 1e-9 * std::sqrt(static_cast<double>(L)))
                throw std::invalid_argument("Codebook: row not orthogonal to the all-ones row");
        }
        Codebook cb;
        cb.num_groups = static_cast<std::size_t>(vt.rows()) - 1;
        cb.num_slots = static_cast<std::size_t>(L);
        cb.v_tilde = vt;
        return cb;
    }
};

// DFT schedule: row n at slot i is exp(-j*2*pi*n*i/L). Rows are mutually
// orthogonal (V_tilde * V_tilde^H = L*I), which keeps the gain-vector least
// squares perfectly conditioned. Requires L >= G+1 to separate G+1 unknowns.
inline Codebook build_dft_codebook(std::size_t G, std::size_t L) {
    if (L < G + 1)
        throw std::invalid_argument("build_dft_codebook: need L >= G+1 slots");
    Codebook cb;
    cb.num_groups = G;
    cb.num_slots = L;
    cb.v_tilde.resize(static_cast<Eigen::Index>(G + 1), static_cast<Eigen::Index>(L));
    for (std::size_t n = 0; n <= G; ++n)
        for (std::size_t i = 0; i < L; ++i)
            cb.v_tilde(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) =
                std::polar(1.0, -2.0 * kPi * static_cast<double>(n) * static_cast<double>(i) /
                                    static_cast<double>(L));
    return cb;
}

// Per-element phase vector: element n carries the phase of its group.
inline CVector expand_groups(const CVector& v_group, const GroupingMap& map) {
    if (static_cast<std::size_t>(v_group.size()) != map.num_groups)
        throw std::invalid_argument("expand_groups: group vector size mismatch");
    map.validate();
    CVector v(map.num_elements());
    for (std::size_t n = 0; n < map.num_elements(); ++n)
        v[static_cast<Eigen::Index>(n)] = v_group[static_cast<Eigen::Index>(map.group_of[n])];
    return v;
}

// CSV form: one row per v_tilde row, entries as alternating re,im pairs.
inline void write_codebook_csv(const Codebook& cb, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_codebook_csv: cannot open " + path);
    for (Eigen::Index r = 0; r < cb.v_tilde.rows(); ++r) {
        for (Eigen::Index i = 0; i < cb.v_tilde.cols(); ++i) {
            if (i)
                out << ',';
            out << format_double(cb.v_tilde(r, i).real()) << ','
                << format_double(cb.v_tilde(r, i).imag());
        }
        out << '\n';
    }
    if (!out)
        throw std::runtime_error("write_codebook_csv: write failed for " + path);
}

inline Codebook read_codebook_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_codebook_csv: cannot open " + path);
    std::vector<std::vector<cxd>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        auto cells = split(line, ',');
        if (cells.size() % 2 != 0)
            throw std::runtime_error("read_codebook_csv: odd cell count in row");
        std::vector<cxd> row;
        for (std::size_t i = 0; i < cells.size(); i += 2)
            row.emplace_back(parse_double(cells[i]), parse_double(cells[i + 1]));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("read_codebook_csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2)
        throw std::runtime_error("read_codebook_csv: need at least 2 rows");
    CMatrix vt(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t i = 0; i < rows[r].size(); ++i)
            vt(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = rows[r][i];
    return Codebook::from_rows(vt);
}

} // namespace risce

#endif
