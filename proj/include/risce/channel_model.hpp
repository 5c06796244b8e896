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

#ifndef RISCE_CHANNEL_MODEL_HPP
#define RISCE_CHANNEL_MODEL_HPP

#include "risce/array_geometry.hpp"
#include "risce/codebook.hpp"
#include "risce/numerics.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace risce {

// All scalar parameters of one experiment. Defaults: 16-antenna ULA at the
// BS, 16x16 UPA at the RIS in 64 groups, 32-point AoA grid, 65 pilot slots,
// 3 scatter paths, -110 dBm noise.
struct ScenarioConfig {
    std::size_t bs_antennas = 16;  // M
    std::size_t ris_ny = 16;
    std::size_t ris_nz = 16;
    std::size_t num_groups = 64;   // G
    std::size_t grid_size = 32;    // K
    std::size_t num_slots = 65;    // L
    std::size_t num_paths = 3;     // S
    double noise_dbm = -110.0;     // -inf means noiseless
    double tx_power_dbm = 0.0;
    cxd pilot_symbol = cxd(1.0, 0.0);
    std::uint64_t seed = 1;
    bool off_grid = false;

    std::size_t ris_elements() const { return ris_ny * ris_nz; }
    double noise_watt() const {
        return noise_dbm == -std::numeric_limits<double>::infinity() ? 0.0
                                                                     : dbm_to_watt(noise_dbm);
    }
    double tx_power_watt() const { return dbm_to_watt(tx_power_dbm); }
    UlaConfig ula() const { return UlaConfig{bs_antennas, 0.5}; }
    UpaConfig upa() const { return UpaConfig{ris_ny, ris_nz, 0.5}; }
    GroupingMap grouping() const { return make_tiled_grouping(upa(), num_groups); }

    void validate() const {
        if (bs_antennas < 1)
            throw std::invalid_argument("config: m must be >= 1");
        if (ris_ny < 1 || ris_nz < 1)
            throw std::invalid_argument("config: ny and nz must be >= 1");
        if (grid_size < 1)
            throw std::invalid_argument("config: k must be >= 1");
        if (num_groups < 1 || num_groups > ris_elements())
            throw std::invalid_argument("config: g must be in 1..N");
        if (num_slots < num_groups + 1)
            throw std::invalid_argument("config: l must be >= g+1");
        if (num_paths > grid_size)
            throw std::invalid_argument("config: s must be <= k");
        if (!(noise_watt() >= 0.0))
            throw std::invalid_argument("config: noise level invalid");
        if (!std::isfinite(tx_power_dbm))
            throw std::invalid_argument("config: tx_power_dbm must be finite");
        if (pilot_symbol == cxd(0.0, 0.0))
            throw std::invalid_argument("config: pilot_symbol must be nonzero");
        grouping(); // throws when G does not tile the UPA
    }
};

struct ScatterPath {
    std::size_t grid_index = 0; // k_q in 1..K
    cxd beta;                   // complex path gain
    double delta = 0.0;         // true AoA minus grid angle, radians
};

// One draw of every physical unknown.
struct ChannelRealization {
    double theta0 = 0.0;       // RIS-BS AoA at the BS, grid index 0
    cxd c_r, c_v;              // RIS-BS and user-RIS path gains
    double theta_t_ris = 0.0;  // AoD at the RIS toward the BS
    double theta_r_ris = 0.0;  // AoA at the RIS from the user
    CVector gamma;             // G, group-level effective gains
    std::vector<ScatterPath> paths;
    std::vector<double> delta_vec; // K+1, zero at index 0 and off support
};

// Channel quantities derived from a realization.
struct GroundTruth {
    CVector h_d;     // M, direct channel (residual-corrected steering)
    CMatrix phi;     // M x G, rank-one RIS channel a(theta0)*gamma^H
    CVector z_bar;   // K, sparse gains on grid indices 1..K
    CMatrix q_tilde; // (K+1) x (G+1): column 0 = [0; z_bar], row 0 = [0, gamma^H]
};

// Element-level effective RIS gains: entry n collects both hops through
// element n so that the cascade H_r * diag(v) * h_v collapses to
// a_BS(theta0) * gamma^H * v exactly, for any phase vector v.
inline CVector compute_gamma_elements(cxd c_r, cxd c_v, double theta_t_ris, double theta_r_ris,
                                      const UpaConfig& upa) {
    const CVector a_t = upa_steering(upa, theta_t_ris, 0.0);
    const CVector a_r = upa_steering(upa, theta_r_ris, 0.0);
    return std::conj(c_r * c_v) * a_t.cwiseProduct(a_r.conjugate());
}

// Group-level gains: elements sharing a phase add coherently, so the grouped
// observation model stays exact with gamma_g = sum of member gains.
inline CVector compute_gamma(cxd c_r, cxd c_v, double theta_t_ris, double theta_r_ris,
                             const UpaConfig& upa, const GroupingMap& map) {
    if (map.num_elements() != upa.size())
        throw std::invalid_argument("compute_gamma: grouping does not cover the array");
    const CVector g_el = compute_gamma_elements(c_r, c_v, theta_t_ris, theta_r_ris, upa);
    CVector g = CVector::Zero(static_cast<Eigen::Index>(map.num_groups));
    for (std::size_t n = 0; n < map.num_elements(); ++n)
        g[static_cast<Eigen::Index>(map.group_of[n])] += g_el[static_cast<Eigen::Index>(n)];
    return g;
}

// Rebuild the derived channel quantities from a realization. Deterministic,
// so tests may edit a realization and re-derive consistent truth.
inline GroundTruth make_ground_truth(const ScenarioConfig& cfg, const ChannelRealization& real) {
    const std::size_t K = cfg.grid_size;
    const AoaGrid grid = make_grid(K, real.theta0);
    const CMatrix A = build_corrected_dictionary(cfg.ula(), grid, real.delta_vec);

    GroundTruth truth;
    truth.z_bar = CVector::Zero(static_cast<Eigen::Index>(K));
    for (const auto& p : real.paths)
        truth.z_bar[static_cast<Eigen::Index>(p.grid_index - 1)] = p.beta;

    truth.h_d = A.rightCols(static_cast<Eigen::Index>(K)) * truth.z_bar;

    const CVector a0 = ula_steering(cfg.ula(), real.theta0);
    truth.phi = a0 * real.gamma.adjoint();

    truth.q_tilde = CMatrix::Zero(static_cast<Eigen::Index>(K + 1),
                                  static_cast<Eigen::Index>(cfg.num_groups + 1));
    truth.q_tilde.col(0).tail(static_cast<Eigen::Index>(K)) = truth.z_bar;
    truth.q_tilde.row(0).tail(static_cast<Eigen::Index>(cfg.num_groups)) = real.gamma.adjoint();
    return truth;
}

// Draw one channel: S distinct grid indices, CN(0,1) path gains, uniform
// angles, and (when off_grid) per-path residuals uniform within half a grid
// cell. The residual uniforms are consumed even on-grid so that on/off-grid
// runs with the same seed share every other random quantity.
inline std::pair<ChannelRealization, GroundTruth> sample_channel(const ScenarioConfig& cfg,
                                                                 Rng& rng) {
    if (cfg.num_paths > cfg.grid_size)
        throw std::invalid_argument("sample_channel: s must be <= k");

    const std::size_t K = cfg.grid_size;
    ChannelRealization real;

    std::vector<std::size_t> support;
    std::vector<bool> used(K + 1, false);
    while (support.size() < cfg.num_paths) {
        const std::size_t k =
            1 + std::min<std::size_t>(K - 1, static_cast<std::size_t>(uniform01(rng) *
                                                                      static_cast<double>(K)));
        if (!used[k]) {
            used[k] = true;
            support.push_back(k);
        }
    }

    const CVector betas = sample_cn(1.0, static_cast<Eigen::Index>(cfg.num_paths), rng);
    real.c_r = sample_cn(1.0, 1, rng)[0];
    real.c_v = sample_cn(1.0, 1, rng)[0];
    real.theta0 = uniform_in(rng, -kPi / 2.0, kPi / 2.0);
    real.theta_t_ris = uniform_in(rng, -kPi / 2.0, kPi / 2.0);
    real.theta_r_ris = uniform_in(rng, -kPi / 2.0, kPi / 2.0);

    const AoaGrid grid = make_grid(K, real.theta0);
    real.delta_vec.assign(K + 1, 0.0);
    real.paths.resize(cfg.num_paths);
    for (std::size_t q = 0; q < cfg.num_paths; ++q) {
        const std::size_t k = support[q];
        double delta = (2.0 * uniform01(rng) - 1.0) * grid.half_cell(k);
        if (!cfg.off_grid)
            delta = 0.0;
        real.paths[q] = ScatterPath{k, betas[static_cast<Eigen::Index>(q)], delta};
        real.delta_vec[k] = delta;
    }

    real.gamma = compute_gamma(real.c_r, real.c_v, real.theta_t_ris, real.theta_r_ris, cfg.upa(),
                               cfg.grouping());
    return {real, make_ground_truth(cfg, real)};
}

// Received pilot matrix over L slots:
//   Y = sqrt(P) * x * A(delta) * Q_tilde * V_tilde + N,
// with N i.i.d. CN(0, N0). On-grid realizations have delta = 0, making the
// corrected and plain dictionaries coincide.
inline CMatrix synthesize_rx(const ScenarioConfig& cfg, const ChannelRealization& real,
                             const GroundTruth& truth, const Codebook& cb, Rng& rng) {
    if (cb.num_groups != cfg.num_groups || cb.num_slots != cfg.num_slots)
        throw std::invalid_argument("synthesize_rx: codebook dimensions mismatch config");
    if (truth.q_tilde.rows() != static_cast<Eigen::Index>(cfg.grid_size + 1) ||
        truth.q_tilde.cols() != static_cast<Eigen::Index>(cfg.num_groups + 1))
        throw std::invalid_argument("synthesize_rx: q_tilde dimensions mismatch config");

    const AoaGrid grid = make_grid(cfg.grid_size, real.theta0);
    const CMatrix A = build_corrected_dictionary(cfg.ula(), grid, real.delta_vec);
    const cxd scale = std::sqrt(cfg.tx_power_watt()) * cfg.pilot_symbol;

    CMatrix y = scale * (A * (truth.q_tilde * cb.v_tilde));
    const CVector noise = sample_cn(cfg.noise_watt(),
                                    static_cast<Eigen::Index>(cfg.bs_antennas * cfg.num_slots), rng);
    y += Eigen::Map<const CMatrix>(noise.data(), static_cast<Eigen::Index>(cfg.bs_antennas),
                                   static_cast<Eigen::Index>(cfg.num_slots));
    return y;
}

} // namespace risce

#endif
