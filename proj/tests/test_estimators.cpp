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

#include "risce/estimators.hpp"

#include <set>

using namespace risce;

namespace {

ScenarioConfig paper_config() {
    ScenarioConfig cfg; // defaults are the paper-scale scenario
    cfg.seed = 1;
    return cfg;
}

ScenarioConfig noiseless(ScenarioConfig cfg) {
    cfg.noise_dbm = -std::numeric_limits<double>::infinity();
    return cfg;
}

struct Trial {
    ChannelRealization real;
    GroundTruth truth;
    Codebook cb;
    AoaGrid grid;
    CMatrix dict;
    CMatrix y;
};

Trial make_trial(const ScenarioConfig& cfg, std::uint64_t stream_key) {
    Trial t;
    Rng rng = make_stream(cfg.seed, 0, stream_key);
    auto drawn = sample_channel(cfg, rng);
    t.real = drawn.first;
    t.truth = drawn.second;
    t.cb = build_dft_codebook(cfg.num_groups, cfg.num_slots);
    t.grid = make_grid(cfg.grid_size, t.real.theta0);
    t.dict = build_dictionary(cfg.ula(), t.grid);
    t.y = synthesize_rx(cfg, t.real, t.truth, t.cb, rng);
    return t;
}

} // namespace

TEST_CASE("project_direct: isolates the scaled direct path in the noiseless case") {
    const ScenarioConfig cfg = noiseless(paper_config());
    const Trial t = make_trial(cfg, 1);
    const CVector y_prime = project_direct(t.y, t.cb);
    const CVector expected =
        std::sqrt(cfg.tx_power_watt()) * (t.dict.rightCols(cfg.grid_size) * t.truth.z_bar);
    REQUIRE((y_prime - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("project_direct: zero input gives zero output") {
    const Codebook cb = build_dft_codebook(4, 8);
    REQUIRE(project_direct(CMatrix::Zero(6, 8), cb).norm() == 0.0);
}

TEST_CASE("project_direct: noise-only variance shrinks by the slot count") {
    const std::size_t m = 4, l = 16;
    const double n0 = 2.0;
    const Codebook cb = build_dft_codebook(8, l);
    Rng rng = make_stream(13);
    double acc = 0.0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const CVector noise = sample_cn(n0, m * l, rng);
        const CMatrix y = Eigen::Map<const CMatrix>(noise.data(), m, l);
        acc += project_direct(y, cb).squaredNorm();
    }
    const double per_element = acc / double(trials) / double(m);
    REQUIRE(per_element == Catch::Approx(n0 / double(l)).epsilon(0.05));
}

TEST_CASE("omp: one-sparse noiseless recovery is exact") {
    const UlaConfig ula{16, 0.5};
    const AoaGrid grid = make_grid(32, 0.11);
    const CMatrix dict = build_dictionary(ula, grid).rightCols(32);
    const CVector y = dict.col(5) * cxd(3.0, 4.0);
    const OmpResult res = omp(y, dict, 1);
    REQUIRE(res.support == std::vector<std::size_t>{5});
    REQUIRE(std::abs(res.z_hat[5] - cxd(3.0, 4.0)) < 1e-10);
}

TEST_CASE("omp: zero input exits early with empty support") {
    const CMatrix dict = build_dictionary(UlaConfig{8, 0.5}, make_grid(16, 0.0)).rightCols(16);
    const OmpResult res = omp(CVector::Zero(8), dict, 3);
    REQUIRE(res.support.empty());
    REQUIRE(res.z_hat.norm() == 0.0);
}

TEST_CASE("omp: sparsity larger than the system is rejected") {
    const CMatrix dict = build_dictionary(UlaConfig{4, 0.5}, make_grid(8, 0.0)).rightCols(8);
    REQUIRE_THROWS_AS(omp(CVector::Ones(4), dict, 5), std::invalid_argument);
}

TEST_CASE("omp: noiseless 3-sparse support recovery succeeds in at least 99 of 100 trials") {
    const UlaConfig ula{16, 0.5};
    int exact = 0;
    std::vector<int> failures;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng = make_stream(2024, 7, static_cast<std::uint64_t>(trial));
        const AoaGrid grid = make_grid(32, uniform_in(rng, -kPi / 2, kPi / 2));
        const CMatrix dict = build_dictionary(ula, grid).rightCols(32);
        std::set<std::size_t> support;
        while (support.size() < 3)
            support.insert(static_cast<std::size_t>(uniform01(rng) * 32.0));
        CVector y = CVector::Zero(16);
        const CVector gains = sample_cn(1.0, 3, rng);
        std::size_t gi = 0;
        for (std::size_t k : support)
            y += dict.col(static_cast<Eigen::Index>(k)) * gains[static_cast<Eigen::Index>(gi++)];
        const OmpResult res = omp(y, dict, 3);
        const std::set<std::size_t> got(res.support.begin(), res.support.end());
        if (got == support)
            ++exact;
        else
            failures.push_back(trial);
    }
    for (int f : failures)
        WARN("omp support confusion in trial " << f);
    REQUIRE(exact >= 99);
}

TEST_CASE("omp: residual norms are monotone and the refit residual is orthogonal") {
    Rng rng = make_stream(33);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index m = 12, n = 24;
        const CVector flat = sample_cn(1.0, m * n, rng);
        const CMatrix dict = Eigen::Map<const CMatrix>(flat.data(), m, n);
        const CVector y = sample_cn(1.0, m, rng);
        const OmpResult res = omp(y, dict, 4);
        for (std::size_t i = 1; i < res.residual_norms.size(); ++i)
            REQUIRE(res.residual_norms[i] <= res.residual_norms[i - 1] + 1e-12);
        const CVector r = y - dict * res.z_hat;
        for (std::size_t k : res.support)
            REQUIRE(std::abs(dict.col(static_cast<Eigen::Index>(k)).dot(r)) <=
                    1e-8 * dict.col(static_cast<Eigen::Index>(k)).norm() * y.norm());
    }
}

TEST_CASE("remove_direct: perfect cancellation leaves only the RIS term") {
    const ScenarioConfig cfg = noiseless(paper_config());
    const Trial t = make_trial(cfg, 2);
    const double sqrt_p = std::sqrt(cfg.tx_power_watt());
    const CVector z_obs = sqrt_p * t.truth.z_bar;
    const CMatrix y_ris = remove_direct(t.y, t.dict, z_obs, t.cb);
    const CMatrix expected = sqrt_p * (t.dict.col(0) * (t.real.gamma.adjoint() * t.cb.activation()));
    REQUIRE((y_ris - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("remove_direct: zero coefficients return the input unchanged") {
    const ScenarioConfig cfg = paper_config();
    const Trial t = make_trial(cfg, 3);
    const CMatrix y_ris = remove_direct(t.y, t.dict, CVector::Zero(cfg.grid_size), t.cb);
    REQUIRE((y_ris - t.y).norm() == 0.0);
}

TEST_CASE("remove_direct: zero gamma and perfect coefficients leave only noise-free zero") {
    ScenarioConfig cfg = noiseless(paper_config());
    Rng rng = make_stream(cfg.seed, 0, 4);
    auto [real, truth] = sample_channel(cfg, rng);
    real.gamma.setZero();
    const GroundTruth zeroed = make_ground_truth(cfg, real);
    const Codebook cb = build_dft_codebook(cfg.num_groups, cfg.num_slots);
    const CMatrix y = synthesize_rx(cfg, real, zeroed, cb, rng);
    const CMatrix dict = build_dictionary(cfg.ula(), make_grid(cfg.grid_size, real.theta0));
    const CVector z_obs = std::sqrt(cfg.tx_power_watt()) * zeroed.z_bar;
    REQUIRE(remove_direct(y, dict, z_obs, cb).norm() <= 1e-10 * y.norm());
}

TEST_CASE("estimate_gamma: exact round trip") {
    Rng rng = make_stream(55);
    const Codebook cb = build_dft_codebook(8, 12);
    const CVector a0 = ula_steering(UlaConfig{16, 0.5}, 0.37);
    const CVector gamma0 = sample_cn(1.0, 8, rng);
    const CMatrix y_ris = a0 * (gamma0.adjoint() * cb.activation());
    const CVector gamma = estimate_gamma(y_ris, a0, cb.activation());
    REQUIRE((gamma - gamma0).norm() <= 1e-10 * gamma0.norm());
}

TEST_CASE("estimate_gamma: zero observation gives zero gains") {
    const Codebook cb = build_dft_codebook(4, 8);
    const CVector a0 = ula_steering(UlaConfig{8, 0.5}, -0.2);
    REQUIRE(estimate_gamma(CMatrix::Zero(8, 8), a0, cb.activation()).norm() == 0.0);
}

TEST_CASE("estimate_gamma: returned point is a local minimum of the objective") {
    Rng rng = make_stream(66);
    const Codebook cb = build_dft_codebook(4, 8);
    const CVector a0 = ula_steering(UlaConfig{8, 0.5}, 0.9);
    const CVector gamma0 = sample_cn(1.0, 4, rng);
    CMatrix y_ris = a0 * (gamma0.adjoint() * cb.activation());
    // Perturb with noise so the optimum is strictly interior.
    const CVector noise = sample_cn(0.01, y_ris.size(), rng);
    y_ris += Eigen::Map<const CMatrix>(noise.data(), y_ris.rows(), y_ris.cols());

    const CVector gamma = estimate_gamma(y_ris, a0, cb.activation());
    auto objective = [&](const CVector& g) {
        return (y_ris - a0 * (g.adjoint() * cb.activation())).squaredNorm();
    };
    const double at_min = objective(gamma);
    for (Eigen::Index i = 0; i < gamma.size(); ++i)
        for (cxd step : {cxd(1e-4, 0), cxd(-1e-4, 0), cxd(0, 1e-4), cxd(0, -1e-4)}) {
            CVector nudged = gamma;
            nudged[i] += step;
            REQUIRE(objective(nudged) > at_min);
        }
}

TEST_CASE("run_algorithm1: noiseless on-grid estimation is near exact") {
    const ScenarioConfig cfg = noiseless(paper_config());
    const Trial t = make_trial(cfg, 5);
    const EstimationResult res = run_algorithm1(t.y, t.dict, t.cb, cfg);
    REQUIRE(nmse(res.h_d_hat, t.truth.h_d) < 1e-8);
    REQUIRE(nmse(res.phi_hat, t.truth.phi) < 1e-8);
    REQUIRE(res.support.size() == cfg.num_paths);
}

TEST_CASE("run_algorithm1: S = 0 gives a zero direct estimate and a clean RIS estimate") {
    ScenarioConfig cfg = noiseless(paper_config());
    cfg.num_paths = 0;
    const Trial t = make_trial(cfg, 6);
    const EstimationResult res = run_algorithm1(t.y, t.dict, t.cb, cfg);
    REQUIRE(res.h_d_hat.norm() == 0.0);
    REQUIRE(nmse(res.phi_hat, t.truth.phi) < 1e-8);
}

TEST_CASE("run_algorithm1: fixed seed reproduces identical estimates") {
    const ScenarioConfig cfg = paper_config();
    const Trial a = make_trial(cfg, 7);
    const Trial b = make_trial(cfg, 7);
    const EstimationResult ra = run_algorithm1(a.y, a.dict, a.cb, cfg);
    const EstimationResult rb = run_algorithm1(b.y, b.dict, b.cb, cfg);
    REQUIRE((ra.h_d_hat - rb.h_d_hat).norm() == 0.0);
    REQUIRE((ra.phi_hat - rb.phi_hat).norm() == 0.0);
}

TEST_CASE("run_algorithm1: scaling the observation scales the recovered coefficients") {
    // z and the channel estimates pick up the factor c; gamma appears in the
    // model only through gamma^H, so the gain vector itself picks up conj(c).
    const ScenarioConfig cfg = noiseless(paper_config());
    const Trial t = make_trial(cfg, 8);
    const cxd c(0.8, -1.7);
    const EstimationResult base = run_algorithm1(t.y, t.dict, t.cb, cfg);
    const EstimationResult scaled = run_algorithm1(c * t.y, t.dict, t.cb, cfg);
    REQUIRE((scaled.z_bar_hat - c * base.z_bar_hat).norm() <= 1e-9 * base.z_bar_hat.norm());
    REQUIRE((scaled.gamma_hat - std::conj(c) * base.gamma_hat).norm() <=
            1e-9 * base.gamma_hat.norm());
    REQUIRE((scaled.phi_hat - c * base.phi_hat).norm() <= 1e-9 * base.phi_hat.norm());
    // NMSE against equally scaled truth is unchanged.
    REQUIRE(nmse(scaled.h_d_hat, CMatrix(c * t.truth.h_d)) ==
            Catch::Approx(nmse(base.h_d_hat, t.truth.h_d)).margin(1e-12));
}

TEST_CASE("ls_baseline: noiseless joint recovery is exact") {
    const ScenarioConfig cfg = noiseless(paper_config());
    const Trial t = make_trial(cfg, 9);
    const LsBaselineResult res = ls_baseline(t.y, t.cb, cfg);
    REQUIRE(nmse(res.h_d_hat, t.truth.h_d) < 1e-10);
    // The unstructured estimate recovers Phi = a0 * gamma^H as well.
    REQUIRE(nmse(res.phi_hat, t.truth.phi) < 1e-10);
}

TEST_CASE("ls_baseline: noise-only energy matches the propagation formula") {
    ScenarioConfig cfg;
    cfg.bs_antennas = 4;
    cfg.ris_ny = 2;
    cfg.ris_nz = 2;
    cfg.num_groups = 4;
    cfg.grid_size = 8;
    cfg.num_slots = 8;
    cfg.num_paths = 1;
    cfg.noise_dbm = 0.0; // 1 mW noise so the effect is visible
    cfg.tx_power_dbm = 10.0;
    const Codebook cb = build_dft_codebook(cfg.num_groups, cfg.num_slots);
    Rng rng = make_stream(414);
    double acc = 0.0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const CVector noise =
            sample_cn(cfg.noise_watt(), cfg.bs_antennas * cfg.num_slots, rng);
        const CMatrix y =
            Eigen::Map<const CMatrix>(noise.data(), cfg.bs_antennas, cfg.num_slots);
        acc += ls_baseline(y, cb, cfg).h_d_hat.squaredNorm();
    }
    const double expected = double(cfg.bs_antennas) * cfg.noise_watt() /
                            (double(cfg.num_slots) * cfg.tx_power_watt());
    REQUIRE(acc / double(trials) == Catch::Approx(expected).epsilon(0.05));
}

TEST_CASE("ls_baseline: too few slots are rejected") {
    ScenarioConfig cfg = paper_config();
    Codebook cb = build_dft_codebook(cfg.num_groups, cfg.num_slots);
    cb.num_slots = cfg.num_groups; // lie about the slot count
    REQUIRE_THROWS_AS(ls_baseline(CMatrix::Zero(cfg.bs_antennas, cfg.num_groups), cb, cfg),
                      std::invalid_argument);
}

TEST_CASE("ls_baseline and run_algorithm1 share output shapes") {
    const ScenarioConfig cfg = paper_config();
    const Trial t = make_trial(cfg, 10);
    const EstimationResult alg = run_algorithm1(t.y, t.dict, t.cb, cfg);
    const LsBaselineResult ls = ls_baseline(t.y, t.cb, cfg);
    REQUIRE(alg.h_d_hat.size() == ls.h_d_hat.size());
    REQUIRE(alg.phi_hat.rows() == ls.phi_hat.rows());
    REQUIRE(alg.phi_hat.cols() == ls.phi_hat.cols());
}

TEST_CASE("nmse: canonical values") {
    CMatrix truth(2, 1);
    truth << cxd(1, 0), cxd(0, 1);
    REQUIRE(nmse(truth, truth) == 0.0);
    REQUIRE(nmse(CMatrix::Zero(2, 1), truth) == 1.0);
    REQUIRE(nmse(2.0 * truth, truth) == Catch::Approx(1.0));
}

TEST_CASE("nmse: zero truth and shape mismatches are rejected") {
    REQUIRE_THROWS_AS(nmse(CMatrix::Zero(2, 1), CMatrix::Zero(2, 1)), std::invalid_argument);
    REQUIRE_THROWS_AS(nmse(CMatrix::Zero(2, 1), CMatrix::Ones(3, 1)), std::invalid_argument);
}
