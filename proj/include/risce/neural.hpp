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

#ifndef RISCE_NEURAL_HPP
#define RISCE_NEURAL_HPP

#include "risce/channel_model.hpp"
#include "risce/estimators.hpp"
#include "risce/mlp.hpp"
#include "risce/text.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

namespace risce {

// Real feature vector [Re vec(Y); Im vec(Y)] normalized by the per-sample
// RMS ||Y||_F / sqrt(M*L), so features are invariant to positive real
// scaling of Y. A zero matrix maps to the zero vector.
inline RVector featurize(const CMatrix& y) {
    const Eigen::Index m = y.rows(), l = y.cols();
    RVector f(2 * m * l);
    const double norm = y.norm();
    const double rms = norm / std::sqrt(static_cast<double>(m * l));
    const double inv = norm == 0.0 ? 0.0 : 1.0 / rms;
    Eigen::Index idx = 0;
    for (Eigen::Index c = 0; c < l; ++c)
        for (Eigen::Index r = 0; r < m; ++r)
            f[idx++] = y(r, c).real() * inv;
    for (Eigen::Index c = 0; c < l; ++c)
        for (Eigen::Index r = 0; r < m; ++r)
            f[idx++] = y(r, c).imag() * inv;
    return f;
}

// Supervised examples stored column-wise: features (2*M*L), grid occupancy
// (K entries, 0/1), and residuals normalized to [-1, 1] by the half cell of
// their grid point (zero off support).
struct TrainingSet {
    RMatrix features;  // F x n
    RMatrix occupancy; // K x n
    RMatrix residuals; // K x n

    Eigen::Index size() const { return features.cols(); }
    Eigen::Index feature_dim() const { return features.rows(); }
    Eigen::Index grid_size() const { return occupancy.rows(); }
};

// Draw n independent scenarios and label them from the realization. When
// power_min/power_max are given, the transmit power of each example is
// uniform over that range; otherwise cfg.tx_power_dbm is used as-is.
inline TrainingSet generate_dataset(const ScenarioConfig& cfg, std::size_t n_samples, Rng& rng,
                                    double power_min = std::numeric_limits<double>::quiet_NaN(),
                                    double power_max = std::numeric_limits<double>::quiet_NaN()) {
    if (n_samples < 1)
        throw std::invalid_argument("generate_dataset: need at least one sample");
    const std::size_t K = cfg.grid_size;
    const Eigen::Index fdim =
        static_cast<Eigen::Index>(2 * cfg.bs_antennas * cfg.num_slots);
    const Codebook cb = build_dft_codebook(cfg.num_groups, cfg.num_slots);
    const bool randomize_power = std::isfinite(power_min) && std::isfinite(power_max);

    TrainingSet set;
    set.features.resize(fdim, static_cast<Eigen::Index>(n_samples));
    set.occupancy = RMatrix::Zero(static_cast<Eigen::Index>(K),
                                  static_cast<Eigen::Index>(n_samples));
    set.residuals = RMatrix::Zero(static_cast<Eigen::Index>(K),
                                  static_cast<Eigen::Index>(n_samples));

    for (std::size_t i = 0; i < n_samples; ++i) {
        ScenarioConfig c = cfg;
        if (randomize_power)
            c.tx_power_dbm = uniform_in(rng, power_min, power_max);
        auto [real, truth] = sample_channel(c, rng);
        const CMatrix y = synthesize_rx(c, real, truth, cb, rng);
        set.features.col(static_cast<Eigen::Index>(i)) = featurize(y);
        const AoaGrid grid = make_grid(K, real.theta0);
        for (const auto& p : real.paths) {
            const auto row = static_cast<Eigen::Index>(p.grid_index - 1);
            set.occupancy(row, static_cast<Eigen::Index>(i)) = 1.0;
            const double hc = grid.half_cell(p.grid_index);
            set.residuals(row, static_cast<Eigen::Index>(i)) = hc == 0.0 ? 0.0 : p.delta / hc;
        }
    }
    return set;
}

// One example per row: features, then occupancy, then residual labels.
inline void write_dataset_csv(const TrainingSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_dataset_csv: cannot open " + path);
    for (Eigen::Index i = 0; i < set.size(); ++i) {
        for (Eigen::Index r = 0; r < set.features.rows(); ++r) {
            if (r)
                out << ',';
            out << format_double(set.features(r, i));
        }
        for (Eigen::Index r = 0; r < set.occupancy.rows(); ++r)
            out << ',' << format_double(set.occupancy(r, i));
        for (Eigen::Index r = 0; r < set.residuals.rows(); ++r)
            out << ',' << format_double(set.residuals(r, i));
        out << '\n';
    }
    if (!out)
        throw std::runtime_error("write_dataset_csv: write failed for " + path);
}

inline TrainingSet read_dataset_csv(const std::string& path, Eigen::Index feature_dim,
                                    Eigen::Index grid_size) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_dataset_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        auto cells = split(line, ',');
        if (static_cast<Eigen::Index>(cells.size()) != feature_dim + 2 * grid_size)
            throw std::runtime_error("read_dataset_csv: wrong column count");
        std::vector<double> row(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            row[j] = parse_double(cells[j]);
        rows.push_back(std::move(row));
    }
    TrainingSet set;
    set.features.resize(feature_dim, static_cast<Eigen::Index>(rows.size()));
    set.occupancy.resize(grid_size, static_cast<Eigen::Index>(rows.size()));
    set.residuals.resize(grid_size, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        for (Eigen::Index r = 0; r < feature_dim; ++r)
            set.features(r, col) = rows[i][static_cast<std::size_t>(r)];
        for (Eigen::Index r = 0; r < grid_size; ++r)
            set.occupancy(r, col) = rows[i][static_cast<std::size_t>(feature_dim + r)];
        for (Eigen::Index r = 0; r < grid_size; ++r)
            set.residuals(r, col) =
                rows[i][static_cast<std::size_t>(feature_dim + grid_size + r)];
    }
    return set;
}

// Indices (1..K) of the S largest occupancy scores; ties break toward the
// lower index. Always returns exactly S indices, ascending.
inline std::vector<std::size_t> detect_grid_aoas(const MlpModel& model, const RVector& features,
                                                 std::size_t sparsity) {
    const RVector scores = mlp_forward(model, features);
    const std::size_t k = static_cast<std::size_t>(scores.size());
    if (sparsity > k)
        throw std::invalid_argument("detect_grid_aoas: sparsity exceeds grid size");
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        const double va = scores[static_cast<Eigen::Index>(a)];
        const double vb = scores[static_cast<Eigen::Index>(b)];
        return va > vb || (va == vb && a < b);
    });
    std::vector<std::size_t> support(order.begin(),
                                     order.begin() + static_cast<std::ptrdiff_t>(sparsity));
    for (auto& s : support)
        s += 1;
    std::sort(support.begin(), support.end());
    return support;
}

// Residual angles from the per-grid-point regressors: the tanh output of
// net k scales to +- half_cell(k), so corrected angles never leave the cell.
// Entries off the support and index 0 stay zero.
inline std::vector<double> predict_residuals(const std::vector<MlpModel>& nets,
                                             const RVector& features,
                                             const std::vector<std::size_t>& support,
                                             const AoaGrid& grid) {
    std::vector<double> delta(grid.size() + 1, 0.0);
    for (std::size_t k : support) {
        if (k < 1 || k > grid.size())
            throw std::invalid_argument("predict_residuals: support index outside 1..K");
        if (k > nets.size())
            throw std::invalid_argument("predict_residuals: no model for grid index " +
                                        std::to_string(k));
        const RVector out = mlp_forward(nets[k - 1], features);
        delta[k] = out[0] * grid.half_cell(k);
    }
    return delta;
}

// The occupancy network plus one residual regressor per grid point.
struct ModelBundle {
    MlpModel occupancy;
    std::vector<MlpModel> residuals;
};

inline std::string residual_model_filename(std::size_t grid_index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "residual_%03zu.risnn", grid_index);
    return buf;
}

inline void save_model_bundle(const ModelBundle& bundle, const std::string& dir) {
    std::filesystem::create_directories(dir);
    save_model(bundle.occupancy, dir + "/occupancy.risnn");
    for (std::size_t k = 1; k <= bundle.residuals.size(); ++k)
        save_model(bundle.residuals[k - 1], dir + "/" + residual_model_filename(k));
}

inline ModelBundle load_model_bundle(const std::string& dir, std::size_t feature_dim,
                                     std::size_t grid_size) {
    ModelBundle bundle;
    const std::string occ_path = dir + "/occupancy.risnn";
    if (!std::filesystem::exists(occ_path))
        throw std::runtime_error("load_model_bundle: missing " + occ_path);
    bundle.occupancy = load_model(occ_path);
    if (bundle.occupancy.input_dim() != feature_dim ||
        bundle.occupancy.output_dim() != grid_size)
        throw std::runtime_error("load_model_bundle: occupancy model dimensions mismatch scenario");
    for (std::size_t k = 1; k <= grid_size; ++k) {
        const std::string path = dir + "/" + residual_model_filename(k);
        if (!std::filesystem::exists(path))
            throw std::runtime_error("load_model_bundle: missing " + path);
        bundle.residuals.push_back(load_model(path));
        if (bundle.residuals.back().input_dim() != feature_dim ||
            bundle.residuals.back().output_dim() != 1)
            throw std::runtime_error("load_model_bundle: residual model " + path +
                                     " dimensions mismatch scenario");
    }
    return bundle;
}

struct BundleTrainOptions {
    std::vector<std::size_t> occupancy_hidden = {512, 256};
    std::vector<std::size_t> residual_hidden = {128, 64};
    TrainOptions occupancy;
    TrainOptions residual;
    std::size_t threads = 1; // parallel residual-net jobs; determinism is per-net
};

inline MlpModel train_occupancy_model(const TrainingSet& set, const BundleTrainOptions& opts,
                                      Rng& rng) {
    std::vector<std::size_t> sizes;
    sizes.push_back(static_cast<std::size_t>(set.feature_dim()));
    sizes.insert(sizes.end(), opts.occupancy_hidden.begin(), opts.occupancy_hidden.end());
    sizes.push_back(static_cast<std::size_t>(set.grid_size()));
    MlpModel model = MlpModel::init(sizes, Activation::Sigmoid, rng);
    TrainingData data{set.features, set.occupancy, RMatrix()};
    train(model, data, Loss::BinaryCrossEntropy, opts.occupancy, rng);
    return model;
}

// Train the regressor for grid point k (1-based) on the examples where that
// point is occupied; with the set pre-filtered the mask is all ones, which
// is exactly the masked-MSE objective restricted to this grid point.
inline MlpModel train_residual_model(const TrainingSet& set, std::size_t grid_index,
                                     const BundleTrainOptions& opts, Rng& rng) {
    const auto row = static_cast<Eigen::Index>(grid_index - 1);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < set.size(); ++i)
        if (set.occupancy(row, i) != 0.0)
            idx.push_back(i);

    std::vector<std::size_t> sizes;
    sizes.push_back(static_cast<std::size_t>(set.feature_dim()));
    sizes.insert(sizes.end(), opts.residual_hidden.begin(), opts.residual_hidden.end());
    sizes.push_back(1);
    MlpModel model = MlpModel::init(sizes, Activation::Tanh, rng);
    if (idx.empty())
        return model; // nothing to learn from; tanh head already predicts ~0

    TrainingData data;
    data.features.resize(set.feature_dim(), static_cast<Eigen::Index>(idx.size()));
    data.targets.resize(1, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        data.features.col(static_cast<Eigen::Index>(j)) = set.features.col(idx[j]);
        data.targets(0, static_cast<Eigen::Index>(j)) = set.residuals(row, idx[j]);
    }
    train(model, data, Loss::MaskedMse, opts.residual, rng);
    return model;
}

// Residual nets are independent jobs keyed by (seed, grid index), so the
// result does not depend on the number of worker threads.
inline std::vector<MlpModel> train_residual_models(const TrainingSet& set,
                                                   const BundleTrainOptions& opts,
                                                   std::uint64_t seed) {
    const std::size_t K = static_cast<std::size_t>(set.grid_size());
    std::vector<MlpModel> nets(K);
    const std::size_t workers = std::max<std::size_t>(1, opts.threads);
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w]() {
            for (std::size_t k = 1 + w; k <= K; k += workers) {
                Rng rng = make_stream(seed, 0x726573ULL, k);
                nets[k - 1] = train_residual_model(set, k, opts, rng);
            }
        }));
    for (auto& j : jobs)
        j.get();
    return nets;
}

enum class OffgridMode { Network, PerfectAoa, ZeroResidual };

namespace detail {

// Shared tail of the off-grid pipeline: fit the sparse gains on the chosen
// (possibly corrected) columns of the projected observation, cancel the
// direct path, and estimate the RIS gain vector.
inline EstimationResult offgrid_refit(const CMatrix& y, const CMatrix& dict,
                                      const std::vector<std::size_t>& support,
                                      const std::vector<double>& delta, const Codebook& cb,
                                      const ScenarioConfig& cfg) {
    const Eigen::Index k = dict.cols() - 1;
    const cxd scale = std::sqrt(cfg.tx_power_watt()) * cfg.pilot_symbol;
    const CVector y_prime = project_direct(y, cb);

    CVector z_obs = CVector::Zero(k);
    if (!support.empty()) {
        CMatrix cols(dict.rows(), static_cast<Eigen::Index>(support.size()));
        for (std::size_t j = 0; j < support.size(); ++j)
            cols.col(static_cast<Eigen::Index>(j)) =
                dict.col(static_cast<Eigen::Index>(support[j]));
        const CVector beta = solve_least_squares(cols, y_prime);
        for (std::size_t j = 0; j < support.size(); ++j)
            z_obs[static_cast<Eigen::Index>(support[j] - 1)] =
                beta[static_cast<Eigen::Index>(j)];
    }

    const CMatrix y_ris = remove_direct(y, dict, z_obs, cb);
    const CVector gamma_obs = estimate_gamma(y_ris, dict.col(0), cb.activation());

    EstimationResult res;
    res.z_bar_hat = z_obs / scale;
    res.h_d_hat = dict.rightCols(k) * res.z_bar_hat;
    res.gamma_hat = gamma_obs / scale;
    res.phi_hat = dict.col(0) * res.gamma_hat.adjoint();
    res.support = support;
    res.delta_hat = delta;
    return res;
}

} // namespace detail

// Off-grid estimation pipeline. Network mode detects the support with the
// occupancy net and corrects grid angles with the residual nets before the
// least-squares gain refit on the corrected columns. PerfectAoa models the
// reference where the AoAs (support and residuals) are known exactly and
// only the gains are estimated. ZeroResidual keeps the uncorrected grid,
// i.e. the plain on-grid algorithm applied to off-grid data.
inline EstimationResult estimate_channels_offgrid(const CMatrix& y, const ModelBundle* models,
                                                  const AoaGrid& grid, const Codebook& cb,
                                                  const ScenarioConfig& cfg, OffgridMode mode,
                                                  const ChannelRealization* truth = nullptr) {
    const UlaConfig ula = cfg.ula();

    if (mode == OffgridMode::PerfectAoa) {
        if (!truth)
            throw std::invalid_argument("estimate_channels_offgrid: perfect mode needs the realization");
        std::vector<std::size_t> support;
        for (const auto& p : truth->paths)
            support.push_back(p.grid_index);
        std::sort(support.begin(), support.end());
        const CMatrix dict = build_corrected_dictionary(ula, grid, truth->delta_vec);
        return detail::offgrid_refit(y, dict, support, truth->delta_vec, cb, cfg);
    }
    if (mode == OffgridMode::ZeroResidual)
        return run_algorithm1(y, build_dictionary(ula, grid), cb, cfg);

    if (!models)
        throw std::invalid_argument("estimate_channels_offgrid: network mode needs models");
    const RVector features = featurize(y);
    const std::vector<std::size_t> support =
        detect_grid_aoas(models->occupancy, features, cfg.num_paths);
    const std::vector<double> delta =
        predict_residuals(models->residuals, features, support, grid);
    const CMatrix dict = build_corrected_dictionary(ula, grid, delta);
    return detail::offgrid_refit(y, dict, support, delta, cb, cfg);
}

} // namespace risce

#endif
