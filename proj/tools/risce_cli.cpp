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

#include <CLI11.hpp>

#include "risce/risce.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>

namespace fs = std::filesystem;
using namespace risce;

namespace {

struct CommonArgs {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> methods;
    std::optional<std::size_t> threads;
    bool off_grid = false;
    bool plot = false;
};

SweepSpec resolve_spec(const CommonArgs& args) {
    SweepSpec spec = args.config.empty() ? SweepSpec{} : load_config(args.config);
    if (args.seed)
        spec.base.seed = *args.seed;
    if (args.trials)
        spec.trials_per_point = *args.trials;
    if (args.off_grid)
        spec.base.off_grid = true;
    if (args.threads)
        spec.threads = *args.threads;
    if (args.methods) {
        spec.methods.clear();
        for (const auto& cell : split(*args.methods, ','))
            spec.methods.push_back(parse_method(cell));
    }
    if (spec.models_dir.empty())
        spec.models_dir = (fs::path(args.out) / "models").string();
    spec.validate();
    return spec;
}

void write_complex_table(const std::string& path, const std::vector<std::string>& names,
                         const std::vector<const CMatrix*>& mats) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out << "row,col";
    for (const auto& n : names)
        out << ',' << n << "_re," << n << "_im";
    out << '\n';
    const CMatrix& first = *mats.front();
    for (Eigen::Index c = 0; c < first.cols(); ++c)
        for (Eigen::Index r = 0; r < first.rows(); ++r) {
            out << r << ',' << c;
            for (const CMatrix* m : mats)
                out << ',' << format_double((*m)(r, c).real()) << ','
                    << format_double((*m)(r, c).imag());
            out << '\n';
        }
}

int cmd_simulate(const CommonArgs& args) {
    const SweepSpec spec = resolve_spec(args);
    const ScenarioConfig cfg = spec.base;
    const fs::path dir = fs::path(args.out) / "simulate";
    fs::create_directories(dir);

    Rng rng = make_stream(cfg.seed, 0, 0);
    auto [real, truth] = sample_channel(cfg, rng);
    const Codebook cb = build_dft_codebook(cfg.num_groups, cfg.num_slots);
    const CMatrix y = synthesize_rx(cfg, real, truth, cb, rng);
    const AoaGrid grid = make_grid(cfg.grid_size, real.theta0);
    const CMatrix dict = build_dictionary(cfg.ula(), grid);

    const EstimationResult alg1 = run_algorithm1(y, dict, cb, cfg);
    const LsBaselineResult ls = ls_baseline(y, cb, cfg);
    std::optional<EstimationResult> perfect;
    if (cfg.off_grid)
        perfect = estimate_channels_offgrid(y, nullptr, grid, cb, cfg, OffgridMode::PerfectAoa,
                                            &real);

    save_config(spec, (dir / "config.txt").string());
    write_codebook_csv(cb, (dir / "codebook.csv").string());

    {
        std::ofstream out(dir / "realization.csv");
        out << "name,value\n";
        out << "theta0," << format_double(real.theta0) << '\n';
        out << "theta_t_ris," << format_double(real.theta_t_ris) << '\n';
        out << "theta_r_ris," << format_double(real.theta_r_ris) << '\n';
        out << "c_r," << format_double(real.c_r.real()) << ' ' << format_double(real.c_r.imag())
            << '\n';
        out << "c_v," << format_double(real.c_v.real()) << ' ' << format_double(real.c_v.imag())
            << '\n';
        for (const auto& p : real.paths)
            out << "path," << p.grid_index << ' ' << format_double(p.beta.real()) << ' '
                << format_double(p.beta.imag()) << ' ' << format_double(p.delta) << '\n';
    }

    const CMatrix h_truth = truth.h_d, h_alg1 = alg1.h_d_hat, h_ls = ls.h_d_hat;
    write_complex_table((dir / "direct_channel.csv").string(), {"truth", "alg1", "ls"},
                        {&h_truth, &h_alg1, &h_ls});
    write_complex_table((dir / "ris_channel.csv").string(), {"truth", "alg1", "ls"},
                        {&truth.phi, &alg1.phi_hat, &ls.phi_hat});

    std::vector<TrialRow> rows = {
        {0, cfg.tx_power_dbm, Method::Alg1, Target::Direct, nmse(alg1.h_d_hat, truth.h_d)},
        {0, cfg.tx_power_dbm, Method::Alg1, Target::Ris, nmse(alg1.phi_hat, truth.phi)},
        {0, cfg.tx_power_dbm, Method::Ls, Target::Direct, nmse(ls.h_d_hat, truth.h_d)},
        {0, cfg.tx_power_dbm, Method::Ls, Target::Ris, nmse(ls.phi_hat, truth.phi)},
    };
    if (perfect) {
        rows.push_back({0, cfg.tx_power_dbm, Method::Alg1PerfectAoa, Target::Direct,
                        nmse(perfect->h_d_hat, truth.h_d)});
        rows.push_back({0, cfg.tx_power_dbm, Method::Alg1PerfectAoa, Target::Ris,
                        nmse(perfect->phi_hat, truth.phi)});
    }
    write_trial_csv(rows, (dir / "nmse.csv").string());

    std::cout << "one trial at " << cfg.tx_power_dbm << " dBm (seed " << cfg.seed
              << (cfg.off_grid ? ", off-grid" : ", on-grid") << ")\n";
    std::cout << "  true support:";
    for (const auto& p : real.paths)
        std::cout << ' ' << p.grid_index;
    std::cout << "\n  alg1 support:";
    for (std::size_t k : alg1.support)
        std::cout << ' ' << k;
    std::cout << '\n';
    for (const auto& r : rows)
        std::cout << "  " << to_string(r.method) << '/' << to_string(r.target)
                  << " nmse = " << r.nmse << '\n';
    std::cout << "wrote " << dir.string() << '\n';
    return 0;
}

int cmd_train(const CommonArgs& args) {
    SweepSpec spec = resolve_spec(args);
    const ScenarioConfig cfg = spec.base;
    const fs::path models_dir = spec.models_dir;
    fs::create_directories(models_dir);
    fs::create_directories(fs::path(args.out) / "train");

    double pmin = spec.train.power_min, pmax = spec.train.power_max;
    if (!std::isfinite(pmin))
        pmin = *std::min_element(spec.power_grid_dbm.begin(), spec.power_grid_dbm.end());
    if (!std::isfinite(pmax))
        pmax = *std::max_element(spec.power_grid_dbm.begin(), spec.power_grid_dbm.end());

    const auto t0 = std::chrono::steady_clock::now();
    Rng data_rng = make_stream(cfg.seed, 0x646174, 0);
    const TrainingSet set = generate_dataset(cfg, spec.train.samples, data_rng, pmin, pmax);
    if (spec.train.write_dataset)
        write_dataset_csv(set, (fs::path(args.out) / "train" / "dataset.csv").string());

    BundleTrainOptions opts;
    opts.occupancy_hidden = spec.train.occupancy_hidden;
    opts.residual_hidden = spec.train.residual_hidden;
    opts.occupancy.epochs = spec.train.occupancy_epochs;
    opts.occupancy.batch_size = spec.train.batch_size;
    opts.occupancy.learning_rate = spec.train.learning_rate;
    opts.residual.epochs = spec.train.residual_epochs;
    opts.residual.batch_size = spec.train.batch_size;
    opts.residual.learning_rate = spec.train.learning_rate;
    opts.threads = spec.train.threads;

    std::ofstream curves(fs::path(args.out) / "train" / "loss_curves.csv");
    curves << "model,epoch,loss\n";

    ModelBundle bundle;
    {
        Rng rng = make_stream(cfg.seed, 0x6f6363, 0);
        std::vector<std::size_t> sizes;
        sizes.push_back(static_cast<std::size_t>(set.feature_dim()));
        sizes.insert(sizes.end(), opts.occupancy_hidden.begin(), opts.occupancy_hidden.end());
        sizes.push_back(static_cast<std::size_t>(set.grid_size()));
        bundle.occupancy = MlpModel::init(sizes, Activation::Sigmoid, rng);
        TrainingData data{set.features, set.occupancy, RMatrix()};
        const auto curve = train(bundle.occupancy, data, Loss::BinaryCrossEntropy,
                                 opts.occupancy, rng);
        for (std::size_t e = 0; e < curve.size(); ++e)
            curves << "occupancy," << e << ',' << format_double(curve[e]) << '\n';
        std::cout << "occupancy net trained, final loss " << curve.back() << '\n';
    }
    bundle.residuals = train_residual_models(set, opts, cfg.seed);
    save_model_bundle(bundle, models_dir.string());

    const auto dt = std::chrono::duration_cast<std::chrono::seconds>(
        std::chrono::steady_clock::now() - t0);
    std::cout << "trained occupancy + " << bundle.residuals.size() << " residual nets on "
              << spec.train.samples << " examples in " << dt.count() << " s\n";
    std::cout << "models in " << models_dir.string() << '\n';
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    const SweepSpec spec = resolve_spec(args);
    fs::create_directories(args.out);
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult result = run_power_sweep(spec);
    const auto dt =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);

    const fs::path csv = fs::path(args.out) / "sweep.csv";
    emit_csv(result, csv.string());
    std::cout << "sweep: " << spec.power_grid_dbm.size() << " powers x "
              << spec.trials_per_point << " trials in " << dt.count() << " s -> " << csv.string()
              << '\n';
    if (args.plot) {
        const fs::path svg = fs::path(args.out) / "sweep.svg";
        emit_plot(result, svg.string());
        std::cout << "plot: " << svg.string() << '\n';
    }
    return 0;
}

int cmd_eval(const CommonArgs& args) {
    const SweepSpec spec = resolve_spec(args);
    ScenarioConfig cfg = spec.base;
    cfg.off_grid = true; // residual quality is only observable off-grid
    cfg.tx_power_dbm = spec.eval_power_dbm;
    const ModelBundle bundle = load_model_bundle(
        spec.models_dir, 2 * cfg.bs_antennas * cfg.num_slots, cfg.grid_size);
    const Codebook cb = build_dft_codebook(cfg.num_groups, cfg.num_slots);

    std::size_t nn_support_hits = 0, omp_support_hits = 0;
    double mae_nn = 0.0, mae_zero = 0.0;
    std::size_t residual_count = 0;
    Rng rng = make_stream(cfg.seed, 0x6576616c, 0);
    for (std::size_t i = 0; i < spec.eval_samples; ++i) {
        auto [real, truth] = sample_channel(cfg, rng);
        const CMatrix y = synthesize_rx(cfg, real, truth, cb, rng);
        const AoaGrid grid = make_grid(cfg.grid_size, real.theta0);
        const RVector features = featurize(y);

        std::set<std::size_t> true_support;
        for (const auto& p : real.paths)
            true_support.insert(p.grid_index);

        const auto nn_support = detect_grid_aoas(bundle.occupancy, features, cfg.num_paths);
        if (std::set<std::size_t>(nn_support.begin(), nn_support.end()) == true_support)
            ++nn_support_hits;

        const CMatrix dict = build_dictionary(cfg.ula(), grid);
        const CVector y_prime = project_direct(y, cb);
        const OmpResult omp_res =
            omp(y_prime, dict.rightCols(cfg.grid_size), cfg.num_paths);
        std::set<std::size_t> omp_support;
        for (std::size_t k : omp_res.support)
            omp_support.insert(k + 1);
        if (omp_support == true_support)
            ++omp_support_hits;

        // Residual regression quality on the true support.
        std::vector<std::size_t> support_vec(true_support.begin(), true_support.end());
        const auto delta_hat =
            predict_residuals(bundle.residuals, features, support_vec, grid);
        for (const auto& p : real.paths) {
            mae_nn += std::abs(delta_hat[p.grid_index] - p.delta);
            mae_zero += std::abs(p.delta);
            ++residual_count;
        }
    }
    mae_nn /= static_cast<double>(residual_count);
    mae_zero /= static_cast<double>(residual_count);
    const double nn_rate = double(nn_support_hits) / double(spec.eval_samples);
    const double omp_rate = double(omp_support_hits) / double(spec.eval_samples);

    fs::create_directories(args.out);
    {
        std::ofstream out(fs::path(args.out) / "eval.csv");
        out << "metric,value\n";
        out << "eval_samples," << spec.eval_samples << '\n';
        out << "eval_power_dbm," << format_double(spec.eval_power_dbm) << '\n';
        out << "nn_support_recovery_rate," << format_double(nn_rate) << '\n';
        out << "omp_support_recovery_rate," << format_double(omp_rate) << '\n';
        out << "residual_mae," << format_double(mae_nn) << '\n';
        out << "residual_mae_zero_baseline," << format_double(mae_zero) << '\n';
    }
    std::cout << "eval on " << spec.eval_samples << " off-grid examples at "
              << spec.eval_power_dbm << " dBm\n";
    std::cout << "  support recovery: nn " << nn_rate << ", omp " << omp_rate << '\n';
    std::cout << "  residual MAE: nn " << mae_nn << " rad, zero baseline " << mae_zero
              << " rad (ratio " << mae_nn / mae_zero << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted mmWave uplink channel estimation toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&args](CLI::App* sub) {
        sub->add_option("--config", args.config, "configuration file (key = value lines)");
        sub->add_option("--seed", args.seed, "override the scenario seed");
        sub->add_option("--out", args.out, "output directory (default: out)");
        sub->add_option("--threads", args.threads, "worker threads (0 = hardware)");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one trial and dump everything");
    add_common(sim);
    sim->add_flag("--off-grid", args.off_grid, "draw off-grid AoAs");

    CLI::App* train_cmd = app.add_subcommand("train", "generate a dataset and train the networks");
    add_common(train_cmd);
    train_cmd->add_flag("--off-grid", args.off_grid, "train on off-grid data");

    CLI::App* sweep = app.add_subcommand("sweep", "run a power sweep and write CSV results");
    add_common(sweep);
    sweep->add_option("--trials", args.trials, "trials per power point");
    sweep->add_option("--methods", args.methods, "comma list: alg1,ls,nn,alg1-perfect-aoa");
    sweep->add_flag("--off-grid", args.off_grid, "draw off-grid AoAs");
    sweep->add_flag("--plot", args.plot, "also write an SVG plot");

    CLI::App* eval_cmd = app.add_subcommand("eval", "score saved models against fresh data");
    add_common(eval_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(args);
        if (train_cmd->parsed())
            return cmd_train(args);
        if (sweep->parsed())
            return cmd_sweep(args);
        if (eval_cmd->parsed())
            return cmd_eval(args);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
