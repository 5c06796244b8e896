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

#ifndef RISCE_HARNESS_HPP
#define RISCE_HARNESS_HPP

#include "risce/channel_model.hpp"
#include "risce/estimators.hpp"
#include "risce/neural.hpp"
#include "risce/text.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace risce {

// Configuration and usage problems; the CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method { Alg1, Ls, Nn, Alg1PerfectAoa };
enum class Target { Direct, Ris };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::Alg1:
        return "alg1";
    case Method::Ls:
        return "ls";
    case Method::Nn:
        return "nn";
    case Method::Alg1PerfectAoa:
        return "alg1-perfect-aoa";
    }
    throw std::logic_error("unknown method");
}

inline std::string to_string(Target t) {
    return t == Target::Direct ? "direct" : "ris";
}

inline Method parse_method(const std::string& s) {
    if (s == "alg1")
        return Method::Alg1;
    if (s == "ls")
        return Method::Ls;
    if (s == "nn")
        return Method::Nn;
    if (s == "alg1-perfect-aoa")
        return Method::Alg1PerfectAoa;
    throw ConfigError("unknown method '" + s + "' (expected alg1, ls, nn, alg1-perfect-aoa)");
}

inline Target parse_target(const std::string& s) {
    if (s == "direct")
        return Target::Direct;
    if (s == "ris")
        return Target::Ris;
    throw ConfigError("unknown target '" + s + "' (expected direct, ris)");
}

// Knobs for the `train` subcommand.
struct TrainSpec {
    std::size_t samples = 24000;
    std::size_t occupancy_epochs = 15;
    std::size_t residual_epochs = 25;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::vector<std::size_t> occupancy_hidden = {512, 256};
    std::vector<std::size_t> residual_hidden = {128, 64};
    double power_min = std::numeric_limits<double>::quiet_NaN(); // default: sweep range
    double power_max = std::numeric_limits<double>::quiet_NaN();
    std::size_t threads = 1;
    bool write_dataset = false;
};

// A full experiment description: the scenario plus the power sweep protocol.
struct SweepSpec {
    ScenarioConfig base;
    std::vector<double> power_grid_dbm = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
    std::size_t trials_per_point = 500;
    std::vector<Method> methods = {Method::Alg1, Method::Ls};
    std::vector<Target> targets = {Target::Direct, Target::Ris};
    std::string models_dir;  // required when methods contains nn
    std::size_t threads = 1; // 0 = hardware concurrency
    TrainSpec train;
    std::size_t eval_samples = 2000;
    double eval_power_dbm = 20.0;

    void validate() const {
        base.validate();
        if (power_grid_dbm.empty())
            throw ConfigError("sweep: power grid must be nonempty");
        if (trials_per_point < 1)
            throw ConfigError("sweep: trials_per_point must be >= 1");
        if (methods.empty() || targets.empty())
            throw ConfigError("sweep: methods and targets must be nonempty");
    }
};

struct SweepRow {
    double power_dbm;
    Method method;
    Target target;
    double mean_nmse;
    double std_nmse;
    std::size_t n_trials;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    const SweepRow& at(Method m, Target t, double power) const {
        for (const auto& r : rows)
            if (r.method == m && r.target == t && r.power_dbm == power)
                return r;
        throw std::out_of_range("SweepResult: no row for requested method/target/power");
    }
};

struct TrialRow {
    std::size_t trial;
    double power_dbm;
    Method method;
    Target target;
    double nmse;
};

namespace detail {

struct TrialOutcome {
    std::vector<double> nmse; // indexed methods-major, targets-minor
};

inline TrialOutcome run_single_trial(const ScenarioConfig& cfg, const Codebook& cb,
                                     const std::vector<Method>& methods,
                                     const std::vector<Target>& targets,
                                     const ModelBundle* bundle, Rng& rng) {
    auto [real, truth] = sample_channel(cfg, rng);
    const CMatrix y = synthesize_rx(cfg, real, truth, cb, rng);
    const AoaGrid grid = make_grid(cfg.grid_size, real.theta0);
    const CMatrix dict = build_dictionary(cfg.ula(), grid);

    TrialOutcome out;
    out.nmse.reserve(methods.size() * targets.size());
    for (Method m : methods) {
        CVector h_hat;
        CMatrix phi_hat;
        switch (m) {
        case Method::Alg1: {
            EstimationResult r = run_algorithm1(y, dict, cb, cfg);
            h_hat = std::move(r.h_d_hat);
            phi_hat = std::move(r.phi_hat);
            break;
        }
        case Method::Ls: {
            LsBaselineResult r = ls_baseline(y, cb, cfg);
            h_hat = std::move(r.h_d_hat);
            phi_hat = std::move(r.phi_hat);
            break;
        }
        case Method::Nn: {
            EstimationResult r =
                estimate_channels_offgrid(y, bundle, grid, cb, cfg, OffgridMode::Network);
            h_hat = std::move(r.h_d_hat);
            phi_hat = std::move(r.phi_hat);
            break;
        }
        case Method::Alg1PerfectAoa: {
            EstimationResult r = estimate_channels_offgrid(y, nullptr, grid, cb, cfg,
                                                           OffgridMode::PerfectAoa, &real);
            h_hat = std::move(r.h_d_hat);
            phi_hat = std::move(r.phi_hat);
            break;
        }
        }
        for (Target t : targets)
            out.nmse.push_back(t == Target::Direct ? nmse(h_hat, truth.h_d)
                                                   : nmse(phi_hat, truth.phi));
    }
    return out;
}

} // namespace detail

// Monte Carlo NMSE sweep over transmit power. Every method scores the same
// received matrix per trial, per-trial generator streams are keyed by
// (seed, power index, trial), and aggregation runs in trial order, so the
// result is bit-identical for any thread count. NMSE is averaged in linear
// scale.
inline SweepResult run_power_sweep(const SweepSpec& spec,
                                   std::vector<TrialRow>* trial_log = nullptr) {
    spec.validate();
    const ScenarioConfig& base = spec.base;

    std::optional<ModelBundle> bundle;
    for (Method m : spec.methods)
        if (m == Method::Nn) {
            if (spec.models_dir.empty())
                throw ConfigError("sweep: method nn requires models_dir");
            try {
                bundle = load_model_bundle(spec.models_dir,
                                           2 * base.bs_antennas * base.num_slots,
                                           base.grid_size);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("sweep: method nn needs trained models: ") +
                                  e.what());
            }
            break;
        }
    if (base.num_paths == 0)
        for (Target t : spec.targets)
            if (t == Target::Direct)
                throw ConfigError("sweep: direct-channel NMSE is undefined with s = 0");

    const Codebook cb = build_dft_codebook(base.num_groups, base.num_slots);
    const std::size_t workers =
        spec.threads != 0 ? spec.threads
                          : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t trials = spec.trials_per_point;

    SweepResult result;
    for (std::size_t pi = 0; pi < spec.power_grid_dbm.size(); ++pi) {
        const double power = spec.power_grid_dbm[pi];
        ScenarioConfig cfg = base;
        cfg.tx_power_dbm = power;

        std::vector<std::vector<double>> per_trial(trials);
        auto work = [&](std::size_t first) {
            for (std::size_t t = first; t < trials; t += workers) {
                Rng rng = make_stream(base.seed, pi, t);
                per_trial[t] = detail::run_single_trial(cfg, cb, spec.methods, spec.targets,
                                                        bundle ? &*bundle : nullptr, rng)
                                   .nmse;
            }
        };
        if (workers <= 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back(work, w);
            for (auto& th : pool)
                th.join();
        }

        if (trial_log)
            for (std::size_t t = 0; t < trials; ++t)
                for (std::size_t mi = 0; mi < spec.methods.size(); ++mi)
                    for (std::size_t ti = 0; ti < spec.targets.size(); ++ti)
                        trial_log->push_back(TrialRow{t, power, spec.methods[mi],
                                                      spec.targets[ti],
                                                      per_trial[t][mi * spec.targets.size() + ti]});

        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi)
            for (std::size_t ti = 0; ti < spec.targets.size(); ++ti) {
                const std::size_t cell = mi * spec.targets.size() + ti;
                double sum = 0.0;
                for (std::size_t t = 0; t < trials; ++t)
                    sum += per_trial[t][cell];
                const double mean = sum / static_cast<double>(trials);
                double var = 0.0;
                for (std::size_t t = 0; t < trials; ++t) {
                    const double d = per_trial[t][cell] - mean;
                    var += d * d;
                }
                const double stddev =
                    trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
                result.rows.push_back(SweepRow{power, spec.methods[mi], spec.targets[ti], mean,
                                               stddev, trials});
            }
    }

    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) {
                         return std::make_tuple(to_string(a.method), to_string(a.target),
                                                a.power_dbm) <
                                std::make_tuple(to_string(b.method), to_string(b.target),
                                                b.power_dbm);
                     });
    return result;
}

inline void emit_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("emit_csv: cannot open " + path);
    out << "power_dbm,method,target,mean_nmse,std_nmse,n_trials\n";
    for (const auto& r : result.rows)
        out << format_double(r.power_dbm) << ',' << to_string(r.method) << ','
            << to_string(r.target) << ',' << format_double(r.mean_nmse) << ','
            << format_double(r.std_nmse) << ',' << r.n_trials << '\n';
    if (!out)
        throw std::runtime_error("emit_csv: write failed for " + path);
}

inline SweepResult read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_sweep_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "power_dbm,method,target,mean_nmse,std_nmse,n_trials")
        throw std::runtime_error("read_sweep_csv: bad header in " + path);
    SweepResult result;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        auto cells = split(line, ',');
        if (cells.size() != 6)
            throw std::runtime_error("read_sweep_csv: wrong column count");
        result.rows.push_back(SweepRow{parse_double(cells[0]), parse_method(cells[1]),
                                       parse_target(cells[2]), parse_double(cells[3]),
                                       parse_double(cells[4]),
                                       static_cast<std::size_t>(parse_int(cells[5]))});
    }
    return result;
}

inline void write_trial_csv(const std::vector<TrialRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_trial_csv: cannot open " + path);
    out << "trial,power_dbm,method,target,nmse\n";
    for (const auto& r : rows)
        out << r.trial << ',' << format_double(r.power_dbm) << ',' << to_string(r.method) << ','
            << to_string(r.target) << ',' << format_double(r.nmse) << '\n';
    if (!out)
        throw std::runtime_error("write_trial_csv: write failed for " + path);
}

// Static SVG plot: NMSE on a log axis against transmit power, one polyline
// per (method, target) series. Zero NMSE values are clamped to the 1e-12
// display floor. Output bytes are a deterministic function of the input.
inline void emit_plot(const SweepResult& result, const std::string& path) {
    if (result.rows.empty())
        throw std::invalid_argument("emit_plot: empty result");

    constexpr double kFloor = 1e-12;
    constexpr double kWidth = 640.0, kHeight = 480.0;
    constexpr double kLeft = 80.0, kRight = 620.0, kTop = 20.0, kBottom = 420.0;

    double pmin = result.rows.front().power_dbm, pmax = pmin;
    double lmin = 0.0, lmax = 0.0;
    bool first = true;
    for (const auto& r : result.rows) {
        pmin = std::min(pmin, r.power_dbm);
        pmax = std::max(pmax, r.power_dbm);
        const double lv = std::log10(std::max(r.mean_nmse, kFloor));
        if (first) {
            lmin = lmax = lv;
            first = false;
        } else {
            lmin = std::min(lmin, lv);
            lmax = std::max(lmax, lv);
        }
    }
    if (pmax == pmin) {
        pmin -= 1.0;
        pmax += 1.0;
    }
    double dec_lo = std::floor(lmin);
    double dec_hi = std::ceil(lmax);
    if (dec_hi == dec_lo)
        dec_hi += 1.0;

    auto fx = [&](double p) {
        return kLeft + (p - pmin) / (pmax - pmin) * (kRight - kLeft);
    };
    auto fy = [&](double v) {
        const double lv = std::log10(std::max(v, kFloor));
        return kBottom - (lv - dec_lo) / (dec_hi - dec_lo) * (kBottom - kTop);
    };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                     "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    // Collect series in row order (rows are sorted by method/target/power).
    std::vector<std::pair<std::string, std::vector<const SweepRow*>>> series;
    for (const auto& r : result.rows) {
        const std::string key = to_string(r.method) + "/" + to_string(r.target);
        if (series.empty() || series.back().first != key)
            series.push_back({key, {}});
        series.back().second.push_back(&r);
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";

    for (double d = dec_lo; d <= dec_hi + 0.5; d += 1.0) {
        const double y = fy(std::pow(10.0, d));
        svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kRight)
            << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << num(kLeft - 8.0) << "\" y=\"" << num(y + 4.0)
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">1e"
            << static_cast<int>(d) << "</text>\n";
    }
    std::vector<double> xticks;
    for (const auto& r : result.rows)
        if (std::find(xticks.begin(), xticks.end(), r.power_dbm) == xticks.end())
            xticks.push_back(r.power_dbm);
    std::sort(xticks.begin(), xticks.end());
    for (double p : xticks) {
        const double x = fx(p);
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(kBottom) << "\" x2=\"" << num(x)
            << "\" y2=\"" << num(kBottom + 5.0) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << num(x) << "\" y=\"" << num(kBottom + 20.0)
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
            << format_double(p) << "</text>\n";
    }
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(kBottom) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kBottom) << "\" x2=\"" << num(kRight)
        << "\" y2=\"" << num(kBottom) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num((kLeft + kRight) / 2.0) << "\" y=\"" << num(kHeight - 10.0)
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">transmit power "
           "(dBm)</text>\n";
    svg << "<text x=\"16\" y=\"" << num((kTop + kBottom) / 2.0)
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 "
        << num((kTop + kBottom) / 2.0) << ")\">NMSE</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        bool head = true;
        for (const SweepRow* r : series[si].second) {
            if (!head)
                svg << ' ';
            head = false;
            svg << num(fx(r->power_dbm)) << ',' << num(fy(r->mean_nmse));
        }
        svg << "\"/>\n";
        const double ly = kTop + 16.0 + 18.0 * static_cast<double>(si);
        svg << "<line x1=\"" << num(kRight - 150.0) << "\" y1=\"" << num(ly - 4.0) << "\" x2=\""
            << num(kRight - 120.0) << "\" y2=\"" << num(ly - 4.0) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(kRight - 114.0) << "\" y=\"" << num(ly)
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[si].first
            << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit_plot: cannot open " + path);
    out << svg.str();
    if (!out)
        throw std::runtime_error("emit_plot: write failed for " + path);
}

namespace detail {

inline std::vector<std::size_t> parse_size_list(const std::string& v) {
    std::vector<std::size_t> out;
    for (const auto& cell : split(v, ',')) {
        const long long n = parse_int(cell);
        if (n < 1)
            throw std::invalid_argument("sizes must be positive");
        out.push_back(static_cast<std::size_t>(n));
    }
    return out;
}

inline std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

} // namespace detail

// Flat `key = value` configuration file: one pair per line, '#' starts a
// comment, unknown keys are rejected. Absent keys keep the §-defaults baked
// into the structs.
inline SweepSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    SweepSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        const std::string stripped = trim(line);
        if (stripped.empty())
            continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        try {
            if (key == "m")
                spec.base.bs_antennas = static_cast<std::size_t>(parse_int(value));
            else if (key == "ny")
                spec.base.ris_ny = static_cast<std::size_t>(parse_int(value));
            else if (key == "nz")
                spec.base.ris_nz = static_cast<std::size_t>(parse_int(value));
            else if (key == "g")
                spec.base.num_groups = static_cast<std::size_t>(parse_int(value));
            else if (key == "k")
                spec.base.grid_size = static_cast<std::size_t>(parse_int(value));
            else if (key == "l")
                spec.base.num_slots = static_cast<std::size_t>(parse_int(value));
            else if (key == "s")
                spec.base.num_paths = static_cast<std::size_t>(parse_int(value));
            else if (key == "noise_dbm")
                spec.base.noise_dbm = parse_double(value);
            else if (key == "tx_power_dbm")
                spec.base.tx_power_dbm = parse_double(value);
            else if (key == "pilot_symbol") {
                auto parts = split(value, ',');
                if (parts.size() == 1)
                    spec.base.pilot_symbol = cxd(parse_double(parts[0]), 0.0);
                else if (parts.size() == 2)
                    spec.base.pilot_symbol = cxd(parse_double(parts[0]), parse_double(parts[1]));
                else
                    throw std::invalid_argument("pilot_symbol expects re or re,im");
            } else if (key == "seed")
                spec.base.seed = static_cast<std::uint64_t>(parse_int(value));
            else if (key == "off_grid")
                spec.base.off_grid = parse_bool(value);
            else if (key == "power_grid_dbm") {
                spec.power_grid_dbm.clear();
                for (const auto& cell : split(value, ','))
                    spec.power_grid_dbm.push_back(parse_double(cell));
            } else if (key == "trials_per_point")
                spec.trials_per_point = static_cast<std::size_t>(parse_int(value));
            else if (key == "methods") {
                spec.methods.clear();
                for (const auto& cell : split(value, ','))
                    spec.methods.push_back(parse_method(cell));
            } else if (key == "targets") {
                spec.targets.clear();
                for (const auto& cell : split(value, ','))
                    spec.targets.push_back(parse_target(cell));
            } else if (key == "models_dir")
                spec.models_dir = value;
            else if (key == "threads")
                spec.threads = static_cast<std::size_t>(parse_int(value));
            else if (key == "train_samples")
                spec.train.samples = static_cast<std::size_t>(parse_int(value));
            else if (key == "train_epochs")
                spec.train.occupancy_epochs = static_cast<std::size_t>(parse_int(value));
            else if (key == "residual_epochs")
                spec.train.residual_epochs = static_cast<std::size_t>(parse_int(value));
            else if (key == "train_batch")
                spec.train.batch_size = static_cast<std::size_t>(parse_int(value));
            else if (key == "train_lr")
                spec.train.learning_rate = parse_double(value);
            else if (key == "hidden")
                spec.train.occupancy_hidden = detail::parse_size_list(value);
            else if (key == "residual_hidden")
                spec.train.residual_hidden = detail::parse_size_list(value);
            else if (key == "train_power_min")
                spec.train.power_min = parse_double(value);
            else if (key == "train_power_max")
                spec.train.power_max = parse_double(value);
            else if (key == "train_threads")
                spec.train.threads = static_cast<std::size_t>(parse_int(value));
            else if (key == "write_dataset")
                spec.train.write_dataset = parse_bool(value);
            else if (key == "eval_samples")
                spec.eval_samples = static_cast<std::size_t>(parse_int(value));
            else if (key == "eval_power_dbm")
                spec.eval_power_dbm = parse_double(value);
            else
                throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                                  "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    try {
        spec.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return spec;
}

inline void save_config(const SweepSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_config: cannot open " + path);
    out << "m = " << spec.base.bs_antennas << '\n';
    out << "ny = " << spec.base.ris_ny << '\n';
    out << "nz = " << spec.base.ris_nz << '\n';
    out << "g = " << spec.base.num_groups << '\n';
    out << "k = " << spec.base.grid_size << '\n';
    out << "l = " << spec.base.num_slots << '\n';
    out << "s = " << spec.base.num_paths << '\n';
    out << "noise_dbm = " << format_double(spec.base.noise_dbm) << '\n';
    out << "tx_power_dbm = " << format_double(spec.base.tx_power_dbm) << '\n';
    out << "pilot_symbol = " << format_double(spec.base.pilot_symbol.real()) << ","
        << format_double(spec.base.pilot_symbol.imag()) << '\n';
    out << "seed = " << spec.base.seed << '\n';
    out << "off_grid = " << (spec.base.off_grid ? "true" : "false") << '\n';
    out << "power_grid_dbm = ";
    for (std::size_t i = 0; i < spec.power_grid_dbm.size(); ++i)
        out << (i ? "," : "") << format_double(spec.power_grid_dbm[i]);
    out << '\n';
    out << "trials_per_point = " << spec.trials_per_point << '\n';
    out << "methods = ";
    for (std::size_t i = 0; i < spec.methods.size(); ++i)
        out << (i ? "," : "") << to_string(spec.methods[i]);
    out << '\n';
    out << "targets = ";
    for (std::size_t i = 0; i < spec.targets.size(); ++i)
        out << (i ? "," : "") << to_string(spec.targets[i]);
    out << '\n';
    if (!spec.models_dir.empty())
        out << "models_dir = " << spec.models_dir << '\n';
    out << "threads = " << spec.threads << '\n';
    out << "train_samples = " << spec.train.samples << '\n';
    out << "train_epochs = " << spec.train.occupancy_epochs << '\n';
    out << "residual_epochs = " << spec.train.residual_epochs << '\n';
    out << "train_batch = " << spec.train.batch_size << '\n';
    out << "train_lr = " << format_double(spec.train.learning_rate) << '\n';
    out << "hidden = " << detail::join_sizes(spec.train.occupancy_hidden) << '\n';
    out << "residual_hidden = " << detail::join_sizes(spec.train.residual_hidden) << '\n';
    if (std::isfinite(spec.train.power_min))
        out << "train_power_min = " << format_double(spec.train.power_min) << '\n';
    if (std::isfinite(spec.train.power_max))
        out << "train_power_max = " << format_double(spec.train.power_max) << '\n';
    out << "train_threads = " << spec.train.threads << '\n';
    out << "write_dataset = " << (spec.train.write_dataset ? "true" : "false") << '\n';
    out << "eval_samples = " << spec.eval_samples << '\n';
    out << "eval_power_dbm = " << format_double(spec.eval_power_dbm) << '\n';
    if (!out)
        throw std::runtime_error("save_config: write failed for " + path);
}

} // namespace risce

#endif
