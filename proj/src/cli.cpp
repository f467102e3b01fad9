#include "fepool/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fepool/csv.hpp"
#include "fepool/error.hpp"
#include "fepool/eval.hpp"
#include "fepool/fit_io.hpp"
#include "fepool/forecast.hpp"
#include "fepool/parallel.hpp"

namespace fepool {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    std::vector<std::string> inputs;
    std::string column = "value";
    std::string id_column;
    std::string output_dir = "out";
    std::vector<std::string> models = {"naive", "rw_drift", "ets_aan", "ar"};
    std::string mode = "febama";
    std::vector<std::string> modes = {"sa", "op", "febama"};
    std::size_t feature_count = 6;
    std::size_t min_length = 25;
    std::size_t feature_window = 0; // 0 = all history
    std::size_t model_window = 0;
    double sigma2 = 10.0;
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    int restarts = 2;
    int draws = 100;
    int burn_in = 50;
    std::uint64_t seed = 1;
    std::size_t horizon = 18;
    std::size_t start_t = 0; // 0 = automatic midpoint
    std::size_t relieff_neighbors = 5;
    bool skip_bad_rows = false;
    bool refit_each_step = true;
    bool reselect_features = false;
    double sd_floor = 1e-8;
    int ar_max_order = 5;
    std::string fit_path;
};

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "inputs", "column", "id_column", "output_dir", "models", "mode", "modes",
        "feature_count", "min_length", "feature_window", "model_window", "sigma2",
        "max_iterations", "gradient_tolerance", "restarts", "draws", "burn_in", "seed",
        "horizon", "start_t", "relieff_neighbors", "skip_bad_rows", "refit_each_step",
        "reselect_features", "sd_floor", "ar_max_order", "fit"};
    return keys;
}

std::vector<std::string> as_string_list(const json& v, const std::string& key) {
    std::vector<std::string> out;
    if (v.is_string()) {
        // comma-separated shorthand
        std::string s = v.get<std::string>();
        std::size_t pos = 0;
        while (pos != std::string::npos) {
            const std::size_t next = s.find(',', pos);
            out.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
            pos = next == std::string::npos ? next : next + 1;
        }
    } else if (v.is_array()) {
        for (const auto& e : v) out.push_back(e.get<std::string>());
    } else {
        throw ConfigError("config key '" + key + "' must be a string or array of strings");
    }
    return out;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config file must hold a flat JSON object");
    }
    const auto& known = known_config_keys();
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        try {
            if (key == "inputs") cfg.inputs = as_string_list(value, key);
            else if (key == "column") cfg.column = value.get<std::string>();
            else if (key == "id_column") cfg.id_column = value.get<std::string>();
            else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
            else if (key == "models") cfg.models = as_string_list(value, key);
            else if (key == "mode") cfg.mode = value.get<std::string>();
            else if (key == "modes") cfg.modes = as_string_list(value, key);
            else if (key == "feature_count") cfg.feature_count = value.get<std::size_t>();
            else if (key == "min_length") cfg.min_length = value.get<std::size_t>();
            else if (key == "feature_window") cfg.feature_window = value.get<std::size_t>();
            else if (key == "model_window") cfg.model_window = value.get<std::size_t>();
            else if (key == "sigma2") cfg.sigma2 = value.get<double>();
            else if (key == "max_iterations") cfg.max_iterations = value.get<int>();
            else if (key == "gradient_tolerance") cfg.gradient_tolerance = value.get<double>();
            else if (key == "restarts") cfg.restarts = value.get<int>();
            else if (key == "draws") cfg.draws = value.get<int>();
            else if (key == "burn_in") cfg.burn_in = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "horizon") cfg.horizon = value.get<std::size_t>();
            else if (key == "start_t") cfg.start_t = value.get<std::size_t>();
            else if (key == "relieff_neighbors") cfg.relieff_neighbors = value.get<std::size_t>();
            else if (key == "skip_bad_rows") cfg.skip_bad_rows = value.get<bool>();
            else if (key == "refit_each_step") cfg.refit_each_step = value.get<bool>();
            else if (key == "reselect_features") cfg.reselect_features = value.get<bool>();
            else if (key == "sd_floor") cfg.sd_floor = value.get<double>();
            else if (key == "ar_max_order") cfg.ar_max_order = value.get<int>();
            else if (key == "fit") cfg.fit_path = value.get<std::string>();
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

PipelineConfig pipeline_config(const RunConfig& cfg) {
    PipelineConfig pc;
    for (const auto& name : cfg.models) pc.models.push_back(parse_model_kind(name));
    pc.window.min_length = cfg.min_length;
    pc.window.feature_window = cfg.feature_window;
    pc.window.model_window = cfg.model_window;
    pc.window.validate();
    if (cfg.sigma2 <= 0.0) {
        throw ConfigError("sigma2 must be positive");
    }
    pc.prior.sigma2 = cfg.sigma2;
    pc.inference.max_iterations = cfg.max_iterations;
    pc.inference.gradient_tolerance = cfg.gradient_tolerance;
    pc.inference.restarts = cfg.restarts;
    pc.inference.draws = cfg.draws;
    pc.inference.burn_in = cfg.burn_in;
    pc.inference.seed = cfg.seed;
    pc.model_options.sd_floor = cfg.sd_floor;
    pc.model_options.ar_max_order = cfg.ar_max_order;
    if (cfg.feature_count > pc.candidate_catalog.size()) {
        throw ConfigError("feature_count (" + std::to_string(cfg.feature_count) +
                          ") exceeds the feature catalog size (" +
                          std::to_string(pc.candidate_catalog.size()) + ")");
    }
    pc.feature_count = cfg.feature_count;
    pc.relieff_neighbors = cfg.relieff_neighbors;
    pc.refit_each_step = cfg.refit_each_step;
    pc.reselect_features = cfg.reselect_features;
    if (pc.models.empty()) {
        throw ConfigError("model pool is empty");
    }
    for (ModelKind k : pc.models) {
        if (min_history(k, pc.model_options) > pc.window.min_length) {
            throw ConfigError(std::string("model '") + std::string(to_string(k)) +
                              "' needs min_length >= " +
                              std::to_string(min_history(k, pc.model_options)));
        }
    }
    if (cfg.draws < 1 || cfg.burn_in < 0 || cfg.max_iterations < 1) {
        throw ConfigError("draws must be >= 1, burn_in >= 0, max_iterations >= 1");
    }
    return pc;
}

std::vector<Mode> parse_modes(const std::vector<std::string>& names) {
    std::vector<Mode> modes;
    for (const auto& n : names) modes.push_back(parse_mode(n));
    if (modes.empty()) {
        throw ConfigError("modes list is empty");
    }
    return modes;
}

// ---------------------------------------------------------------------------
// output helpers
// ---------------------------------------------------------------------------

std::string sanitize_id(const std::string& id) {
    std::string out;
    for (char c : id) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    }
    return out.empty() ? "series" : out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw DataError("cannot write " + tmp.string());
        }
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::size_t auto_start_t(const RunConfig& cfg, std::size_t series_length) {
    if (cfg.start_t != 0) return cfg.start_t;
    // midpoint of the usable range, leaving at least two training rows
    const std::size_t lo = cfg.min_length + 3;
    const std::size_t mid = (cfg.min_length + 1 + series_length) / 2;
    return std::max(lo, mid);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

std::vector<LoadResult> load_inputs(const RunConfig& cfg) {
    if (cfg.inputs.empty()) {
        throw ConfigError("no input files given (use --input or the 'inputs' config key)");
    }
    std::vector<LoadResult> all;
    for (const auto& path : cfg.inputs) {
        auto batch = load_series_file(path, cfg.column, cfg.id_column, cfg.skip_bad_rows);
        if (batch.size() == 1 && batch.front().series.id == "series" && cfg.id_column.empty()) {
            // derive an id from the file name for single-series files
            batch.front().series.id = std::filesystem::path(path).stem().string();
        }
        for (auto& b : batch) all.push_back(std::move(b));
    }
    return all;
}

int cmd_features(const RunConfig& cfg) {
    const PipelineConfig pc = pipeline_config(cfg);
    const auto inputs = load_inputs(cfg);
    for (const auto& in : inputs) {
        const FeatureMatrix fm =
            build_feature_matrix(in.series, pc.window, pc.candidate_catalog);
        std::string csv = "t";
        for (const auto& n : fm.names) csv += "," + n;
        csv += "\n";
        for (std::size_t r = 0; r < fm.values.rows; ++r) {
            csv += std::to_string(fm.target_indices[r]);
            for (std::size_t c = 0; c < fm.values.cols; ++c) {
                csv += "," + fmt(fm.values.at(r, c));
            }
            csv += "\n";
        }
        write_atomic(std::filesystem::path(cfg.output_dir) /
                         (sanitize_id(in.series.id) + "_features.csv"),
                     csv);
    }
    return 0;
}

int cmd_fit_models(const RunConfig& cfg) {
    const PipelineConfig pc = pipeline_config(cfg);
    const auto inputs = load_inputs(cfg);
    for (const auto& in : inputs) {
        const DensityMatrix dm =
            build_density_matrix(in.series, pc.models, pc.window, pc.model_options);
        std::string csv = "t,model,mean,sd,log_density_at_y\n";
        for (std::size_t r = 0; r < dm.rows(); ++r) {
            for (std::size_t c = 0; c < dm.models(); ++c) {
                csv += std::to_string(dm.target_indices[r]) + "," + dm.model_names[c] + "," +
                       fmt(dm.mean.at(r, c)) + "," + fmt(dm.sd.at(r, c)) + "," +
                       fmt(dm.log_density.at(r, c)) + "\n";
            }
        }
        write_atomic(std::filesystem::path(cfg.output_dir) /
                         (sanitize_id(in.series.id) + "_density.csv"),
                     csv);
    }
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    const PipelineConfig pc = pipeline_config(cfg);
    const Mode mode = parse_mode(cfg.mode);
    const auto inputs = load_inputs(cfg);
    for (const auto& in : inputs) {
        const CombinationFit fit = train_pipeline(in.series, mode, pc);
        write_atomic(std::filesystem::path(cfg.output_dir) /
                         (sanitize_id(in.series.id) + "_fit.json"),
                     fit_to_json(fit) + "\n");
    }
    return 0;
}

int cmd_forecast(const RunConfig& cfg) {
    if (cfg.fit_path.empty()) {
        throw ConfigError("forecast needs --fit <fit.json>");
    }
    if (cfg.horizon < 1) {
        throw ConfigError("horizon must be >= 1");
    }
    const CombinationFit fit = load_fit(cfg.fit_path);
    const auto inputs = load_inputs(cfg);
    for (const auto& in : inputs) {
        const ForecastResult fc = forecast_h(fit, in.series, cfg.horizon);
        json j;
        j["series"] = in.series.id;
        j["mode"] = std::string(to_string(fit.mode));
        j["horizon"] = cfg.horizon;
        json steps = json::array();
        for (std::size_t h = 0; h < fc.steps.size(); ++h) {
            const ForecastStep& st = fc.steps[h];
            json comp = json::array();
            for (std::size_t i = 0; i < st.components.size(); ++i) {
                comp.push_back(json{{"model", std::string(to_string(fit.models[i]))},
                                    {"mean", st.components[i].mean},
                                    {"sd", st.components[i].sd},
                                    {"weight", st.weights[i]}});
            }
            steps.push_back(json{{"h", h + 1}, {"point", st.point}, {"mixture", std::move(comp)}});
        }
        j["steps"] = std::move(steps);
        write_atomic(std::filesystem::path(cfg.output_dir) /
                         (sanitize_id(in.series.id) + "_forecast.json"),
                     j.dump(2) + "\n");

        std::string csv = "t_or_h,model,weight\n";
        for (std::size_t h = 0; h < fc.steps.size(); ++h) {
            for (std::size_t i = 0; i < fit.models.size(); ++i) {
                csv += std::to_string(h + 1) + "," + std::string(to_string(fit.models[i])) + "," +
                       fmt(fc.steps[h].weights[i]) + "\n";
            }
        }
        write_atomic(std::filesystem::path(cfg.output_dir) /
                         (sanitize_id(in.series.id) + "_weights.csv"),
                     csv);
    }
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    const PipelineConfig pc = pipeline_config(cfg);
    const std::vector<Mode> modes = parse_modes(cfg.modes);
    const auto inputs = load_inputs(cfg);

    std::string csv = "series,mode,avg_ls,mase\n";
    std::string detail = "series,mode,t,log_score,point\n";
    for (const auto& in : inputs) {
        const std::size_t start_t = auto_start_t(cfg, in.series.length());
        const OosReport report = recursive_oos_evaluate(in.series, modes, pc, start_t);
        for (const auto& mr : report.modes) {
            csv += in.series.id + "," + std::string(to_string(mr.mode)) + "," +
                   fmt(mr.average_ls) + "," + fmt(mr.mase_value) + "\n";
            for (std::size_t i = 0; i < mr.log_scores.size(); ++i) {
                detail += in.series.id + "," + std::string(to_string(mr.mode)) + "," +
                          std::to_string(report.targets[i]) + "," + fmt(mr.log_scores[i]) + "," +
                          fmt(mr.points[i]) + "\n";
            }
        }
    }
    write_atomic(std::filesystem::path(cfg.output_dir) / "scores.csv", csv);
    write_atomic(std::filesystem::path(cfg.output_dir) / "scores_by_t.csv", detail);
    return 0;
}

int cmd_benchmark(const RunConfig& cfg) {
    const PipelineConfig base = pipeline_config(cfg);
    const std::vector<Mode> modes = parse_modes(cfg.modes);
    const auto inputs = load_inputs(cfg);
    const std::size_t m = base.models.size();
    if (m < 2) {
        throw ConfigError("benchmark needs at least 2 models");
    }

    // every subset of size >= 2, ordered by size then member indices
    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t size = 2; size <= m; ++size) {
        std::vector<std::size_t> mask(m, 0);
        std::fill(mask.end() - static_cast<long>(size), mask.end(), 1);
        do {
            std::vector<std::size_t> subset;
            for (std::size_t i = 0; i < m; ++i) {
                if (mask[i]) subset.push_back(i);
            }
            subsets.push_back(std::move(subset));
        } while (std::next_permutation(mask.begin(), mask.end()));
    }

    struct Task {
        std::size_t series_idx;
        std::size_t subset_idx;
    };
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < inputs.size(); ++si) {
        for (std::size_t bi = 0; bi < subsets.size(); ++bi) tasks.push_back({si, bi});
    }

    struct TaskResult {
        std::vector<double> ls;   // per mode
        std::vector<double> mase; // per mode
        std::string error;
    };
    std::vector<TaskResult> results(tasks.size());

    parallel_for(tasks.size(), [&](std::size_t ti) {
        const Task& task = tasks[ti];
        try {
            PipelineConfig pc = base;
            pc.models.clear();
            for (std::size_t i : subsets[task.subset_idx]) pc.models.push_back(base.models[i]);
            const TimeSeries& series = inputs[task.series_idx].series;
            const OosReport report =
                recursive_oos_evaluate(series, modes, pc, auto_start_t(cfg, series.length()));
            for (const auto& mr : report.modes) {
                results[ti].ls.push_back(mr.average_ls);
                results[ti].mase.push_back(mr.mase_value);
            }
        } catch (const std::exception& e) {
            results[ti].error = e.what();
        }
    });
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        if (!results[ti].error.empty()) {
            throw NumericError("benchmark task (series=" +
                               inputs[tasks[ti].series_idx].series.id + "): " +
                               results[ti].error);
        }
    }

    auto subset_label = [&](const std::vector<std::size_t>& subset) {
        std::string label;
        for (std::size_t i : subset) {
            if (!label.empty()) label += "+";
            label += std::string(to_string(base.models[i]));
        }
        return label;
    };

    std::string header = "combination";
    for (Mode md : modes) header += "," + std::string(to_string(md)) + "_ls";
    for (Mode md : modes) header += "," + std::string(to_string(md)) + "_mase";

    // aggregated over series (mean per combination), plus a per-series detail table
    std::string csv = header + "\n";
    for (std::size_t bi = 0; bi < subsets.size(); ++bi) {
        std::vector<double> ls(modes.size(), 0.0), ms(modes.size(), 0.0);
        for (std::size_t si = 0; si < inputs.size(); ++si) {
            const TaskResult& r = results[si * subsets.size() + bi];
            for (std::size_t k = 0; k < modes.size(); ++k) {
                ls[k] += r.ls[k];
                ms[k] += r.mase[k];
            }
        }
        csv += subset_label(subsets[bi]);
        const double n = static_cast<double>(inputs.size());
        for (std::size_t k = 0; k < modes.size(); ++k) csv += "," + fmt(ls[k] / n);
        for (std::size_t k = 0; k < modes.size(); ++k) csv += "," + fmt(ms[k] / n);
        csv += "\n";
    }
    write_atomic(std::filesystem::path(cfg.output_dir) / "benchmark.csv", csv);

    std::string detail = "series," + header + "\n";
    for (std::size_t si = 0; si < inputs.size(); ++si) {
        for (std::size_t bi = 0; bi < subsets.size(); ++bi) {
            const TaskResult& r = results[si * subsets.size() + bi];
            detail += inputs[si].series.id + "," + subset_label(subsets[bi]);
            for (std::size_t k = 0; k < modes.size(); ++k) detail += "," + fmt(r.ls[k]);
            for (std::size_t k = 0; k < modes.size(); ++k) detail += "," + fmt(r.mase[k]);
            detail += "\n";
        }
    }
    write_atomic(std::filesystem::path(cfg.output_dir) / "benchmark_by_series.csv", detail);
    return 0;
}

// ---------------------------------------------------------------------------
// manifest + dispatch
// ---------------------------------------------------------------------------

json config_echo(const RunConfig& cfg) {
    return json{{"inputs", cfg.inputs},
                {"column", cfg.column},
                {"id_column", cfg.id_column},
                {"output_dir", cfg.output_dir},
                {"models", cfg.models},
                {"mode", cfg.mode},
                {"modes", cfg.modes},
                {"feature_count", cfg.feature_count},
                {"min_length", cfg.min_length},
                {"feature_window", cfg.feature_window},
                {"model_window", cfg.model_window},
                {"sigma2", cfg.sigma2},
                {"max_iterations", cfg.max_iterations},
                {"gradient_tolerance", cfg.gradient_tolerance},
                {"restarts", cfg.restarts},
                {"draws", cfg.draws},
                {"burn_in", cfg.burn_in},
                {"seed", cfg.seed},
                {"horizon", cfg.horizon},
                {"start_t", cfg.start_t},
                {"relieff_neighbors", cfg.relieff_neighbors},
                {"skip_bad_rows", cfg.skip_bad_rows},
                {"refit_each_step", cfg.refit_each_step},
                {"reselect_features", cfg.reselect_features},
                {"sd_floor", cfg.sd_floor},
                {"ar_max_order", cfg.ar_max_order},
                {"fit", cfg.fit_path}};
}

void write_manifest(const RunConfig& cfg, const std::string& subcommand, double wall_ms) {
    json j;
    j["tool"] = "fepool";
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["seed"] = cfg.seed;
    j["threads"] = hardware_threads();
    j["wall_time_ms"] = wall_ms;
    j["config"] = config_echo(cfg);
    write_atomic(std::filesystem::path(cfg.output_dir) / "manifest.json", j.dump(2) + "\n");
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    RunConfig cfg;
    std::string config_path;

    // config file first, CLI flags override: CLI11 only assigns options that
    // are actually present, so loading the file before parsing is enough
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            config_path = args[i + 1];
        }
    }
    if (!config_path.empty()) {
        try {
            apply_config_file(cfg, config_path);
        } catch (const Error& e) {
            std::cerr << "{\"error\":\"config\",\"message\":\"" << e.what() << "\"}\n";
            return 2;
        }
    }

    CLI::App app{"feature-driven density forecast combination"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string subcommand;
    std::vector<CLI::App*> subs;
    for (const char* name :
         {"features", "fit-models", "train", "forecast", "evaluate", "benchmark"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->callback([&subcommand, name] { subcommand = name; });
        sub->add_option("--config", config_path, "flat JSON config file");
        sub->add_option("--input", cfg.inputs, "input CSV path(s)");
        sub->add_option("--column", cfg.column, "value column name");
        sub->add_option("--id-column", cfg.id_column, "id column for long-format CSVs");
        sub->add_option("--output-dir", cfg.output_dir, "artifact directory");
        sub->add_option("--models", cfg.models, "model pool");
        sub->add_option("--mode", cfg.mode, "combination mode (train/forecast)");
        sub->add_option("--modes", cfg.modes, "modes for evaluate/benchmark");
        sub->add_option("--feature-count", cfg.feature_count, "features kept after screening");
        sub->add_option("--min-length", cfg.min_length, "minimum history before forecasts");
        sub->add_option("--feature-window", cfg.feature_window, "feature window (0 = all)");
        sub->add_option("--model-window", cfg.model_window, "model window (0 = all)");
        sub->add_option("--sigma2", cfg.sigma2, "Gaussian prior variance");
        sub->add_option("--max-iterations", cfg.max_iterations, "optimizer iteration cap");
        sub->add_option("--gradient-tolerance", cfg.gradient_tolerance, "optimizer tolerance");
        sub->add_option("--restarts", cfg.restarts, "extra random optimizer starts");
        sub->add_option("--draws", cfg.draws, "variable-selection draws kept");
        sub->add_option("--burn-in", cfg.burn_in, "variable-selection burn-in sweeps");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--horizon", cfg.horizon, "forecast horizon");
        sub->add_option("--start-t", cfg.start_t, "first evaluated origin (0 = midpoint)");
        sub->add_option("--relieff-neighbors", cfg.relieff_neighbors, "ReliefF neighbor count");
        sub->add_flag("--skip-bad-rows", cfg.skip_bad_rows, "skip non-numeric CSV rows");
        sub->add_flag("!--frozen-models", cfg.refit_each_step,
                      "reuse single fits for multi-step forecasts");
        sub->add_flag("--reselect-features", cfg.reselect_features,
                      "re-run feature screening at every origin");
        sub->add_option("--sd-floor", cfg.sd_floor, "predictive sd floor");
        sub->add_option("--ar-max-order", cfg.ar_max_order, "maximum AR order");
        sub->add_option("--fit", cfg.fit_path, "trained fit JSON (forecast)");
        subs.push_back(sub);
    }

    std::vector<const char*> argv;
    argv.push_back("fepool");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    (void)subs;

    // environment override for the output directory
    if (const char* env = std::getenv("FEPOOL_OUTPUT_DIR")) {
        if (cfg.output_dir == "out") cfg.output_dir = env;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::filesystem::create_directories(cfg.output_dir);
        int rc = 0;
        if (subcommand == "features") rc = cmd_features(cfg);
        else if (subcommand == "fit-models") rc = cmd_fit_models(cfg);
        else if (subcommand == "train") rc = cmd_train(cfg);
        else if (subcommand == "forecast") rc = cmd_forecast(cfg);
        else if (subcommand == "evaluate") rc = cmd_evaluate(cfg);
        else if (subcommand == "benchmark") rc = cmd_benchmark(cfg);
        else throw ConfigError("unknown subcommand");
        const double wall_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count();
        write_manifest(cfg, subcommand, wall_ms);
        return rc;
    } catch (const Error& e) {
        const char* kind = e.kind() == ErrorKind::Config ? "config"
                           : e.kind() == ErrorKind::Data ? "data"
                                                         : "numeric";
        std::cerr << "{\"error\":\"" << kind << "\",\"message\":\"" << e.what() << "\"}\n";
        switch (e.kind()) {
            case ErrorKind::Config: return 2;
            case ErrorKind::Data: return 3;
            case ErrorKind::Numeric: return 4;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"internal\",\"message\":\"" << e.what() << "\"}\n";
        return 4;
    }
}

} // namespace fepool
