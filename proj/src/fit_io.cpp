#include "fepool/fit_io.hpp"

#include <fstream>
#include <json.hpp>

#include "fepool/error.hpp"

namespace fepool {

namespace {

using nlohmann::json;

json coef_to_json(const CoefficientMatrix& beta) {
    json rows = json::array();
    for (std::size_t i = 0; i < beta.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < beta.cols(); ++j) row.push_back(beta.at(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"pool_size", beta.pool_size},
                {"feature_count", beta.feature_count},
                {"rows", std::move(rows)}};
}

CoefficientMatrix coef_from_json(const json& j) {
    CoefficientMatrix beta = CoefficientMatrix::zeros(j.at("pool_size").get<std::size_t>(),
                                                      j.at("feature_count").get<std::size_t>());
    const auto& rows = j.at("rows");
    for (std::size_t i = 0; i < beta.rows(); ++i) {
        for (std::size_t c = 0; c < beta.cols(); ++c) {
            beta.at(i, c) = rows.at(i).at(c).get<double>();
        }
    }
    return beta;
}

json selection_to_json(const SelectionMatrix& sel) {
    json rows = json::array();
    for (std::size_t i = 0; i < sel.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < sel.feature_count; ++j) row.push_back(sel.selected(i, j) ? 1 : 0);
        rows.push_back(std::move(row));
    }
    return json{{"pool_size", sel.pool_size},
                {"feature_count", sel.feature_count},
                {"rows", std::move(rows)}};
}

SelectionMatrix selection_from_json(const json& j) {
    SelectionMatrix sel = SelectionMatrix::all(j.at("pool_size").get<std::size_t>(),
                                               j.at("feature_count").get<std::size_t>());
    const auto& rows = j.at("rows");
    for (std::size_t i = 0; i < sel.rows(); ++i) {
        for (std::size_t c = 0; c < sel.feature_count; ++c) {
            sel.set(i, c, rows.at(i).at(c).get<int>() != 0);
        }
    }
    return sel;
}

} // namespace

std::string fit_to_json(const CombinationFit& fit) {
    json j;
    j["format"] = "fepool-fit";
    j["version"] = 1;
    j["mode"] = std::string(to_string(fit.mode));

    json models = json::array();
    for (ModelKind k : fit.models) models.push_back(std::string(to_string(k)));
    j["models"] = std::move(models);

    j["window"] = {{"min_length", fit.window.min_length},
                   {"feature_window", fit.window.feature_window},
                   {"model_window", fit.window.model_window}};
    j["prior"] = {{"sigma2", fit.prior.sigma2}};
    j["inference"] = {{"max_iterations", fit.inference.max_iterations},
                      {"gradient_tolerance", fit.inference.gradient_tolerance},
                      {"restarts", fit.inference.restarts},
                      {"draws", fit.inference.draws},
                      {"burn_in", fit.inference.burn_in},
                      {"seed", fit.inference.seed}};
    j["model_options"] = {{"sd_floor", fit.model_options.sd_floor},
                          {"ar_max_order", fit.model_options.ar_max_order}};
    j["refit_each_step"] = fit.refit_each_step;
    j["catalog"] = fit.catalog.names;
    j["stats"] = {{"mean", fit.stats.mean}, {"sd", fit.stats.sd}, {"constant", fit.stats.constant}};
    j["beta"] = coef_to_json(fit.beta);

    json draws = json::array();
    for (const auto& d : fit.draws) {
        draws.push_back(json{{"selection", selection_to_json(d.selection)},
                             {"beta", coef_to_json(d.beta)},
                             {"log_posterior", d.log_posterior_value},
                             {"proposal_failed", d.proposal_failed}});
    }
    j["draws"] = std::move(draws);
    j["in_sample_avg_ls"] = fit.in_sample_avg_ls;
    j["flags"] = fit.flags;
    return j.dump(2);
}

CombinationFit fit_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("fit JSON parse error: ") + e.what());
    }
    try {
        CombinationFit fit;
        fit.mode = parse_mode(j.at("mode").get<std::string>());
        for (const auto& mk : j.at("models")) {
            fit.models.push_back(parse_model_kind(mk.get<std::string>()));
        }
        fit.window.min_length = j.at("window").at("min_length").get<std::size_t>();
        fit.window.feature_window = j.at("window").at("feature_window").get<std::size_t>();
        fit.window.model_window = j.at("window").at("model_window").get<std::size_t>();
        fit.prior.sigma2 = j.at("prior").at("sigma2").get<double>();
        const auto& inf = j.at("inference");
        fit.inference.max_iterations = inf.at("max_iterations").get<int>();
        fit.inference.gradient_tolerance = inf.at("gradient_tolerance").get<double>();
        fit.inference.restarts = inf.at("restarts").get<int>();
        fit.inference.draws = inf.at("draws").get<int>();
        fit.inference.burn_in = inf.at("burn_in").get<int>();
        fit.inference.seed = inf.at("seed").get<std::uint64_t>();
        fit.model_options.sd_floor = j.at("model_options").at("sd_floor").get<double>();
        fit.model_options.ar_max_order = j.at("model_options").at("ar_max_order").get<int>();
        fit.refit_each_step = j.at("refit_each_step").get<bool>();
        fit.catalog.names = j.at("catalog").get<std::vector<std::string>>();
        fit.stats.mean = j.at("stats").at("mean").get<std::vector<double>>();
        fit.stats.sd = j.at("stats").at("sd").get<std::vector<double>>();
        fit.stats.constant = j.at("stats").at("constant").get<std::vector<std::uint8_t>>();
        fit.beta = coef_from_json(j.at("beta"));
        for (const auto& d : j.at("draws")) {
            PosteriorDraw draw;
            draw.selection = selection_from_json(d.at("selection"));
            draw.beta = coef_from_json(d.at("beta"));
            draw.log_posterior_value = d.at("log_posterior").get<double>();
            draw.proposal_failed = d.at("proposal_failed").get<bool>();
            fit.draws.push_back(std::move(draw));
        }
        fit.in_sample_avg_ls = j.at("in_sample_avg_ls").get<double>();
        fit.flags = j.at("flags").get<std::vector<std::string>>();
        return fit;
    } catch (const json::exception& e) {
        throw DataError(std::string("fit JSON field error: ") + e.what());
    }
}

void save_fit(const CombinationFit& fit, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    out << fit_to_json(fit) << '\n';
}

CombinationFit load_fit(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("MissingFile: cannot open " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fit_from_json(text);
}

} // namespace fepool
