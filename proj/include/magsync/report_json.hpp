#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "magsync/alignment.hpp"
#include "magsync/errors.hpp"
#include "magsync/estimator.hpp"
#include "magsync/experiments.hpp"
#include "magsync/physics.hpp"
#include "magsync/simulator.hpp"

namespace magsync {

inline nlohmann::json fit_to_json(const FitResult& fit) {
    return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
}

inline nlohmann::json estimate_to_json(const SyncEstimate& est) {
    const QualityReport quality = sync_quality(est);
    nlohmann::json doc;
    doc["sensor_id"] = est.sensor_id;
    doc["t0_s"] = est.t0_s;
    doc["t1_s"] = est.t1_s;
    doc["t_tr_s"] = est.t_tr_s;
    doc["tau_s"] = est.tau_s;
    doc["k1_gauss"] = tesla_to_gauss(est.k1_t);
    doc["n_hits"] = est.n_hits;
    doc["baselines"] = {{"b_low_gauss", tesla_to_gauss(est.baselines.b_low_t)},
                        {"b_high_gauss", tesla_to_gauss(est.baselines.b_high_t)},
                        {"flux_delta_gauss", tesla_to_gauss(est.baselines.flux_delta_t)},
                        {"noise_sigma_gauss", tesla_to_gauss(est.baselines.noise_sigma_t)}};
    doc["time_fit"] = fit_to_json(est.time_fit);
    doc["flux_fit"] = fit_to_json(est.flux_fit);
    doc["warnings"] = quality.warnings;
    return doc;
}

inline SyncEventPair event_pair_from_estimates(const nlohmann::json& first,
                                               const nlohmann::json& second) {
    SyncEventPair pair;
    pair.sensor_id = first.at("sensor_id").get<std::string>();
    pair.t0_first_s = first.at("t0_s").get<double>();
    pair.t0_second_s = second.at("t0_s").get<double>();
    if (pair.t0_second_s < pair.t0_first_s) std::swap(pair.t0_first_s, pair.t0_second_s);
    return pair;
}

inline nlohmann::json alignment_to_json(const AlignmentMap& map) {
    nlohmann::json doc;
    doc["sensor_id"] = map.sensor_id;
    doc["a"] = map.scale;
    doc["b_s"] = map.shift_s;
    doc["warnings"] = map.warnings();
    return doc;
}

inline nlohmann::json groundtruth_to_json(const GroundTruth& truth) {
    nlohmann::json sensors = nlohmann::json::object();
    for (const auto& [id, t0_local] : truth.t0_local_true_s)
        sensors[id] = {{"t0_local_true_s", t0_local}};
    return {{"t0_true_s", truth.t0_true_s}, {"sensors", sensors}};
}

inline nlohmann::json accuracy_to_json(const AccuracyStats& stats) {
    nlohmann::json doc;
    doc["mean_dt_ms"] = stats.mean_dt_s * 1e3;
    doc["std_dt_ms"] = stats.std_dt_s * 1e3;
    doc["min_dt_ms"] = stats.min_dt_s * 1e3;
    doc["max_dt_ms"] = stats.max_dt_s * 1e3;
    doc["mean_k"] = stats.mean_k;
    doc["std_k"] = stats.std_k;
    doc["mean_r2"] = stats.mean_r2;
    doc["std_r2"] = stats.std_r2;
    doc["skewness_dt"] = stats.skewness_dt;
    doc["mean_hit_spacing_ms"] = stats.mean_hit_spacing_s * 1e3;
    doc["n_runs"] = stats.n_runs;
    doc["n_failures"] = stats.n_failures;
    return doc;
}

inline void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
    out << doc.dump(2) << "\n";
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::schema_violation, path.string() + ": " + e.what());
    }
    return doc;
}

}  // namespace magsync
