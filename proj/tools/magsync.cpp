// Command-line surface: simulate scenarios, estimate procedure start times,
// build fleet alignments and run the scripted experiments.
//
// Exit codes: 0 success, 1 usage error, 2 data or estimation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "magsync/magsync.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

magsync::Scenario load_scenario_or_default(const std::string& path, std::uint64_t* seed_override) {
    magsync::Scenario scenario =
        path.empty() ? magsync::default_scenario() : magsync::load_scenario(path);
    if (seed_override != nullptr) scenario.seed = *seed_override;
    print_warnings(scenario.validate());
    return scenario;
}

void write_run(const magsync::SyncRun& run, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& series : run.magnetometer)
        magsync::write_series_csv(series, dir / (series.sensor_id + "_mag.csv"));
    if (run.adc.has_value()) magsync::write_series_csv(*run.adc, dir / "adc.csv");
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, std::optional<double> session_gap) {
    magsync::Scenario scenario =
        load_scenario_or_default(scenario_path, seed ? &*seed : nullptr);
    const fs::path out(out_dir);
    if (session_gap.has_value()) {
        const magsync::SessionRun session = magsync::run_session(scenario, *session_gap);
        write_run(session.first, out / "event1");
        write_run(session.second, out / "event2");
        json truth;
        truth["gap_s"] = session.gap_duration_s;
        truth["events"] = {magsync::groundtruth_to_json(session.first.truth),
                           magsync::groundtruth_to_json(session.second.truth)};
        magsync::write_json(truth, out / "groundtruth.json");
    } else {
        const magsync::SyncRun run = magsync::run_sync_procedure(scenario);
        write_run(run, out);
        magsync::write_json(magsync::groundtruth_to_json(run.truth), out / "groundtruth.json");
    }
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_sync(const std::string& series_path, const std::string& scenario_path,
             const magsync::InductorSpec& inductor_flags, double drive_freq,
             const std::string& out_path) {
    magsync::InductorSpec inductor = inductor_flags;
    double freq = drive_freq;
    if (!scenario_path.empty()) {
        const magsync::Scenario scenario = magsync::load_scenario(scenario_path);
        inductor = scenario.inductor;
        freq = scenario.drive_freq_hz;
    }
    const magsync::SampleSeries series = magsync::read_series_csv(series_path);
    const magsync::SyncEstimate estimate = magsync::estimate_t0(series, inductor, freq);
    const json doc = magsync::estimate_to_json(estimate);
    if (!out_path.empty()) magsync::write_json(doc, out_path);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_align(const std::vector<std::string>& estimate_paths, const std::string& reference_id,
              const std::vector<std::string>& series_paths, const std::string& out_dir) {
    std::map<std::string, std::vector<json>> by_sensor;
    for (const auto& path : estimate_paths) {
        json doc = magsync::read_json(path);
        by_sensor[doc.at("sensor_id").get<std::string>()].push_back(std::move(doc));
    }
    if (!by_sensor.contains(reference_id))
        throw magsync::Error(magsync::ErrorCode::invalid_argument,
                             "no estimates for reference sensor '" + reference_id + "'");

    auto pair_of = [](std::vector<json>& docs) {
        std::sort(docs.begin(), docs.end(), [](const json& a, const json& b) {
            return a.at("t0_s").get<double>() < b.at("t0_s").get<double>();
        });
        return magsync::event_pair_from_estimates(docs.front(), docs.back());
    };

    json maps = json::array();
    std::vector<magsync::AlignmentMap> alignment_maps;
    const bool reference_has_two = by_sensor[reference_id].size() >= 2;
    magsync::SyncEventPair reference_pair;
    double reference_first = by_sensor[reference_id].front().at("t0_s").get<double>();
    if (reference_has_two) reference_pair = pair_of(by_sensor[reference_id]);

    for (auto& [sensor_id, docs] : by_sensor) {
        magsync::AlignmentMap map;
        map.sensor_id = sensor_id;
        std::vector<std::string> warnings;
        if (sensor_id == reference_id) {
            map.scale = 1.0;
            map.shift_s = 0.0;
        } else if (docs.size() >= 2 && reference_has_two) {
            map = magsync::build_alignment(pair_of(docs), reference_pair);
            warnings = map.warnings();
        } else {
            // offset-only fallback when either side is missing its second event
            map.scale = 1.0;
            map.shift_s = reference_first - docs.front().at("t0_s").get<double>();
            warnings.push_back("single-event: offset-only map emitted with a=1");
        }
        alignment_maps.push_back(map);
        json entry = magsync::alignment_to_json(map);
        entry["warnings"] = warnings;
        maps.push_back(std::move(entry));
    }

    json doc;
    doc["reference_id"] = reference_id;
    doc["maps"] = maps;

    const fs::path out(out_dir.empty() ? "." : out_dir);
    fs::create_directories(out);
    magsync::write_json(doc, out / "alignment.json");

    for (const auto& path : series_paths) {
        const magsync::SampleSeries series = magsync::read_series_csv(path);
        const auto map_it =
            std::find_if(alignment_maps.begin(), alignment_maps.end(),
                         [&](const auto& m) { return m.sensor_id == series.sensor_id; });
        if (map_it == alignment_maps.end())
            throw magsync::Error(magsync::ErrorCode::invalid_argument,
                                 "no alignment map for series sensor '" + series.sensor_id + "'");
        const magsync::SampleSeries aligned = magsync::apply_alignment(*map_it, series);
        const fs::path name = fs::path(path).stem().string() + "_aligned.csv";
        magsync::write_series_csv(aligned, out / name);
    }

    std::cout << doc.dump(2) << "\n";
    return 0;
}

void write_accuracy_report(const magsync::AccuracyStats& stats, const fs::path& dir) {
    std::ofstream csv(dir / "accuracy.csv");
    csv << "mu_dt_ms,sigma_dt_ms,min_dt_ms,max_dt_ms,mu_k,sigma_k,mu_r2,sigma_r2\n";
    csv << csv_num(stats.mean_dt_s * 1e3) << ',' << csv_num(stats.std_dt_s * 1e3) << ','
        << csv_num(stats.min_dt_s * 1e3) << ',' << csv_num(stats.max_dt_s * 1e3) << ','
        << csv_num(stats.mean_k) << ',' << csv_num(stats.std_k) << ',' << csv_num(stats.mean_r2)
        << ',' << csv_num(stats.std_r2) << "\n";
    magsync::write_json(magsync::accuracy_to_json(stats), dir / "accuracy.json");
}

void write_duration_report(const magsync::DurationStudy& study, const fs::path& dir) {
    std::ofstream csv(dir / "duration.csv");
    csv << "duration_s,mean_hits,std_hits,mean_dt_ms,std_dt_ms,n_runs,n_failures\n";
    for (const auto& p : study.points)
        csv << csv_num(p.duration_s) << ',' << csv_num(p.mean_hits) << ','
            << csv_num(p.std_hits) << ',' << csv_num(p.mean_dt_s * 1e3) << ','
            << csv_num(p.std_dt_s * 1e3) << ',' << p.n_runs << ',' << p.n_failures << "\n";
    json doc;
    doc["hits_regression"] = magsync::fit_to_json(study.hits_regression);
    doc["n_durations"] = study.points.size();
    magsync::write_json(doc, dir / "duration.json");
}

void write_drift_report(const std::vector<magsync::DriftRecord>& records, const fs::path& dir) {
    std::ofstream csv(dir / "drift.csv");
    csv << "sensor_id,event_index,reference_time_s,t0_local_s,deviation_ms\n";
    json summary = json::array();
    for (const auto& record : records) {
        for (std::size_t e = 0; e < record.deviations_s.size(); ++e)
            csv << record.sensor_id << ',' << e + 1 << ','
                << csv_num(record.reference_times_s[e]) << ','
                << csv_num(record.event_times_local_s[e]) << ','
                << csv_num(record.deviations_s[e] * 1e3) << "\n";
        summary.push_back({{"sensor_id", record.sensor_id},
                           {"n_events", record.deviations_s.size()},
                           {"drift_slope_ppm", record.regression.slope * 1e6},
                           {"r_squared", record.regression.r_squared},
                           {"final_deviation_ms",
                            record.deviations_s.empty() ? 0.0
                                                        : record.deviations_s.back() * 1e3}});
    }
    magsync::write_json(summary, dir / "drift.json");
}

int cmd_experiment(const std::string& name, const std::string& scenario_path,
                   const std::string& out_dir, std::optional<std::uint64_t> seed, int reps,
                   int max_duration, int reps_per_duration, double interval, double total,
                   int n_sensors, double drift_low_ppm, double drift_high_ppm) {
    magsync::Scenario scenario =
        load_scenario_or_default(scenario_path, seed ? &*seed : nullptr);
    const fs::path out(out_dir);
    fs::create_directories(out);
    if (name == "accuracy") {
        write_accuracy_report(magsync::experiment_accuracy(scenario, reps), out);
    } else if (name == "duration") {
        write_duration_report(
            magsync::experiment_duration(scenario, max_duration, reps_per_duration), out);
    } else if (name == "drift") {
        magsync::Rng rng(magsync::derive_seed(scenario.seed, 0xd41f7));
        std::vector<double> drifts;
        for (int j = 0; j < n_sensors; ++j)
            drifts.push_back(rng.uniform(drift_low_ppm, drift_high_ppm) * 1e-6);
        write_drift_report(magsync::experiment_drift(scenario, interval, total, drifts), out);
    } else {
        throw CLI::ValidationError("--name", "unknown experiment '" + name + "'");
    }
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnetic-field event synchronisation toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate magnetometer/ADC traces");
    std::string sim_scenario, sim_out = "out";
    std::optional<std::uint64_t> sim_seed;
    std::optional<double> sim_gap;
    simulate->add_option("--scenario", sim_scenario, "Scenario JSON (omit for built-in default)");
    simulate->add_option("--out", sim_out, "Output directory");
    simulate->add_option("--seed", sim_seed, "Override the scenario seed");
    simulate->add_option("--session-gap", sim_gap,
                         "Run two procedures separated by this many seconds");

    // sync
    auto* sync = app.add_subcommand("sync", "Estimate the procedure start time from a series");
    std::string sync_series, sync_scenario, sync_out;
    magsync::InductorSpec inductor;
    double drive_freq = 6.0;
    sync->add_option("--series", sync_series, "Series CSV")->required();
    sync->add_option("--scenario", sync_scenario, "Take inductor and drive from this scenario");
    sync->add_option("--inductance", inductor.inductance_h, "Inductance [H]");
    sync->add_option("--resistance", inductor.resistance_ohm, "Resistance [ohm]");
    sync->add_option("--windings", inductor.windings, "Winding count");
    sync->add_option("--length", inductor.length_m, "Inductor length [m]");
    sync->add_option("--permeability", inductor.permeability_h_per_m, "Permeability [H/m]");
    sync->add_option("--voltage", inductor.supply_voltage_v, "Supply voltage [V]");
    sync->add_option("--drive-freq", drive_freq, "Drive frequency [Hz]");
    sync->add_option("--out", sync_out, "Also write the estimate JSON here");

    // align
    auto* align = app.add_subcommand("align", "Build affine maps from per-sensor estimates");
    std::vector<std::string> align_estimates, align_series;
    std::string align_reference, align_out = ".";
    align->add_option("--estimates", align_estimates, "Estimate JSONs (two per sensor)")
        ->required()
        ->expected(-1);
    align->add_option("--reference", align_reference, "Reference sensor id")->required();
    align->add_option("--series", align_series, "Series CSVs to rewrite onto the reference");
    align->add_option("--out", align_out, "Output directory");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run a scripted study");
    std::string exp_name, exp_scenario, exp_out = "out";
    std::optional<std::uint64_t> exp_seed;
    int exp_reps = 200, exp_max_duration = 30, exp_reps_per_duration = 10, exp_sensors = 8;
    double exp_interval = 300.0, exp_total = 3600.0;
    double exp_drift_low = 21.0, exp_drift_high = 28.0;
    experiment->add_option("--name", exp_name, "accuracy | duration | drift")->required();
    experiment->add_option("--scenario", exp_scenario, "Scenario JSON");
    experiment->add_option("--out", exp_out, "Output directory");
    experiment->add_option("--seed", exp_seed, "Override the scenario seed");
    experiment->add_option("--reps", exp_reps, "Accuracy repetitions");
    experiment->add_option("--max-duration", exp_max_duration, "Duration sweep upper bound [s]");
    experiment->add_option("--reps-per-duration", exp_reps_per_duration,
                           "Repetitions per duration");
    experiment->add_option("--interval", exp_interval, "Drift event interval [s]");
    experiment->add_option("--total", exp_total, "Drift session length [s]");
    experiment->add_option("--n-sensors", exp_sensors, "Drift fleet size");
    experiment->add_option("--drift-low", exp_drift_low, "Drift sample range low [ppm]");
    experiment->add_option("--drift-high", exp_drift_high, "Drift sample range high [ppm]");

    try {
        app.parse(argc, argv);
        if (simulate->parsed())
            return cmd_simulate(sim_scenario, sim_out, sim_seed, sim_gap);
        if (sync->parsed())
            return cmd_sync(sync_series, sync_scenario, inductor, drive_freq, sync_out);
        if (align->parsed())
            return cmd_align(align_estimates, align_reference, align_series, align_out);
        if (experiment->parsed())
            return cmd_experiment(exp_name, exp_scenario, exp_out, exp_seed, exp_reps,
                                  exp_max_duration, exp_reps_per_duration, exp_interval,
                                  exp_total, exp_sensors, exp_drift_low, exp_drift_high);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const magsync::Error& e) {
        json err;
        err["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
