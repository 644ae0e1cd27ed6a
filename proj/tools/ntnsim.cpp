#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <ntnsim/ntnsim.hpp>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> drops;
    std::optional<std::size_t> workers;
    std::string out;
};

ntnsim::ScenarioConfig load_with_overrides(const RunOptions& opt) {
    ntnsim::ScenarioConfig cfg = ntnsim::load_config(opt.config);
    if (opt.seed) cfg.master_seed = *opt.seed;
    if (opt.drops) cfg.n_drops = *opt.drops;
    if (opt.workers) cfg.workers = *opt.workers;
    if (!opt.out.empty()) cfg.output = opt.out;
    cfg.validate();
    return cfg;
}

void print_noma(const std::vector<ntnsim::noma::SweepRow>& rows, std::ostream& os) {
    os << "data_size_bits  ee_uav_ai_bits_per_j  ee_greedy_bits_per_j  k  validated\n";
    for (const auto& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%14.0f  %20.6g%s  %20.6g%s  %zu  %s\n", r.data_size_bits, r.ee_uav_ai,
                      r.feasible_uav_ai ? " " : "*", r.ee_greedy, r.feasible_greedy ? " " : "*", r.k_selected,
                      r.k_validated ? "yes" : "no");
        os << line;
    }
    os << "(* = payload not deliverable within the frame)\n";
}

int cmd_run(const RunOptions& opt) {
    const ntnsim::ScenarioConfig cfg = load_with_overrides(opt);
    if (cfg.experiment == ntnsim::Experiment::kUavNomaEe) {
        const auto rows = ntnsim::run_noma(cfg);
        if (!cfg.output.empty()) {
            std::ofstream out(cfg.output, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open '" + cfg.output + "' for writing");
            ntnsim::noma::write_sweep_csv(rows, out);
        } else {
            ntnsim::noma::write_sweep_csv(rows, std::cout);
        }
        print_noma(rows, cfg.output.empty() ? std::cerr : std::cout);
        return 0;
    }
    const auto records = ntnsim::run(cfg);
    ntnsim::Summary summary;
    if (!cfg.output.empty()) {
        summary = ntnsim::emit_results(records, cfg.output);
        ntnsim::print_summary(summary, std::cout);
    } else {
        ntnsim::write_records_csv(records, std::cout);
        ntnsim::print_summary(ntnsim::summarise(records), std::cerr);
    }
    return 0;
}

int cmd_sweep(const RunOptions& opt, const std::string& param, const std::vector<std::string>& values) {
    const ntnsim::ScenarioConfig base = load_with_overrides(opt);
    std::ofstream file;
    if (!base.output.empty()) {
        file.open(base.output, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open '" + base.output + "' for writing");
    }
    std::ostream& out = base.output.empty() ? std::cout : file;
    out.precision(17);
    const bool noma = base.experiment == ntnsim::Experiment::kUavNomaEe;
    if (noma)
        out << "param,value,data_size_bits,method,ee_bits_per_joule,k_selected,feasible_flag\n";
    else
        out << "param,value,scheme,drops,flagged,mean_capacity_bps,sd_capacity_bps,mean_sinr_db,"
               "mean_spectral_efficiency\n";

    for (const auto& value : values) {
        ntnsim::ScenarioConfig cfg = base;
        ntnsim::apply_override(cfg, param, value);
        cfg.validate();
        if (noma) {
            for (const auto& r : ntnsim::run_noma(cfg)) {
                out << param << ',' << value << ',' << r.data_size_bits << ",uav_ai," << r.ee_uav_ai << ','
                    << r.k_selected << ',' << (r.feasible_uav_ai ? 1 : 0) << '\n';
                out << param << ',' << value << ',' << r.data_size_bits << ",greedy," << r.ee_greedy << ','
                    << r.k_selected << ',' << (r.feasible_greedy ? 1 : 0) << '\n';
            }
            continue;
        }
        const auto summary = ntnsim::summarise(ntnsim::run(cfg));
        for (const auto& s : summary.schemes) {
            out << param << ',' << value << ',' << ntnsim::to_string(s.scheme) << ',' << s.drops << ',' << s.flagged
                << ',' << s.mean_capacity_bps << ',' << s.sd_capacity_bps << ',' << s.mean_sinr_db << ','
                << s.mean_spectral_efficiency << '\n';
        }
        std::cerr << param << " = " << value << '\n';
        ntnsim::print_summary(summary, std::cerr);
    }
    return 0;
}

int cmd_geometry(double altitude, double user_elev, double gw_elev, double earth_radius, double carrier) {
    ntnsim::GeometryContext ctx;
    ctx.earth_radius_km = earth_radius;
    ctx.altitude_km = altitude;
    ctx.user_min_elevation_deg = user_elev;
    ctx.gateway_min_elevation_deg = gw_elev;
    try {
        ctx.validate();
    } catch (const ntnsim::DomainError& e) {
        throw ntnsim::ConfigError(e.what());
    }
    const auto user = ntnsim::link_geometry(ctx, user_elev);
    const auto gw = ntnsim::link_geometry(ctx, gw_elev);
    std::printf("altitude            %.3f km\n", altitude);
    std::printf("user slant range    %.4f km  (elevation %.2f deg)\n", user.slant_range_km, user_elev);
    std::printf("user delay          %.5f ms\n", user.one_way_delay_ms);
    std::printf("feeder slant range  %.4f km  (elevation %.2f deg)\n", gw.slant_range_km, gw_elev);
    std::printf("feeder delay        %.5f ms\n", gw.one_way_delay_ms);
    std::printf("misalignment dt     %.4f ms\n", ntnsim::misalignment_interval(ctx));
    std::printf("orbital speed       %.6f km/s\n", ntnsim::orbital_speed(ctx));
    std::printf("max doppler         %.1f Hz  (carrier %.4g Hz)\n", ntnsim::max_doppler(ctx, carrier), carrier);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multibeam NTN system-level simulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto add_common = [](CLI::App* sub, RunOptions& o) {
        sub->add_option("--config", o.config, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--drops", o.drops, "number of Monte-Carlo drops");
        sub->add_option("--out", o.out, "output CSV path (stdout if omitted)");
        sub->add_option("--workers", o.workers, "worker threads");
    };

    auto* run = app.add_subcommand("run", "run a scenario and write per-drop records");
    add_common(run, run_opt);

    RunOptions sweep_opt;
    std::string param;
    std::vector<std::string> values;
    auto* sweep = app.add_subcommand("sweep", "rerun a scenario for several values of one key");
    add_common(sweep, sweep_opt);
    sweep->add_option("--param", param, "dotted config key, e.g. users.n_users")->required();
    sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');

    double altitude = 600.0, user_elev = 30.0, gw_elev = 10.0;
    double earth_radius = ntnsim::constants::kMeanEarthRadiusKm, carrier = 20e9;
    auto* geom = app.add_subcommand("geometry", "print slant ranges, delays, misalignment and Doppler");
    geom->add_option("--altitude", altitude, "orbit altitude [km]")->capture_default_str();
    geom->add_option("--user-elev", user_elev, "user minimum elevation [deg]")->capture_default_str();
    geom->add_option("--gw-elev", gw_elev, "gateway minimum elevation [deg]")->capture_default_str();
    geom->add_option("--earth-radius", earth_radius, "Earth radius [km]")->capture_default_str();
    geom->add_option("--carrier", carrier, "carrier frequency [Hz]")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_opt);
        if (*sweep) return cmd_sweep(sweep_opt, param, values);
        return cmd_geometry(altitude, user_elev, gw_elev, earth_radius, carrier);
    } catch (const ntnsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
