#include "asmx/runner.hpp"

#include "asmx/analysis.hpp"
#include "asmx/csv.hpp"
#include "asmx/errors.hpp"
#include "asmx/noise.hpp"
#include "asmx/transient.hpp"

#include <algorithm>
#include <cmath>
#include <system_error>

namespace asmx {

namespace {

using csv::format_number;

class Summary {
public:
    void line(const std::string& key, const std::string& value) { text_ += key + ": " + value + "\n"; }
    void number(const std::string& key, double value) { line(key, format_number(value)); }
    [[nodiscard]] const std::string& str() const { return text_; }

private:
    std::string text_;
};

std::string describe_load(const LoadSpec& load) {
    if (std::holds_alternative<ResistorLoad>(load)) return "resistor";
    if (std::holds_alternative<PmosLinearLoad>(load)) return "pmos_linear";
    return "mirrored";
}

void header(Summary& s, const config::RunConfig& rc, Command command) {
    s.line("command", to_string(command));
    s.line("config", rc.origin);
    s.line("technology", to_string(rc.network.technology));
    s.line("class_size", std::to_string(rc.network.class_size));
    s.line("load", describe_load(rc.network.load));
    s.line("tail", to_string(rc.network.tail.kind));
    s.number("tail_current_a", rc.network.tail.nominal_current);
    s.line("seed", std::to_string(rc.seed));
}

void power_lines(Summary& s, const config::RunConfig& rc) {
    const double p = analysis::power_estimate(rc.network, rc.reference_paths);
    s.number("power_w", p);
    s.number("power_reference_paths", rc.reference_paths);
    if (rc.reference_power) {
        const double ratio = p / *rc.reference_power;
        s.number("power_reference_w", *rc.reference_power);
        s.number("power_ratio", ratio);
        s.line("power_within_factor_2", ratio >= 0.5 && ratio <= 2.0 ? "yes" : "no");
        s.line("power_note", "approximate, reference total has no per-block breakdown");
    }
}

void warning_lines(Summary& s, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) s.line("warning", w);
}

template <typename T>
const T& require(const std::optional<T>& section, const char* name, const config::RunConfig& rc) {
    if (!section) {
        throw ConfigError(rc.origin, 0, std::string("command needs a [") + name + "] section");
    }
    return *section;
}

RunOutcome run_sweep(const RunManifest& m) {
    const auto& rc = m.config;
    const auto& sec = require(rc.sweep, "sweep", rc);
    const auto res = analysis::sigmoid_sweep(rc.network, sec.branch, sec.start, sec.stop, sec.points, rc.dc_bias);

    csv::Table t({"sweep_v", "measured_frac", "ideal_frac", "error_frac"});
    for (std::size_t i = 0; i < res.swept_input.size(); ++i) {
        t.add_row({format_number(res.swept_input[i]), format_number(res.measured_fraction[i]),
                   format_number(res.ideal_fraction[i]), format_number(res.error[i])});
    }
    Summary s;
    header(s, rc, m.command);
    s.line("swept_branch", std::to_string(sec.branch));
    s.line("points", std::to_string(sec.points));
    s.number("max_error_pct", res.max_abs_error_pct);
    power_lines(s, rc);
    warning_lines(s, res.warnings);

    RunOutcome out{s.str(), {m.output_dir / "sweep.csv"}};
    t.write(out.files.back());
    return out;
}

RunOutcome run_transient_cmd(const RunManifest& m) {
    const auto& rc = m.config;
    const TransientConfig tc = transient_config(rc);
    const auto res = run_transient(tc);

    csv::Table t({"t_s", "vout_v", "ibranch_a"});
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        t.add_row({format_number(res.times[i]), format_number(res.output_voltage[i]),
                   format_number(res.branch_current[i])});
    }
    auto ns = [](const std::optional<double>& v) { return v ? format_number(*v * 1e9) : std::string("n/a"); };
    Summary s;
    header(s, rc, m.command);
    s.number("time_constant_ns", tc.time_constant() * 1e9);
    s.number("time_step_s", tc.time_step);
    s.line("samples", std::to_string(res.times.size()));
    s.line("noise", tc.noise_enabled ? "on" : "off");
    s.line("rise_time_ns", ns(res.rise_time_1090));
    s.line("fall_time_ns", ns(res.fall_time_9010));
    s.line("settle_ns", ns(res.settle_time_998));
    s.number("snr_db", res.snr_db);
    s.number("noise_error_pct", res.noise_error_pct);
    s.number("snr_window_start_s", res.snr_window_start);
    s.number("snr_window_end_s", res.snr_window_end);
    power_lines(s, rc);

    RunOutcome out{s.str(), {m.output_dir / "transient.csv"}};
    t.write(out.files.back());
    return out;
}

RunOutcome run_noise(const RunManifest& m) {
    const auto& rc = m.config;
    const auto& sec = require(rc.noise, "noise", rc);
    const OperatingPoint op = solve_operating_point(rc.network, rc.inputs);
    const double current = op.branch_currents.at(sec.branch);
    const double r_out = rc.network.output_transresistance();

    const auto sources = noise::branch_sources(r_out, current, sec.bandwidth, sec.flicker_constant,
                                               sec.eval_frequency);
    const auto budget = noise::budget_from_sources(sources, rc.network.env);

    csv::Table t({"label", "psd", "rms_v", "fraction"});
    for (const auto& term : budget.terms) {
        t.add_row({term.label, format_number(term.psd), format_number(term.rms), format_number(term.fraction)});
    }
    Summary s;
    header(s, rc, m.command);
    s.number("branch_current_a", current);
    s.number("referral_resistance_ohm", r_out);
    s.number("bandwidth_hz", sec.bandwidth);
    for (const auto& term : budget.terms) s.number("fraction_pct_" + term.label, 100.0 * term.fraction);
    s.number("total_rms_v", budget.total_rms);
    s.number("total_rms_rss_v", budget.total_rms_rss);
    const double signal = current * r_out;
    s.number("snr_db", 20.0 * std::log10(signal / budget.total_rms));

    if (sec.compare_load) {
        NetworkConfig alt = rc.network;
        alt.load = *sec.compare_load;
        const OperatingPoint op_b = solve_operating_point(alt, rc.inputs);
        const double r_b = alt.output_transresistance();
        const double i_b = op_b.branch_currents.at(sec.branch);
        const auto sources_b = noise::branch_sources(r_b, i_b, sec.bandwidth, sec.flicker_constant,
                                                     sec.eval_frequency);
        const auto cmp = noise::compare_load_budgets(sources_b, sources, rc.network.env);
        const double snr_b = 20.0 * std::log10(i_b * r_b / cmp.budget_a.total_rms);
        s.line("compare_load", describe_load(alt.load));
        s.number("compare_referral_resistance_ohm", r_b);
        s.number("compare_total_rms_v", cmp.budget_a.total_rms);
        s.number("compare_snr_db", snr_b);
        s.number("snr_gain_db", 20.0 * std::log10(signal / budget.total_rms) - snr_b);
    }
    power_lines(s, rc);
    warning_lines(s, op.warnings);

    RunOutcome out{s.str(), {m.output_dir / "noise.csv"}};
    t.write(out.files.back());
    return out;
}

RunOutcome run_montecarlo(const RunManifest& m) {
    const auto& rc = m.config;
    const config::MonteCarloSection sec = rc.montecarlo.value_or(config::MonteCarloSection{});
    const auto res = analysis::mismatch_monte_carlo(rc.network, rc.inputs, {sec.sigma, sec.trials, rc.seed});

    csv::Table t({"trial", "max_rel_error"});
    for (std::size_t i = 0; i < res.trial.size(); ++i) {
        t.add_row({std::to_string(res.trial[i]), format_number(res.max_rel_error[i])});
    }
    Summary s;
    header(s, rc, m.command);
    s.number("sigma_rel", sec.sigma);
    s.line("trials", std::to_string(sec.trials));
    s.line("rejected", std::to_string(res.rejected));
    s.number("mean_max_rel_error_pct", 100.0 * res.mean);
    s.number("median_max_rel_error_pct", 100.0 * res.median);
    s.number("p95_max_rel_error_pct", 100.0 * res.p95);
    if (sec.sigmas.size() >= 2) {
        const auto scan = analysis::mismatch_sigma_scan(rc.network, rc.inputs, sec.sigmas, sec.trials, rc.seed);
        for (std::size_t i = 0; i < scan.sigmas.size(); ++i) {
            s.line("scan", format_number(scan.sigmas[i]) + " " + format_number(scan.mean_errors[i]));
        }
        s.number("scan_slope", scan.slope);
        s.number("scan_r_squared", scan.r_squared);
    }
    power_lines(s, rc);

    RunOutcome out{s.str(), {m.output_dir / "montecarlo.csv"}};
    t.write(out.files.back());
    return out;
}

RunOutcome run_margins(const RunManifest& m) {
    const auto& rc = m.config;
    const auto& sec = require(rc.margins, "margins", rc);
    const double supply = rc.network.v_supply_high - rc.network.v_supply_low;
    const auto rep = analysis::margin_report(sec.v_th_sub, sec.v_swing, sec.stacked_mirrors, sec.v_th,
                                             sec.v_overdrive, supply);
    Summary s;
    header(s, rc, m.command);
    s.number("margin_v", rep.subthreshold_minimum);
    s.number("saturation_source_minimum_v", rep.saturation_source_minimum);
    s.number("supply_v", rep.supply);
    s.number("headroom_v", rep.supply - rep.subthreshold_minimum);
    s.line("exceeds_supply", rep.exceeds_supply ? "yes" : "no");
    s.line("stacked_mirrors", std::to_string(sec.stacked_mirrors));
    power_lines(s, rc);
    return {s.str(), {}};
}

}  // namespace

TransientConfig transient_config(const config::RunConfig& rc) {
    const auto& sec = require(rc.transient, "transient", rc);
    TransientConfig tc;
    tc.network = rc.network;
    tc.load_capacitance = sec.load_capacitance;
    tc.observed_branch = sec.branch;
    tc.noise_enabled = sec.noise;
    tc.noise_bandwidth = sec.noise_bandwidth;
    tc.rng_seed = rc.seed;
    tc.initial_output = sec.initial_output;
    tc.duration = sec.duration > 0.0 ? sec.duration : sec.periods / sec.frequency;
    const double edge = std::min(sec.duty, 1.0 - sec.duty) / sec.frequency;
    tc.time_step = sec.time_step > 0.0 ? sec.time_step : default_time_step(tc.time_constant(), edge);
    for (std::size_t k = 0; k < rc.inputs.size(); ++k) {
        tc.input_waveforms.push_back(k == sec.branch
                                         ? Waveform::pulse(sec.low, sec.high, sec.frequency, sec.duty, tc.duration)
                                         : Waveform::constant(rc.inputs[k]));
    }
    return tc;
}

const char* to_string(Command command) {
    switch (command) {
        case Command::sweep: return "sweep";
        case Command::transient: return "transient";
        case Command::noise: return "noise";
        case Command::montecarlo: return "montecarlo";
        case Command::margins: return "margins";
    }
    return "?";
}

Command parse_command(const std::string& name) {
    for (Command c : {Command::sweep, Command::transient, Command::noise, Command::montecarlo, Command::margins}) {
        if (name == to_string(c)) return c;
    }
    throw ConfigError("command", 0, "unknown command '" + name + "'");
}

void apply_overrides(config::RunConfig& rc, Command command, const Overrides& o) {
    if (o.seed) rc.seed = *o.seed;
    if (o.points) {
        if (*o.points < 3) throw ConfigError("--points", 0, "must be at least 3");
        if (command == Command::sweep && rc.sweep) rc.sweep->points = *o.points;
    }
    if (o.trials || o.sigma) {
        if (!rc.montecarlo) rc.montecarlo = config::MonteCarloSection{};
        if (o.trials) {
            if (*o.trials < 1) throw ConfigError("--trials", 0, "must be at least 1");
            rc.montecarlo->trials = *o.trials;
        }
        if (o.sigma) {
            if (!(*o.sigma >= 0.0) || !std::isfinite(*o.sigma)) {
                throw ConfigError("--sigma", 0, "must be a non-negative number");
            }
            rc.montecarlo->sigma = *o.sigma;
        }
    }
    if (o.noise && rc.transient) rc.transient->noise = *o.noise;
}

RunOutcome run(const RunManifest& m) {
    std::error_code ec;
    std::filesystem::create_directories(m.output_dir, ec);
    if (ec || !std::filesystem::is_directory(m.output_dir)) {
        throw ConfigError(m.output_dir.string(), 0, "output directory cannot be created");
    }
    RunOutcome out;
    switch (m.command) {
        case Command::sweep: out = run_sweep(m); break;
        case Command::transient: out = run_transient_cmd(m); break;
        case Command::noise: out = run_noise(m); break;
        case Command::montecarlo: out = run_montecarlo(m); break;
        case Command::margins: out = run_margins(m); break;
    }
    const auto summary_path = m.output_dir / "summary.txt";
    csv::write_file(summary_path, out.summary);
    out.files.insert(out.files.begin(), summary_path);
    return out;
}

}  // namespace asmx
