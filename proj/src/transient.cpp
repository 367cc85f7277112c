#include "asmx/transient.hpp"

#include "asmx/errors.hpp"
#include "asmx/noise.hpp"
#include "asmx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace asmx {

// -----------------------------------------------------------------------------
// Waveform
// -----------------------------------------------------------------------------

Waveform::Waveform(std::vector<std::pair<double, double>> breakpoints) : points_(std::move(breakpoints)) {
    if (points_.empty()) {
        throw DomainError("waveform needs at least one breakpoint");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second)) {
            throw DomainError("waveform breakpoint " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(points_[i].first > points_[i - 1].first)) {
            throw DomainError("waveform breakpoint times must be strictly increasing");
        }
    }
}

Waveform Waveform::constant(double value) { return Waveform({{0.0, value}}); }

Waveform Waveform::pulse(double low, double high, double frequency, double duty, double duration,
                         bool start_high) {
    if (!(frequency > 0.0) || !(duty > 0.0 && duty < 1.0) || !(duration > 0.0)) {
        throw DomainError("pulse: need frequency > 0, 0 < duty < 1, duration > 0");
    }
    const double period = 1.0 / frequency;
    const double first = start_high ? duty * period : (1.0 - duty) * period;
    std::vector<std::pair<double, double>> pts{{0.0, start_high ? high : low}};
    for (long k = 0;; ++k) {
        const double rise_or_fall = static_cast<double>(k) * period + first;
        const double back = static_cast<double>(k + 1) * period;
        if (rise_or_fall > duration) break;
        pts.emplace_back(rise_or_fall, start_high ? low : high);
        if (back > duration) break;
        pts.emplace_back(back, start_high ? high : low);
    }
    return Waveform(std::move(pts));
}

double Waveform::value_at(double t) const {
    double value = points_.front().second;
    for (const auto& [time, v] : points_) {
        if (time <= t + 1e-12 * std::abs(time)) {
            value = v;
        } else {
            break;
        }
    }
    return value;
}

// -----------------------------------------------------------------------------
// TransientConfig
// -----------------------------------------------------------------------------

void TransientConfig::validate() const {
    network.validate();
    if (!(load_capacitance > 0.0) || !std::isfinite(load_capacitance)) {
        throw DomainError("transient: load_capacitance must be positive");
    }
    if (!(time_step > 0.0) || !std::isfinite(time_step)) {
        throw DomainError("transient: time_step must be positive");
    }
    if (!(duration >= 10.0 * time_step) || !std::isfinite(duration)) {
        throw DomainError("transient: duration must be at least 10 time steps");
    }
    if (input_waveforms.size() != static_cast<std::size_t>(network.class_size)) {
        throw DomainError("transient: need one input waveform per branch");
    }
    if (observed_branch >= input_waveforms.size()) {
        throw DomainError("transient: observed_branch out of range");
    }
    if (initial_output && !std::isfinite(*initial_output)) {
        throw DomainError("transient: initial_output must be finite");
    }
}

double TransientConfig::output_resistance() const {
    if (const auto* m = std::get_if<MirroredLoad>(&network.load)) {
        return m->load_resistance;
    }
    return network.drain_resistance();
}

double default_time_step(double time_constant, double edge_spacing) {
    const double h = time_constant / 100.0;
    if (edge_spacing <= 0.0) {
        return h;
    }
    const double steps = std::ceil(edge_spacing / h - 1e-9);
    return edge_spacing / steps;
}

// -----------------------------------------------------------------------------
// Metrics
// -----------------------------------------------------------------------------

namespace {

struct Segment {
    std::size_t begin = 0;  // sample index where the new target takes effect
    std::size_t end = 0;    // last sample index governed by this target (inclusive)
};

std::vector<Segment> transitions(const TransientResult& r) {
    std::vector<Segment> out;
    const std::size_t n = r.target_output.size();
    // A change on the final sample governs nothing.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (r.target_output[i] != r.target_output[i - 1]) {
            if (!out.empty()) out.back().end = i;
            out.push_back({i, n - 1});
        }
    }
    return out;
}

/// Time at which the clean trace first crosses `level` inside the segment,
/// by linear interpolation between samples.
std::optional<double> first_crossing(const TransientResult& r, const Segment& s, double level, bool rising) {
    for (std::size_t j = s.begin; j < s.end; ++j) {
        const double a = r.clean_output[j];
        const double b = r.clean_output[j + 1];
        const bool crossed = rising ? (a < level && b >= level) : (a > level && b <= level);
        if ((rising && a >= level) || (!rising && a <= level)) {
            return r.times[j];
        }
        if (crossed) {
            return r.times[j] + (level - a) / (b - a) * (r.times[j + 1] - r.times[j]);
        }
    }
    return std::nullopt;
}

std::optional<double> edge_time(const TransientResult& r, const Segment& s, double lo_frac, double hi_frac) {
    const double v0 = r.clean_output[s.begin];
    const double vf = r.target_output[s.begin];
    const double delta = vf - v0;
    const bool rising = delta > 0.0;
    const auto t_lo = first_crossing(r, s, v0 + lo_frac * delta, rising);
    const auto t_hi = first_crossing(r, s, v0 + hi_frac * delta, rising);
    if (!t_lo || !t_hi) return std::nullopt;
    return *t_hi - *t_lo;
}

/// Time from the start of the transition until the clean output stays within
/// 0.2% of the step amplitude around its final value.
std::optional<double> settle_time(const TransientResult& r, const Segment& s) {
    const double v0 = r.clean_output[s.begin];
    const double vf = r.target_output[s.begin];
    const double band = 0.002 * std::abs(vf - v0);
    std::optional<std::size_t> last_outside;
    for (std::size_t j = s.begin; j <= s.end; ++j) {
        if (std::abs(r.clean_output[j] - vf) > band) last_outside = j;
    }
    if (!last_outside) return 0.0;
    const std::size_t j = *last_outside;
    if (j >= s.end) return std::nullopt;
    const double a = std::abs(r.clean_output[j] - vf);
    const double b = std::abs(r.clean_output[j + 1] - vf);
    const double frac = (a - band) / (a - b);
    return r.times[j] + frac * (r.times[j + 1] - r.times[j]) - r.times[s.begin];
}

}  // namespace

SnrMeasurement measure_snr(std::span<const double> samples) {
    if (samples.empty()) {
        throw DomainError("measure_snr: empty window");
    }
    SnrMeasurement m;
    m.samples = samples.size();
    double mean_abs = 0.0;
    double mean = 0.0;
    for (double v : samples) {
        mean_abs += std::abs(v);
        mean += v;
    }
    mean_abs /= static_cast<double>(samples.size());
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) {
        ss += (v - mean) * (v - mean);
    }
    const double stddev = samples.size() > 1 ? std::sqrt(ss / static_cast<double>(samples.size() - 1)) : 0.0;
    m.snr_db = stddev > 0.0 ? 20.0 * std::log10(mean_abs / stddev) : std::numeric_limits<double>::infinity();
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    m.noise_error_pct = mean_abs > 0.0 ? 100.0 * (*mx - *mn) / (2.0 * mean_abs) : 0.0;
    return m;
}

SnrMeasurement measure_snr(const TransientResult& result, double window_start, double window_end) {
    std::vector<double> window;
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        if (result.times[i] >= window_start && result.times[i] <= window_end) {
            window.push_back(result.output_voltage[i]);
        }
    }
    if (window.empty()) {
        throw DomainError("measure_snr: no samples between the window bounds");
    }
    return measure_snr(window);
}

// -----------------------------------------------------------------------------
// Simulation
// -----------------------------------------------------------------------------

TransientResult run_transient(const TransientConfig& config) {
    config.validate();
    const NetworkConfig& net = config.network;
    const std::size_t n_branches = config.input_waveforms.size();
    const double h = config.time_step;
    const auto steps = static_cast<std::size_t>(std::floor(config.duration / h + 1e-9));
    const double r_out = config.output_resistance();
    const double gain = net.output_transresistance() / r_out;  // mirror width ratio, 1 otherwise
    const double decay = std::exp(-h / (r_out * config.load_capacitance));
    const double bandwidth = config.noise_bandwidth > 0.0 ? config.noise_bandwidth : 1.0 / (2.0 * h);
    const double thermal_psd = noise::thermal_psd_resistive(r_out, net.env);

    TransientResult res;
    res.times.reserve(steps + 1);
    res.output_voltage.reserve(steps + 1);
    res.branch_current.reserve(steps + 1);
    res.clean_output.reserve(steps + 1);
    res.target_output.reserve(steps + 1);

    std::vector<double> inputs(n_branches);
    std::vector<double> cached_inputs;
    double cached_current = 0.0;

    auto branch_at = [&](double t) {
        for (std::size_t k = 0; k < n_branches; ++k) {
            inputs[k] = config.input_waveforms[k].value_at(t);
        }
        if (inputs != cached_inputs) {
            try {
                const OperatingPoint op = solve_operating_point(net, inputs, config.solver);
                cached_current = op.branch_currents[config.observed_branch];
            } catch (const ConvergenceError& e) {
                std::ostringstream msg;
                msg << "transient solve failed at t = " << t << " s: " << e.what();
                throw ConvergenceError(msg.str());
            }
            cached_inputs = inputs;
        }
        return cached_current;
    };

    double current = branch_at(0.0);
    double clean = config.initial_output.value_or(current * gain * r_out);
    double noisy = clean;

    for (std::size_t n = 0; n <= steps; ++n) {
        const double t = static_cast<double>(n) * h;
        current = branch_at(t);
        const double target = current * gain * r_out;

        res.times.push_back(t);
        res.branch_current.push_back(current);
        res.clean_output.push_back(clean);
        res.output_voltage.push_back(noisy);
        res.target_output.push_back(target);

        double noisy_target = target;
        if (config.noise_enabled && current > 0.0) {
            const double psd = (gain * r_out) * (gain * r_out) * noise::shot_psd(current) + thermal_psd;
            noisy_target += std::sqrt(psd * bandwidth) * rng::normal(config.rng_seed, 0, n);
        }
        clean = target + (clean - target) * decay;
        noisy = noisy_target + (noisy - noisy_target) * decay;
    }

    const auto segs = transitions(res);
    for (const auto& s : segs) {
        const bool rising = res.target_output[s.begin] > res.clean_output[s.begin];
        if (!res.settle_time_998 && &s == &segs.front()) {
            res.settle_time_998 = settle_time(res, s);
        }
        if (rising && !res.rise_time_1090) {
            res.rise_time_1090 = edge_time(res, s, 0.1, 0.9);
        }
        if (!rising && !res.fall_time_9010) {
            res.fall_time_9010 = edge_time(res, s, 0.1, 0.9);
        }
    }

    // SNR over the settled part of the final segment.
    res.snr_window_end = res.times.back();
    res.snr_window_start = res.times.front();
    if (!segs.empty()) {
        const Segment& last = segs.back();
        const double start = res.times[last.begin];
        const auto settle = settle_time(res, last);
        res.snr_window_start = settle ? start + *settle : 0.5 * (start + res.snr_window_end);
    }
    const SnrMeasurement m = measure_snr(res, res.snr_window_start, res.snr_window_end);
    res.snr_db = m.snr_db;
    res.noise_error_pct = m.noise_error_pct;
    return res;
}

}  // namespace asmx
