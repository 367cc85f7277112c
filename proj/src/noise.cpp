#include "asmx/noise.hpp"

#include "asmx/errors.hpp"

#include <cmath>

namespace asmx::noise {

namespace {

double temperature_of(const EnvParams& env) {
    if (!(env.temperature >= 0.0) || !std::isfinite(env.temperature)) {
        throw DomainError("noise: temperature must be non-negative");
    }
    return env.temperature;
}

double output_psd(const NoiseSourceSpec& s, const EnvParams& env) {
    auto need_positive = [&](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(std::string("noise source '") + s.label + "': " + what + " must be positive");
        }
    };
    need_positive(s.resistance, "resistance");
    const double r2 = s.resistance * s.resistance;
    switch (s.kind) {
        case SourceKind::thermal_resistive:
            return thermal_psd_resistive(s.resistance, env);
        case SourceKind::thermal_saturation:
            return r2 * thermal_psd_saturation(s.transconductance, env);
        case SourceKind::shot:
            return r2 * shot_psd(s.drain_current);
        case SourceKind::flicker:
            return r2 * flicker_psd(s.flicker_constant, s.drain_current, s.frequency);
    }
    return 0.0;
}

}  // namespace

double thermal_psd_resistive(double resistance, const EnvParams& env) {
    if (!(resistance > 0.0) || !std::isfinite(resistance)) {
        throw DomainError("thermal_psd_resistive: resistance must be positive");
    }
    return 4.0 * kBoltzmann * temperature_of(env) * resistance;
}

double shot_psd(double drain_current) {
    if (!(drain_current > 0.0) || !std::isfinite(drain_current)) {
        throw DomainError("shot_psd: drain current must be positive");
    }
    return 2.0 * kElementaryCharge * drain_current;
}

double flicker_psd(double flicker_constant, double drain_current, double frequency) {
    if (!(frequency > 0.0) || !std::isfinite(frequency)) {
        throw DomainError("flicker_psd: frequency must be positive");
    }
    if (flicker_constant < 0.0 || drain_current < 0.0) {
        throw DomainError("flicker_psd: flicker constant and drain current must be non-negative");
    }
    return flicker_constant * drain_current / frequency;
}

double thermal_psd_saturation(double transconductance, const EnvParams& env) {
    if (!(transconductance > 0.0) || !std::isfinite(transconductance)) {
        throw DomainError("thermal_psd_saturation: transconductance must be positive");
    }
    return 4.0 * kBoltzmann * temperature_of(env) * transconductance / 3.0;
}

const char* to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::thermal_resistive: return "thermal_resistive";
        case SourceKind::thermal_saturation: return "thermal_saturation";
        case SourceKind::flicker: return "flicker";
        case SourceKind::shot: return "shot";
    }
    return "?";
}

NoiseBudget budget_from_sources(std::span<const NoiseSourceSpec> sources, const EnvParams& env) {
    if (sources.empty()) {
        throw DomainError("noise budget needs at least one source");
    }
    NoiseBudget budget;
    double sum_squares = 0.0;
    for (const auto& s : sources) {
        if (!(s.bandwidth > 0.0) || !std::isfinite(s.bandwidth)) {
            throw DomainError("noise source '" + s.label + "': bandwidth must be positive");
        }
        NoiseTerm term;
        term.label = s.label.empty() ? to_string(s.kind) : s.label;
        term.psd = output_psd(s, env);
        term.rms = std::sqrt(term.psd * s.bandwidth);
        budget.total_rms += term.rms;
        budget.total_psd += term.psd;
        sum_squares += term.rms * term.rms;
        budget.terms.push_back(std::move(term));
    }
    budget.total_rms_rss = std::sqrt(sum_squares);
    for (auto& t : budget.terms) {
        t.fraction = budget.total_rms > 0.0 ? t.rms / budget.total_rms : 0.0;
    }
    return budget;
}

std::vector<NoiseSourceSpec> branch_sources(double load_resistance, double drain_current, double bandwidth,
                                            double flicker_constant, double eval_frequency) {
    std::vector<NoiseSourceSpec> sources;
    NoiseSourceSpec shot{SourceKind::shot, "shot"};
    shot.resistance = load_resistance;
    shot.drain_current = drain_current;
    shot.bandwidth = bandwidth;
    sources.push_back(shot);

    NoiseSourceSpec thermal{SourceKind::thermal_resistive, "thermal"};
    thermal.resistance = load_resistance;
    thermal.bandwidth = bandwidth;
    sources.push_back(thermal);

    if (flicker_constant > 0.0) {
        NoiseSourceSpec flicker{SourceKind::flicker, "flicker"};
        flicker.resistance = load_resistance;
        flicker.drain_current = drain_current;
        flicker.flicker_constant = flicker_constant;
        flicker.frequency = eval_frequency;
        flicker.bandwidth = bandwidth;
        sources.push_back(flicker);
    }
    return sources;
}

NoiseBudget branch_noise_budget(double load_resistance, double drain_current, double bandwidth,
                                double flicker_constant, double eval_frequency, const EnvParams& env) {
    if (flicker_constant < 0.0) {
        throw DomainError("branch_noise_budget: flicker constant must be non-negative");
    }
    const auto sources = branch_sources(load_resistance, drain_current, bandwidth, flicker_constant, eval_frequency);
    return budget_from_sources(sources, env);
}

LoadComparison compare_load_budgets(std::span<const NoiseSourceSpec> load_a,
                                    std::span<const NoiseSourceSpec> load_b, const EnvParams& env) {
    LoadComparison out;
    out.budget_a = budget_from_sources(load_a, env);
    out.budget_b = budget_from_sources(load_b, env);
    out.snr_delta_db = 20.0 * std::log10(out.budget_a.total_rms / out.budget_b.total_rms);
    return out;
}

}  // namespace asmx::noise
