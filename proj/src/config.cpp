#include "asmx/config.hpp"

#include "asmx/errors.hpp"
#include "asmx/units.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace asmx::config {

namespace detail {
extern const std::string_view kPresetBipolarPaper;
extern const std::string_view kPresetNmosPaper;
}  // namespace detail

namespace {

using units::Unit;

// -----------------------------------------------------------------------------
// Lexing / parsing
// -----------------------------------------------------------------------------

struct Value {
    enum class Type { string, number, boolean, array } type = Type::string;
    std::string text;
    double number = 0.0;
    bool integer = false;
    bool boolean = false;
    std::vector<Value> items;
};

struct Entry {
    Value value;
    std::size_t line = 0;
    bool used = false;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;
};

struct Document {
    std::string origin;
    std::vector<Section> sections;  // index 0 is the unnamed root
};

class Parser {
public:
    Parser(std::string_view text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    Document parse() {
        Document doc;
        doc.origin = origin_;
        doc.sections.push_back({"", 0, {}, {}});
        std::set<std::string> seen;
        std::size_t pos = 0;
        while (pos <= text_.size()) {
            const std::size_t nl = text_.find('\n', pos);
            const std::size_t end = nl == std::string_view::npos ? text_.size() : nl;
            ++line_;
            parse_line(strip_comment(text_.substr(pos, end - pos)), doc, seen);
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        return doc;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(origin_, line_, msg); }

    static std::string_view trim(std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        return s;
    }

    static std::string_view strip_comment(std::string_view s) {
        bool in_string = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_string = !in_string;
            if (s[i] == '#' && !in_string) return s.substr(0, i);
        }
        return s;
    }

    static bool valid_name(std::string_view s) {
        if (s.empty()) return false;
        for (char c : s) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
        }
        return true;
    }

    void parse_line(std::string_view raw, Document& doc, std::set<std::string>& seen) {
        const std::string_view s = trim(raw);
        if (s.empty()) return;
        if (s.front() == '[') {
            if (s.back() != ']') fail("unterminated section header");
            const std::string name(trim(s.substr(1, s.size() - 2)));
            if (!valid_name(name)) fail("invalid section name '" + name + "'");
            if (!seen.insert(name).second) fail("duplicate section [" + name + "]");
            doc.sections.push_back({name, line_, {}, {}});
            return;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string_view::npos) fail("expected 'key = value'");
        const std::string key(trim(s.substr(0, eq)));
        if (!valid_name(key) || key.find('.') != std::string::npos) fail("invalid key '" + key + "'");
        std::string_view rest = trim(s.substr(eq + 1));
        Value v = parse_value(rest);
        if (!trim(rest).empty()) fail("unexpected text after value: '" + std::string(trim(rest)) + "'");
        Section& sec = doc.sections.back();
        if (sec.entries.count(key) != 0) fail("duplicate key '" + key + "'");
        sec.entries.emplace(key, Entry{std::move(v), line_, false});
        sec.order.push_back(key);
    }

    Value parse_value(std::string_view& s) {
        s = trim(s);
        if (s.empty()) fail("missing value");
        Value v;
        if (s.front() == '"') {
            const std::size_t close = s.find('"', 1);
            if (close == std::string_view::npos) fail("unterminated string");
            v.type = Value::Type::string;
            v.text = std::string(s.substr(1, close - 1));
            s.remove_prefix(close + 1);
            return v;
        }
        if (s.front() == '[') {
            v.type = Value::Type::array;
            s.remove_prefix(1);
            s = trim(s);
            while (true) {
                if (s.empty()) fail("unterminated array");
                if (s.front() == ']') {
                    s.remove_prefix(1);
                    break;
                }
                v.items.push_back(parse_value(s));
                s = trim(s);
                if (!s.empty() && s.front() == ',') {
                    s.remove_prefix(1);
                    s = trim(s);
                } else if (s.empty() || s.front() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
            return v;
        }
        std::size_t len = 0;
        while (len < s.size() && s[len] != ',' && s[len] != ']' && s[len] != ' ' && s[len] != '\t') ++len;
        const std::string_view token = s.substr(0, len);
        s.remove_prefix(len);
        if (token == "true" || token == "false") {
            v.type = Value::Type::boolean;
            v.boolean = token == "true";
            return v;
        }
        const char* b = token.data();
        const char* e = token.data() + token.size();
        if (b != e && *b == '+') ++b;
        const auto [ptr, ec] = std::from_chars(b, e, v.number);
        if (ec != std::errc{} || ptr != e) {
            fail("cannot parse value '" + std::string(token) + "' (strings need double quotes)");
        }
        v.type = Value::Type::number;
        v.integer = token.find_first_of(".eEn") == std::string_view::npos;
        return v;
    }

    std::string_view text_;
    std::string origin_;
    std::size_t line_ = 0;
};

// -----------------------------------------------------------------------------
// Typed access with unknown-key detection
// -----------------------------------------------------------------------------

class Table {
public:
    Table(Section* section, std::string origin) : sec_(section), origin_(std::move(origin)) {}

    [[nodiscard]] bool present() const { return sec_ != nullptr; }
    [[nodiscard]] std::size_t line() const { return sec_ ? sec_->line : 0; }
    [[nodiscard]] bool has(const std::string& key) const { return sec_ && sec_->entries.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const std::size_t ln = has(key) ? sec_->entries.at(key).line : line();
        throw ConfigError(origin_, ln, where(key) + ": " + msg);
    }

    double quantity(const std::string& key, Unit unit, std::optional<double> fallback = std::nullopt) {
        Entry* e = find(key);
        if (!e) return required(key, fallback);
        if (e->value.type != Value::Type::string) {
            fail(key, std::string("physical quantity must be a quoted string with a unit suffix, e.g. \"1") +
                          units::symbol(unit) + "\"");
        }
        try {
            return units::parse_quantity(e->value.text, unit);
        } catch (const DomainError& err) {
            fail(key, err.what());
        }
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        Entry* e = find(key);
        if (!e) return required(key, fallback);
        if (e->value.type != Value::Type::number) fail(key, "expected a number");
        return e->value.number;
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
        Entry* e = find(key);
        if (!e) {
            if (!fallback) fail(key, "required key is missing");
            return *fallback;
        }
        if (e->value.type != Value::Type::number || !e->value.integer) fail(key, "expected an integer");
        return static_cast<long long>(e->value.number);
    }

    bool boolean(const std::string& key, bool fallback) {
        Entry* e = find(key);
        if (!e) return fallback;
        if (e->value.type != Value::Type::boolean) fail(key, "expected true or false");
        return e->value.boolean;
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        Entry* e = find(key);
        if (!e) {
            if (!fallback) fail(key, "required key is missing");
            return *fallback;
        }
        if (e->value.type != Value::Type::string) fail(key, "expected a quoted string");
        return e->value.text;
    }

    std::vector<double> numbers(const std::string& key) {
        Entry* e = find(key);
        if (!e) return {};
        if (e->value.type != Value::Type::array) fail(key, "expected an array");
        std::vector<double> out;
        for (const auto& item : e->value.items) {
            if (item.type != Value::Type::number) fail(key, "array elements must be numbers");
            out.push_back(item.number);
        }
        return out;
    }

    std::vector<double> quantities(const std::string& key, Unit unit) {
        Entry* e = find(key);
        if (!e) return {};
        if (e->value.type != Value::Type::array) fail(key, "expected an array");
        std::vector<double> out;
        for (const auto& item : e->value.items) {
            if (item.type != Value::Type::string) fail(key, "array elements must be quoted quantities");
            try {
                out.push_back(units::parse_quantity(item.text, unit));
            } catch (const DomainError& err) {
                fail(key, err.what());
            }
        }
        return out;
    }

    /// Early voltage / beta style value: a quantity, a number, or "inf".
    double quantity_or_inf(const std::string& key, Unit unit, double fallback) {
        Entry* e = find(key);
        if (!e) return fallback;
        if (e->value.type == Value::Type::string && e->value.text == "inf") return kInfinity;
        return quantity(key, unit);
    }

    double number_or_inf(const std::string& key, double fallback) {
        Entry* e = find(key);
        if (!e) return fallback;
        if (e->value.type == Value::Type::string && e->value.text == "inf") return kInfinity;
        return number(key);
    }

    void finish() const {
        if (!sec_) return;
        for (const auto& key : sec_->order) {
            const Entry& e = sec_->entries.at(key);
            if (!e.used) throw ConfigError(origin_, e.line, where(key) + ": unknown key");
        }
    }

private:
    [[nodiscard]] std::string where(const std::string& key) const {
        const std::string name = sec_ ? sec_->name : std::string("?");
        return name.empty() ? "'" + key + "'" : "[" + name + "] '" + key + "'";
    }

    Entry* find(const std::string& key) {
        if (!sec_) return nullptr;
        auto it = sec_->entries.find(key);
        if (it == sec_->entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    double required(const std::string& key, std::optional<double> fallback) const {
        if (!fallback) {
            throw ConfigError(origin_, line(),
                              (sec_ ? "[" + sec_->name + "]" : std::string("config")) + ": required key '" + key +
                                  "' is missing");
        }
        return *fallback;
    }

    Section* sec_;
    std::string origin_;
};

// -----------------------------------------------------------------------------
// Schema
// -----------------------------------------------------------------------------

constexpr const char* kKnownSections[] = {"", "run", "network", "device", "load", "tail", "inputs", "sweep",
                                          "transient", "noise", "noise.compare_load", "montecarlo", "margins",
                                          "power"};

LoadSpec read_load(Table& t) {
    const std::string kind = t.text("kind");
    if (kind == "resistor") {
        return ResistorLoad{t.quantity("resistance", Unit::ohm)};
    }
    if (kind == "pmos_linear") {
        PmosLinearParams p;
        p.wl_ratio = t.number("wl_ratio");
        p.process_gain = t.quantity("process_gain", Unit::amp_per_volt2);
        p.threshold_voltage_mag = t.quantity("threshold_voltage_mag", Unit::volt);
        try {
            p.validate();
        } catch (const DomainError& e) {
            t.fail("kind", e.what());
        }
        return PmosLinearLoad{p};
    }
    if (kind == "mirrored") {
        MirroredLoad m;
        m.load_resistance = t.quantity("load_resistance", Unit::ohm);
        m.width_ratio = t.number("width_ratio", 1.0);
        return m;
    }
    t.fail("kind", "unknown load kind '" + kind + "' (resistor, pmos_linear, mirrored)");
}

std::size_t index_key(Table& t, const std::string& key, int class_size) {
    const long long v = t.integer(key, 0);
    if (v < 0 || v >= class_size) {
        t.fail(key, "branch index must lie in [0, " + std::to_string(class_size - 1) + "]");
    }
    return static_cast<std::size_t>(v);
}

RunConfig build(Document& doc) {
    const std::string& origin = doc.origin;
    std::map<std::string, Section*> by_name;
    for (auto& s : doc.sections) {
        bool known = false;
        for (const char* k : kKnownSections) known = known || s.name == k;
        if (!known) throw ConfigError(origin, s.line, "unknown section [" + s.name + "]");
        by_name[s.name] = &s;
    }
    auto table = [&](const std::string& name) {
        auto it = by_name.find(name);
        return Table(it == by_name.end() ? nullptr : it->second, origin);
    };

    RunConfig rc;
    rc.origin = origin;

    Table root = table("");
    root.finish();

    Table run = table("run");
    rc.seed = static_cast<std::uint64_t>(run.integer("seed", 0));
    run.finish();

    // [network]
    Table net = table("network");
    if (!net.present()) throw ConfigError(origin, 0, "missing required section [network]");
    NetworkConfig& cfg = rc.network;
    const std::string tech = net.text("technology");
    if (tech == "bipolar") {
        cfg.technology = Technology::bipolar;
    } else if (tech == "nmos") {
        cfg.technology = Technology::nmos;
    } else {
        net.fail("technology", "must be \"bipolar\" or \"nmos\"");
    }
    const long long n = net.integer("class_size");
    if (n < 2) net.fail("class_size", "must be at least 2 (got " + std::to_string(n) + ")");
    if (n > 100000) net.fail("class_size", "unreasonably large");
    cfg.class_size = static_cast<int>(n);
    cfg.v_supply_high = net.quantity("v_supply_high", Unit::volt);
    cfg.v_supply_low = net.quantity("v_supply_low", Unit::volt, 0.0);
    if (!(cfg.v_supply_high > cfg.v_supply_low)) net.fail("v_supply_high", "must exceed v_supply_low");
    cfg.env.temperature = net.quantity("temperature", Unit::kelvin, 300.0);
    if (!(cfg.env.temperature > 0.0)) net.fail("temperature", "must be positive");
    net.finish();

    // [device]
    Table dev = table("device");
    if (!dev.present()) throw ConfigError(origin, 0, "missing required section [device]");
    DeviceParams device;
    if (cfg.technology == Technology::bipolar) {
        NpnParams p;
        p.saturation_current = dev.quantity("saturation_current", Unit::ampere);
        p.early_voltage = dev.quantity_or_inf("early_voltage", Unit::volt, kInfinity);
        p.beta = dev.number_or_inf("beta", kInfinity);
        try {
            p.validate();
        } catch (const DomainError& e) {
            dev.fail("saturation_current", e.what());
        }
        device = p;
    } else {
        NmosParams p;
        p.wl_ratio = dev.number("wl_ratio");
        p.threshold_current = dev.quantity("threshold_current", Unit::ampere);
        p.threshold_voltage = dev.quantity("threshold_voltage", Unit::volt);
        p.subthreshold_swing = dev.number("subthreshold_swing");
        p.clm_coefficient = dev.quantity("clm_coefficient", Unit::per_volt, 0.0);
        if (!(p.subthreshold_swing >= 1.0)) dev.fail("subthreshold_swing", "must be >= 1");
        if (p.clm_coefficient < 0.0) dev.fail("clm_coefficient", "must be >= 0");
        try {
            p.validate();
        } catch (const DomainError& e) {
            dev.fail("wl_ratio", e.what());
        }
        device = p;
    }
    cfg.branch_devices.assign(static_cast<std::size_t>(cfg.class_size), device);
    const auto scales = dev.numbers("prefactor_scale");
    if (!scales.empty()) {
        if (scales.size() != cfg.branch_devices.size()) {
            dev.fail("prefactor_scale", "needs exactly class_size entries");
        }
        for (std::size_t k = 0; k < scales.size(); ++k) {
            if (!(scales[k] > 0.0)) dev.fail("prefactor_scale", "entries must be positive");
            scale_prefactor(cfg.branch_devices[k], scales[k]);
        }
    }
    dev.finish();

    // [load]
    Table load = table("load");
    if (!load.present()) throw ConfigError(origin, 0, "missing required section [load]");
    cfg.load = read_load(load);
    load.finish();

    // [tail]
    Table tail = table("tail");
    if (!tail.present()) throw ConfigError(origin, 0, "missing required section [tail]");
    const std::string tk = tail.text("kind", std::string("ideal"));
    if (tk == "ideal") {
        cfg.tail.kind = TailKind::ideal;
    } else if (tk == "cascode") {
        cfg.tail.kind = TailKind::cascode;
    } else if (tk == "finite_impedance") {
        cfg.tail.kind = TailKind::finite_impedance;
        cfg.tail.output_resistance = tail.quantity("output_resistance", Unit::ohm);
        cfg.tail.reference_node_voltage = tail.quantity("reference_node_voltage", Unit::volt);
    } else {
        tail.fail("kind", "unknown tail kind '" + tk + "' (ideal, cascode, finite_impedance)");
    }
    cfg.tail.nominal_current = tail.quantity("current", Unit::ampere);
    if (!(cfg.tail.nominal_current > 0.0)) tail.fail("current", "must be positive");
    tail.finish();

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(origin, net.line(), e.what());
    }

    // [inputs]
    Table in = table("inputs");
    rc.dc_bias = in.quantity("dc_bias", Unit::volt, 0.5 * (cfg.v_supply_high + cfg.v_supply_low));
    rc.inputs = in.quantities("values", Unit::volt);
    if (rc.inputs.empty()) {
        rc.inputs.assign(static_cast<std::size_t>(cfg.class_size), rc.dc_bias);
    } else if (rc.inputs.size() != static_cast<std::size_t>(cfg.class_size)) {
        in.fail("values", "needs exactly class_size entries");
    }
    in.finish();

    // [power]
    Table power = table("power");
    rc.reference_paths = power.number("reference_paths", 0.0);
    if (rc.reference_paths < 0.0) power.fail("reference_paths", "must be non-negative");
    if (power.has("reference_power")) rc.reference_power = power.quantity("reference_power", Unit::watt);
    power.finish();

    // [sweep]
    if (Table t = table("sweep"); t.present()) {
        SweepSection s;
        s.branch = index_key(t, "branch", cfg.class_size);
        s.start = t.quantity("start", Unit::volt);
        s.stop = t.quantity("stop", Unit::volt);
        s.points = static_cast<int>(t.integer("points", 101));
        if (s.points < 3) t.fail("points", "must be at least 3");
        t.finish();
        rc.sweep = s;
    }

    // [transient]
    if (Table t = table("transient"); t.present()) {
        TransientSection s;
        s.load_capacitance = t.quantity("load_capacitance", Unit::farad);
        if (!(s.load_capacitance > 0.0)) t.fail("load_capacitance", "must be positive");
        s.branch = index_key(t, "branch", cfg.class_size);
        s.low = t.quantity("low", Unit::volt, rc.dc_bias);
        s.high = t.quantity("high", Unit::volt);
        s.frequency = t.quantity("frequency", Unit::hertz);
        if (!(s.frequency > 0.0)) t.fail("frequency", "must be positive");
        s.duty = t.number("duty", 0.5);
        if (!(s.duty > 0.0 && s.duty < 1.0)) t.fail("duty", "must lie strictly between 0 and 1");
        s.periods = t.number("periods", 2.0);
        if (!(s.periods > 0.0)) t.fail("periods", "must be positive");
        s.time_step = t.quantity("time_step", Unit::second, 0.0);
        s.duration = t.quantity("duration", Unit::second, 0.0);
        if (s.time_step < 0.0 || s.duration < 0.0) t.fail("time_step", "times must be non-negative");
        s.noise = t.boolean("noise", false);
        s.noise_bandwidth = t.quantity("noise_bandwidth", Unit::hertz, 0.0);
        if (t.has("initial_output")) s.initial_output = t.quantity("initial_output", Unit::volt);
        t.finish();
        rc.transient = s;
    }

    // [noise]
    if (Table t = table("noise"); t.present()) {
        NoiseSection s;
        s.branch = index_key(t, "branch", cfg.class_size);
        s.bandwidth = t.quantity("bandwidth", Unit::hertz);
        if (!(s.bandwidth > 0.0)) t.fail("bandwidth", "must be positive");
        s.flicker_constant = t.number("flicker_constant", 0.0);
        if (s.flicker_constant < 0.0) t.fail("flicker_constant", "must be non-negative");
        s.eval_frequency = t.quantity("eval_frequency", Unit::hertz, 1e3);
        if (!(s.eval_frequency > 0.0)) t.fail("eval_frequency", "must be positive");
        t.finish();
        if (Table c = table("noise.compare_load"); c.present()) {
            s.compare_load = read_load(c);
            c.finish();
            NetworkConfig probe = cfg;
            probe.load = *s.compare_load;
            try {
                probe.validate();
            } catch (const ConfigError& e) {
                throw ConfigError(origin, c.line(), e.what());
            }
        }
        rc.noise = s;
    } else if (table("noise.compare_load").present()) {
        throw ConfigError(origin, table("noise.compare_load").line(), "[noise.compare_load] requires [noise]");
    }

    // [montecarlo]
    if (Table t = table("montecarlo"); t.present()) {
        MonteCarloSection s;
        s.sigma = t.number("sigma", 0.01);
        if (!(s.sigma >= 0.0)) t.fail("sigma", "must be non-negative");
        s.trials = static_cast<int>(t.integer("trials", 1000));
        if (s.trials < 1) t.fail("trials", "must be at least 1");
        s.sigmas = t.numbers("sigmas");
        for (double v : s.sigmas) {
            if (!(v >= 0.0)) t.fail("sigmas", "entries must be non-negative");
        }
        t.finish();
        rc.montecarlo = s;
    }

    // [margins]
    if (Table t = table("margins"); t.present()) {
        MarginSection s;
        s.v_th_sub = t.quantity("v_th_sub", Unit::volt);
        s.v_swing = t.quantity("v_swing", Unit::volt);
        s.stacked_mirrors = static_cast<int>(t.integer("stacked_mirrors", 1));
        if (s.stacked_mirrors != 1 && s.stacked_mirrors != 2) t.fail("stacked_mirrors", "must be 1 or 2");
        s.v_th = t.quantity("v_th", Unit::volt, 0.0);
        s.v_overdrive = t.quantity("v_overdrive", Unit::volt, 0.0);
        if (s.v_th_sub < 0.0 || s.v_swing < 0.0 || s.v_th < 0.0 || s.v_overdrive < 0.0) {
            t.fail("v_th_sub", "margin voltages must be non-negative");
        }
        t.finish();
        rc.margins = s;
    }
    return rc;
}

}  // namespace

RunConfig load_config_text(std::string_view text, const std::string& origin) {
    Document doc = Parser(text, origin).parse();
    return build(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string(), 0, "cannot open config file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config_text(buf.str(), path.string());
}

std::vector<std::string> preset_names() { return {"bipolar_paper", "nmos_paper"}; }

std::string_view preset_text(const std::string& name) {
    if (name == "bipolar_paper") return detail::kPresetBipolarPaper;
    if (name == "nmos_paper") return detail::kPresetNmosPaper;
    throw ConfigError("preset", 0, "unknown preset '" + name + "' (bipolar_paper, nmos_paper)");
}

RunConfig load_preset(const std::string& name) {
    return load_config_text(preset_text(name), "preset:" + name);
}

}  // namespace asmx::config
