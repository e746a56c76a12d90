#include "ura/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace ura {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_double(const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("expected a number, got '" + v + "'");
    return out;
}

long long to_int(const std::string& v) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
    return out;
}

int to_int32(const std::string& v) {
    const long long x = to_int(v);
    if (x < -2147483647LL || x > 2147483647LL) throw ConfigError("integer out of range: '" + v + "'");
    return static_cast<int>(x);
}

std::uint64_t to_seed(const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) throw ConfigError("expected a seed, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& v) {
    const auto s = lower(v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("expected a boolean, got '" + v + "'");
}

std::optional<double> to_opt_db(const std::string& v) {
    if (lower(v) == "none" || lower(v) == "default") return std::nullopt;
    return to_double(v);
}

std::vector<int> to_int_list(const std::string& v) {
    std::vector<int> out;
    for (double x : parse_range(v)) {
        if (x != std::floor(x)) throw ConfigError("expected integers in '" + v + "'");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(static_cast<double>(v[i]));
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"name", [](ExperimentConfig& c, const std::string& v) { c.name = v; }},
        {"n_p", [](ExperimentConfig& c, const std::string& v) { c.pilot_length = to_int32(v); }},
        {"n_d", [](ExperimentConfig& c, const std::string& v) { c.data_length = to_int32(v); }},
        {"B", [](ExperimentConfig& c, const std::string& v) { c.message_bits = to_int32(v); }},
        {"J", [](ExperimentConfig& c, const std::string& v) { c.pilot_bits = to_int32(v); }},
        {"M", [](ExperimentConfig& c, const std::string& v) { c.antennas = to_int32(v); }},
        {"K_a", [](ExperimentConfig& c, const std::string& v) { c.active_users = to_int32(v); }},
        {"N0", [](ExperimentConfig& c, const std::string& v) { c.n0 = to_double(v); }},
        {"P_pilot", [](ExperimentConfig& c, const std::string& v) { c.p_pilot = to_double(v); }},
        {"P_data", [](ExperimentConfig& c, const std::string& v) { c.p_data = to_double(v); }},
        {"P_pilot_db", [](ExperimentConfig& c, const std::string& v) { c.p_pilot = db_to_lin(to_double(v)); }},
        {"P_data_db", [](ExperimentConfig& c, const std::string& v) { c.p_data = db_to_lin(to_double(v)); }},
        {"ebn0_db",
         [](ExperimentConfig& c, const std::string& v) {
             if (lower(v) == "auto") {
                 c.ebn0_db.reset();
                 if (!c.ebn0_margin_db) c.ebn0_margin_db = 0.0;
             } else {
                 c.ebn0_db = to_opt_db(v);
                 c.ebn0_margin_db.reset();
             }
         }},
        {"ebn0_margin_db",
         [](ExperimentConfig& c, const std::string& v) {
             c.ebn0_margin_db = to_double(v);
             c.ebn0_db.reset();
         }},
        {"trials", [](ExperimentConfig& c, const std::string& v) { c.trials = to_int32(v); }},
        {"seed", [](ExperimentConfig& c, const std::string& v) { c.campaign_seed = to_seed(v); }},
        {"pilot_seed",
         [](ExperimentConfig& c, const std::string& v) {
             if (lower(v) == "none" || lower(v) == "default")
                 c.pilot_seed.reset();
             else
                 c.pilot_seed = to_seed(v);
         }},
        {"amp_max_iters", [](ExperimentConfig& c, const std::string& v) { c.amp_max_iters = to_int32(v); }},
        {"amp_damping", [](ExperimentConfig& c, const std::string& v) { c.amp_damping = to_double(v); }},
        {"amp_tolerance", [](ExperimentConfig& c, const std::string& v) { c.amp_tolerance = to_double(v); }},
        {"support_rule",
         [](ExperimentConfig& c, const std::string& v) {
             const auto s = lower(v);
             if (s == "known_ka") c.support_rule = SupportRule::known_active;
             else if (s == "threshold") c.support_rule = SupportRule::threshold;
             else throw ConfigError("support_rule must be known_ka or threshold");
         }},
        {"threshold", [](ExperimentConfig& c, const std::string& v) { c.threshold = to_double(v); }},
        {"gamma_source",
         [](ExperimentConfig& c, const std::string& v) {
             const auto s = lower(v);
             if (s == "prior") c.gamma_source = GammaSource::prior;
             else if (s == "estimate") c.gamma_source = GammaSource::estimate;
             else throw ConfigError("gamma_source must be prior or estimate");
         }},
        {"llr_noise",
         [](ExperimentConfig& c, const std::string& v) {
             const auto s = lower(v);
             if (s == "analytic") c.llr_noise = LlrNoise::analytic;
             else if (s == "empirical") c.llr_noise = LlrNoise::empirical;
             else throw ConfigError("llr_noise must be analytic or empirical");
         }},
        {"dedup", [](ExperimentConfig& c, const std::string& v) { c.dedup = to_bool(v); }},
        {"fixed_list_size", [](ExperimentConfig& c, const std::string& v) { c.fixed_list_size = to_bool(v); }},
        {"crc_bits", [](ExperimentConfig& c, const std::string& v) { c.crc_bits = to_int32(v); }},
        {"list_size", [](ExperimentConfig& c, const std::string& v) { c.list_size = to_int32(v); }},
        {"check_node",
         [](ExperimentConfig& c, const std::string& v) {
             const auto s = lower(v);
             if (s == "exact") c.check_node = CheckNode::exact;
             else if (s == "min_sum") c.check_node = CheckNode::min_sum;
             else throw ConfigError("check_node must be exact or min_sum");
         }},
        {"design_snr_db", [](ExperimentConfig& c, const std::string& v) { c.design_snr_db = to_opt_db(v); }},
        {"error_prob", [](ExperimentConfig& c, const std::string& v) { c.error_prob = to_double(v); }},
        {"ka_grid", [](ExperimentConfig& c, const std::string& v) { c.ka_grid = to_int_list(v); }},
        {"m_grid", [](ExperimentConfig& c, const std::string& v) { c.m_grid = to_int_list(v); }},
        {"pilot_draws", [](ExperimentConfig& c, const std::string& v) { c.pilot_draws = to_int32(v); }},
        {"collision_adjust", [](ExperimentConfig& c, const std::string& v) { c.collision_adjust = to_bool(v); }},
        {"collide_snr_db", [](ExperimentConfig& c, const std::string& v) { c.collide_snr_db = to_double(v); }},
        {"collide_antennas", [](ExperimentConfig& c, const std::string& v) { c.collide_antennas = to_int32(v); }},
        {"sigma_est_db", [](ExperimentConfig& c, const std::string& v) { c.sigma_est_db = parse_range(v); }},
        {"collide_design_snr_db",
         [](ExperimentConfig& c, const std::string& v) { c.collide_design_snr_db = to_opt_db(v); }},
    };
    return table;
}

}  // namespace

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    if (name == "paper") {
        c.trials = 20;
        c.ebn0_margin_db = 1.5;
    } else if (name == "paper_fig1") {
        // defaults already hold the frame and the K_a x M grid
    } else if (name == "desk") {
        c.pilot_bits = 12;
        c.pilot_length = 384;
        c.data_length = 1024;
        c.message_bits = 60;
        c.antennas = 16;
        c.active_users = 30;
        c.trials = 200;
        c.ebn0_margin_db = 1.5;
        c.ka_grid = {10, 20, 30, 40, 50, 60};
        c.m_grid = {8, 16, 32};
    } else if (name == "amp_desk") {
        c.pilot_bits = 12;
        c.pilot_length = 512;
        c.data_length = 1024;
        c.message_bits = 60;
        c.antennas = 16;
        c.active_users = 50;
        c.trials = 200;
        c.p_pilot = c.p_data = db_to_lin(5.0);
    } else if (name == "collide") {
        c.trials = 300;
    } else if (name == "tiny") {
        c.pilot_bits = 8;
        c.pilot_length = 64;
        c.data_length = 128;
        c.message_bits = 40;
        c.antennas = 8;
        c.active_users = 4;
        c.trials = 4;
        c.p_pilot = c.p_data = 1.0;
        c.list_size = 8;
        c.ka_grid = {2, 4, 8};
        c.m_grid = {4, 8};
        c.pilot_draws = 2;
        c.collide_antennas = 8;
        c.collide_snr_db = 0.0;
        c.sigma_est_db = {-20, -10, 0};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

std::vector<std::string> preset_names() { return {"paper", "paper_fig1", "desk", "amp_desk", "collide", "tiny"}; }

ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig base) {
    ExperimentConfig cfg = std::move(base);
    bool first = true;
    int lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto where = source + ":" + std::to_string(lineno) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + "missing key");
        if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
        if (key == "preset") {
            if (!first) throw ConfigError(where + "'preset' must be the first entry");
            try {
                cfg = preset_config(value);
            } catch (const ConfigError& e) {
                throw ConfigError(where + e.what());
            }
            first = false;
            continue;
        }
        first = false;
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& name_or_path) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return preset_config(name_or_path);
    std::ifstream in(name_or_path);
    if (!in) throw ConfigError(name_or_path + ": no such preset or readable file");
    ExperimentConfig base;
    base.name = name_or_path;
    return parse_config(in, name_or_path, base);
}

void write_config(std::ostream& os, const ExperimentConfig& c) {
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("none"); };
    os << "name = " << c.name << '\n'
       << "n_p = " << c.pilot_length << '\n'
       << "n_d = " << c.data_length << '\n'
       << "B = " << c.message_bits << '\n'
       << "J = " << c.pilot_bits << '\n'
       << "M = " << c.antennas << '\n'
       << "K_a = " << c.active_users << '\n'
       << "N0 = " << num(c.n0) << '\n'
       << "P_pilot = " << num(c.p_pilot) << '\n'
       << "P_data = " << num(c.p_data) << '\n';
    if (c.ebn0_margin_db)
        os << "ebn0_margin_db = " << num(*c.ebn0_margin_db) << '\n';
    else
        os << "ebn0_db = " << opt(c.ebn0_db) << '\n';
    os << "trials = " << c.trials << '\n'
       << "seed = " << c.campaign_seed << '\n'
       << "pilot_seed = " << (c.pilot_seed ? std::to_string(*c.pilot_seed) : std::string("none")) << '\n'
       << "amp_max_iters = " << c.amp_max_iters << '\n'
       << "amp_damping = " << num(c.amp_damping) << '\n'
       << "amp_tolerance = " << num(c.amp_tolerance) << '\n'
       << "support_rule = " << (c.support_rule == SupportRule::known_active ? "known_ka" : "threshold") << '\n'
       << "threshold = " << num(c.threshold) << '\n'
       << "gamma_source = " << (c.gamma_source == GammaSource::prior ? "prior" : "estimate") << '\n'
       << "llr_noise = " << (c.llr_noise == LlrNoise::analytic ? "analytic" : "empirical") << '\n'
       << "dedup = " << (c.dedup ? "true" : "false") << '\n'
       << "fixed_list_size = " << (c.fixed_list_size ? "true" : "false") << '\n'
       << "crc_bits = " << c.crc_bits << '\n'
       << "list_size = " << c.list_size << '\n'
       << "check_node = " << (c.check_node == CheckNode::exact ? "exact" : "min_sum") << '\n'
       << "design_snr_db = " << opt(c.design_snr_db) << '\n'
       << "error_prob = " << num(c.error_prob) << '\n'
       << "ka_grid = " << join(c.ka_grid) << '\n'
       << "m_grid = " << join(c.m_grid) << '\n'
       << "pilot_draws = " << c.pilot_draws << '\n'
       << "collision_adjust = " << (c.collision_adjust ? "true" : "false") << '\n'
       << "collide_snr_db = " << num(c.collide_snr_db) << '\n'
       << "collide_antennas = " << c.collide_antennas << '\n'
       << "sigma_est_db = " << join(c.sigma_est_db) << '\n'
       << "collide_design_snr_db = " << opt(c.collide_design_snr_db) << '\n';
}

std::vector<double> parse_range(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError("empty range");
    std::vector<double> out;
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(t);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(trim(p));
        if (parts.size() != 3) throw ConfigError("range must be 'start:step:stop', got '" + text + "'");
        const double a = to_double(parts[0]), step = to_double(parts[1]), b = to_double(parts[2]);
        if (step == 0.0 || (b - a) / step < 0.0) throw ConfigError("range step does not reach the stop value: '" + text + "'");
        const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
        if (n > 100000) throw ConfigError("range too long: '" + text + "'");
        for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
        return out;
    }
    std::stringstream ss(t);
    for (std::string p; std::getline(ss, p, ',');) {
        p = trim(p);
        if (p.empty()) throw ConfigError("empty entry in list '" + text + "'");
        out.push_back(to_double(p));
    }
    return out;
}

}  // namespace ura
