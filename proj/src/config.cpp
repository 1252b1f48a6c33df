#include "ris/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ris/errors.hpp"

namespace ris {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Value {
    std::string raw;
    std::string key;

    double number(const char* expected_suffix = nullptr) const {
        std::string text = raw;
        std::string suffix;
        // split trailing unit suffix (dB / dBm), case-sensitive
        const std::size_t sp = text.find_last_of(" \t");
        if (sp != std::string::npos) {
            suffix = trim(text.substr(sp + 1));
            text = trim(text.substr(0, sp));
        }
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0')
            throw ConfigError(key + ": expected a number, got '" + raw + "'");
        if (!suffix.empty()) {
            if (!expected_suffix || suffix != expected_suffix)
                throw ConfigError(key + ": unexpected unit '" + suffix + "'");
        }
        return v;
    }

    // watts; accepts a dBm suffix
    double power() const {
        const double v = number("dBm");
        return raw.find("dBm") != std::string::npos ? dbm_to_watts(v) : v;
    }

    // value kept in dB; plain numbers are taken as dB already
    double gain_db() const { return number("dB"); }

    long integer() const {
        const double v = number();
        const long i = std::lround(v);
        if (static_cast<double>(i) != v)
            throw ConfigError(key + ": expected an integer");
        return i;
    }
};

}  // namespace

ScenarioConfig default_config(bool paper_scale) {
    ScenarioConfig cfg;
    cfg.geometry.n_bs_antennas = 4;
    cfg.geometry.n_users = 4;
    cfg.geometry.m1_elements = paper_scale ? 16 : 8;
    cfg.geometry.m2_elements = paper_scale ? 16 : 8;
    cfg.geometry.bs_pos = {0.0, 0.0, 15.0};
    cfg.geometry.ris1_pos = {20.0, 10.0, 2.0};
    cfg.geometry.ris2_pos = {40.0, 10.0, 2.0};
    cfg.geometry.user_center = {60.0, 0.0, 1.5};
    cfg.geometry.carrier_freq = 2.4e9;
    cfg.budget.p_total = dbm_to_watts(30.0);
    cfg.budget.p_ris1 = dbm_to_watts(14.0);
    cfg.budget.p_ris2 = dbm_to_watts(14.0);
    cfg.budget.p_dc_per_element = dbm_to_watts(-5.0);
    cfg.budget.p_c_per_element = dbm_to_watts(-10.0);
    cfg.a_max2_db = 40.0;
    cfg.noise_power_w = dbm_to_watts(-80.0);
    cfg.trials = paper_scale ? 100 : 20;
    cfg.seed = 1;
    return cfg;
}

ScenarioConfig parse_config_text(const std::string& text, ScenarioConfig cfg) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const Value v{trim(line.substr(eq + 1)), key};

        if (key == "scenario") {
            cfg.variant = variant_from_name(v.raw);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(v.integer());
        } else if (key == "trials") {
            cfg.trials = static_cast<int>(v.integer());
        } else if (key == "a_max2_db") {
            cfg.a_max2_db = v.gain_db();
        } else if (key == "noise_power") {
            cfg.noise_power_w = v.power();
        } else if (key == "weights") {
            cfg.weights.clear();
            std::istringstream ws(v.raw);
            std::string tok;
            while (std::getline(ws, tok, ','))
                cfg.weights.push_back(Value{trim(tok), key}.number());
        } else if (key == "geometry.n_bs_antennas") {
            cfg.geometry.n_bs_antennas = v.integer();
        } else if (key == "geometry.m1_elements") {
            cfg.geometry.m1_elements = v.integer();
        } else if (key == "geometry.m2_elements") {
            cfg.geometry.m2_elements = v.integer();
        } else if (key == "geometry.n_users") {
            cfg.geometry.n_users = v.integer();
        } else if (key == "geometry.carrier_freq") {
            cfg.geometry.carrier_freq = v.number();
        } else if (key == "geometry.x1") {
            cfg.geometry.ris1_pos[0] = v.number();
        } else if (key == "geometry.x2") {
            cfg.geometry.ris2_pos[0] = v.number();
        } else if (key == "geometry.x_user") {
            cfg.geometry.user_center[0] = v.number();
        } else if (key == "geometry.user_radius") {
            cfg.geometry.user_radius = v.number();
        } else if (key == "budget.p_total") {
            cfg.budget.p_total = v.power();
        } else if (key == "budget.p_ris1") {
            cfg.budget.p_ris1 = v.power();
        } else if (key == "budget.p_ris2") {
            cfg.budget.p_ris2 = v.power();
        } else if (key == "budget.p_dc_per_element") {
            cfg.budget.p_dc_per_element = v.power();
        } else if (key == "budget.p_c_per_element") {
            cfg.budget.p_c_per_element = v.power();
        } else if (key == "path_loss.pl0_db") {
            cfg.path_loss.pl0_db = v.gain_db();
        } else if (key == "path_loss.exponent_strong") {
            cfg.path_loss.exponent_strong = v.number();
        } else if (key == "path_loss.exponent_weak") {
            cfg.path_loss.exponent_weak = v.number();
        } else if (key == "rician.bs_to_ris1") {
            cfg.rician.bs_to_ris1 = v.number();
        } else if (key == "rician.bs_to_ris2") {
            cfg.rician.bs_to_ris2 = v.number();
        } else if (key == "rician.ris1_to_ris2") {
            cfg.rician.ris1_to_ris2 = v.number();
        } else if (key == "rician.ris1_to_user") {
            cfg.rician.ris1_to_user = v.number();
        } else if (key == "rician.ris2_to_user") {
            cfg.rician.ris2_to_user = v.number();
        } else if (key == "pdd.t_max") {
            cfg.pdd.t_max = static_cast<int>(v.integer());
        } else if (key == "pdd.inner_max") {
            cfg.pdd.inner_max = static_cast<int>(v.integer());
        } else if (key == "pdd.inner_tol") {
            cfg.pdd.inner_tol = v.number();
        } else if (key == "pdd.violation_tol") {
            cfg.pdd.violation_tol = v.number();
        } else if (key == "pdd.rho0") {
            cfg.pdd.rho0 = v.number();
        } else if (key == "pdd.c") {
            cfg.pdd.c = v.number();
        } else if (key == "pdd.ellipsoid_iters") {
            cfg.pdd.ellipsoid_iters = static_cast<int>(v.integer());
        } else if (key == "pdd.ellipsoid_radius") {
            cfg.pdd.ellipsoid_radius = v.number();
        } else if (key == "pdd.bisection_tol") {
            cfg.pdd.bisection_tol = v.number();
        } else {
            throw ConfigError(key + ": unknown configuration key");
        }
    }
    cfg.geometry.validate();
    cfg.path_loss.validate();
    cfg.rician.validate();
    if (cfg.trials <= 0) throw ConfigError("trials: must be positive");
    return cfg;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), std::move(base));
}

}  // namespace ris
