#include "modq/config.hpp"

#include <array>
#include <cstdio>
#include <tuple>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace modq {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, int line, const std::string& detail) {
    throw std::invalid_argument("config key '" + key + "' (line " + std::to_string(line) +
                                "): " + detail);
}

double parse_double(const std::string& key, int line, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        bad_value(key, line, "cannot parse '" + v + "' as a real number");
    }
}

long parse_long(const std::string& key, int line, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        bad_value(key, line, "cannot parse '" + v + "' as an integer");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

std::vector<double> parse_double_list(const std::string& key, int line, const std::string& v) {
    std::vector<double> out;
    for (const auto& part : split(v, ',')) out.push_back(parse_double(key, line, part));
    return out;
}

std::vector<int> parse_int_list(const std::string& key, int line, const std::string& v) {
    std::vector<int> out;
    for (const auto& part : split(v, ','))
        out.push_back(static_cast<int>(parse_long(key, line, part)));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    // First pass gathers (key, value, line); preset is applied before the
    // remaining keys so file order does not matter.
    std::vector<std::tuple<std::string, std::string, int>> items;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value', got '" + trim(raw) + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) +
                                                     ": empty key");
        items.emplace_back(key, value, line_no);
    }

    RunConfig c;
    for (const auto& [key, value, line] : items)
        if (key == "preset") c = apply_preset(value);

    std::optional<long> perturb_time;
    std::optional<int> perturb_stat;
    std::optional<double> perturb_value;
    std::optional<std::array<double, 4>> kernel_cov;

    for (const auto& [key, value, line] : items) {
        if (key == "preset") {
            continue;
        } else if (key == "n_resources") {
            c.n_resources = static_cast<int>(parse_long(key, line, value));
        } else if (key == "drive_n") {
            c.drive_n = static_cast<int>(parse_long(key, line, value));
        } else if (key == "drive_m") {
            c.drive_m = static_cast<int>(parse_long(key, line, value));
        } else if (key == "setpoints") {
            c.setpoints = parse_double_list(key, line, value);
        } else if (key == "initial_stats") {
            c.initial_stats = parse_double_list(key, line, value);
        } else if (key == "kernel_means") {
            c.kernels.clear();
            for (const auto& pair : split(value, ';')) {
                const auto xy = parse_double_list(key, line, pair);
                if (xy.size() != 2) bad_value(key, line, "each mean needs exactly x,y");
                ResourceKernel k;
                k.mean_x = xy[0];
                k.mean_y = xy[1];
                c.kernels.push_back(k);
            }
        } else if (key == "kernel_cov") {
            const auto m = parse_double_list(key, line, value);
            if (m.size() != 4) bad_value(key, line, "covariance needs 4 entries (row-major 2x2)");
            kernel_cov = {m[0], m[1], m[2], m[3]};
        } else if (key == "grid_width") {
            c.grid_width = static_cast<int>(parse_long(key, line, value));
        } else if (key == "grid_height") {
            c.grid_height = static_cast<int>(parse_long(key, line, value));
        } else if (key == "depletion") {
            c.depletion = parse_double(key, line, value);
        } else if (key == "hidden_mono") {
            c.hidden_mono = parse_int_list(key, line, value);
        } else if (key == "hidden_module") {
            c.hidden_module = parse_int_list(key, line, value);
        } else if (key == "gamma") {
            c.gamma = parse_double(key, line, value);
            if (c.gamma < 0.0 || c.gamma >= 1.0) bad_value(key, line, "must be in [0,1)");
        } else if (key == "learning_rate") {
            c.learning_rate = parse_double(key, line, value);
        } else if (key == "batch_size") {
            c.batch_size = static_cast<int>(parse_long(key, line, value));
        } else if (key == "buffer_capacity") {
            c.buffer_capacity = static_cast<std::size_t>(parse_long(key, line, value));
        } else if (key == "target_period") {
            c.target_period = parse_long(key, line, value);
        } else if (key == "eps_initial") {
            c.eps_initial = parse_double(key, line, value);
        } else if (key == "eps_final") {
            c.eps_final = parse_double(key, line, value);
        } else if (key == "anneal_steps") {
            c.anneal_steps = parse_long(key, line, value);
        } else if (key == "total_steps") {
            c.total_steps = parse_long(key, line, value);
        } else if (key == "metric_t1") {
            c.metric_t1 = parse_long(key, line, value);
        } else if (key == "metric_t2") {
            c.metric_t2 = parse_long(key, line, value);
        } else if (key == "final_window") {
            c.final_window = parse_long(key, line, value);
        } else if (key == "agent") {
            try {
                c.agent_kind = agent_kind_from_string(value);
            } catch (const std::exception& e) {
                bad_value(key, line, e.what());
            }
        } else if (key == "seed") {
            c.seed = static_cast<std::uint64_t>(parse_long(key, line, value));
        } else if (key == "log_stride") {
            c.log_stride = static_cast<int>(parse_long(key, line, value));
        } else if (key == "perturb_time") {
            perturb_time = parse_long(key, line, value);
        } else if (key == "perturb_stat") {
            perturb_stat = static_cast<int>(parse_long(key, line, value));
        } else if (key == "perturb_value") {
            perturb_value = parse_double(key, line, value);
        } else {
            throw std::invalid_argument("unknown config key '" + key + "' on line " +
                                        std::to_string(line));
        }
    }

    if (kernel_cov)
        for (auto& k : c.kernels) k.covariance = *kernel_cov;

    if (perturb_time || perturb_stat || perturb_value) {
        if (!(perturb_time && perturb_stat && perturb_value))
            throw std::invalid_argument(
                "perturbation needs all of perturb_time, perturb_stat, perturb_value");
        c.perturbation = Perturbation{*perturb_time, *perturb_stat, *perturb_value};
    }

    validate(c);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "preset = " << c.preset << "\n";
    out << "n_resources = " << c.n_resources << "\n";
    out << "drive_n = " << c.drive_n << "\n";
    out << "drive_m = " << c.drive_m << "\n";
    out << "setpoints = " << join(c.setpoints) << "\n";
    out << "initial_stats = " << join(c.initial_stats) << "\n";
    std::string means;
    for (std::size_t i = 0; i < c.kernels.size(); ++i)
        means += (i ? ";" : "") + fmt(c.kernels[i].mean_x) + "," + fmt(c.kernels[i].mean_y);
    out << "kernel_means = " << means << "\n";
    const auto& cov = c.kernels.front().covariance;
    out << "kernel_cov = " << fmt(cov[0]) << "," << fmt(cov[1]) << "," << fmt(cov[2]) << ","
        << fmt(cov[3]) << "\n";
    out << "grid_width = " << c.grid_width << "\n";
    out << "grid_height = " << c.grid_height << "\n";
    out << "depletion = " << fmt(c.depletion) << "\n";
    out << "hidden_mono = " << join(c.hidden_mono) << "\n";
    out << "hidden_module = " << join(c.hidden_module) << "\n";
    out << "gamma = " << fmt(c.gamma) << "\n";
    out << "learning_rate = " << fmt(c.learning_rate) << "\n";
    out << "batch_size = " << c.batch_size << "\n";
    out << "buffer_capacity = " << c.buffer_capacity << "\n";
    out << "target_period = " << c.target_period << "\n";
    out << "eps_initial = " << fmt(c.eps_initial) << "\n";
    out << "eps_final = " << fmt(c.eps_final) << "\n";
    out << "anneal_steps = " << c.anneal_steps << "\n";
    out << "total_steps = " << c.total_steps << "\n";
    out << "metric_t1 = " << c.metric_t1 << "\n";
    out << "metric_t2 = " << c.metric_t2 << "\n";
    out << "final_window = " << c.final_window << "\n";
    out << "agent = " << to_string(c.agent_kind) << "\n";
    out << "seed = " << c.seed << "\n";
    out << "log_stride = " << c.log_stride << "\n";
    if (c.perturbation) {
        out << "perturb_time = " << c.perturbation->time << "\n";
        out << "perturb_stat = " << c.perturbation->stat_index << "\n";
        out << "perturb_value = " << fmt(c.perturbation->value) << "\n";
    }
    return out.str();
}

}  // namespace modq
