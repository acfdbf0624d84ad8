#include "modq/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace modq {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
    auto out = open_out(path);
    out << "experiment,setting,agent,seed,delta,final_stat_mean\n";
    for (const auto& e : result.entries)
        out << e.experiment << ',' << num(e.setting) << ',' << e.agent << ',' << e.seed << ','
            << num(e.delta) << ',' << num(e.final_mean) << '\n';
}

SweepResult read_sweep_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("experiment,", 0) != 0)
        throw std::runtime_error(path.string() + ": missing sweep CSV header");
    SweepResult result;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_row(line);
        if (f.size() != 6) throw std::runtime_error(path.string() + ": malformed row: " + line);
        SweepEntry e;
        e.experiment = f[0];
        e.setting = std::stod(f[1]);
        e.agent = f[2];
        e.seed = std::stoull(f[3]);
        e.delta = std::stod(f[4]);
        e.final_mean = std::stod(f[5]);
        result.entries.push_back(std::move(e));
    }
    return result;
}

void write_runlog_csv(const std::filesystem::path& path, const RunLog& log, int stride) {
    if (stride <= 0) throw std::invalid_argument("write_runlog_csv: stride must be positive");
    auto out = open_out(path);
    const std::size_t n = log.setpoints.size();
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",h" << i;
    out << ",epsilon,action\n";
    for (std::size_t t = 0; t < log.steps.size(); t += static_cast<std::size_t>(stride)) {
        const auto& rec = log.steps[t];
        out << t;
        for (double h : rec.h) out << ',' << num(h);
        out << ',' << num(rec.epsilon) << ',' << rec.action << '\n';
    }
}

RunLogTable read_runlog_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,h1", 0) != 0)
        throw std::runtime_error(path.string() + ": missing run-log CSV header");
    const std::size_t n_cols = split_row(line).size();
    RunLogTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_row(line);
        if (f.size() != n_cols) throw std::runtime_error(path.string() + ": malformed row: " + line);
        table.t.push_back(std::stol(f[0]));
        std::vector<double> h;
        for (std::size_t i = 1; i + 2 < f.size(); ++i) h.push_back(std::stod(f[i]));
        table.h.push_back(std::move(h));
        table.epsilon.push_back(std::stod(f[f.size() - 2]));
        table.action.push_back(std::stoi(f.back()));
    }
    return table;
}

void write_timecourse_csv(const std::filesystem::path& path, const TimeCourse& tc, int stride) {
    if (stride <= 0) throw std::invalid_argument("write_timecourse_csv: stride must be positive");
    auto out = open_out(path);
    const std::size_t n = tc.mean.empty() ? 0 : tc.mean.front().size();
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",h" << i << "_mean,h" << i << "_sd";
    out << '\n';
    for (std::size_t t = 0; t < tc.mean.size(); t += static_cast<std::size_t>(stride)) {
        out << t;
        for (std::size_t i = 0; i < n; ++i)
            out << ',' << num(tc.mean[t][i]) << ',' << num(tc.sd[t][i]);
        out << '\n';
    }
}

TimeCourse read_timecourse_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,h1_mean", 0) != 0)
        throw std::runtime_error(path.string() + ": missing time-course CSV header");
    const std::size_t n = (split_row(line).size() - 1) / 2;
    TimeCourse tc;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_row(line);
        if (f.size() != 1 + 2 * n)
            throw std::runtime_error(path.string() + ": malformed row: " + line);
        std::vector<double> mean(n), sd(n);
        for (std::size_t i = 0; i < n; ++i) {
            mean[i] = std::stod(f[1 + 2 * i]);
            sd[i] = std::stod(f[2 + 2 * i]);
        }
        tc.mean.push_back(std::move(mean));
        tc.sd.push_back(std::move(sd));
    }
    return tc;
}

}  // namespace modq
