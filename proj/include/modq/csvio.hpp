#pragma once

#include <filesystem>

#include "modq/harness.hpp"

namespace modq {

// Sweep results: header `experiment,setting,agent,seed,delta,final_stat_mean`,
// numeric fields with 12 significant digits.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
SweepResult read_sweep_csv(const std::filesystem::path& path);

// Per-step time-course: header `t,h1,...,hN,epsilon,action`; `stride` bounds
// file size at full scale (row emitted when t % stride == 0).
void write_runlog_csv(const std::filesystem::path& path, const RunLog& log, int stride = 1);

struct RunLogTable {
    std::vector<long> t;
    std::vector<std::vector<double>> h;  // h[row][stat]
    std::vector<double> epsilon;
    std::vector<int> action;
};
RunLogTable read_runlog_csv(const std::filesystem::path& path);

// Across-seed stat trajectories: `t,h1_mean,h1_sd,...,hN_mean,hN_sd`.
void write_timecourse_csv(const std::filesystem::path& path, const TimeCourse& tc, int stride = 1);
TimeCourse read_timecourse_csv(const std::filesystem::path& path);

}  // namespace modq
