#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "modq/csvio.hpp"
#include "modq/stats.hpp"
#include "modq/svgplot.hpp"

using namespace modq;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "modq_output_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("sweep CSV round-trips with 12 significant digits") {
    SweepResult r;
    r.entries.push_back({"gamma", 0.5, "mono", 42, 1.234567890123456, 4.987654321098765});
    r.entries.push_back({"gamma", 0.9, "modular", 43, 0.111, 5.0});
    const auto path = temp_dir() / "sweep.csv";
    write_sweep_csv(path, r);

    const std::string text = slurp(path);
    CHECK(text.rfind("experiment,setting,agent,seed,delta,final_stat_mean\n", 0) == 0);

    const SweepResult back = read_sweep_csv(path);
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].agent == "mono");
    CHECK(back.entries[0].seed == 42);
    CHECK(back.entries[0].delta == doctest::Approx(1.234567890123456).epsilon(1e-11));
    CHECK(back.entries[1].setting == 0.9);
}

TEST_CASE("run-log CSV carries t, stats, epsilon and action with stride") {
    RunLog log;
    log.setpoints = {5, 5, 5, 5};
    for (long t = 0; t < 10; ++t) {
        StepRecord rec;
        rec.h = {0.5 + t, 1.0, 2.0, 3.0};
        rec.action = static_cast<int>(t % 4);
        rec.epsilon = 1.0 - 0.1 * static_cast<double>(t);
        log.steps.push_back(rec);
    }
    const auto path = temp_dir() / "run_log.csv";
    write_runlog_csv(path, log, 2);
    const RunLogTable table = read_runlog_csv(path);
    REQUIRE(table.t.size() == 5);
    CHECK(table.t[1] == 2);
    CHECK(table.h[1][0] == 2.5);
    CHECK(table.action[2] == 0);
    CHECK(slurp(path).rfind("t,h1,h2,h3,h4,epsilon,action\n", 0) == 0);
}

TEST_CASE("time-course CSV round-trips mean and sd") {
    TimeCourse tc;
    for (int t = 0; t < 6; ++t) {
        tc.mean.push_back({1.0 * t, 2.0 * t});
        tc.sd.push_back({0.1, 0.2});
    }
    const auto path = temp_dir() / "tc.csv";
    write_timecourse_csv(path, tc);
    const TimeCourse back = read_timecourse_csv(path);
    REQUIRE(back.mean.size() == 6);
    CHECK(back.mean[3][1] == 6.0);
    CHECK(back.sd[5][0] == 0.1);
}

TEST_CASE("scatter SVG contains the identity reference line and all points") {
    const auto path = temp_dir() / "scatter.svg";
    const std::vector<double> xs{2, 5, 8}, ys{1.9, 4.7, 7.6};
    write_scatter_identity_svg(path, xs, ys, "set-point", "final mean", "sweep");
    const std::string svg = slurp(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // identity line
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("boxplot whisker and quartile geometry is recomputable from the data") {
    std::vector<BoxGroup> groups(1);
    groups[0].label = "g";
    groups[0].values = {1.0, 2.0, 3.0, 4.0, 10.0};
    const auto path = temp_dir() / "box.svg";
    write_boxplot_svg(path, groups, "delta", "test");
    const std::string svg = slurp(path);
    CHECK(svg.find("<rect") != std::string::npos);
    // 10.0 lies beyond q3 + 1.5 IQR = 4 + 3 -> outlier dot present.
    CHECK(quantile_of(groups[0].values, 0.75) == doctest::Approx(4.0));
    CHECK(svg.find("<circle") != std::string::npos);
}

TEST_CASE("time-course SVG draws the set-point reference line") {
    TimeCourse tc;
    for (int t = 0; t < 50; ++t) {
        tc.mean.push_back({4.0, 5.5, 5.0, 20.0});
        tc.sd.push_back({0.5, 0.5, 0.5, 0.0});
    }
    const auto path = temp_dir() / "tc.svg";
    write_timecourse_svg(path, tc, 5.0, 25L, "stats");
    const std::string svg = slurp(path);
    CHECK(svg.find("green") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);  // sd shading
    CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("empty plot inputs are rejected") {
    CHECK_THROWS_AS(write_scatter_identity_svg(temp_dir() / "x.svg", std::vector<double>{},
                                               std::vector<double>{}, "", "", ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        write_boxplot_svg(temp_dir() / "x.svg", std::vector<BoxGroup>{}, "", ""),
        std::invalid_argument);
}
