#include "modq/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "modq/stats.hpp"

namespace modq {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 25.0;
constexpr double kMarginTop = 45.0;
constexpr double kMarginBottom = 55.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Maps data coordinates into the plot rectangle (SVG y grows downward).
struct Axes {
    double x_min, x_max, y_min, y_max;

    double px(double x) const {
        return kMarginLeft + (x - x_min) / (x_max - x_min) * (kWidth - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return kHeight - kMarginBottom -
               (y - y_min) / (y_max - y_min) * (kHeight - kMarginTop - kMarginBottom);
    }
};

void pad_range(double& lo, double& hi) {
    if (hi <= lo) {
        lo -= 1.0;
        hi += 1.0;
        return;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

class SvgDoc {
  public:
    SvgDoc() {
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
             << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
             << "\">\n"
             << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, const std::string& dash = "") {
        out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
             << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
             << num(width) << "\"";
        if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << "\"";
        out_ << "/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke) {
        out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
             << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
             << "\"/>\n";
    }

    void circle(double x, double y, double r, const std::string& fill) {
        out_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r)
             << "\" fill=\"" << fill << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.5) {
        out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width)
             << "\" points=\"";
        for (const auto& [x, y] : pts) out_ << num(x) << ',' << num(y) << ' ';
        out_ << "\"/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
                 double opacity) {
        out_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << num(opacity)
             << "\" stroke=\"none\" points=\"";
        for (const auto& [x, y] : pts) out_ << num(x) << ',' << num(y) << ' ';
        out_ << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, double size = 13.0,
              const std::string& anchor = "middle", double rotate = 0.0) {
        out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
             << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\"";
        if (rotate != 0.0)
            out_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y)
                 << ")\"";
        out_ << '>' << s << "</text>\n";
    }

    void save(const std::filesystem::path& path) {
        out_ << "</svg>\n";
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
        f << out_.str();
    }

  private:
    std::ostringstream out_;
};

void draw_frame(SvgDoc& doc, const Axes& ax, const std::string& x_label,
                const std::string& y_label, const std::string& title, int n_ticks = 5) {
    doc.line(kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight, kHeight - kMarginBottom,
             "black");
    doc.line(kMarginLeft, kMarginTop, kMarginLeft, kHeight - kMarginBottom, "black");
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = ax.x_min + (ax.x_max - ax.x_min) * i / n_ticks;
        const double fy = ax.y_min + (ax.y_max - ax.y_min) * i / n_ticks;
        doc.line(ax.px(fx), kHeight - kMarginBottom, ax.px(fx), kHeight - kMarginBottom + 5,
                 "black");
        doc.text(ax.px(fx), kHeight - kMarginBottom + 18, num(fx), 11);
        doc.line(kMarginLeft - 5, ax.py(fy), kMarginLeft, ax.py(fy), "black");
        doc.text(kMarginLeft - 8, ax.py(fy) + 4, num(fy), 11, "end");
    }
    doc.text(kWidth / 2, kHeight - 12, x_label);
    doc.text(18, kHeight / 2, y_label, 13, "middle", -90);
    doc.text(kWidth / 2, 22, title, 15);
}

}  // namespace

void write_scatter_identity_svg(const std::filesystem::path& path, std::span<const double> xs,
                                std::span<const double> ys, const std::string& x_label,
                                const std::string& y_label, const std::string& title) {
    if (xs.empty() || xs.size() != ys.size())
        throw std::invalid_argument("write_scatter_identity_svg: empty or mismatched data");

    double lo = *std::min_element(xs.begin(), xs.end());
    double hi = *std::max_element(xs.begin(), xs.end());
    lo = std::min(lo, *std::min_element(ys.begin(), ys.end()));
    hi = std::max(hi, *std::max_element(ys.begin(), ys.end()));
    pad_range(lo, hi);
    Axes ax{lo, hi, lo, hi};

    SvgDoc doc;
    draw_frame(doc, ax, x_label, y_label, title);
    // Identity reference line.
    doc.line(ax.px(lo), ax.py(lo), ax.px(hi), ax.py(hi), "#888888", 1.0, "6,4");
    for (std::size_t i = 0; i < xs.size(); ++i)
        doc.circle(ax.px(xs[i]), ax.py(ys[i]), 3.5, "#4878cf");
    doc.save(path);
}

void write_boxplot_svg(const std::filesystem::path& path, std::span<const BoxGroup> groups,
                       const std::string& y_label, const std::string& title) {
    if (groups.empty()) throw std::invalid_argument("write_boxplot_svg: no groups");
    for (const auto& g : groups)
        if (g.values.empty())
            throw std::invalid_argument("write_boxplot_svg: empty group " + g.label);

    double lo = groups[0].values[0], hi = lo;
    for (const auto& g : groups)
        for (double v : g.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    pad_range(lo, hi);
    Axes ax{0.0, static_cast<double>(groups.size()), lo, hi};

    SvgDoc doc;
    doc.line(kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight, kHeight - kMarginBottom,
             "black");
    doc.line(kMarginLeft, kMarginTop, kMarginLeft, kHeight - kMarginBottom, "black");
    for (int i = 0; i <= 5; ++i) {
        const double fy = lo + (hi - lo) * i / 5;
        doc.line(kMarginLeft - 5, ax.py(fy), kMarginLeft, ax.py(fy), "black");
        doc.text(kMarginLeft - 8, ax.py(fy) + 4, num(fy), 11, "end");
    }
    doc.text(18, kHeight / 2, y_label, 13, "middle", -90);
    doc.text(kWidth / 2, 22, title, 15);

    const double slot = 1.0;
    const double box_w = 0.5;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& values = groups[g].values;
        const double q1 = quantile_of(values, 0.25);
        const double q2 = quantile_of(values, 0.50);
        const double q3 = quantile_of(values, 0.75);
        const double iqr = q3 - q1;
        double wlo = q1, whi = q3;
        for (double v : values) {
            if (v >= q1 - 1.5 * iqr) wlo = std::min(wlo, v);
            if (v <= q3 + 1.5 * iqr) whi = std::max(whi, v);
        }
        const double cx = ax.px((g + 0.5) * slot);
        const double x0 = ax.px(g * slot + (slot - box_w) / 2);
        const double x1 = ax.px(g * slot + (slot + box_w) / 2);

        doc.line(cx, ax.py(wlo), cx, ax.py(q1), "black");
        doc.line(cx, ax.py(q3), cx, ax.py(whi), "black");
        doc.line(x0 + (x1 - x0) / 4, ax.py(wlo), x1 - (x1 - x0) / 4, ax.py(wlo), "black");
        doc.line(x0 + (x1 - x0) / 4, ax.py(whi), x1 - (x1 - x0) / 4, ax.py(whi), "black");
        doc.rect(x0, ax.py(q3), x1 - x0, ax.py(q1) - ax.py(q3), groups[g].color, "black");
        doc.line(x0, ax.py(q2), x1, ax.py(q2), "black", 2.0);
        for (double v : values)
            if (v < q1 - 1.5 * iqr || v > q3 + 1.5 * iqr) doc.circle(cx, ax.py(v), 2.5, "black");

        doc.text(cx, kHeight - kMarginBottom + 18, groups[g].label, 11);
    }
    doc.save(path);
}

void write_timecourse_svg(const std::filesystem::path& path, const TimeCourse& tc,
                          double setpoint, std::optional<long> clamp_time,
                          const std::string& title) {
    if (tc.mean.empty()) throw std::invalid_argument("write_timecourse_svg: empty time-course");
    const std::size_t steps = tc.mean.size();
    const std::size_t n = tc.mean.front().size();

    double lo = setpoint, hi = setpoint;
    for (std::size_t t = 0; t < steps; ++t)
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min(lo, tc.mean[t][i] - tc.sd[t][i]);
            hi = std::max(hi, tc.mean[t][i] + tc.sd[t][i]);
        }
    pad_range(lo, hi);
    Axes ax{0.0, static_cast<double>(steps - 1), lo, hi};

    static const char* kColors[] = {"#4878cf", "#d65f5f", "#b47cc7", "#c4ad66",
                                    "#6acc65", "#77bedb"};

    SvgDoc doc;
    draw_frame(doc, ax, "step", "stat level", title);

    // Decimate long runs so the SVG stays small.
    const std::size_t stride = std::max<std::size_t>(1, steps / 2000);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string color = kColors[i % 6];
        std::vector<std::pair<double, double>> band;
        for (std::size_t t = 0; t < steps; t += stride)
            band.emplace_back(ax.px(static_cast<double>(t)), ax.py(tc.mean[t][i] + tc.sd[t][i]));
        for (std::size_t t = steps; t-- > 0;)
            if (t % stride == 0)
                band.emplace_back(ax.px(static_cast<double>(t)),
                                  ax.py(tc.mean[t][i] - tc.sd[t][i]));
        doc.polygon(band, color, 0.25);

        std::vector<std::pair<double, double>> line;
        for (std::size_t t = 0; t < steps; t += stride)
            line.emplace_back(ax.px(static_cast<double>(t)), ax.py(tc.mean[t][i]));
        doc.polyline(line, color);
        doc.text(kWidth - kMarginRight - 6, kMarginTop + 16.0 * (i + 1), "h" + std::to_string(i + 1),
                 12, "end");
    }

    // Set-point reference.
    doc.line(ax.px(0), ax.py(setpoint), ax.px(static_cast<double>(steps - 1)), ax.py(setpoint),
             "green", 1.5, "8,4");
    if (clamp_time)
        doc.line(ax.px(static_cast<double>(*clamp_time)), ax.py(lo),
                 ax.px(static_cast<double>(*clamp_time)), ax.py(hi), "#555555", 1.0, "3,3");
    doc.save(path);
}

}  // namespace modq
