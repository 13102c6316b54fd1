#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "ptzgs/errors.hpp"
#include "ptzgs/scenario.hpp"

namespace ptzgs {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
// Values below this are clipped on log axes.
constexpr double kLogFloor = 1e-30;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Series {
    std::string label;
    std::vector<double> y;
    bool dashed = false;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

class SvgFigure {
public:
    SvgFigure(std::string title, std::string ylabel, bool log_y)
        : title_(std::move(title)), ylabel_(std::move(ylabel)), log_y_(log_y) {}

    void set_x(std::vector<double> x) { x_ = std::move(x); }
    void add(Series s) { series_.push_back(std::move(s)); }
    void add_marker(double t) { markers_.push_back(t); }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());

        const double x_lo = x_.front();
        const double x_hi = x_.back() > x_lo ? x_.back() : x_lo + 1.0;
        double y_lo = std::numeric_limits<double>::infinity();
        double y_hi = -y_lo;
        for (const Series& s : series_) {
            for (double v : s.y) {
                const double t = transform(v);
                if (!std::isfinite(t)) continue;
                y_lo = std::min(y_lo, t);
                y_hi = std::max(y_hi, t);
            }
        }
        if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
        if (log_y_) {
            y_lo = std::floor(y_lo);
            y_hi = std::ceil(y_hi);
        }
        if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1.0;

        const double pw = kWidth - kLeft - kRight;
        const double ph = kHeight - kTop - kBottom;
        auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
        auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
            << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
            << title_ << "</text>\n";
        out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
            << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

        for (int k = 0; k <= 5; ++k) {
            const double xv = x_lo + (x_hi - x_lo) * k / 5.0;
            out << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 18
                << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        }
        const int y_ticks = log_y_ ? static_cast<int>(std::min(10.0, y_hi - y_lo)) : 5;
        for (int k = 0; k <= y_ticks; ++k) {
            const double yv = y_lo + (y_hi - y_lo) * k / y_ticks;
            const std::string label = log_y_ ? "1e" + num(std::round(yv)) : num(yv);
            out << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << py(yv)
                << "\" y2=\"" << py(yv) << "\" stroke=\"#e0e0e0\"/>\n";
            out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4
                << "\" text-anchor=\"end\">" << label << "</text>\n";
        }
        out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
            << "\" text-anchor=\"middle\">t [s]</text>\n";
        out << "<text transform=\"translate(20," << kTop + ph / 2
            << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel_ << "</text>\n";

        for (double m : markers_) {
            if (m < x_lo || m > x_hi) continue;
            out << "<line x1=\"" << px(m) << "\" x2=\"" << px(m) << "\" y1=\"" << kTop
                << "\" y2=\"" << kTop + ph << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
        }

        std::size_t color = 0;
        for (const Series& s : series_) {
            const char* stroke = kPalette[color++ % std::size(kPalette)];
            out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\""
                << (s.dashed ? " stroke-dasharray=\"4,3\"" : "") << " points=\"";
            for (std::size_t k = 0; k < x_.size() && k < s.y.size(); ++k) {
                const double t = transform(s.y[k]);
                if (!std::isfinite(t)) continue;
                out << num(px(x_[k])) << ',' << num(py(t)) << ' ';
            }
            out << "\"/>\n";
            const double ly = kTop + 14.0 + 18.0 * static_cast<double>(color - 1);
            out << "<line x1=\"" << kLeft + pw + 12 << "\" x2=\"" << kLeft + pw + 36 << "\" y1=\""
                << ly << "\" y2=\"" << ly << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << ly + 4 << "\">" << s.label
                << "</text>\n";
        }
        out << "</svg>\n";
        if (!out) throw IoError("error while writing " + path.string());
    }

private:
    double transform(double v) const {
        if (!log_y_) return v;
        return std::log10(std::max(std::abs(v), kLogFloor));
    }

    std::string title_;
    std::string ylabel_;
    bool log_y_;
    std::vector<double> x_;
    std::vector<Series> series_;
    std::vector<double> markers_;
};

}  // namespace

std::vector<std::filesystem::path> emit_plots(const RunResult& result,
                                              const std::filesystem::path& dir) {
    const Trajectory& traj = result.trajectory;
    if (traj.size() == 0) throw PreconditionError("emit_plots: empty trajectory");
    const std::size_t agents = result.problem.agents();
    const std::size_t dim = result.problem.dim();
    const std::string tag = result.problem.params.variant == Variant::MultiStage ? "MS" : "SS";

    auto decorate = [&](SvgFigure& fig) {
        fig.set_x(traj.times);
        for (double d : traj.deadlines) fig.add_marker(d);
    };

    SvgFigure states(tag + ": agent states x_i(t)", "x_ij", false);
    decorate(states);
    for (std::size_t i = 0; i < agents; ++i) {
        for (std::size_t c = 0; c < dim; ++c) {
            Series s{"x" + std::to_string(i + 1) + "," + std::to_string(c + 1), {}, c % 2 == 1};
            for (const Vector& y : traj.states) s.y.push_back(y(static_cast<Eigen::Index>(i * dim + c)));
            states.add(std::move(s));
        }
    }

    SvgFigure er(tag + ": normalized residual Er(x_i)", "Er", true);
    SvgFigure surf(tag + ": sliding surface |s_i(t)|", "|s_i|", false);
    decorate(er);
    decorate(surf);
    for (std::size_t i = 0; i < agents; ++i) {
        Series e{"agent " + std::to_string(i + 1), {}, false};
        Series s{"agent " + std::to_string(i + 1), {}, false};
        for (const auto& d : result.diagnostics) {
            e.y.push_back(d.er[i]);
            s.y.push_back(d.s_norm[i]);
        }
        er.add(std::move(e));
        surf.add(std::move(s));
    }

    SvgFigure ferr(tag + ": global function error |f(x) - f(x*)|", "|f(x) - f*|", true);
    decorate(ferr);
    Series f{"f error", {}, false};
    for (const auto& d : result.diagnostics) f.y.push_back(d.f_err);
    ferr.add(std::move(f));

    std::vector<std::filesystem::path> paths = {dir / "states.svg", dir / "residual.svg",
                                                dir / "surface.svg", dir / "function_error.svg"};
    states.write(paths[0]);
    er.write(paths[1]);
    surf.write(paths[2]);
    ferr.write(paths[3]);
    return paths;
}

}  // namespace ptzgs
