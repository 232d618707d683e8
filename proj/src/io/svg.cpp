#include "gaitrad/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gaitrad/common.hpp"

namespace gaitrad::io {

namespace {

constexpr int kWidth = 440;
constexpr int kHeight = 360;
constexpr int kMargin = 52;

struct Scale {
    double lo = 0.0, hi = 1.0;
    double px(double v, int span) const {
        return (v - lo) / (hi - lo) * double(span);
    }
};

Scale make_scale(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1e-6, std::abs(lo) * 0.1 + 1e-6);
        return {lo - pad, hi + pad};
    }
    const double pad = 0.08 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

class SvgWriter {
  public:
    SvgWriter(const std::string& path, const std::string& title, const Scale& xs, const Scale& ys,
              const std::string& xlabel, const std::string& ylabel)
        : out_(path, std::ios::trunc), xs_(xs), ys_(ys) {
        if (!out_) throw PipelineError("cannot write plot: " + path);
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
             << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out_ << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
             << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
        // axes
        out_ << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << plot_w()
             << "\" height=\"" << plot_h()
             << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double fx = xs_.lo + (xs_.hi - xs_.lo) * i / 4.0;
            const double fy = ys_.lo + (ys_.hi - ys_.lo) * i / 4.0;
            out_ << "<text x=\"" << px(fx) << "\" y=\"" << kHeight - kMargin + 16
                 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
                 << fmt(fx) << "</text>\n";
            out_ << "<text x=\"" << kMargin - 6 << "\" y=\"" << py(fy) + 3
                 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
                 << fmt(fy) << "</text>\n";
        }
        out_ << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
             << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
             << "</text>\n";
        out_ << "<text x=\"14\" y=\"" << kHeight / 2
             << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
             << "transform=\"rotate(-90 14 " << kHeight / 2 << ")\">" << ylabel << "</text>\n";
    }

    ~SvgWriter() { out_ << "</svg>\n"; }

    static int plot_w() { return kWidth - 2 * kMargin; }
    static int plot_h() { return kHeight - 2 * kMargin; }
    double px(double x) const { return kMargin + xs_.px(x, plot_w()); }
    double py(double y) const { return kHeight - kMargin - ys_.px(y, plot_h()); }

    void point(double x, double y) {
        out_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
             << "\" r=\"2.4\" fill=\"#1f77b4\" fill-opacity=\"0.65\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, bool dashed, const char* color) {
        out_ << "<line x1=\"" << px(x1) << "\" y1=\"" << py(y1) << "\" x2=\"" << px(x2)
             << "\" y2=\"" << py(y2) << "\" stroke=\"" << color << "\" stroke-width=\"1.2\"";
        if (dashed) out_ << " stroke-dasharray=\"6 4\"";
        out_ << "/>\n";
    }

    void annotation(const std::string& text) {
        out_ << "<text x=\"" << kMargin + 8 << "\" y=\"" << kMargin + 16
             << "\" font-family=\"sans-serif\" font-size=\"11\">" << text << "</text>\n";
    }

  private:
    std::ofstream out_;
    Scale xs_, ys_;
};

}  // namespace

void write_correlation_svg(const std::string& path, const std::string& title,
                           const std::vector<std::pair<double, double>>& truth_estimate,
                           const std::string& r_label) {
    double lo = 1e300, hi = -1e300;
    for (const auto& [t, e] : truth_estimate) {
        lo = std::min({lo, t, e});
        hi = std::max({hi, t, e});
    }
    if (truth_estimate.empty()) {
        lo = 0.0;
        hi = 1.0;
    }
    const Scale s = make_scale(lo, hi);
    SvgWriter svg(path, title, s, s, "reference", "radar");
    svg.line(s.lo, s.lo, s.hi, s.hi, true, "#555555");
    for (const auto& [t, e] : truth_estimate) svg.point(t, e);
    if (!r_label.empty()) svg.annotation(r_label);
}

void write_bland_altman_svg(const std::string& path, const std::string& title,
                            const std::vector<std::pair<double, double>>& truth_estimate,
                            double mean_diff, double loa_low, double loa_high) {
    std::vector<std::pair<double, double>> pts;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& [t, e] : truth_estimate) {
        const double m = 0.5 * (t + e);
        const double d = t - e;
        pts.emplace_back(m, d);
        xlo = std::min(xlo, m);
        xhi = std::max(xhi, m);
        ylo = std::min(ylo, d);
        yhi = std::max(yhi, d);
    }
    if (pts.empty()) {
        xlo = ylo = 0.0;
        xhi = yhi = 1.0;
    }
    ylo = std::min(ylo, loa_low);
    yhi = std::max(yhi, loa_high);
    const Scale xs = make_scale(xlo, xhi);
    const Scale ys = make_scale(ylo, yhi);
    SvgWriter svg(path, title, xs, ys, "mean of radar and reference", "difference");
    svg.line(xs.lo, mean_diff, xs.hi, mean_diff, false, "#d62728");
    svg.line(xs.lo, loa_low, xs.hi, loa_low, true, "#555555");
    svg.line(xs.lo, loa_high, xs.hi, loa_high, true, "#555555");
    for (const auto& [m, d] : pts) svg.point(m, d);
}

}  // namespace gaitrad::io
