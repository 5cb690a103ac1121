#include "onsager/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>
#include <vector>

namespace onsager {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMargin = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Frame {
    double lambda_max;
    double amp_max;

    double x(double lambda) const { return kMargin + (kWidth - 2 * kMargin) * lambda / lambda_max; }
    double y(double amp) const {
        return kHeight / 2 - (kHeight / 2 - kMargin) * amp / amp_max;
    }
};

void polyline(std::ostringstream& os, const std::vector<std::pair<double, double>>& pts,
              const char* color, bool stable) {
    if (pts.size() < 2) {
        return;
    }
    os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (!stable) {
        os << " stroke-dasharray=\"6,4\"";
    }
    os << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        os << (i ? " " : "") << fmt(pts[i].first) << "," << fmt(pts[i].second);
    }
    os << "\"/>\n";
}

}  // namespace

std::string diagram_to_svg(const BifurcationDiagram& d) {
    double amp_max = 0.0;
    for (const auto& b : d.branches) {
        for (const auto& s : b.samples) {
            amp_max = std::max(amp_max, s.amplitude);
        }
    }
    const Frame f{d.lambda_max > 0 ? d.lambda_max : 1.0, amp_max > 0 ? 1.1 * amp_max : 1.0};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    os << "  <line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kHeight - kMargin) << "\" x2=\""
       << fmt(kWidth - kMargin) << "\" y2=\"" << fmt(kHeight - kMargin)
       << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kMargin) << "\" x2=\"" << fmt(kMargin)
       << "\" y2=\"" << fmt(kHeight - kMargin) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double lambda = f.lambda_max * i / 5.0;
        os << "  <text x=\"" << fmt(f.x(lambda)) << "\" y=\"" << fmt(kHeight - kMargin + 18)
           << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(lambda) << "</text>\n";
        const double amp = f.amp_max * (i - 2.5) / 2.5;
        os << "  <text x=\"" << fmt(kMargin - 6) << "\" y=\"" << fmt(f.y(amp) + 4)
           << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(amp) << "</text>\n";
    }
    os << "  <text x=\"" << fmt(kWidth / 2) << "\" y=\"" << fmt(kHeight - 15)
       << "\" font-size=\"14\" text-anchor=\"middle\">lambda</text>\n";
    os << "  <text x=\"15\" y=\"" << fmt(kHeight / 2)
       << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << fmt(kHeight / 2)
       << ")\">+/- |u|_inf</text>\n";

    // trivial branch, split into runs of equal stability
    std::vector<std::pair<double, double>> run;
    bool run_stable = true;
    for (const auto& s : d.trivial_branch) {
        if (!run.empty() && s.stable != run_stable) {
            run.emplace_back(f.x(s.lambda), f.y(0.0));
            polyline(os, run, "black", run_stable);
            run.clear();
        }
        if (run.empty()) {
            run_stable = s.stable;
        }
        run.emplace_back(f.x(s.lambda), f.y(0.0));
    }
    polyline(os, run, "black", run_stable);

    for (std::size_t bi = 0; bi < d.branches.size(); ++bi) {
        const auto& b = d.branches[bi];
        const char* color = kPalette[static_cast<std::size_t>(b.parent_mode - 1) % 6];
        std::vector<std::pair<double, double>> pts;
        bool stable = true;
        for (const auto& s : b.samples) {
            const double signed_amp = s.leading < 0.0 ? -s.amplitude : s.amplitude;
            const std::pair<double, double> p{f.x(std::min(s.lambda, f.lambda_max)), f.y(signed_amp)};
            if (!pts.empty() && s.stable != stable) {
                pts.push_back(p);
                polyline(os, pts, color, stable);
                pts.clear();
            }
            if (pts.empty()) {
                stable = s.stable;
            }
            pts.push_back(p);
        }
        polyline(os, pts, color, stable);
    }
    for (double lambda : d.lambda_points) {
        os << "  <circle cx=\"" << fmt(f.x(lambda)) << "\" cy=\"" << fmt(f.y(0.0))
           << "\" r=\"4\" fill=\"red\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace onsager
