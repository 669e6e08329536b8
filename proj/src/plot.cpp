#include "scalelaw/plot.hpp"

#include "scalelaw/analysis.hpp"
#include "scalelaw/error.hpp"
#include "scalelaw/inference.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace scalelaw {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Frame {
    double left = 70, right = 0, top = 40, bottom = 0;
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    bool log_x = true;

    double px(double x) const {
        const double u = log_x ? (std::log10(x) - std::log10(x_lo)) / (std::log10(x_hi) - std::log10(x_lo))
                               : (x - x_lo) / (x_hi - x_lo);
        return left + u * (right - left);
    }
    double py(double y) const { return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top); }
};

std::string coord(double v) { return fmt::format("{:.2f}", v); }

bool has_band(const FitResult& fit) {
    return fit.covariance && static_cast<double>(fit.n) - static_cast<double>(fit.p) >= 1.0;
}

}  // namespace

std::string emit_plot(std::span<const LabeledFit> fits, std::span<const LabeledPoints> point_sets,
                      const PlotOptions& options) {
    std::size_t point_count = 0;
    for (const auto& set : point_sets) point_count += set.points.size();
    if (fits.empty() && point_count == 0) throw InputError("plot needs at least one fit or point");
    if (options.samples < 2) throw InputError("plot needs at least 2 samples per curve");

    Frame f;
    f.log_x = options.log_x;
    f.right = options.width - 170.0;
    f.bottom = options.height - 50.0;

    if (options.x_range) {
        std::tie(f.x_lo, f.x_hi) = *options.x_range;
    } else if (point_count > 0) {
        double lo = INFINITY, hi = 0.0;
        for (const auto& set : point_sets)
            for (const auto& p : set.points) {
                lo = std::min(lo, p.x);
                hi = std::max(hi, p.x);
            }
        f.x_lo = std::pow(10.0, std::floor(std::log10(lo)));
        f.x_hi = std::pow(10.0, std::ceil(std::log10(hi)));
        if (f.x_hi <= f.x_lo) f.x_hi = f.x_lo * 10.0;
    } else {
        f.x_lo = 1e8;
        f.x_hi = 1e13;
    }
    if (!(f.x_lo > 0.0) || !(f.x_hi > f.x_lo) || !std::isfinite(f.x_hi))
        throw InputError(fmt::format("invalid x range [{}, {}]", f.x_lo, f.x_hi));

    struct Curve {
        std::vector<double> x, y, lo, hi;
        bool band = false;
    };
    std::vector<Curve> curves;
    const auto grid = log_grid(f.x_lo, f.x_hi, static_cast<std::size_t>(options.samples));
    for (const auto& lf : fits) {
        Curve c;
        c.band = options.band && has_band(lf.fit);
        for (double x : grid) {
            c.x.push_back(x);
            if (c.band) {
                const auto pi = predict_ci(lf.fit, x, options.alpha);
                c.y.push_back(pi.y_hat);
                c.lo.push_back(pi.lo);
                c.hi.push_back(pi.hi);
            } else {
                c.y.push_back(evaluate(lf.fit.params, lf.fit.form, x));
            }
        }
        curves.push_back(std::move(c));
    }

    if (options.y_range) {
        std::tie(f.y_lo, f.y_hi) = *options.y_range;
    } else {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& c : curves) {
            for (double y : c.y) {
                lo = std::min(lo, y);
                hi = std::max(hi, y);
            }
        }
        for (const auto& set : point_sets)
            for (const auto& p : set.points)
                if (p.x >= f.x_lo && p.x <= f.x_hi) {
                    lo = std::min(lo, p.error);
                    hi = std::max(hi, p.error);
                }
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        const double pad = std::max((hi - lo) * 0.05, 1e-3);
        f.y_lo = std::max(0.0, lo - pad);
        f.y_hi = std::min(1.0, hi + pad);
        if (f.y_hi <= f.y_lo) f.y_hi = f.y_lo + 1e-3;
    }
    if (!(f.y_hi > f.y_lo) || !std::isfinite(f.y_lo) || !std::isfinite(f.y_hi))
        throw InputError(fmt::format("invalid y range [{}, {}]", f.y_lo, f.y_hi));

    std::string svg;
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        options.width, options.height, options.width, options.height);
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", options.width,
                       options.height);
    if (!options.title.empty())
        svg += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
                           coord((f.left + f.right) / 2), escape_xml(options.title));

    // Grid and tick labels.
    if (f.log_x) {
        for (int k = static_cast<int>(std::floor(std::log10(f.x_lo))); k <= static_cast<int>(std::ceil(std::log10(f.x_hi))); ++k) {
            const double x = std::pow(10.0, k);
            if (!(x > f.x_lo && x <= f.x_hi)) continue;
            svg += fmt::format("<line class=\"grid-x\" x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n",
                               coord(f.px(x)), coord(f.top), coord(f.bottom));
            svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">1e{}</text>\n",
                               coord(f.px(x)), coord(f.bottom + 16), k);
        }
    } else {
        for (int i = 1; i <= 5; ++i) {
            const double x = f.x_lo + (f.x_hi - f.x_lo) * i / 5.0;
            svg += fmt::format("<line class=\"grid-x\" x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n",
                               coord(f.px(x)), coord(f.top), coord(f.bottom));
            svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n",
                               coord(f.px(x)), coord(f.bottom + 16), x);
        }
    }
    for (int i = 0; i <= 5; ++i) {
        const double y = f.y_lo + (f.y_hi - f.y_lo) * i / 5.0;
        svg += fmt::format("<line class=\"grid-y\" x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#eeeeee\"/>\n",
                           coord(f.py(y)), coord(f.left), coord(f.right));
        svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.3f}</text>\n",
                           coord(f.left - 6), coord(f.py(y) + 4), y);
    }
    svg += fmt::format("<rect class=\"frame\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                       coord(f.left), coord(f.top), coord(f.right - f.left), coord(f.bottom - f.top));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       coord((f.left + f.right) / 2), coord(f.bottom + 38), escape_xml(options.x_label));
    svg += fmt::format("<text x=\"16\" y=\"{0}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
                       coord((f.top + f.bottom) / 2), escape_xml(options.y_label));

    svg += fmt::format("<clipPath id=\"plot-area\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>\n",
                       coord(f.left), coord(f.top), coord(f.right - f.left), coord(f.bottom - f.top));
    svg += "<g clip-path=\"url(#plot-area)\">\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        if (!c.band) continue;
        std::string pts;
        for (std::size_t k = 0; k < c.x.size(); ++k)
            pts += fmt::format("{}{},{}", pts.empty() ? "" : " ", coord(f.px(c.x[k])), coord(f.py(c.hi[k])));
        for (std::size_t k = c.x.size(); k-- > 0;)
            pts += fmt::format(" {},{}", coord(f.px(c.x[k])), coord(f.py(c.lo[k])));
        svg += fmt::format("<polygon class=\"band\" points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n",
                           pts, kPalette[i % kPalette.size()]);
    }
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        std::string pts;
        for (std::size_t k = 0; k < c.x.size(); ++k)
            pts += fmt::format("{}{},{}", k ? " " : "", coord(f.px(c.x[k])), coord(f.py(c.y[k])));
        svg += fmt::format("<polyline class=\"curve\" data-label=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           escape_xml(fits[i].label), pts, kPalette[i % kPalette.size()]);
    }
    for (std::size_t s = 0; s < point_sets.size(); ++s) {
        const char* color = kPalette[(fits.size() + s) % kPalette.size()];
        for (const auto& p : point_sets[s].points) {
            if (!(p.x >= f.x_lo && p.x <= f.x_hi)) continue;
            svg += fmt::format("<circle class=\"point\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
                               coord(f.px(p.x)), coord(f.py(p.error)), color);
        }
    }
    svg += "</g>\n";

    // Legend.
    double ly = f.top + 10;
    const double lx = f.right + 15;
    for (std::size_t i = 0; i < fits.size(); ++i, ly += 18) {
        svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           coord(lx), coord(ly), coord(lx + 20), coord(ly), kPalette[i % kPalette.size()]);
        svg += fmt::format("<text class=\"legend\" x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n", coord(lx + 26),
                           coord(ly + 4), escape_xml(fits[i].label));
    }
    for (std::size_t s = 0; s < point_sets.size(); ++s, ly += 18) {
        svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n", coord(lx + 10), coord(ly),
                           kPalette[(fits.size() + s) % kPalette.size()]);
        svg += fmt::format("<text class=\"legend\" x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n", coord(lx + 26),
                           coord(ly + 4), escape_xml(point_sets[s].label));
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace scalelaw
