#include <algorithm>
#include <cmath>

#include "shredmap/error.hpp"
#include "shredmap/kernels.hpp"
#include "zncc_common.hpp"

namespace shredmap {

bool TemplateStats::degenerate() const {
    return norm_sq <= kZeroVariance * static_cast<double>(zero_mean.width()) * zero_mean.height();
}

TemplateStats template_stats(const GrayImage& tmpl) {
    const auto v = tmpl.values();
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    std::vector<double> zm(v.size());
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        zm[i] = v[i] - mean;
        norm_sq += zm[i] * zm[i];
    }
    return {GrayImage(tmpl.width(), tmpl.height(), std::move(zm)), norm_sq};
}

namespace detail {

double window_deviation_sq_direct(const GrayImage& image, const IntegralImage& tables, int x, int y,
                                  int w, int h) {
    if (tables.rect_constant(x, y, w, h)) return 0.0;
    const double mean = tables.rect_sum(x, y, w, h) / (static_cast<double>(w) * h);
    double direct = 0.0;
    for (int v = y; v < y + h; ++v) {
        for (int u = x; u < x + w; ++u) {
            const double d = image.at(u, v) - mean;
            direct += d * d;
        }
    }
    return direct;
}

}  // namespace detail

double zncc_from_moments(double numerator, double window_dev_sq, long long n, const TemplateStats& t) {
    if (window_dev_sq <= kZeroVariance * static_cast<double>(n) || t.degenerate()) return 0.0;
    return std::clamp(numerator / std::sqrt(t.norm_sq * window_dev_sq), -1.0, 1.0);
}

double zncc_at(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t, int x,
               int y) {
    const int tw = t.width();
    const int th = t.height();
    double num = 0.0;
    for (int v = 0; v < th; ++v) {
        const double* row = image.values().data() + static_cast<std::size_t>(y + v) * image.width() + x;
        const double* trow = t.zero_mean.values().data() + static_cast<std::size_t>(v) * tw;
        for (int u = 0; u < tw; ++u) num += trow[u] * row[u];
    }
    return zncc_from_moments(num, window_deviation_sq(image, tables, x, y, tw, th),
                             static_cast<long long>(tw) * th, t);
}

namespace detail {

void check_fits(const GrayImage& image, const TemplateStats& t) {
    if (t.width() > image.width() || t.height() > image.height()) {
        throw Error("template exceeds view");
    }
}

void score_row(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t, int y,
               ScoreMap& out) {
    for (int x = 0; x < out.width; ++x) {
        out.values[static_cast<std::size_t>(y) * out.width + x] = zncc_at(image, tables, t, x, y);
    }
}

}  // namespace detail

namespace kernels {

ScoreMap zncc_reference(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t) {
    detail::check_fits(image, t);
    ScoreMap out{image.width() - t.width() + 1, image.height() - t.height() + 1, {}};
    out.values.assign(static_cast<std::size_t>(out.width) * out.height, 0.0);
    if (t.degenerate()) return out;
    for (int y = 0; y < out.height; ++y) detail::score_row(image, tables, t, y, out);
    return out;
}

}  // namespace kernels
}  // namespace shredmap
