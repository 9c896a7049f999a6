#include "shredmap/kernels.hpp"
#include "zncc_common.hpp"

namespace shredmap::kernels {

ScoreMap zncc_parallel(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t) {
    detail::check_fits(image, t);
    ScoreMap out{image.width() - t.width() + 1, image.height() - t.height() + 1, {}};
    out.values.assign(static_cast<std::size_t>(out.width) * out.height, 0.0);
    if (t.degenerate()) return out;

    // Each row is written by exactly one thread, so the map is identical to
    // zncc_reference regardless of the thread count.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out.height; ++y) detail::score_row(image, tables, t, y, out);
    return out;
}

}  // namespace shredmap::kernels
