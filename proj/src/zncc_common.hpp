#pragma once

#include "shredmap/kernels.hpp"

namespace shredmap::detail {

// Throws Error("template exceeds view") when `t` does not fit in `image`.
void check_fits(const GrayImage& image, const TemplateStats& t);

// Direct-numerator scores for every x of row y.
void score_row(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t, int y,
               ScoreMap& out);

}  // namespace shredmap::detail
