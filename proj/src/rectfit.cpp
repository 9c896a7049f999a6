#include "shredmap/rectfit.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "shredmap/error.hpp"

namespace shredmap {

namespace {

bool better_rect(const RectRegion& a, const RectRegion& b) {
    if (a.area() != b.area()) return a.area() > b.area();
    if (a.w != b.w) return a.w > b.w;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

}  // namespace

RectRegion largest_interior_rect(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> heights(static_cast<std::size_t>(w), 0);
    std::vector<int> stack;
    stack.reserve(static_cast<std::size_t>(w) + 1);
    std::optional<RectRegion> best;

    for (int row = 0; row < h; ++row) {
        for (int x = 0; x < w; ++x) heights[x] = mask.at(x, row) ? heights[x] + 1 : 0;

        // Largest rectangle in the histogram whose bottom edge is `row`.
        stack.clear();
        for (int x = 0; x <= w; ++x) {
            const int cur = x < w ? heights[x] : 0;
            while (!stack.empty() && heights[stack.back()] >= cur) {
                const int bar = stack.back();
                stack.pop_back();
                const int hgt = heights[bar];
                if (hgt == 0) continue;
                const int left = stack.empty() ? 0 : stack.back() + 1;
                const RectRegion cand{left, row - hgt + 1, x - left, hgt};
                if (!best || better_rect(cand, *best)) best = cand;
            }
            stack.push_back(x);
        }
    }
    if (!best) throw Error("empty mask");
    return *best;
}

BinaryMask rotate_mask(const BinaryMask& mask, int degrees) {
    std::vector<double> field(mask.bits().begin(), mask.bits().end());
    const GrayImage rotated =
        rotate_field(GrayImage(mask.width(), mask.height(), std::move(field)), degrees, 0.0);
    BinaryMask out(rotated.width(), rotated.height());
    for (int y = 0; y < rotated.height(); ++y) {
        for (int x = 0; x < rotated.width(); ++x) out.set(x, y, rotated.at(x, y) >= 0.5 - 1e-12);
    }
    return out;
}

namespace {

struct SweepEntry {
    int rotation = 0;
    RectRegion rect;
    bool valid = false;
};

BinaryMask rotated_template_mask(const Segment& piece, int degrees, int white_cutoff,
                                 const RasterImage& rotated_pixels) {
    BinaryMask m = rotate_mask(piece.mask, degrees);
    const BinaryMask fg = threshold_background(rotated_pixels, white_cutoff);
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.at(x, y) && !fg.at(x, y)) m.set(x, y, false);
        }
    }
    return m;
}

PointF mask_centroid(const BinaryMask& mask) {
    double sx = 0.0;
    double sy = 0.0;
    long long n = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            sx += x;
            sy += y;
            ++n;
        }
    }
    if (n == 0) return {(mask.width() - 1) * 0.5, (mask.height() - 1) * 0.5};
    return {sx / n, sy / n};
}

}  // namespace

TemplateChoice best_template(const Segment& piece, const RectFitParams& params) {
    if (params.step < 1 || 360 % params.step != 0) {
        throw Error("rotation step must divide 360, got " + std::to_string(params.step));
    }
    if (piece.mask.count() == 0) throw Error("empty mask");
    const RasterImage pixels = piece.image.empty()
                                   ? RasterImage(piece.mask.width(), piece.mask.height(), Rgb{0, 0, 0})
                                   : piece.image;

    const int n = 360 / params.step;
    std::vector<SweepEntry> sweep(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const int deg = i * params.step;
        const RasterImage rotated = rotate(pixels, deg, kWhite);
        const BinaryMask m = rotated_template_mask(piece, deg, params.white_cutoff, rotated);
        if (m.count() == 0) continue;
        sweep[i] = {deg, largest_interior_rect(m), true};
    }

    const SweepEntry* best = nullptr;
    for (const SweepEntry& e : sweep) {
        if (!e.valid) continue;
        if (!best || e.rect.area() > best->rect.area()) best = &e;
    }
    if (!best) throw Error("empty mask");

    TemplateChoice choice;
    choice.piece_rotation = best->rotation;
    choice.rect = best->rect;
    choice.area = best->rect.area();
    choice.template_image = crop(rotate(pixels, best->rotation, kWhite), best->rect);

    const RotationFrame frame(piece.mask.width(), piece.mask.height(), best->rotation);
    const PointF c = frame.to_rotated(mask_centroid(piece.mask));
    choice.anchor = {c.x - best->rect.x, c.y - best->rect.y};
    return choice;
}

TemplateChoice template_from_image(const RasterImage& image) {
    TemplateChoice choice;
    choice.piece_rotation = 0;
    choice.rect = {0, 0, image.width(), image.height()};
    choice.area = choice.rect.area();
    choice.template_image = image;
    choice.anchor = {(image.width() - 1) * 0.5, (image.height() - 1) * 0.5};
    return choice;
}

}  // namespace shredmap
