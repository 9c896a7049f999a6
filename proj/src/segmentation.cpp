#include "shredmap/segmentation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "shredmap/error.hpp"

namespace shredmap {

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw Error("mask dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
    }
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

long long BinaryMask::count() const {
    return std::count(bits_.begin(), bits_.end(), std::uint8_t{1});
}

BinaryMask threshold_background(const RasterImage& img, int white_cutoff) {
    BinaryMask mask(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Rgb& p = img.at(x, y);
            const int lo = std::min({p.r, p.g, p.b});
            mask.set(x, y, lo < white_cutoff);
        }
    }
    return mask;
}

std::vector<Segment> extract_segments(const BinaryMask& mask, long long min_area) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<Segment> segments;
    std::vector<int> stack;
    std::vector<int> members;
    int next_label = 0;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const int seed = sy * w + sx;
            if (!mask.at(sx, sy) || label[seed] >= 0) continue;

            const int id = next_label++;
            members.clear();
            stack.assign(1, seed);
            label[seed] = id;
            int x0 = sx, x1 = sx, y0 = sy, y1 = sy;
            while (!stack.empty()) {
                const int p = stack.back();
                stack.pop_back();
                members.push_back(p);
                const int px = p % w;
                const int py = p / w;
                x0 = std::min(x0, px);
                x1 = std::max(x1, px);
                y0 = std::min(y0, py);
                y1 = std::max(y1, py);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx;
                        const int ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const int q = ny * w + nx;
                        if (label[q] >= 0 || !mask.at(nx, ny)) continue;
                        label[q] = id;
                        stack.push_back(q);
                    }
                }
            }
            if (static_cast<long long>(members.size()) < min_area) continue;
            Segment seg;
            seg.origin_x = x0;
            seg.origin_y = y0;
            seg.area = static_cast<long long>(members.size());
            seg.mask = BinaryMask(x1 - x0 + 1, y1 - y0 + 1);
            for (int p : members) seg.mask.set(p % w - x0, p / w - y0, true);
            segments.push_back(std::move(seg));
        }
    }

    // Discovery order is raster order of each component's first pixel; the
    // stable sort keeps it as the last tie-breaker.
    std::stable_sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
        if (a.area != b.area) return a.area > b.area;
        if (a.origin_y != b.origin_y) return a.origin_y < b.origin_y;
        return a.origin_x < b.origin_x;
    });
    return segments;
}

namespace {

// Separable running OR (dilate) or AND (erode) over a (2r+1) window,
// ignoring out-of-image cells.
BinaryMask square_filter(const BinaryMask& in, int r, bool dilate) {
    const int w = in.width();
    const int h = in.height();
    BinaryMask rows(w, h);
    std::vector<int> prefix(static_cast<std::size_t>(std::max(w, h)) + 1);
    for (int y = 0; y < h; ++y) {
        prefix[0] = 0;
        for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + (in.at(x, y) ? 1 : 0);
        for (int x = 0; x < w; ++x) {
            const int a = std::max(0, x - r);
            const int b = std::min(w - 1, x + r);
            const int n = prefix[b + 1] - prefix[a];
            rows.set(x, y, dilate ? n > 0 : n == b - a + 1);
        }
    }
    BinaryMask out(w, h);
    for (int x = 0; x < w; ++x) {
        prefix[0] = 0;
        for (int y = 0; y < h; ++y) prefix[y + 1] = prefix[y] + (rows.at(x, y) ? 1 : 0);
        for (int y = 0; y < h; ++y) {
            const int a = std::max(0, y - r);
            const int b = std::min(h - 1, y + r);
            const int n = prefix[b + 1] - prefix[a];
            out.set(x, y, dilate ? n > 0 : n == b - a + 1);
        }
    }
    return out;
}

}  // namespace

BinaryMask clean_mask(const BinaryMask& mask, int radius) {
    if (radius < 0) throw Error("clean radius must be >= 0, got " + std::to_string(radius));
    if (radius == 0) return mask;
    return square_filter(square_filter(mask, radius, true), radius, false);
}

std::vector<Segment> segment_scan(const RasterImage& scan, const SegmentParams& params) {
    const BinaryMask mask =
        clean_mask(threshold_background(scan, params.white_cutoff), params.clean_radius);
    std::vector<Segment> segments = extract_segments(mask, params.min_area);
    for (Segment& seg : segments) {
        seg.image = RasterImage(seg.mask.width(), seg.mask.height(), kWhite);
        for (int y = 0; y < seg.mask.height(); ++y) {
            for (int x = 0; x < seg.mask.width(); ++x) {
                if (seg.mask.at(x, y)) seg.image.at(x, y) = scan.at(seg.origin_x + x, seg.origin_y + y);
            }
        }
    }
    return segments;
}

}  // namespace shredmap
