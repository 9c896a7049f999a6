#pragma once

// Slow, obviously-correct reference implementations used by the tests.
// None of these share code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "shredmap/image.hpp"
#include "shredmap/segmentation.hpp"

namespace oracle {

using shredmap::BinaryMask;
using shredmap::GrayImage;
using shredmap::RectRegion;

// Textbook double-loop ZNCC over every placement; zero when either side has
// per-pixel variance below `eps`.
inline std::vector<double> naive_zncc(const GrayImage& img, const GrayImage& t, double eps = 1e-10) {
    const int tw = t.width();
    const int th = t.height();
    const int ow = img.width() - tw + 1;
    const int oh = img.height() - th + 1;
    const double n = static_cast<double>(tw) * th;
    double tmean = 0.0;
    for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x) tmean += t.at(x, y);
    tmean /= n;
    double tvar = 0.0;
    for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x) tvar += (t.at(x, y) - tmean) * (t.at(x, y) - tmean);
    std::vector<double> out(static_cast<std::size_t>(std::max(0, ow)) * std::max(0, oh), 0.0);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            double imean = 0.0;
            for (int y = 0; y < th; ++y)
                for (int x = 0; x < tw; ++x) imean += img.at(ox + x, oy + y);
            imean /= n;
            double ivar = 0.0;
            double cross = 0.0;
            for (int y = 0; y < th; ++y) {
                for (int x = 0; x < tw; ++x) {
                    const double a = img.at(ox + x, oy + y) - imean;
                    ivar += a * a;
                    cross += a * (t.at(x, y) - tmean);
                }
            }
            double s = 0.0;
            if (tvar / n >= eps && ivar / n >= eps) s = cross / std::sqrt(tvar * ivar);
            out[static_cast<std::size_t>(oy) * ow + ox] = std::clamp(s, -1.0, 1.0);
        }
    }
    return out;
}

inline bool rect_all_true(const BinaryMask& m, const RectRegion& r) {
    for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x)
            if (!m.at(x, y)) return false;
    return true;
}

// Enumerates every rectangle; O(W^3 H^3) but fine up to 32x32 with pruning.
inline long long brute_max_rect_area(const BinaryMask& m) {
    long long best = 0;
    for (int y0 = 0; y0 < m.height(); ++y0) {
        for (int x0 = 0; x0 < m.width(); ++x0) {
            if (!m.at(x0, y0)) continue;
            int max_w = m.width() - x0;
            for (int y1 = y0; y1 < m.height(); ++y1) {
                int w = 0;
                while (w < max_w && m.at(x0 + w, y1)) ++w;
                max_w = w;
                if (max_w == 0) break;
                best = std::max(best, static_cast<long long>(max_w) * (y1 - y0 + 1));
            }
        }
    }
    return best;
}

// 8-connected components by explicit stack flood fill; sizes in discovery
// (raster) order, and the label image (-1 for unset).
struct Components {
    std::vector<long long> sizes;
    std::vector<int> labels;
};

inline Components flood_components(const BinaryMask& m) {
    Components c;
    c.labels.assign(static_cast<std::size_t>(m.width()) * m.height(), -1);
    int next = 0;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y) || c.labels[static_cast<std::size_t>(y) * m.width() + x] >= 0) continue;
            long long size = 0;
            std::vector<std::pair<int, int>> stack{{x, y}};
            c.labels[static_cast<std::size_t>(y) * m.width() + x] = next;
            while (!stack.empty()) {
                auto [px, py] = stack.back();
                stack.pop_back();
                ++size;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx;
                        const int ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= m.width() || ny >= m.height()) continue;
                        auto& l = c.labels[static_cast<std::size_t>(ny) * m.width() + nx];
                        if (l >= 0 || !m.at(nx, ny)) continue;
                        l = next;
                        stack.push_back({nx, ny});
                    }
                }
            }
            c.sizes.push_back(size);
            ++next;
        }
    }
    return c;
}

// Direct square-window morphology, in-image neighbours only.
inline BinaryMask dilate(const BinaryMask& m, int r) {
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            bool v = false;
            for (int dy = -r; dy <= r && !v; ++dy)
                for (int dx = -r; dx <= r && !v; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx >= 0 && ny >= 0 && nx < m.width() && ny < m.height()) v = m.at(nx, ny);
                }
            out.set(x, y, v);
        }
    return out;
}

inline BinaryMask erode(const BinaryMask& m, int r) {
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            bool v = true;
            for (int dy = -r; dy <= r && v; ++dy)
                for (int dx = -r; dx <= r && v; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx >= 0 && ny >= 0 && nx < m.width() && ny < m.height()) v = m.at(nx, ny);
                }
            out.set(x, y, v);
        }
    return out;
}

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
    std::bernoulli_distribution on(density);
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(x, y, on(rng));
    return m;
}

// Random blobby mask: union of a few filled rectangles, with sparse holes.
inline BinaryMask random_blob_mask(std::mt19937_64& rng, int w, int h) {
    BinaryMask m(w, h);
    std::uniform_int_distribution<int> count(1, 5);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> xs(0, w - 1), ys(0, h - 1);
        int x0 = xs(rng), x1 = xs(rng), y0 = ys(rng), y1 = ys(rng);
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) m.set(x, y, true);
    }
    std::bernoulli_distribution hole(0.03);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (hole(rng)) m.set(x, y, false);
    return m;
}

inline GrayImage random_gray(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage g(w, h);
    for (double& v : g.values()) v = u(rng);
    return g;
}

}  // namespace oracle
