#include "shredmap/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shredmap/error.hpp"

namespace shredmap {

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
    }
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
    }
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width <= 0 || height <= 0 ||
        values_.size() != static_cast<std::size_t>(width) * height) {
        throw Error("gray image value count does not match " + std::to_string(width) + "x" +
                    std::to_string(height));
    }
}

IntegralImage::IntegralImage(const GrayImage& img)
    : width_(img.width()), height_(img.height()) {
    const std::size_t n = stride() * (static_cast<std::size_t>(height_) + 1);
    sum_.assign(n, 0.0);
    sumsq_.assign(n, 0.0);
    steps_x_.assign(n, 0);
    steps_y_.assign(n, 0);
    std::vector<long double> col(stride(), 0.0L);
    std::vector<long double> col_sq(stride(), 0.0L);
    for (int y = 0; y < height_; ++y) {
        long double row = 0.0L;
        long double row_sq = 0.0L;
        std::int32_t row_sx = 0;
        std::int32_t row_sy = 0;
        const std::size_t up = static_cast<std::size_t>(y) * stride();
        const std::size_t cur = up + stride();
        for (int x = 0; x < width_; ++x) {
            const double v = img.at(x, y);
            row += v;
            row_sq += static_cast<long double>(v) * v;
            col[x + 1] += row;
            col_sq[x + 1] += row_sq;
            sum_[cur + x + 1] = static_cast<double>(col[x + 1]);
            sumsq_[cur + x + 1] = static_cast<double>(col_sq[x + 1]);
            row_sx += x > 0 && v != img.at(x - 1, y);
            row_sy += y > 0 && v != img.at(x, y - 1);
            steps_x_[cur + x + 1] = steps_x_[up + x + 1] + row_sx;
            steps_y_[cur + x + 1] = steps_y_[up + x + 1] + row_sy;
        }
    }
}

bool IntegralImage::rect_constant(int x, int y, int w, int h) const {
    auto count = [&](const std::vector<std::int32_t>& t, int x0, int y0, int x1, int y1) {
        if (x1 <= x0 || y1 <= y0) return 0;
        return count_entry(t, x1, y1) - count_entry(t, x0, y1) - count_entry(t, x1, y0) + count_entry(t, x0, y0);
    };
    // Steps across the window's left or top edge come from outside it.
    return count(steps_x_, x + 1, y, x + w, y + h) == 0 && count(steps_y_, x, y + 1, x + w, y + h) == 0;
}

int normalize_degrees(int degrees) {
    const int d = degrees % 360;
    return d < 0 ? d + 360 : d;
}

double cos_degrees(int degrees) {
    switch (normalize_degrees(degrees)) {
        case 0: return 1.0;
        case 90: return 0.0;
        case 180: return -1.0;
        case 270: return 0.0;
        default: return std::cos(normalize_degrees(degrees) * std::numbers::pi / 180.0);
    }
}

double sin_degrees(int degrees) {
    switch (normalize_degrees(degrees)) {
        case 0: return 0.0;
        case 90: return 1.0;
        case 180: return 0.0;
        case 270: return -1.0;
        default: return std::sin(normalize_degrees(degrees) * std::numbers::pi / 180.0);
    }
}

RotationFrame::RotationFrame(int src_width, int src_height, int degrees)
    : degrees_(normalize_degrees(degrees)),
      src_w_(src_width),
      src_h_(src_height),
      cos_(cos_degrees(degrees)),
      sin_(sin_degrees(degrees)) {
    const double ac = std::abs(cos_);
    const double as = std::abs(sin_);
    // Extent of the rotated pixel centers plus one pixel; the epsilon keeps
    // exact quarter turns from rounding up.
    const double w = (src_w_ - 1) * ac + (src_h_ - 1) * as + 1.0;
    const double h = (src_w_ - 1) * as + (src_h_ - 1) * ac + 1.0;
    dst_w_ = std::max(1, static_cast<int>(std::ceil(w - 1e-9)));
    dst_h_ = std::max(1, static_cast<int>(std::ceil(h - 1e-9)));
}

PointF RotationFrame::to_rotated(PointF src) const {
    const double dx = src.x - (src_w_ - 1) * 0.5;
    const double dy = src.y - (src_h_ - 1) * 0.5;
    return {dx * cos_ + dy * sin_ + (dst_w_ - 1) * 0.5,
            -dx * sin_ + dy * cos_ + (dst_h_ - 1) * 0.5};
}

PointF RotationFrame::to_source(PointF dst) const {
    const double dx = dst.x - (dst_w_ - 1) * 0.5;
    const double dy = dst.y - (dst_h_ - 1) * 0.5;
    return {dx * cos_ - dy * sin_ + (src_w_ - 1) * 0.5,
            dx * sin_ + dy * cos_ + (src_h_ - 1) * 0.5};
}

GrayImage to_gray(const RasterImage& img) {
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double v = (0.299 * src[i].r + 0.587 * src[i].g + 0.114 * src[i].b) / 255.0;
        dst[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

namespace {

// Copies through the exact index permutation of a quarter turn.
template <typename Image, typename Out>
void quarter_turn(const Image& in, Out& out, int degrees) {
    const int w = in.width();
    const int h = in.height();
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            switch (degrees) {
                case 0: out.at(x, y) = in.at(x, y); break;
                case 90: out.at(x, y) = in.at(w - 1 - y, x); break;
                case 180: out.at(x, y) = in.at(w - 1 - x, h - 1 - y); break;
                default: out.at(x, y) = in.at(y, h - 1 - x); break;
            }
        }
    }
}

struct BilinearTap {
    int x0, x1, y0, y1;
    double fx, fy;
};

// Returns false when the source point lies outside the pixel footprint of
// the source image.
bool bilinear_tap(PointF s, int w, int h, BilinearTap& tap) {
    constexpr double eps = 1e-9;
    if (s.x < -0.5 - eps || s.y < -0.5 - eps || s.x > w - 0.5 + eps || s.y > h - 0.5 + eps) {
        return false;
    }
    const double fx0 = std::floor(s.x);
    const double fy0 = std::floor(s.y);
    tap.fx = s.x - fx0;
    tap.fy = s.y - fy0;
    const int ix = static_cast<int>(fx0);
    const int iy = static_cast<int>(fy0);
    tap.x0 = std::clamp(ix, 0, w - 1);
    tap.x1 = std::clamp(ix + 1, 0, w - 1);
    tap.y0 = std::clamp(iy, 0, h - 1);
    tap.y1 = std::clamp(iy + 1, 0, h - 1);
    return true;
}

inline double lerp2(double a, double b, double c, double d, const BilinearTap& t) {
    const double top = a + (b - a) * t.fx;
    const double bottom = c + (d - c) * t.fx;
    return top + (bottom - top) * t.fy;
}

}  // namespace

RasterImage rotate(const RasterImage& img, int degrees, Rgb fill) {
    const RotationFrame frame(img.width(), img.height(), degrees);
    RasterImage out(frame.dst_width(), frame.dst_height(), fill);
    if (frame.degrees() % 90 == 0) {
        quarter_turn(img, out, frame.degrees());
        return out;
    }
    const auto channel = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    };
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            BilinearTap t;
            if (!bilinear_tap(frame.to_source({double(x), double(y)}), img.width(), img.height(), t)) {
                continue;
            }
            const Rgb& a = img.at(t.x0, t.y0);
            const Rgb& b = img.at(t.x1, t.y0);
            const Rgb& c = img.at(t.x0, t.y1);
            const Rgb& d = img.at(t.x1, t.y1);
            out.at(x, y) = {channel(lerp2(a.r, b.r, c.r, d.r, t)),
                            channel(lerp2(a.g, b.g, c.g, d.g, t)),
                            channel(lerp2(a.b, b.b, c.b, d.b, t))};
        }
    }
    return out;
}

GrayImage rotate_field(const GrayImage& field, int degrees, double fill) {
    const RotationFrame frame(field.width(), field.height(), degrees);
    GrayImage out(frame.dst_width(), frame.dst_height(), fill);
    if (frame.degrees() % 90 == 0) {
        quarter_turn(field, out, frame.degrees());
        return out;
    }
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            BilinearTap t;
            if (!bilinear_tap(frame.to_source({double(x), double(y)}), field.width(), field.height(), t)) {
                continue;
            }
            out.at(x, y) = lerp2(field.at(t.x0, t.y0), field.at(t.x1, t.y0), field.at(t.x0, t.y1),
                                 field.at(t.x1, t.y1), t);
        }
    }
    return out;
}

namespace {

void check_region(int width, int height, const RectRegion& r) {
    auto fail = [&](const std::string& what) {
        throw BoundsError("region (" + std::to_string(r.x) + "," + std::to_string(r.y) + "," +
                          std::to_string(r.w) + "," + std::to_string(r.h) + ") out of bounds for " +
                          std::to_string(width) + "x" + std::to_string(height) + " image: " + what);
    };
    if (r.w <= 0) fail("w=" + std::to_string(r.w));
    if (r.h <= 0) fail("h=" + std::to_string(r.h));
    if (r.x < 0) fail("x=" + std::to_string(r.x));
    if (r.y < 0) fail("y=" + std::to_string(r.y));
    if (r.x + r.w > width) fail("x+w=" + std::to_string(r.x + r.w));
    if (r.y + r.h > height) fail("y+h=" + std::to_string(r.y + r.h));
}

template <typename Image>
Image crop_impl(const Image& img, const RectRegion& r) {
    check_region(img.width(), img.height(), r);
    Image out(r.w, r.h);
    for (int y = 0; y < r.h; ++y) {
        for (int x = 0; x < r.w; ++x) {
            out.at(x, y) = img.at(r.x + x, r.y + y);
        }
    }
    return out;
}

}  // namespace

RasterImage crop(const RasterImage& img, const RectRegion& r) { return crop_impl(img, r); }

GrayImage crop(const GrayImage& img, const RectRegion& r) { return crop_impl(img, r); }

IntegralImage integral(const GrayImage& img) { return IntegralImage(img); }

GrayImage downsample2(const GrayImage& img) {
    const int w = std::max(1, img.width() / 2);
    const int h = std::max(1, img.height() / 2);
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::min(2 * y, img.height() - 1);
        const int y1 = std::min(2 * y + 1, img.height() - 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::min(2 * x, img.width() - 1);
            const int x1 = std::min(2 * x + 1, img.width() - 1);
            out.at(x, y) = 0.25 * (img.at(x0, y0) + img.at(x1, y0) + img.at(x0, y1) + img.at(x1, y1));
        }
    }
    return out;
}

void paste(RasterImage& dst, const RasterImage& src, int x, int y) {
    for (int j = 0; j < src.height(); ++j) {
        const int ty = y + j;
        if (ty < 0 || ty >= dst.height()) continue;
        for (int i = 0; i < src.width(); ++i) {
            const int tx = x + i;
            if (tx < 0 || tx >= dst.width()) continue;
            dst.at(tx, ty) = src.at(i, j);
        }
    }
}

}  // namespace shredmap
