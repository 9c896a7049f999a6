#pragma once

// Raster primitives: RGB and luminance images, quarter-exact rotation with
// bilinear resampling, cropping and summed-area tables.
//
// Coordinates: origin at the top-left pixel, x to the right, y downward.
// Continuous coordinates place the center of pixel (i, j) at (i, j).

#include <cstdint>
#include <span>
#include <vector>

namespace shredmap {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kRed{255, 0, 0};

struct PointF {
    double x = 0.0;
    double y = 0.0;
};

struct RectRegion {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long long area() const { return static_cast<long long>(w) * h; }
    friend bool operator==(const RectRegion&, const RectRegion&) = default;
};

class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, Rgb fill = kWhite);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    const Rgb& at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    Rgb& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<const Rgb> pixels() const { return pixels_; }
    std::span<Rgb> pixels() { return pixels_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

// Luminance in [0, 1], row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);
    GrayImage(int width, int height, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }

    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

// (width+1) x (height+1) cumulative sums of values and squared values.
// Row 0 and column 0 are zero. Sums are accumulated in extended precision.
// Two integer tables count horizontal and vertical neighbour changes, so
// exactly constant windows are recognised without rounding.
class IntegralImage {
public:
    IntegralImage() = default;
    explicit IntegralImage(const GrayImage& img);

    int width() const { return width_; }
    int height() const { return height_; }

    double sum_entry(int i, int j) const { return sum_[static_cast<std::size_t>(j) * stride() + i]; }
    double sumsq_entry(int i, int j) const { return sumsq_[static_cast<std::size_t>(j) * stride() + i]; }

    double rect_sum(int x, int y, int w, int h) const {
        return sum_entry(x + w, y + h) - sum_entry(x, y + h) - sum_entry(x + w, y) + sum_entry(x, y);
    }
    double rect_sumsq(int x, int y, int w, int h) const {
        return sumsq_entry(x + w, y + h) - sumsq_entry(x, y + h) - sumsq_entry(x + w, y) + sumsq_entry(x, y);
    }
    bool rect_constant(int x, int y, int w, int h) const;

private:
    std::size_t stride() const { return static_cast<std::size_t>(width_) + 1; }
    std::int32_t count_entry(const std::vector<std::int32_t>& t, int i, int j) const {
        return t[static_cast<std::size_t>(j) * stride() + i];
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> sum_;
    std::vector<double> sumsq_;
    std::vector<std::int32_t> steps_x_;  // cell (x, y) differs from (x-1, y)
    std::vector<std::int32_t> steps_y_;  // cell (x, y) differs from (x, y-1)
};

// Exact affine map between a W x H source and the canvas produced by
// rotating it counter-clockwise by an integer number of degrees about its
// center. The canvas is the tight bounding box of the rotated pixel centers.
class RotationFrame {
public:
    RotationFrame(int src_width, int src_height, int degrees);

    int degrees() const { return degrees_; }
    int src_width() const { return src_w_; }
    int src_height() const { return src_h_; }
    int dst_width() const { return dst_w_; }
    int dst_height() const { return dst_h_; }
    double cos_a() const { return cos_; }
    double sin_a() const { return sin_; }

    PointF to_rotated(PointF src) const;
    PointF to_source(PointF dst) const;

private:
    int degrees_;
    int src_w_;
    int src_h_;
    int dst_w_ = 1;
    int dst_h_ = 1;
    double cos_;
    double sin_;
};

int normalize_degrees(int degrees);

// cos/sin of an integer angle; exact for multiples of 90.
double cos_degrees(int degrees);
double sin_degrees(int degrees);

GrayImage to_gray(const RasterImage& img);

RasterImage rotate(const RasterImage& img, int degrees, Rgb fill = kWhite);

// Bilinear rotation of a scalar field with the same geometry as rotate();
// uncovered canvas cells take `fill`.
GrayImage rotate_field(const GrayImage& field, int degrees, double fill);

RasterImage crop(const RasterImage& img, const RectRegion& r);
GrayImage crop(const GrayImage& img, const RectRegion& r);

IntegralImage integral(const GrayImage& img);

// 2x2 box-filter reduction; odd trailing rows/columns are dropped.
GrayImage downsample2(const GrayImage& img);

// Writes `src` into `dst` with its top-left at (x, y), clipping at the border.
void paste(RasterImage& dst, const RasterImage& src, int x, int y);

}  // namespace shredmap
