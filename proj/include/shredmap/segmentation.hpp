#pragma once

// Fragment extraction from scans of pieces laid on a white background.

#include <cstdint>
#include <span>
#include <vector>

#include "shredmap/image.hpp"

namespace shredmap {

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

    std::span<const std::uint8_t> bits() const { return bits_; }
    long long count() const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct Segment {
    BinaryMask mask;  // sized to the tight bounding box
    int origin_x = 0;
    int origin_y = 0;
    long long area = 0;
    // Source pixels under the bounding box; cells outside the mask are white.
    RasterImage image;

    RectRegion bounding_box() const { return {origin_x, origin_y, mask.width(), mask.height()}; }
};

struct SegmentParams {
    int white_cutoff = 245;
    long long min_area = 400;
    int clean_radius = 1;
};

// Background iff min(R, G, B) >= white_cutoff.
BinaryMask threshold_background(const RasterImage& img, int white_cutoff);

// One segment per 8-connected component with area >= min_area, sorted by
// area descending, then by (origin y, origin x). Segment images are left
// empty; segment_scan() fills them.
std::vector<Segment> extract_segments(const BinaryMask& mask, long long min_area);

// Morphological closing with a (2r+1)-square element. Dilation and erosion
// consider only in-image neighbours, so the result is a superset of `mask`.
BinaryMask clean_mask(const BinaryMask& mask, int radius);

// threshold -> clean -> extract, with each segment's pixels attached.
std::vector<Segment> segment_scan(const RasterImage& scan, const SegmentParams& params = {});

}  // namespace shredmap
