#pragma once

// Template extraction: the rotation of a fragment that admits the largest
// background-free axis-aligned rectangle, and that rectangle's pixels.

#include "shredmap/image.hpp"
#include "shredmap/segmentation.hpp"

namespace shredmap {

struct TemplateChoice {
    int piece_rotation = 0;  // degrees in [0, 360)
    RectRegion rect;         // in the rotated piece canvas
    long long area = 0;
    RasterImage template_image;
    // Fragment centroid relative to the template's top-left pixel. Matching
    // maps this point onto the reference note, so a fragment is localized by
    // its own center rather than by its template's.
    PointF anchor;
};

struct RectFitParams {
    int step = 1;
    // Pixels of the rotated piece at or above this cutoff are excluded from
    // the template even where the rotated mask is set.
    int white_cutoff = 245;
};

// Maximum-area all-true axis-aligned rectangle. Ties: larger w, then
// smaller (y, x). Throws Error("empty mask") when no bit is set.
RectRegion largest_interior_rect(const BinaryMask& mask);

// Rotates a mask with the same geometry as rotate(); a cell is set when the
// bilinear coverage of set source cells at its sample point is >= 0.5.
BinaryMask rotate_mask(const BinaryMask& mask, int degrees);

// Sweeps every multiple of `params.step` in [0, 360), keeps the rotation with
// the largest interior rectangle (ties: smallest rotation). Rotations are
// evaluated in parallel; the reduction is order-independent.
TemplateChoice best_template(const Segment& piece, const RectFitParams& params = {});

// Template choice for a ready-made rectangular template (no rotation sweep).
TemplateChoice template_from_image(const RasterImage& image);

}  // namespace shredmap
