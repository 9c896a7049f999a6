#pragma once

// Localizes fragment templates on a bank of rotated reference faces.

#include <string>
#include <vector>

#include "shredmap/groundtruth.hpp"
#include "shredmap/kernels.hpp"
#include "shredmap/rectfit.hpp"

namespace shredmap {

struct MatchResult {
    std::string piece_id;
    std::string ground_truth_id;
    int rotation = 0;  // of the reference face, degrees
    int x = 0;         // template top-left in the rotated view
    int y = 0;
    int w = 0;  // template size
    int h = 0;
    double match_value = 0.0;
    // The template choice's anchor (the fragment centroid, or the template
    // center for bare templates) mapped back to the unrotated face.
    PointF unrotated_center;

    RectRegion rect() const { return {x, y, w, h}; }
};

enum class KernelChoice { Auto, Spatial, Fft };

struct MatchConfig {
    int rotation_step = 1;
    long long min_template_pixels = 1024;
    int pyramid_levels = 1;
    int top_k = 1;
    int workers = 0;  // 0: OpenMP default
    KernelChoice kernel = KernelChoice::Auto;
};

// Scores every placement of `tmpl` on `view`. Throws Error("template exceeds
// view") when it does not fit.
ScoreMap zncc_score_map(const RotatedView& view, const GrayImage& tmpl);

// Best `top_k` poses over every (face, rotation) pair, ordered by match_value
// descending with ties broken by (ground_truth_id, rotation, y, x).
// Throws Error("template too small") below cfg.min_template_pixels.
std::vector<MatchResult> match_piece(const GroundTruthSet& set, const TemplateChoice& choice,
                                     const MatchConfig& cfg, const std::string& piece_id = "");

// match_piece for many templates at once; each rotated view is built (and,
// for the FFT kernel, transformed) once and shared by all templates.
std::vector<std::vector<MatchResult>> match_pieces(const GroundTruthSet& set,
                                                   const std::vector<TemplateChoice>& choices,
                                                   const std::vector<std::string>& piece_ids,
                                                   const MatchConfig& cfg);

// Orders results by the global total order used for reporting.
bool result_before(const MatchResult& a, const MatchResult& b);

// Pairing convention for the two faces of one note design: ids "<stem>_front"
// and "<stem>_back".
bool faces_paired(const std::string& front_id, const std::string& back_id);

// Mirrors the back face's center across the vertical axis of a note
// `note_width` pixels wide and returns its distance to the front center.
double two_sided_consistency(const MatchResult& front, const MatchResult& back, int note_width);

// Copy of `image` with a 3-pixel outline drawn just inside the matched
// rectangle. Throws BoundsError when the rectangle leaves the image.
RasterImage annotate(const RasterImage& image, const MatchResult& result, Rgb color = kRed);

}  // namespace shredmap
