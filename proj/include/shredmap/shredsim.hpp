#pragma once

// Synthetic notes and a synthetic shredder with recorded true poses.

#include <cstdint>
#include <string>
#include <vector>

#include "shredmap/image.hpp"
#include "shredmap/matcher.hpp"

namespace shredmap {

struct ShredSpec {
    int strip_width_min = 60;
    int strip_width_max = 90;
    double cut_jitter = 4.0;  // pixels, applied to boundary knots and cut ends
    int piece_length_min = 80;
    int piece_length_max = 140;
    std::uint64_t seed = 1;
    int margin = 12;  // white border around each rotated piece, >= 10
};

struct OracleRecord {
    std::string piece_id;
    std::string ground_truth_id;
    std::vector<PointF> polygon;  // unrotated ground-truth frame, pixel-center coordinates
    PointF center;                // polygon centroid
    int scan_rotation = 0;        // degrees the piece was rotated by on its scan
    RectRegion source_box;        // pixel bounding box of the piece on the source
    int margin = 0;

    // Polygon expressed in the piece scan's coordinates.
    std::vector<PointF> polygon_in_scan() const;
};

struct ShreddedPiece {
    RasterImage scan;
    OracleRecord oracle;
};

// Cuts `img` into jittered vertical strips, cuts each strip at jittered
// lengths, and renders every piece rotated by a seed-derived integer angle on
// a white canvas. Oracle polygons tile the source exactly. Throws Error for
// a degenerate spec.
std::vector<ShreddedPiece> shred(const RasterImage& img, const std::string& ground_truth_id,
                                 const ShredSpec& spec);

struct TwoSidedPiece {
    ShreddedPiece front;
    ShreddedPiece back;
};

// Shreds two faces congruently: the back of a piece covers the mirror image
// (x -> W-1-x) of its front polygon on `back`. Faces must share dimensions.
std::vector<TwoSidedPiece> shred_two_sided(const RasterImage& front, const std::string& front_id,
                                           const RasterImage& back, const std::string& back_id,
                                           const ShredSpec& spec);

double polygon_area(const std::vector<PointF>& polygon);
PointF polygon_centroid(const std::vector<PointF>& polygon);
bool point_in_polygon(const std::vector<PointF>& polygon, PointF p);

struct PieceRecovery {
    std::string piece_id;
    bool matched = false;  // a result exists for this piece
    bool recovered = false;
    bool right_face = false;
    double distance = 0.0;  // center error in pixels when matched
};

struct RecoveryReport {
    double fraction = 0.0;
    std::vector<PieceRecovery> pieces;  // oracle order
};

// A piece is recovered when its result names the source face and its
// unrotated center lies within pos_tol of the true center. Oracle pieces
// without a result count as unrecovered. Throws Error when a result names a
// piece the oracle does not know, or when a piece has two results.
RecoveryReport score_recovery(const std::vector<MatchResult>& results,
                              const std::vector<OracleRecord>& oracles, double pos_tol);

// Textured, non-repeating synthetic banknote face. Every channel stays within
// [100, 225], so no pixel reads as scanner-white and no texture reads as ink.
RasterImage synth_note(int width, int height, std::uint64_t seed);

// Draws `digits` with a 5x7 bitmap font, each cell `scale` pixels square and
// glyphs `scale` pixels apart.
void render_digits(RasterImage& img, int x, int y, const std::string& digits, int scale, Rgb ink);

}  // namespace shredmap
