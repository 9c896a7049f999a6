#pragma once

// Serial-number piece detection. A fragment carrying part of a serial number
// (class S) cannot be matched against a reference face whose serial differs,
// so such pieces are routed away from automatic matching.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "shredmap/image.hpp"
#include "shredmap/segmentation.hpp"

namespace shredmap {

enum class PieceClass { Regular, Serial };

const char* to_string(PieceClass c);  // "R" / "S"

struct PieceLabel {
    std::string piece_id;
    PieceClass label = PieceClass::Regular;
    double confidence = 0.0;  // confidence that the piece shows a serial, [0, 1]
    std::vector<RectRegion> evidence;  // glyph boxes, segment-local coordinates
};

struct GlyphRowParams {
    double ink_max_gray = 0.35;  // luminance at or below which a pixel is ink
    int glyph_h_min = 8;
    int glyph_h_max = 40;
    double aspect_min = 0.3;  // glyph width / height
    double aspect_max = 1.2;
    int min_aligned = 3;
    double max_center_spread = 0.3;  // fraction of the median glyph height
    double max_pitch_cv = 0.35;
    double saturation_count = 8.0;  // aligned glyphs at which confidence reaches 1

    // Same detector at `factor` times the resolution.
    GlyphRowParams scaled(double factor) const;
};

// Interface a learned classifier can implement in place of the heuristic.
class PieceClassifier {
public:
    virtual ~PieceClassifier() = default;
    virtual PieceLabel classify(const Segment& piece, const std::string& piece_id) const = 0;
};

// Deterministic geometric baseline: looks for a row of glyph-sized ink blobs
// with aligned centers and near-uniform pitch.
class GlyphRowClassifier final : public PieceClassifier {
public:
    explicit GlyphRowClassifier(GlyphRowParams params = {}) : params_(params) {}
    PieceLabel classify(const Segment& piece, const std::string& piece_id) const override;
    const GlyphRowParams& params() const { return params_; }

private:
    GlyphRowParams params_;
};

PieceLabel classify(const Segment& piece, const GlyphRowParams& params = {},
                    const std::string& piece_id = "");

// Stable partition into (regular, serial). Throws Error when the lists differ
// in length.
std::pair<std::vector<Segment>, std::vector<Segment>> route(const std::vector<Segment>& pieces,
                                                            const std::vector<PieceLabel>& labels);

// Same partition over indices, for callers that keep parallel arrays.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> route_indices(
    const std::vector<PieceLabel>& labels);

}  // namespace shredmap
