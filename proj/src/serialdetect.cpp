#include "shredmap/serialdetect.hpp"

#include <algorithm>
#include <cmath>

#include "shredmap/error.hpp"

namespace shredmap {

const char* to_string(PieceClass c) { return c == PieceClass::Serial ? "S" : "R"; }

GlyphRowParams GlyphRowParams::scaled(double factor) const {
    GlyphRowParams p = *this;
    p.glyph_h_min = static_cast<int>(std::lround(glyph_h_min * factor));
    p.glyph_h_max = static_cast<int>(std::lround(glyph_h_max * factor));
    return p;
}

namespace {

// Pitch wider than this many median glyph heights does not read as one string.
constexpr double kMaxPitchRatio = 3.0;

struct Glyph {
    RectRegion box;
    double cx;
    double cy;
};

std::vector<Glyph> find_glyphs(const Segment& piece, const GlyphRowParams& p) {
    const GrayImage gray = to_gray(piece.image);
    BinaryMask ink(piece.mask.width(), piece.mask.height());
    for (int y = 0; y < ink.height(); ++y) {
        for (int x = 0; x < ink.width(); ++x) {
            ink.set(x, y, piece.mask.at(x, y) && gray.at(x, y) <= p.ink_max_gray);
        }
    }
    std::vector<Glyph> glyphs;
    for (const Segment& c : extract_segments(ink, 1)) {
        const int w = c.mask.width();
        const int h = c.mask.height();
        if (h < p.glyph_h_min || h > p.glyph_h_max) continue;
        const double aspect = static_cast<double>(w) / h;
        if (aspect < p.aspect_min || aspect > p.aspect_max) continue;
        glyphs.push_back({{c.origin_x, c.origin_y, w, h}, c.origin_x + (w - 1) * 0.5, c.origin_y + (h - 1) * 0.5});
    }
    // extract_segments orders by area; evidence is reported left to right.
    std::sort(glyphs.begin(), glyphs.end(), [](const Glyph& a, const Glyph& b) {
        if (a.cx != b.cx) return a.cx < b.cx;
        return a.cy < b.cy;
    });
    return glyphs;
}

double median_height(const std::vector<Glyph>& glyphs) {
    std::vector<int> h;
    for (const Glyph& g : glyphs) h.push_back(g.box.h);
    std::sort(h.begin(), h.end());
    const std::size_t n = h.size();
    return n % 2 ? h[n / 2] : 0.5 * (h[n / 2 - 1] + h[n / 2]);
}

bool uniform_pitch(const std::vector<const Glyph*>& run, const GlyphRowParams& p, double med_h) {
    if (run.size() < 2) return true;
    std::vector<double> pitch;
    for (std::size_t i = 1; i < run.size(); ++i) pitch.push_back(run[i]->cx - run[i - 1]->cx);
    double mean = 0.0;
    for (double d : pitch) mean += d;
    mean /= pitch.size();
    if (mean <= 0.0 || mean > kMaxPitchRatio * med_h) return false;
    double var = 0.0;
    for (double d : pitch) var += (d - mean) * (d - mean);
    var /= pitch.size();
    return std::sqrt(var) / mean <= p.max_pitch_cv;
}

// Longest left-to-right run of vertically aligned, evenly spaced glyphs.
std::vector<const Glyph*> best_row(const std::vector<Glyph>& glyphs, const GlyphRowParams& p) {
    std::vector<const Glyph*> best;
    if (glyphs.empty()) return best;
    const double med_h = median_height(glyphs);
    const double band = p.max_center_spread * med_h;

    std::vector<const Glyph*> by_y;
    for (const Glyph& g : glyphs) by_y.push_back(&g);
    std::stable_sort(by_y.begin(), by_y.end(), [](const Glyph* a, const Glyph* b) { return a->cy < b->cy; });

    for (std::size_t i = 0; i < by_y.size(); ++i) {
        std::vector<const Glyph*> group;
        for (std::size_t j = i; j < by_y.size() && by_y[j]->cy - by_y[i]->cy <= band + 1e-9; ++j) {
            group.push_back(by_y[j]);
        }
        std::stable_sort(group.begin(), group.end(), [](const Glyph* a, const Glyph* b) { return a->cx < b->cx; });
        for (std::size_t s = 0; s < group.size(); ++s) {
            for (std::size_t e = group.size(); e > s + best.size(); --e) {
                std::vector<const Glyph*> run(group.begin() + static_cast<std::ptrdiff_t>(s),
                                              group.begin() + static_cast<std::ptrdiff_t>(e));
                if (uniform_pitch(run, p, med_h)) {
                    best = std::move(run);
                    break;
                }
            }
        }
    }
    return best;
}

}  // namespace

PieceLabel GlyphRowClassifier::classify(const Segment& piece, const std::string& piece_id) const {
    PieceLabel out;
    out.piece_id = piece_id;
    if (piece.image.empty()) return out;
    const std::vector<Glyph> glyphs = find_glyphs(piece, params_);
    const std::vector<const Glyph*> row = best_row(glyphs, params_);
    const std::size_t aligned = row.size() >= 2 ? row.size() : 0;
    out.confidence = std::min(1.0, static_cast<double>(aligned) / params_.saturation_count);
    if (static_cast<int>(aligned) >= params_.min_aligned) {
        out.label = PieceClass::Serial;
        for (const Glyph* g : row) out.evidence.push_back(g->box);
    }
    return out;
}

PieceLabel classify(const Segment& piece, const GlyphRowParams& params, const std::string& piece_id) {
    return GlyphRowClassifier(params).classify(piece, piece_id);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> route_indices(
    const std::vector<PieceLabel>& labels) {
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i].label == PieceClass::Serial ? out.second : out.first).push_back(i);
    }
    return out;
}

std::pair<std::vector<Segment>, std::vector<Segment>> route(const std::vector<Segment>& pieces,
                                                            const std::vector<PieceLabel>& labels) {
    if (pieces.size() != labels.size()) {
        throw Error("route: " + std::to_string(pieces.size()) + " pieces but " +
                    std::to_string(labels.size()) + " labels");
    }
    std::pair<std::vector<Segment>, std::vector<Segment>> out;
    const auto [regular, serial] = route_indices(labels);
    for (std::size_t i : regular) out.first.push_back(pieces[i]);
    for (std::size_t i : serial) out.second.push_back(pieces[i]);
    return out;
}

}  // namespace shredmap
