#include "shredmap/shredsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "parallel.hpp"
#include "shredmap/error.hpp"

namespace shredmap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// x as a piecewise-linear function of y.
struct Boundary {
    std::vector<double> ys;
    std::vector<double> xs;

    double x_at(double y) const {
        if (y <= ys.front()) return xs.front();
        if (y >= ys.back()) return xs.back();
        const auto it = std::upper_bound(ys.begin(), ys.end(), y);
        const std::size_t i = static_cast<std::size_t>(it - ys.begin());
        const double t = (y - ys[i - 1]) / (ys[i] - ys[i - 1]);
        return xs[i - 1] + t * (xs[i] - xs[i - 1]);
    }
};

struct Cut {
    PointF left;
    PointF right;

    double y_at(double x) const {
        return left.y + (x - left.x) * (right.y - left.y) / (right.x - left.x);
    }
};

// Splits [0, total) into lengths drawn from [lo, hi]; a short remainder is
// merged into the previous piece.
std::vector<int> draw_lengths(int total, int lo, int hi, std::mt19937_64& rng) {
    std::vector<int> out;
    int used = 0;
    std::uniform_int_distribution<int> dist(lo, hi);
    while (used < total) {
        const int len = std::min(dist(rng), total - used);
        out.push_back(len);
        used += len;
    }
    if (out.size() > 1 && out.back() < lo) {
        const int tail = out.back();
        out.pop_back();
        out.back() += tail;
    }
    return out;
}

void validate(const ShredSpec& s) {
    if (s.strip_width_min < 1 || s.strip_width_min > s.strip_width_max) throw Error("invalid strip width range");
    if (s.piece_length_min < 1 || s.piece_length_min > s.piece_length_max) throw Error("invalid piece length range");
    if (s.cut_jitter < 0.0) throw Error("cut jitter must be >= 0");
    if (s.cut_jitter * 4.0 > std::min(s.strip_width_min, s.piece_length_min)) {
        throw Error("cut jitter too large for the strip width / piece length ranges");
    }
    if (s.margin < 10) throw Error("piece margin must be >= 10");
}

struct Layout {
    std::vector<Boundary> boundaries;          // strips + 1, outermost are straight
    std::vector<std::vector<Cut>> cuts;        // per strip, interior cuts top to bottom
    std::vector<std::vector<PointF>> polygons;  // strip-major, top to bottom
    std::vector<std::pair<int, int>> piece_of;  // polygon index -> (strip, row)
};

Layout make_layout(int w, int h, const ShredSpec& spec, std::mt19937_64& rng) {
    Layout lay;
    const double top = -0.5;
    const double bottom = h - 0.5;
    std::uniform_real_distribution<double> jit(-spec.cut_jitter, spec.cut_jitter);

    const std::vector<int> widths = draw_lengths(w, spec.strip_width_min, spec.strip_width_max, rng);
    const int knot_step = 24;
    double x = -0.5;
    for (std::size_t k = 0; k <= widths.size(); ++k) {
        Boundary b;
        const bool outer = k == 0 || k == widths.size();
        if (outer) {
            b.ys = {top, bottom};
            b.xs = {x, x};
        } else {
            for (double y = top;; y += knot_step) {
                const double yy = std::min(y, bottom);
                b.ys.push_back(yy);
                b.xs.push_back(x + jit(rng));
                if (yy >= bottom) break;
            }
        }
        lay.boundaries.push_back(std::move(b));
        if (k < widths.size()) x += widths[k];
    }

    for (std::size_t s = 0; s < widths.size(); ++s) {
        const Boundary& L = lay.boundaries[s];
        const Boundary& R = lay.boundaries[s + 1];
        const std::vector<int> lengths = draw_lengths(h, spec.piece_length_min, spec.piece_length_max, rng);
        std::vector<Cut> cuts;
        double y = top;
        for (std::size_t m = 0; m + 1 < lengths.size(); ++m) {
            y += lengths[m];
            const double yl = y + jit(rng);
            const double yr = y + jit(rng);
            cuts.push_back({{L.x_at(yl), yl}, {R.x_at(yr), yr}});
        }

        for (std::size_t m = 0; m < lengths.size(); ++m) {
            const PointF tl = m == 0 ? PointF{L.x_at(top), top} : cuts[m - 1].left;
            const PointF tr = m == 0 ? PointF{R.x_at(top), top} : cuts[m - 1].right;
            const PointF bl = m + 1 == lengths.size() ? PointF{L.x_at(bottom), bottom} : cuts[m].left;
            const PointF br = m + 1 == lengths.size() ? PointF{R.x_at(bottom), bottom} : cuts[m].right;
            std::vector<PointF> poly{tl, tr};
            for (std::size_t i = 0; i < R.ys.size(); ++i) {
                if (R.ys[i] > tr.y && R.ys[i] < br.y) poly.push_back({R.xs[i], R.ys[i]});
            }
            poly.push_back(br);
            poly.push_back(bl);
            for (std::size_t i = L.ys.size(); i-- > 0;) {
                if (L.ys[i] < bl.y && L.ys[i] > tl.y) poly.push_back({L.xs[i], L.ys[i]});
            }
            lay.polygons.push_back(std::move(poly));
            lay.piece_of.emplace_back(static_cast<int>(s), static_cast<int>(m));
        }
        lay.cuts.push_back(std::move(cuts));
    }
    return lay;
}

// Piece index of every source pixel; an exact partition of the image.
std::vector<int> label_pixels(const Layout& lay, int w, int h) {
    std::map<std::pair<int, int>, int> index;
    for (std::size_t i = 0; i < lay.piece_of.size(); ++i) index[lay.piece_of[i]] = static_cast<int>(i);
    const int strips = static_cast<int>(lay.cuts.size());
    std::vector<int> labels(static_cast<std::size_t>(w) * h);
    for (int j = 0; j < h; ++j) {
        std::vector<double> bx(static_cast<std::size_t>(strips) + 1);
        for (int k = 0; k <= strips; ++k) bx[static_cast<std::size_t>(k)] = lay.boundaries[static_cast<std::size_t>(k)].x_at(j);
        for (int i = 0; i < w; ++i) {
            int s = 0;
            while (s + 1 < strips && bx[static_cast<std::size_t>(s) + 1] <= i) ++s;
            int m = 0;
            for (const Cut& c : lay.cuts[static_cast<std::size_t>(s)]) {
                if (c.y_at(i) <= j) ++m;
            }
            labels[static_cast<std::size_t>(j) * w + i] = index.at({s, m});
        }
    }
    return labels;
}

struct PieceBox {
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
};

ShreddedPiece render_piece(const RasterImage& img, const std::vector<int>& labels, int label,
                           const PieceBox& box, const std::vector<PointF>& polygon,
                           const std::string& piece_id, const std::string& gt_id, int angle, int margin) {
    const RectRegion r{box.x0, box.y0, box.x1 - box.x0 + 1, box.y1 - box.y0 + 1};
    RasterImage piece(r.w, r.h, kWhite);
    for (int y = 0; y < r.h; ++y) {
        for (int x = 0; x < r.w; ++x) {
            const int sx = r.x + x;
            const int sy = r.y + y;
            if (labels[static_cast<std::size_t>(sy) * img.width() + sx] == label) piece.at(x, y) = img.at(sx, sy);
        }
    }
    const RasterImage rotated = rotate(piece, angle, kWhite);
    RasterImage scan(rotated.width() + 2 * margin, rotated.height() + 2 * margin, kWhite);
    paste(scan, rotated, margin, margin);

    ShreddedPiece out;
    out.scan = std::move(scan);
    out.oracle.piece_id = piece_id;
    out.oracle.ground_truth_id = gt_id;
    out.oracle.polygon = polygon;
    out.oracle.center = polygon_centroid(polygon);
    out.oracle.scan_rotation = angle;
    out.oracle.source_box = r;
    out.oracle.margin = margin;
    return out;
}

std::vector<PieceBox> piece_boxes(const std::vector<int>& labels, int w, int h, std::size_t count) {
    std::vector<PieceBox> boxes(count);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            PieceBox& b = boxes[static_cast<std::size_t>(labels[static_cast<std::size_t>(y) * w + x])];
            b.x0 = std::min(b.x0, x);
            b.y0 = std::min(b.y0, y);
            b.x1 = std::max(b.x1, x);
            b.y1 = std::max(b.y1, y);
        }
    }
    return boxes;
}

std::string piece_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "piece_%03zu", i);
    return buf;
}

int piece_angle(std::uint64_t seed, std::size_t index, std::uint64_t face) {
    const std::uint64_t stream = splitmix64(seed ^ splitmix64(index * 2 + face + 1));
    return static_cast<int>(stream % 360);
}

}  // namespace

std::vector<PointF> OracleRecord::polygon_in_scan() const {
    const RotationFrame f(source_box.w, source_box.h, scan_rotation);
    std::vector<PointF> out;
    out.reserve(polygon.size());
    for (const PointF& p : polygon) {
        const PointF q = f.to_rotated({p.x - source_box.x, p.y - source_box.y});
        out.push_back({q.x + margin, q.y + margin});
    }
    return out;
}

double polygon_area(const std::vector<PointF>& polygon) {
    double a = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const PointF& p = polygon[i];
        const PointF& q = polygon[(i + 1) % polygon.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return std::abs(a) * 0.5;
}

PointF polygon_centroid(const std::vector<PointF>& polygon) {
    double a = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const PointF& p = polygon[i];
        const PointF& q = polygon[(i + 1) % polygon.size()];
        const double cross = p.x * q.y - q.x * p.y;
        a += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    a *= 0.5;
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool point_in_polygon(const std::vector<PointF>& polygon, PointF p) {
    bool inside = false;
    for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
        const PointF& a = polygon[i];
        const PointF& b = polygon[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
            inside = !inside;
        }
    }
    return inside;
}

std::vector<ShreddedPiece> shred(const RasterImage& img, const std::string& ground_truth_id,
                                 const ShredSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    const Layout lay = make_layout(img.width(), img.height(), spec, rng);
    const std::vector<int> labels = label_pixels(lay, img.width(), img.height());
    const std::vector<PieceBox> boxes = piece_boxes(labels, img.width(), img.height(), lay.polygons.size());

    const int n = static_cast<int>(lay.polygons.size());
    std::vector<ShreddedPiece> pieces(static_cast<std::size_t>(n));
    detail::FirstError errors;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        errors.run([&] {
            const auto idx = static_cast<std::size_t>(i);
            if (boxes[idx].x1 < 0) throw Error("degenerate shred: empty piece");
            pieces[idx] = render_piece(img, labels, i, boxes[idx], lay.polygons[idx], piece_name(idx),
                                       ground_truth_id, piece_angle(spec.seed, idx, 0), spec.margin);
        });
    }
    errors.rethrow();
    return pieces;
}

std::vector<TwoSidedPiece> shred_two_sided(const RasterImage& front, const std::string& front_id,
                                           const RasterImage& back, const std::string& back_id,
                                           const ShredSpec& spec) {
    if (front.width() != back.width() || front.height() != back.height()) {
        throw Error("front and back faces differ in size");
    }
    validate(spec);
    const int w = front.width();
    const int h = front.height();
    std::mt19937_64 rng(spec.seed);
    const Layout lay = make_layout(w, h, spec, rng);
    const std::vector<int> labels = label_pixels(lay, w, h);

    // Back-face labels: the back pixel (x, y) lies behind front pixel (W-1-x, y).
    std::vector<int> back_labels(labels.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            back_labels[static_cast<std::size_t>(y) * w + x] = labels[static_cast<std::size_t>(y) * w + (w - 1 - x)];
        }
    }
    const std::vector<PieceBox> fboxes = piece_boxes(labels, w, h, lay.polygons.size());
    const std::vector<PieceBox> bboxes = piece_boxes(back_labels, w, h, lay.polygons.size());

    const int n = static_cast<int>(lay.polygons.size());
    std::vector<TwoSidedPiece> pieces(static_cast<std::size_t>(n));
    detail::FirstError errors;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        errors.run([&] {
            const auto idx = static_cast<std::size_t>(i);
            std::vector<PointF> mirrored;
            for (auto it = lay.polygons[idx].rbegin(); it != lay.polygons[idx].rend(); ++it) {
                mirrored.push_back({w - 1 - it->x, it->y});
            }
            pieces[idx].front = render_piece(front, labels, i, fboxes[idx], lay.polygons[idx], piece_name(idx),
                                             front_id, piece_angle(spec.seed, idx, 0), spec.margin);
            pieces[idx].back = render_piece(back, back_labels, i, bboxes[idx], mirrored, piece_name(idx),
                                            back_id, piece_angle(spec.seed, idx, 1), spec.margin);
        });
    }
    errors.rethrow();
    return pieces;
}

RecoveryReport score_recovery(const std::vector<MatchResult>& results,
                              const std::vector<OracleRecord>& oracles, double pos_tol) {
    std::map<std::string, const OracleRecord*> by_id;
    for (const auto& o : oracles) by_id[o.piece_id] = &o;
    std::map<std::string, const MatchResult*> result_of;
    for (const auto& r : results) {
        if (!by_id.count(r.piece_id)) throw Error("result for unknown piece '" + r.piece_id + "'");
        if (!result_of.emplace(r.piece_id, &r).second) {
            throw Error("more than one result for piece '" + r.piece_id + "'");
        }
    }

    RecoveryReport report;
    int recovered = 0;
    for (const auto& o : oracles) {
        PieceRecovery pr;
        pr.piece_id = o.piece_id;
        auto it = result_of.find(o.piece_id);
        if (it != result_of.end()) {
            const MatchResult& r = *it->second;
            pr.matched = true;
            pr.right_face = r.ground_truth_id == o.ground_truth_id;
            pr.distance = std::hypot(r.unrotated_center.x - o.center.x, r.unrotated_center.y - o.center.y);
            pr.recovered = pr.right_face && pr.distance <= pos_tol;
        }
        recovered += pr.recovered ? 1 : 0;
        report.pieces.push_back(pr);
    }
    report.fraction = oracles.empty() ? 0.0 : static_cast<double>(recovered) / oracles.size();
    return report;
}

namespace {

// Smoothly interpolated lattice noise in [0, 1].
class ValueNoise {
public:
    ValueNoise(int w, int h, int cell, std::mt19937_64& rng)
        : cell_(cell), gw_(w / cell + 3), gh_(h / cell + 3), grid_(static_cast<std::size_t>(gw_) * gh_) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (double& g : grid_) g = u(rng);
    }

    double at(int x, int y) const {
        const double fx = static_cast<double>(x) / cell_;
        const double fy = static_cast<double>(y) / cell_;
        const int ix = static_cast<int>(fx);
        const int iy = static_cast<int>(fy);
        const double tx = smooth(fx - ix);
        const double ty = smooth(fy - iy);
        const double a = g(ix, iy), b = g(ix + 1, iy), c = g(ix, iy + 1), d = g(ix + 1, iy + 1);
        return (a + (b - a) * tx) + ((c + (d - c) * tx) - (a + (b - a) * tx)) * ty;
    }

private:
    static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
    double g(int x, int y) const { return grid_[static_cast<std::size_t>(y) * gw_ + x]; }

    int cell_;
    int gw_;
    int gh_;
    std::vector<double> grid_;
};

}  // namespace

RasterImage synth_note(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed));
    struct Octave {
        int cell;
        double amp;
    };
    const std::array<Octave, 4> octaves{{{64, 40.0}, {24, 26.0}, {8, 18.0}, {3, 10.0}}};
    std::array<std::vector<ValueNoise>, 3> noise;
    for (auto& ch : noise) {
        for (const Octave& o : octaves) ch.emplace_back(width, height, o.cell, rng);
    }
    std::vector<double> planes(static_cast<std::size_t>(width) * height * 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < 3; ++c) {
                double v = 162.0;
                for (std::size_t o = 0; o < octaves.size(); ++o) {
                    v += octaves[o].amp * 2.0 * (noise[static_cast<std::size_t>(c)][o].at(x, y) - 0.5);
                }
                planes[(static_cast<std::size_t>(y) * width + x) * 3 + static_cast<std::size_t>(c)] = v;
            }
        }
    }

    // Ornaments: translucent ellipses and rings of random color.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int shapes = std::max(4, width * height / 3000);
    for (int s = 0; s < shapes; ++s) {
        const double cx = u(rng) * width;
        const double cy = u(rng) * height;
        const double rx = 4.0 + u(rng) * 40.0;
        const double ry = 4.0 + u(rng) * 40.0;
        const double ring = u(rng) < 0.4 ? 0.25 + 0.4 * u(rng) : 0.0;
        const std::array<double, 3> color{100 + 125 * u(rng), 100 + 125 * u(rng), 100 + 125 * u(rng)};
        const double alpha = 0.3 + 0.3 * u(rng);
        const int x0 = std::max(0, static_cast<int>(cx - rx - 1));
        const int x1 = std::min(width - 1, static_cast<int>(cx + rx + 1));
        const int y0 = std::max(0, static_cast<int>(cy - ry - 1));
        const int y1 = std::min(height - 1, static_cast<int>(cy + ry + 1));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d = std::hypot((x - cx) / rx, (y - cy) / ry);
                if (d > 1.0 || d < ring) continue;
                for (int c = 0; c < 3; ++c) {
                    double& v = planes[(static_cast<std::size_t>(y) * width + x) * 3 + static_cast<std::size_t>(c)];
                    v = (1.0 - alpha) * v + alpha * color[static_cast<std::size_t>(c)];
                }
            }
        }
    }

    RasterImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
            auto ch = [&](std::size_t k) {
                return static_cast<std::uint8_t>(std::clamp(std::lround(planes[i + k]), 100L, 225L));
            };
            img.at(x, y) = {ch(0), ch(1), ch(2)};
        }
    }
    return img;
}

namespace {

constexpr std::array<std::array<std::uint8_t, 7>, 10> kDigitFont{{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},  // 0
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},  // 1
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},  // 2
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},  // 3
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},  // 4
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},  // 5
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},  // 6
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},  // 8
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},  // 9
}};

}  // namespace

void render_digits(RasterImage& img, int x, int y, const std::string& digits, int scale, Rgb ink) {
    int pen = x;
    for (char ch : digits) {
        if (ch >= '0' && ch <= '9') {
            const auto& glyph = kDigitFont[static_cast<std::size_t>(ch - '0')];
            for (int row = 0; row < 7; ++row) {
                for (int col = 0; col < 5; ++col) {
                    if (!(glyph[static_cast<std::size_t>(row)] & (0x10 >> col))) continue;
                    for (int dy = 0; dy < scale; ++dy) {
                        for (int dx = 0; dx < scale; ++dx) {
                            const int px = pen + col * scale + dx;
                            const int py = y + row * scale + dy;
                            if (px >= 0 && py >= 0 && px < img.width() && py < img.height()) img.at(px, py) = ink;
                        }
                    }
                }
            }
        }
        pen += 6 * scale;
    }
}

}  // namespace shredmap
