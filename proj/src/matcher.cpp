#include "shredmap/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <string>

#include "parallel.hpp"
#include "shredmap/error.hpp"

namespace shredmap {

namespace {

constexpr int kRefineRadius = 4;       // pixels, per pyramid level
constexpr int kRefineDegrees = 2;      // rotation neighbourhood at full resolution
constexpr int kMinCoarseSide = 8;      // smallest template side searched at a coarse level
constexpr long long kFftMinArea = 64;  // Auto kernel: FFT from 8x8 templates upward

struct Candidate {
    std::size_t entry = 0;
    int rotation = 0;
    int x = 0;
    int y = 0;
    double score = 0.0;
};

// Within one view: score descending, then (y, x).
bool local_before(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

// Bounded sorted list of the best candidates of one view.
class TopList {
public:
    explicit TopList(std::size_t capacity) : capacity_(capacity) {}

    void offer(const Candidate& c) {
        if (items_.size() == capacity_ && !local_before(c, items_.back())) return;
        auto pos = std::upper_bound(items_.begin(), items_.end(), c, local_before);
        items_.insert(pos, c);
        if (items_.size() > capacity_) items_.pop_back();
    }

    std::vector<Candidate>& items() { return items_; }

    // A score that cannot enter the list.
    bool rejects(double score) const {
        return items_.size() == capacity_ && score < items_.back().score;
    }

private:
    std::size_t capacity_;
    std::vector<Candidate> items_;
};

void collect(const ScoreMap& map, std::size_t entry, int rotation, TopList& top, bool local_maxima) {
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const double s = map.at(x, y);
            if (local_maxima) {
                bool peak = true;
                for (int dy = -1; dy <= 1 && peak; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= map.width || ny >= map.height) continue;
                        const double o = map.at(nx, ny);
                        // Plateaus keep only their first pixel in raster order.
                        if (o > s || (o == s && (ny < y || (ny == y && nx < x)))) {
                            peak = false;
                            break;
                        }
                    }
                }
                if (!peak) continue;
            }
            top.offer({entry, rotation, x, y, s});
        }
    }
}

// Every placement of a template scored from an FFT numerator grid, offered
// straight to `top` without materializing the score map. A non-positive
// numerator means a non-positive score, which a list of positive scores
// rejects without the window statistics being computed.
void collect_fft(const kernels::FftCorrelator& grid, const kernels::FftCorrelator::Spectrum& view_spec,
                 const kernels::FftCorrelator::Spectrum& tmpl_spec, const GrayImage& image,
                 const IntegralImage& tables, const TemplateStats& ts, std::size_t entry, int rotation,
                 TopList& top) {
    if (ts.degenerate()) {
        collect(ScoreMap{image.width() - ts.width() + 1, image.height() - ts.height() + 1,
                         std::vector<double>(static_cast<std::size_t>(image.width() - ts.width() + 1) *
                                                 (image.height() - ts.height() + 1),
                                             0.0)},
                entry, rotation, top, false);
        return;
    }
    thread_local kernels::FftCorrelator::Grid corr;
    grid.correlate(view_spec, tmpl_spec, corr);
    const int tw = ts.width();
    const int th = ts.height();
    const long long n = static_cast<long long>(tw) * th;
    const int ow = image.width() - tw + 1;
    const int oh = image.height() - th + 1;
    const std::size_t stride = static_cast<std::size_t>(grid.padded_width());
    for (int y = 0; y < oh; ++y) {
        const double* row = corr.data() + static_cast<std::size_t>(y) * stride;
        for (int x = 0; x < ow; ++x) {
            const double num = row[x];
            if (num <= 0.0 && top.rejects(0.0)) continue;
            const double s = zncc_from_moments(num, window_deviation_sq(image, tables, x, y, tw, th), n, ts);
            if (!top.rejects(s)) top.offer({entry, rotation, x, y, s});
        }
    }
}

struct PreparedTemplate {
    GrayImage gray;
    std::vector<TemplateStats> levels;  // index = pyramid level
    PointF anchor;
};

bool use_fft_for(const MatchConfig& cfg, const TemplateStats& t) {
    switch (cfg.kernel) {
        case KernelChoice::Spatial: return false;
        case KernelChoice::Fft: return true;
        default: return static_cast<long long>(t.width()) * t.height() >= kFftMinArea;
    }
}

struct Level {
    GrayImage gray;
    IntegralImage tables;
};

// Downsampled luminance of a view, level 0 first.
std::vector<Level> build_levels(const RotatedView& view, int count) {
    std::vector<Level> levels;
    levels.push_back({view.gray, view.tables});
    for (int l = 1; l < count; ++l) {
        GrayImage g = downsample2(levels.back().gray);
        IntegralImage t(g);
        levels.push_back({std::move(g), std::move(t)});
    }
    return levels;
}

int reduced(int n, int level) {
    for (int l = 0; l < level; ++l) n = std::max(1, n / 2);
    return n;
}

MatchResult make_result(const GroundTruthSet& set, const Candidate& c, const PreparedTemplate& t,
                        const std::string& piece_id) {
    const GroundTruthEntry& e = set.entries()[c.entry];
    const RotationFrame frame(e.image.width(), e.image.height(), c.rotation);
    MatchResult r;
    r.piece_id = piece_id;
    r.ground_truth_id = e.id;
    r.rotation = c.rotation;
    r.x = c.x;
    r.y = c.y;
    r.w = t.gray.width();
    r.h = t.gray.height();
    r.match_value = c.score;
    r.unrotated_center = frame.to_source({c.x + t.anchor.x, c.y + t.anchor.y});
    return r;
}

bool global_before(const GroundTruthSet& set, const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& ia = set.entries()[a.entry].id;
    const auto& ib = set.entries()[b.entry].id;
    if (ia != ib) return ia < ib;
    if (a.rotation != b.rotation) return a.rotation < b.rotation;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

std::vector<Candidate> merge_sorted(const GroundTruthSet& set, std::vector<Candidate> all,
                                    std::size_t k) {
    std::sort(all.begin(), all.end(),
              [&](const Candidate& a, const Candidate& b) { return global_before(set, a, b); });
    if (all.size() > k) all.resize(k);
    return all;
}

std::vector<int> sweep_rotations(const MatchConfig& cfg) {
    std::vector<int> out;
    for (int r = 0; r < 360; r += cfg.rotation_step) out.push_back(r);
    return out;
}

std::vector<PreparedTemplate> prepare(const std::vector<TemplateChoice>& choices, const MatchConfig& cfg) {
    std::vector<PreparedTemplate> out;
    out.reserve(choices.size());
    for (const TemplateChoice& c : choices) {
        if (c.template_image.empty() ||
            static_cast<long long>(c.template_image.width()) * c.template_image.height() <
                cfg.min_template_pixels) {
            throw Error("template too small");
        }
        PreparedTemplate p;
        p.gray = to_gray(c.template_image);
        p.anchor = c.anchor;
        GrayImage g = p.gray;
        p.levels.push_back(template_stats(g));
        for (int l = 1; l < cfg.pyramid_levels; ++l) {
            if (std::min(g.width(), g.height()) / 2 < kMinCoarseSide) break;
            g = downsample2(g);
            p.levels.push_back(template_stats(g));
        }
        out.push_back(std::move(p));
    }
    return out;
}

// Exhaustive sweep at pyramid level `level` of each template (level 0 for the
// plain search). Returns, per template, the best `keep` candidates of every
// view, in view order.
std::vector<std::vector<Candidate>> sweep(const GroundTruthSet& set,
                                          const std::vector<PreparedTemplate>& templates,
                                          const MatchConfig& cfg, std::size_t keep, bool coarse) {
    const std::vector<int> rotations = sweep_rotations(cfg);
    const std::size_t nt = templates.size();
    std::vector<std::vector<Candidate>> per_template(nt);

    auto level_of = [&](std::size_t t) { return coarse ? static_cast<int>(templates[t].levels.size()) - 1 : 0; };
    int max_level = 0;
    std::vector<char> fft(nt, 0);
    for (std::size_t t = 0; t < nt; ++t) {
        max_level = std::max(max_level, level_of(t));
        fft[t] = use_fft_for(cfg, templates[t].levels[static_cast<std::size_t>(level_of(t))]);
    }

    for (std::size_t ei = 0; ei < set.entries().size(); ++ei) {
        const GroundTruthEntry& entry = set.entries()[ei];

        // Views are grouped by the FFT grid shapes their pyramid levels need,
        // so each group shares one set of template spectra.
        using GridKey = std::vector<std::pair<int, int>>;
        std::map<GridKey, std::vector<int>> groups;
        const int nr = static_cast<int>(rotations.size());
        for (int ri = 0; ri < nr; ++ri) {
            const RotationFrame f(entry.image.width(), entry.image.height(), rotations[static_cast<std::size_t>(ri)]);
            GridKey key;
            for (int l = 0; l <= max_level; ++l) {
                key.emplace_back(kernels::fft_size(reduced(f.dst_width(), l)),
                                 kernels::fft_size(reduced(f.dst_height(), l)));
            }
            groups[key].push_back(ri);
        }

        std::vector<std::vector<std::vector<Candidate>>> local(
            static_cast<std::size_t>(nr), std::vector<std::vector<Candidate>>(nt));
        detail::FirstError errors;
        for (const auto& [key, members] : groups) {
            std::vector<std::unique_ptr<kernels::FftCorrelator>> grids(static_cast<std::size_t>(max_level) + 1);
            for (std::size_t t = 0; t < nt; ++t) {
                const int l = level_of(t);
                if (fft[t] && !grids[l]) {
                    grids[l] = std::make_unique<kernels::FftCorrelator>(key[l].first, key[l].second);
                }
            }
            std::vector<kernels::FftCorrelator::Spectrum> tspec(nt);
#pragma omp parallel for schedule(dynamic) num_threads(detail::resolve_workers(cfg.workers))
            for (std::size_t t = 0; t < nt; ++t) {
                errors.run([&] {
                    const int l = level_of(t);
                    const TemplateStats& ts = templates[t].levels[l];
                    if (fft[t] && ts.width() <= grids[l]->padded_width() && ts.height() <= grids[l]->padded_height()) {
                        tspec[t] = grids[l]->template_spectrum(ts);
                    }
                });
            }
            errors.rethrow();

            const int nm = static_cast<int>(members.size());
#pragma omp parallel for schedule(dynamic) num_threads(detail::resolve_workers(cfg.workers))
            for (int mi = 0; mi < nm; ++mi) {
                errors.run([&] {
                    const int ri = members[static_cast<std::size_t>(mi)];
                    const int rot = rotations[static_cast<std::size_t>(ri)];
                    const auto view = rotated_view(set, entry.id, rot);
                    const std::vector<Level> levels = build_levels(*view, max_level + 1);
                    std::vector<std::optional<kernels::FftCorrelator::Spectrum>> vspec(levels.size());
                    for (std::size_t t = 0; t < nt; ++t) {
                        const int l = level_of(t);
                        const TemplateStats& ts = templates[t].levels[l];
                        const Level& lv = levels[l];
                        if (ts.width() > lv.gray.width() || ts.height() > lv.gray.height()) continue;
                        TopList top(keep);
                        if (fft[t]) {
                            if (!vspec[l]) vspec[l] = grids[l]->image_spectrum(lv.gray);
                            if (coarse) {
                                collect(grids[l]->score(*vspec[l], tspec[t], lv.gray, lv.tables, ts), ei, rot, top,
                                        true);
                            } else {
                                collect_fft(*grids[l], *vspec[l], tspec[t], lv.gray, lv.tables, ts, ei, rot, top);
                            }
                        } else {
                            collect(kernels::zncc_reference(lv.gray, lv.tables, ts), ei, rot, top, coarse);
                        }
                        local[static_cast<std::size_t>(ri)][t] = std::move(top.items());
                    }
                });
            }
            errors.rethrow();
        }

        for (int ri = 0; ri < nr; ++ri) {
            for (std::size_t t = 0; t < nt; ++t) {
                auto& src = local[static_cast<std::size_t>(ri)][t];
                per_template[t].insert(per_template[t].end(), src.begin(), src.end());
            }
        }
    }
    return per_template;
}

int rotation_distance(int a, int b) {
    const int d = std::abs(normalize_degrees(a) - normalize_degrees(b));
    return std::min(d, 360 - d);
}

// Greedy suppression of coarse candidates that describe the same placement.
std::vector<Candidate> suppress(const GroundTruthSet& set, std::vector<Candidate> cands,
                                const PreparedTemplate& t, int level, std::size_t keep) {
    std::sort(cands.begin(), cands.end(),
              [&](const Candidate& a, const Candidate& b) { return global_before(set, a, b); });
    const double scale = std::ldexp(1.0, level);
    const TemplateStats& ts = t.levels[static_cast<std::size_t>(level)];
    auto center = [&](const Candidate& c) {
        const GroundTruthEntry& e = set.entries()[c.entry];
        const RotationFrame f(e.image.width(), e.image.height(), c.rotation);
        return f.to_source({(c.x + (ts.width() - 1) * 0.5) * scale, (c.y + (ts.height() - 1) * 0.5) * scale});
    };
    std::vector<Candidate> accepted;
    std::vector<PointF> centers;
    for (const Candidate& c : cands) {
        if (accepted.size() >= keep) break;
        const PointF p = center(c);
        bool dup = false;
        for (std::size_t i = 0; i < accepted.size() && !dup; ++i) {
            const Candidate& a = accepted[i];
            dup = a.entry == c.entry && rotation_distance(a.rotation, c.rotation) <= kRefineDegrees + 1 &&
                  std::hypot(centers[i].x - p.x, centers[i].y - p.y) <= kRefineRadius * scale;
        }
        if (dup) continue;
        accepted.push_back(c);
        centers.push_back(p);
    }
    return accepted;
}

// Best placement of `ts` within +-radius of (cx, cy) on `lv`.
std::optional<Candidate> search_window(const Level& lv, const TemplateStats& ts, Candidate base,
                                       int cx, int cy, int radius) {
    const int max_x = lv.gray.width() - ts.width();
    const int max_y = lv.gray.height() - ts.height();
    if (max_x < 0 || max_y < 0) return std::nullopt;
    std::optional<Candidate> best;
    for (int y = std::max(0, cy - radius); y <= std::min(max_y, cy + radius); ++y) {
        for (int x = std::max(0, cx - radius); x <= std::min(max_x, cx + radius); ++x) {
            Candidate c = base;
            c.x = x;
            c.y = y;
            c.score = zncc_at(lv.gray, lv.tables, ts, x, y);
            if (!best || local_before(c, *best)) best = c;
        }
    }
    return best;
}

// Coarse-to-fine refinement of one coarse candidate.
std::vector<Candidate> refine(const GroundTruthSet& set, const PreparedTemplate& t, const MatchConfig& cfg,
                              const Candidate& coarse, int coarse_level) {
    const GroundTruthEntry& e = set.entries()[coarse.entry];
    Candidate cur = coarse;
    {
        const auto view = rotated_view(set, e.id, coarse.rotation);
        const std::vector<Level> levels = build_levels(*view, coarse_level + 1);
        for (int l = coarse_level - 1; l >= 0; --l) {
            auto found = search_window(levels[static_cast<std::size_t>(l)], t.levels[static_cast<std::size_t>(l)],
                                       cur, cur.x * 2, cur.y * 2, kRefineRadius);
            if (!found) return {};
            cur = *found;
        }
    }

    // Full resolution: neighbouring rotations, positions carried through the
    // unrotated frame.
    const TemplateStats& ts = t.levels[0];
    const RotationFrame here(e.image.width(), e.image.height(), cur.rotation);
    const PointF center = here.to_source({cur.x + (ts.width() - 1) * 0.5, cur.y + (ts.height() - 1) * 0.5});
    std::vector<Candidate> out;
    for (int d = -kRefineDegrees; d <= kRefineDegrees; ++d) {
        if (d % cfg.rotation_step != 0) continue;
        const int rot = normalize_degrees(cur.rotation + d);
        const auto view = rotated_view(set, e.id, rot);
        const PointF p = view->forward(center);
        const int cx = static_cast<int>(std::lround(p.x - (ts.width() - 1) * 0.5));
        const int cy = static_cast<int>(std::lround(p.y - (ts.height() - 1) * 0.5));
        Candidate base = cur;
        base.rotation = rot;
        const Level lv{view->gray, view->tables};
        if (auto found = search_window(lv, ts, base, cx, cy, kRefineRadius)) out.push_back(*found);
    }
    return out;
}

}  // namespace

ScoreMap zncc_score_map(const RotatedView& view, const GrayImage& tmpl) {
    const TemplateStats ts = template_stats(tmpl);
    if (ts.width() > view.gray.width() || ts.height() > view.gray.height()) {
        throw Error("template exceeds view");
    }
    if (static_cast<long long>(ts.width()) * ts.height() >= kFftMinArea) {
        return kernels::zncc_fft(view.gray, view.tables, ts);
    }
    return kernels::zncc_parallel(view.gray, view.tables, ts);
}

bool result_before(const MatchResult& a, const MatchResult& b) {
    if (a.match_value != b.match_value) return a.match_value > b.match_value;
    if (a.ground_truth_id != b.ground_truth_id) return a.ground_truth_id < b.ground_truth_id;
    if (a.rotation != b.rotation) return a.rotation < b.rotation;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

std::vector<std::vector<MatchResult>> match_pieces(const GroundTruthSet& set,
                                                   const std::vector<TemplateChoice>& choices,
                                                   const std::vector<std::string>& piece_ids,
                                                   const MatchConfig& cfg) {
    if (cfg.rotation_step < 1 || 360 % cfg.rotation_step != 0) {
        throw Error("rotation step must divide 360, got " + std::to_string(cfg.rotation_step));
    }
    if (cfg.rotation_step % set.rotation_step() != 0) {
        throw Error("match rotation step " + std::to_string(cfg.rotation_step) +
                    " is not a multiple of the ground truth step " + std::to_string(set.rotation_step()));
    }
    if (cfg.top_k < 1) throw Error("top_k must be >= 1");
    if (cfg.pyramid_levels < 1) throw Error("pyramid_levels must be >= 1");
    if (!piece_ids.empty() && piece_ids.size() != choices.size()) {
        throw Error("piece id count does not match template count");
    }
    auto id_of = [&](std::size_t i) { return piece_ids.empty() ? std::string() : piece_ids[i]; };

    const std::vector<PreparedTemplate> templates = prepare(choices, cfg);
    const std::size_t k = static_cast<std::size_t>(cfg.top_k);
    std::vector<std::vector<MatchResult>> results(templates.size());

    bool any_coarse = false;
    for (const auto& t : templates) any_coarse = any_coarse || t.levels.size() > 1;

    if (cfg.pyramid_levels <= 1 || !any_coarse) {
        auto per_template = sweep(set, templates, cfg, k, false);
        for (std::size_t t = 0; t < templates.size(); ++t) {
            for (const Candidate& c : merge_sorted(set, std::move(per_template[t]), k)) {
                results[t].push_back(make_result(set, c, templates[t], id_of(t)));
            }
        }
        return results;
    }

    const std::size_t per_view = std::max<std::size_t>(8, 2 * k);
    const std::size_t global = std::max<std::size_t>(16, 4 * k);
    auto per_template = sweep(set, templates, cfg, per_view, true);

    for (std::size_t t = 0; t < templates.size(); ++t) {
        const int level = static_cast<int>(templates[t].levels.size()) - 1;
        const std::vector<Candidate> seeds = suppress(set, std::move(per_template[t]), templates[t], level, global);
        std::vector<std::vector<Candidate>> refined(seeds.size());
        detail::FirstError errors;
#pragma omp parallel for schedule(dynamic) num_threads(detail::resolve_workers(cfg.workers))
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            errors.run([&] { refined[s] = refine(set, templates[t], cfg, seeds[s], level); });
        }
        errors.rethrow();

        std::vector<Candidate> all;
        for (auto& r : refined) all.insert(all.end(), r.begin(), r.end());
        std::sort(all.begin(), all.end(),
                  [&](const Candidate& a, const Candidate& b) { return global_before(set, a, b); });
        all.erase(std::unique(all.begin(), all.end(),
                              [](const Candidate& a, const Candidate& b) {
                                  return a.entry == b.entry && a.rotation == b.rotation && a.x == b.x && a.y == b.y;
                              }),
                  all.end());
        if (all.size() > k) all.resize(k);
        for (const Candidate& c : all) results[t].push_back(make_result(set, c, templates[t], id_of(t)));
    }
    return results;
}

std::vector<MatchResult> match_piece(const GroundTruthSet& set, const TemplateChoice& choice,
                                     const MatchConfig& cfg, const std::string& piece_id) {
    return match_pieces(set, {choice}, {piece_id}, cfg).front();
}

namespace {

constexpr std::string_view kFrontSuffix = "_front";
constexpr std::string_view kBackSuffix = "_back";

std::optional<std::string> strip_suffix(const std::string& id, std::string_view suffix) {
    if (id.size() <= suffix.size() || id.compare(id.size() - suffix.size(), suffix.size(), suffix) != 0) {
        return std::nullopt;
    }
    return id.substr(0, id.size() - suffix.size());
}

}  // namespace

bool faces_paired(const std::string& front_id, const std::string& back_id) {
    const auto f = strip_suffix(front_id, kFrontSuffix);
    const auto b = strip_suffix(back_id, kBackSuffix);
    return f && b && *f == *b;
}

double two_sided_consistency(const MatchResult& front, const MatchResult& back, int note_width) {
    if (!faces_paired(front.ground_truth_id, back.ground_truth_id)) {
        throw Error("ground truth ids '" + front.ground_truth_id + "' and '" + back.ground_truth_id +
                    "' are not the front and back of one note");
    }
    const double mx = note_width - 1 - back.unrotated_center.x;
    const double my = back.unrotated_center.y;
    return std::hypot(front.unrotated_center.x - mx, front.unrotated_center.y - my);
}

RasterImage annotate(const RasterImage& image, const MatchResult& result, Rgb color) {
    const RectRegion r = result.rect();
    if (r.w <= 0 || r.h <= 0 || r.x < 0 || r.y < 0 || r.x + r.w > image.width() ||
        r.y + r.h > image.height()) {
        throw BoundsError("match rectangle (" + std::to_string(r.x) + "," + std::to_string(r.y) + "," +
                          std::to_string(r.w) + "," + std::to_string(r.h) + ") outside " +
                          std::to_string(image.width()) + "x" + std::to_string(image.height()) + " image");
    }
    constexpr int thickness = 3;
    RasterImage out = image;
    for (int y = r.y; y < r.y + r.h; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) {
            const bool edge = x - r.x < thickness || r.x + r.w - 1 - x < thickness || y - r.y < thickness ||
                              r.y + r.h - 1 - y < thickness;
            if (edge) out.at(x, y) = color;
        }
    }
    return out;
}

}  // namespace shredmap
