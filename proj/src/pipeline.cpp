#include "shredmap/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "parallel.hpp"
#include "shredmap/error.hpp"
#include "shredmap/image_io.hpp"

namespace shredmap {

using nlohmann::json;

const char* to_string(PieceStatus s) {
    switch (s) {
        case PieceStatus::Matched: return "matched";
        case PieceStatus::Serial: return "serial";
        default: return "template too small";
    }
}

std::vector<PieceOutcome> run_pipeline(const GroundTruthSet& set, const std::vector<PieceScan>& scans,
                                       const PipelineConfig& cfg) {
    std::vector<PieceOutcome> pieces;
    for (const PieceScan& scan : scans) {
        std::vector<Segment> segs = segment_scan(scan.image, cfg.segment);
        for (std::size_t k = 0; k < segs.size(); ++k) {
            PieceOutcome o;
            o.scan_id = scan.id;
            o.piece_id = segs.size() == 1 ? scan.id : scan.id + "_" + std::to_string(k);
            o.segment = std::move(segs[k]);
            pieces.push_back(std::move(o));
        }
    }

    const GlyphRowClassifier classifier(cfg.classify);
    const int n = static_cast<int>(pieces.size());
    detail::FirstError errors;
#pragma omp parallel for schedule(dynamic) num_threads(detail::resolve_workers(cfg.match.workers))
    for (int i = 0; i < n; ++i) {
        errors.run([&] {
            PieceOutcome& o = pieces[static_cast<std::size_t>(i)];
            o.label = classifier.classify(o.segment, o.piece_id);
            if (o.label.label == PieceClass::Serial) {
                o.status = PieceStatus::Serial;
                return;
            }
            o.choice = best_template(o.segment, cfg.fit);
            if (o.choice->area < cfg.match.min_template_pixels) o.status = PieceStatus::TemplateTooSmall;
        });
    }
    errors.rethrow();

    std::vector<TemplateChoice> choices;
    std::vector<std::string> ids;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].status != PieceStatus::Matched) continue;
        choices.push_back(*pieces[i].choice);
        ids.push_back(pieces[i].piece_id);
        index.push_back(i);
    }
    if (!choices.empty()) {
        auto results = match_pieces(set, choices, ids, cfg.match);
        for (std::size_t j = 0; j < index.size(); ++j) pieces[index[j]].matches = std::move(results[j]);
    }
    return pieces;
}

std::vector<PieceScan> load_scans(const std::filesystem::path& dir) {
    std::vector<PieceScan> out;
    for (const auto& path : list_images(dir)) out.push_back({path.stem().string(), read_image(path)});
    return out;
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string batch_csv(const std::vector<PieceOutcome>& outcomes) {
    std::ostringstream out;
    out << kBatchCsvHeader << "\n";
    for (const PieceOutcome& o : outcomes) {
        if (o.matches.empty()) continue;
        const MatchResult& r = o.matches.front();
        out << r.piece_id << "," << r.ground_truth_id << "," << r.rotation << "," << r.x << "," << r.y << ","
            << fmt("%.16g", r.match_value) << "," << fmt("%.3f", r.unrotated_center.x) << ","
            << fmt("%.3f", r.unrotated_center.y) << "\n";
    }
    return out.str();
}

std::vector<MatchResult> parse_batch_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kBatchCsvHeader)) {
        throw InputError("batch CSV header mismatch; expected: " + std::string(kBatchCsvHeader));
    }
    std::vector<MatchResult> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw InputError("batch CSV line " + std::to_string(lineno) + ": expected 8 fields");
        try {
            MatchResult r;
            r.piece_id = f[0];
            r.ground_truth_id = f[1];
            r.rotation = std::stoi(f[2]);
            r.x = std::stoi(f[3]);
            r.y = std::stoi(f[4]);
            r.match_value = std::stod(f[5]);
            r.unrotated_center = {std::stod(f[6]), std::stod(f[7])};
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw InputError("batch CSV line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return out;
}

json to_json(const MatchResult& r) {
    return {{"piece_id", r.piece_id},
            {"ground_truth_id", r.ground_truth_id},
            {"rotation", r.rotation},
            {"x", r.x},
            {"y", r.y},
            {"w", r.w},
            {"h", r.h},
            {"match_value", r.match_value},
            {"unrotated_center", {{"x", r.unrotated_center.x}, {"y", r.unrotated_center.y}}}};
}

MatchResult match_result_from_json(const json& j) {
    try {
        MatchResult r;
        r.piece_id = j.value("piece_id", std::string());
        r.ground_truth_id = j.at("ground_truth_id").get<std::string>();
        r.rotation = j.at("rotation").get<int>();
        r.x = j.at("x").get<int>();
        r.y = j.at("y").get<int>();
        r.w = j.value("w", 0);
        r.h = j.value("h", 0);
        r.match_value = j.at("match_value").get<double>();
        if (j.contains("unrotated_center")) {
            r.unrotated_center = {j["unrotated_center"].at("x").get<double>(),
                                  j["unrotated_center"].at("y").get<double>()};
        }
        return r;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed match result: ") + e.what());
    }
}

json to_json(const OracleRecord& o) {
    json poly = json::array();
    for (const PointF& p : o.polygon) poly.push_back({p.x, p.y});
    return {{"piece_id", o.piece_id},
            {"ground_truth_id", o.ground_truth_id},
            {"polygon", poly},
            {"center", {o.center.x, o.center.y}},
            {"scan_rotation", o.scan_rotation},
            {"source_box", {o.source_box.x, o.source_box.y, o.source_box.w, o.source_box.h}},
            {"margin", o.margin}};
}

OracleRecord oracle_from_json(const json& j) {
    try {
        OracleRecord o;
        o.piece_id = j.at("piece_id").get<std::string>();
        o.ground_truth_id = j.at("ground_truth_id").get<std::string>();
        for (const auto& p : j.at("polygon")) o.polygon.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        o.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
        o.scan_rotation = j.at("scan_rotation").get<int>();
        const auto& b = j.at("source_box");
        o.source_box = {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()};
        o.margin = j.value("margin", 0);
        return o;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed oracle record: ") + e.what());
    }
}

json to_json(const PieceLabel& l) {
    json boxes = json::array();
    for (const RectRegion& b : l.evidence) boxes.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
    return {{"piece_id", l.piece_id}, {"label", to_string(l.label)}, {"confidence", l.confidence},
            {"evidence", boxes}};
}

json to_json(const RecoveryReport& r) {
    json pieces = json::array();
    for (const auto& p : r.pieces) {
        pieces.push_back({{"piece_id", p.piece_id},
                          {"matched", p.matched},
                          {"recovered", p.recovered},
                          {"right_face", p.right_face},
                          {"distance", p.distance}});
    }
    return {{"recovered_fraction", r.fraction}, {"pieces", pieces}};
}

json manifest_json(const GroundTruthSet& set) {
    json entries = json::array();
    for (const auto& e : set.entries()) {
        entries.push_back({{"id", e.id},
                           {"width", e.image.width()},
                           {"height", e.image.height()},
                           {"hash", e.content_hash}});
    }
    return {{"step", set.rotation_step()}, {"search_images", set.search_image_count()}, {"entries", entries}};
}

audit::AuditLedger ledger_from_json(const json& j) {
    auto grams = [&](const char* key) {
        const auto& v = j.at(key);
        if (v.is_string()) return audit::Grams::parse(v.get<std::string>());
        if (v.is_number()) return audit::Grams::parse(v.dump());
        throw InputError(std::string("ledger field ") + key + " must be a number or decimal string");
    };
    try {
        audit::AuditLedger l;
        l.gross_paperweight = grams("gross_paperweight_g");
        l.empty_container = grams("empty_container_g");
        l.stones = grams("stones_g");
        l.bag_gross = grams("bag_gross_g");
        l.bag_tare = grams("bag_tare_g");
        l.per_note = grams("per_note_g");
        l.claimed_notes = j.at("claimed_notes").get<long long>();
        return l;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed ledger: ") + e.what());
    }
}

json to_json(const audit::AuditReport& r) {
    return {{"net_shreds_g", r.net_shreds_g},
            {"equivalent_notes", r.equivalent_notes},
            {"claim_fraction", r.claim_fraction},
            {"rounded_notes", r.rounded_notes},
            {"rounded_claim_fraction", r.rounded_claim_fraction},
            {"mass_balance_residual_g", r.mass_balance_residual_g},
            {"full_cylinder",
             {{"shreds_g", r.full_cylinder_shreds_g},
              {"equivalent_notes", r.full_cylinder_equivalent_notes},
              {"claim_fraction", r.full_cylinder_claim_fraction}}}};
}

RasterImage mapping_panel(const RasterImage& annotated_view, const RasterImage& template_image,
                          const RasterImage& piece_scan) {
    constexpr int gap = 16;
    const int w = annotated_view.width() + template_image.width() + piece_scan.width() + 4 * gap;
    const int h = std::max({annotated_view.height(), template_image.height(), piece_scan.height()}) + 2 * gap;
    RasterImage panel(w, h, kWhite);
    int x = gap;
    for (const RasterImage* img : {&annotated_view, &template_image, &piece_scan}) {
        paste(panel, *img, x, gap);
        x += img->width() + gap;
    }
    return panel;
}

RasterImage mask_image(const BinaryMask& mask) {
    RasterImage img(mask.width(), mask.height(), kWhite);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) img.at(x, y) = Rgb{0, 0, 0};
        }
    }
    return img;
}

BinaryMask mask_from_image(const RasterImage& img) {
    BinaryMask m(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Rgb& p = img.at(x, y);
            m.set(x, y, (p.r + p.g + p.b) < 3 * 128);
        }
    }
    return m;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

}  // namespace shredmap
