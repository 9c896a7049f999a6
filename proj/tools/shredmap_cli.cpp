// shredmap: command-line front end.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shredmap/error.hpp"
#include "shredmap/image_io.hpp"
#include "shredmap/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shredmap;

namespace {

void emit_json(const json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        write_text(out, j.dump(2) + "\n");
    }
}

json rect_json(const RectRegion& r) { return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

// "75" or "60-90".
std::pair<int, int> parse_range(const std::string& text, const char* what) {
    try {
        const auto dash = text.find('-', 1);
        if (dash == std::string::npos) {
            const int v = std::stoi(text);
            return {v, v};
        }
        return {std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
    } catch (const std::logic_error&) {
        throw InputError(std::string("malformed ") + what + " '" + text + "' (expected N or MIN-MAX)");
    }
}

GroundTruthSet open_set(const std::string& dir, int step, const std::string& cache_dir) {
    ViewCacheOptions cache;
    if (!cache_dir.empty()) cache.disk_dir = cache_dir;
    return load_set(list_images(dir), step, cache);
}

// A segment PNG is white outside the piece; without an explicit mask the
// piece is everything that is not background.
Segment segment_from_files(const std::string& image_path, const std::string& mask_path, int white_cutoff) {
    Segment seg;
    seg.image = read_image(image_path);
    if (mask_path.empty()) {
        seg.mask = clean_mask(threshold_background(seg.image, white_cutoff), SegmentParams{}.clean_radius);
    } else {
        seg.mask = mask_from_image(read_image(mask_path));
        if (seg.mask.width() != seg.image.width() || seg.mask.height() != seg.image.height()) {
            throw InputError("mask " + mask_path + " does not match the size of " + image_path);
        }
    }
    seg.area = seg.mask.count();
    return seg;
}

json template_json(const TemplateChoice& c) {
    return {{"piece_rotation", c.piece_rotation},
            {"rect", rect_json(c.rect)},
            {"area", c.area},
            {"anchor", {{"x", c.anchor.x}, {"y", c.anchor.y}}}};
}

// write_png with the parent directory created first, like write_text.
void save_png(const fs::path& path, const RasterImage& img) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_png(path, img);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locate shredded banknote fragments on reference scans"};
    app.require_subcommand(1);

    SegmentParams seg_params;
    auto add_segment_flags = [&](CLI::App* sub) {
        sub->add_option("--white-cutoff", seg_params.white_cutoff, "Background when min(R,G,B) >= cutoff")
            ->capture_default_str();
        sub->add_option("--min-area", seg_params.min_area, "Smallest segment kept, pixels")->capture_default_str();
        sub->add_option("--clean-radius", seg_params.clean_radius, "Closing radius, 0 disables")
            ->capture_default_str();
    };

    // segment
    auto* segment = app.add_subcommand("segment", "Cut piece scans into per-fragment images");
    std::vector<std::string> seg_inputs;
    std::string seg_out = "segments";
    segment->add_option("scans", seg_inputs, "Scan images")->required()->check(CLI::ExistingFile);
    segment->add_option("--out-dir", seg_out, "Output directory")->capture_default_str();
    add_segment_flags(segment);

    // template
    auto* templ = app.add_subcommand("template", "Largest background-free rectangle of a segment");
    std::string tpl_image, tpl_mask, tpl_out = "template.png", tpl_json;
    int tpl_step = 1;
    templ->add_option("segment", tpl_image, "Segment PNG")->required()->check(CLI::ExistingFile);
    templ->add_option("--mask", tpl_mask, "Segment mask PNG (black = piece)")->check(CLI::ExistingFile);
    templ->add_option("--step", tpl_step, "Rotation step, degrees")->capture_default_str();
    templ->add_option("--out", tpl_out, "Template PNG")->capture_default_str();
    templ->add_option("--json", tpl_json, "Template record (default: stdout)");

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Build rotated reference views and a manifest");
    std::string gt_dir, cache_dir, prep_out;
    int step = 1;
    prepare->add_option("--ground-truth-dir", gt_dir, "Reference faces")->required()->check(CLI::ExistingDirectory);
    prepare->add_option("--step", step, "Rotation step, degrees")->capture_default_str();
    prepare->add_option("--cache-dir", cache_dir, "On-disk view cache")->required();
    prepare->add_option("--out", prep_out, "Manifest JSON (default: stdout)");

    // match
    auto* match = app.add_subcommand("match", "Locate one template on the reference faces");
    std::string match_tpl, match_tpl_json, match_out;
    MatchConfig match_cfg;
    match->add_option("--template", match_tpl, "Template PNG")->required()->check(CLI::ExistingFile);
    match->add_option("--template-json", match_tpl_json, "Record written by 'template' (supplies the anchor)")
        ->check(CLI::ExistingFile);
    match->add_option("--ground-truth-dir", gt_dir, "Reference faces")->required()->check(CLI::ExistingDirectory);
    match->add_option("--step", step, "Rotation step, degrees")->capture_default_str();
    match->add_option("--top-k", match_cfg.top_k, "Results to report")->capture_default_str();
    match->add_option("--pyramid", match_cfg.pyramid_levels, "Pyramid levels, 1 = exhaustive")->capture_default_str();
    match->add_option("--min-template-pixels", match_cfg.min_template_pixels)->capture_default_str();
    match->add_option("--workers", match_cfg.workers, "Threads, 0 = all")->capture_default_str();
    match->add_option("--cache-dir", cache_dir, "On-disk view cache");
    match->add_option("--out", match_out, "Results JSON (default: stdout)");

    // batch
    auto* batch = app.add_subcommand("batch", "Segment, classify, template and match a directory of scans");
    std::string pieces_dir, batch_out = "batch";
    bool no_panels = false;
    batch->add_option("--pieces-dir", pieces_dir, "Piece scans")->required()->check(CLI::ExistingDirectory);
    batch->add_option("--ground-truth-dir", gt_dir, "Reference faces")->required()->check(CLI::ExistingDirectory);
    batch->add_option("--step", step, "Rotation step, degrees")->capture_default_str();
    batch->add_option("--pyramid", match_cfg.pyramid_levels, "Pyramid levels, 1 = exhaustive")->capture_default_str();
    batch->add_option("--min-template-pixels", match_cfg.min_template_pixels)->capture_default_str();
    batch->add_option("--workers", match_cfg.workers, "Threads, 0 = all")->capture_default_str();
    batch->add_option("--cache-dir", cache_dir, "On-disk view cache");
    batch->add_option("--out-dir", batch_out, "Directory for batch.csv, pieces.json and panels")
        ->capture_default_str();
    batch->add_flag("--no-panels", no_panels, "Skip the annotated PNGs");
    add_segment_flags(batch);

    // shred
    auto* shredder = app.add_subcommand("shred", "Shred a note image into rotated piece scans");
    std::string shred_in, shred_id, shred_oracle = "oracle.json", strip_width = "60-90", piece_length = "80-140";
    std::string shred_dir = "pieces";
    ShredSpec spec;
    shredder->add_option("--input", shred_in, "Note image")->required()->check(CLI::ExistingFile);
    shredder->add_option("--ground-truth-id", shred_id, "Id recorded in the oracle (default: file stem)");
    shredder->add_option("--seed", spec.seed)->capture_default_str();
    shredder->add_option("--strip-width", strip_width, "Strip width N or MIN-MAX")->capture_default_str();
    shredder->add_option("--piece-length", piece_length, "Piece length N or MIN-MAX")->capture_default_str();
    shredder->add_option("--jitter", spec.cut_jitter, "Cut jitter, pixels")->capture_default_str();
    shredder->add_option("--margin", spec.margin, "White border around each piece")->capture_default_str();
    shredder->add_option("--pieces-dir", shred_dir, "Output directory for piece scans")->capture_default_str();
    shredder->add_option("--oracle", shred_oracle, "Oracle JSON")->capture_default_str();

    // score
    auto* score = app.add_subcommand("score", "Compare a batch CSV with a shredder oracle");
    std::string score_csv, score_oracle, score_out;
    double pos_tol = 3.0;
    score->add_option("results", score_csv, "batch.csv")->required()->check(CLI::ExistingFile);
    score->add_option("--oracle", score_oracle, "Oracle JSON")->required()->check(CLI::ExistingFile);
    score->add_option("--pos-tol", pos_tol, "Center tolerance, pixels")->capture_default_str();
    score->add_option("--out", score_out, "Report JSON (default: stdout)");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Label pieces as regular (R) or serial-number (S)");
    std::string classify_out;
    classify_cmd->add_option("--pieces-dir", pieces_dir, "Piece scans")->required()->check(CLI::ExistingDirectory);
    classify_cmd->add_option("--out", classify_out, "Labels JSON (default: stdout)");
    add_segment_flags(classify_cmd);

    // audit
    auto* audit_cmd = app.add_subcommand("audit", "Weight arithmetic for a shredded-note souvenir");
    std::string ledger_path, audit_out;
    audit_cmd->add_option("ledger", ledger_path, "Ledger JSON")->required()->check(CLI::ExistingFile);
    audit_cmd->add_option("--out", audit_out, "Report JSON");

    // synth
    auto* synth = app.add_subcommand("synth", "Render a synthetic note face");
    int synth_w = 800, synth_h = 400;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "note.png";
    synth->add_option("--width", synth_w)->capture_default_str();
    synth->add_option("--height", synth_h)->capture_default_str();
    synth->add_option("--seed", synth_seed)->capture_default_str();
    synth->add_option("--out", synth_out)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (segment->parsed()) {
            json index = json::array();
            for (const auto& path : seg_inputs) {
                const std::string stem = fs::path(path).stem().string();
                const auto segs = segment_scan(read_image(path), seg_params);
                for (std::size_t k = 0; k < segs.size(); ++k) {
                    const std::string id = segs.size() == 1 ? stem : stem + "_" + std::to_string(k);
                    const fs::path png = fs::path(seg_out) / (id + ".png");
                    const fs::path mask = fs::path(seg_out) / (id + "_mask.png");
                    fs::create_directories(seg_out);
                    save_png(png, segs[k].image);
                    save_png(mask, mask_image(segs[k].mask));
                    index.push_back({{"id", id},
                                     {"scan", path},
                                     {"origin", {{"x", segs[k].origin_x}, {"y", segs[k].origin_y}}},
                                     {"area", segs[k].area},
                                     {"bounding_box", rect_json(segs[k].bounding_box())},
                                     {"image", png.string()},
                                     {"mask", mask.string()}});
                }
            }
            fs::create_directories(seg_out);
            write_text(fs::path(seg_out) / "segments.json", index.dump(2) + "\n");
            std::printf("%zu segments -> %s\n", index.size(), seg_out.c_str());
        } else if (templ->parsed()) {
            RectFitParams fit;
            fit.step = tpl_step;
            const Segment seg = segment_from_files(tpl_image, tpl_mask, fit.white_cutoff);
            const TemplateChoice c = best_template(seg, fit);
            save_png(tpl_out, c.template_image);
            json j = template_json(c);
            j["template"] = tpl_out;
            emit_json(j, tpl_json);
        } else if (prepare->parsed()) {
            const GroundTruthSet set = open_set(gt_dir, step, cache_dir);
            precompute_views(set);
            json manifest = manifest_json(set);
            manifest["cache_dir"] = cache_dir;
            emit_json(manifest, prep_out);
        } else if (match->parsed()) {
            match_cfg.rotation_step = step;
            const GroundTruthSet set = open_set(gt_dir, step, cache_dir);
            TemplateChoice choice = template_from_image(read_image(match_tpl));
            if (!match_tpl_json.empty()) {
                const json rec = json::parse(read_text(match_tpl_json));
                if (rec.contains("anchor")) {
                    choice.anchor = {rec["anchor"].at("x").get<double>(), rec["anchor"].at("y").get<double>()};
                }
            }
            const std::string id = fs::path(match_tpl).stem().string();
            json results = json::array();
            for (const MatchResult& r : match_piece(set, choice, match_cfg, id)) results.push_back(to_json(r));
            emit_json(results, match_out);
        } else if (batch->parsed()) {
            match_cfg.rotation_step = step;
            PipelineConfig cfg;
            cfg.segment = seg_params;
            cfg.match = match_cfg;
            const GroundTruthSet set = open_set(gt_dir, step, cache_dir);
            const auto scans = load_scans(pieces_dir);
            const auto outcomes = run_pipeline(set, scans, cfg);
            fs::create_directories(batch_out);
            write_text(fs::path(batch_out) / "batch.csv", batch_csv(outcomes));

            std::map<std::string, const RasterImage*> scan_by_id;
            for (const auto& s : scans) scan_by_id[s.id] = &s.image;
            json pieces = json::array();
            int matched = 0;
            for (const PieceOutcome& o : outcomes) {
                json p = {{"piece_id", o.piece_id}, {"scan", o.scan_id}, {"status", to_string(o.status)},
                          {"label", to_json(o.label)}};
                if (o.choice) p["template"] = template_json(*o.choice);
                if (!o.matches.empty()) {
                    ++matched;
                    const MatchResult& r = o.matches.front();
                    p["match"] = to_json(r);
                    if (!no_panels) {
                        const auto view = rotated_view(set, r.ground_truth_id, r.rotation);
                        const fs::path panel = fs::path(batch_out) / "panels" / (o.piece_id + ".png");
                        fs::create_directories(panel.parent_path());
                        save_png(panel, mapping_panel(annotate(view->image, r), o.choice->template_image,
                                                       *scan_by_id.at(o.scan_id)));
                    }
                }
                pieces.push_back(std::move(p));
            }
            write_text(fs::path(batch_out) / "pieces.json", pieces.dump(2) + "\n");
            std::printf("%zu pieces, %d matched -> %s\n", outcomes.size(), matched,
                        (fs::path(batch_out) / "batch.csv").string().c_str());
        } else if (shredder->parsed()) {
            std::tie(spec.strip_width_min, spec.strip_width_max) = parse_range(strip_width, "strip width");
            std::tie(spec.piece_length_min, spec.piece_length_max) = parse_range(piece_length, "piece length");
            const std::string id = shred_id.empty() ? fs::path(shred_in).stem().string() : shred_id;
            const auto pieces = shred(read_image(shred_in), id, spec);
            fs::create_directories(shred_dir);
            json oracle = json::array();
            for (const auto& p : pieces) {
                save_png(fs::path(shred_dir) / (p.oracle.piece_id + ".png"), p.scan);
                oracle.push_back(to_json(p.oracle));
            }
            write_text(shred_oracle, oracle.dump(2) + "\n");
            std::printf("%zu pieces -> %s, oracle %s\n", pieces.size(), shred_dir.c_str(), shred_oracle.c_str());
        } else if (score->parsed()) {
            const auto results = parse_batch_csv(read_text(score_csv));
            std::vector<OracleRecord> oracles;
            for (const auto& rec : json::parse(read_text(score_oracle))) oracles.push_back(oracle_from_json(rec));
            const RecoveryReport report = score_recovery(results, oracles, pos_tol);
            json j = to_json(report);
            j["pos_tol"] = pos_tol;
            emit_json(j, score_out);
        } else if (classify_cmd->parsed()) {
            const GlyphRowClassifier classifier;
            json labels = json::object();
            for (const PieceScan& scan : load_scans(pieces_dir)) {
                const auto segs = segment_scan(scan.image, seg_params);
                for (std::size_t k = 0; k < segs.size(); ++k) {
                    const std::string id = segs.size() == 1 ? scan.id : scan.id + "_" + std::to_string(k);
                    json l = to_json(classifier.classify(segs[k], id));
                    l.erase("piece_id");
                    labels[id] = std::move(l);
                }
            }
            emit_json(labels, classify_out);
        } else if (audit_cmd->parsed()) {
            const audit::AuditLedger ledger = ledger_from_json(json::parse(read_text(ledger_path)));
            const audit::AuditReport report = audit::run_audit(ledger);
            std::cout << audit::format_report(ledger, report);
            if (!audit_out.empty()) write_text(audit_out, to_json(report).dump(2) + "\n");
        } else if (synth->parsed()) {
            save_png(synth_out, synth_note(synth_w, synth_h, synth_seed));
        }
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: malformed JSON: %s\n", e.what());
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
