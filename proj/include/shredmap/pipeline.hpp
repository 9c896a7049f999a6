#pragma once

// End-to-end orchestration (segment -> classify -> template -> match) and
// the on-disk record formats used by the command-line tool.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shredmap/audit.hpp"
#include "shredmap/groundtruth.hpp"
#include "shredmap/matcher.hpp"
#include "shredmap/rectfit.hpp"
#include "shredmap/segmentation.hpp"
#include "shredmap/serialdetect.hpp"
#include "shredmap/shredsim.hpp"

namespace shredmap {

struct PipelineConfig {
    SegmentParams segment;
    RectFitParams fit;
    GlyphRowParams classify;
    MatchConfig match;
};

struct PieceScan {
    std::string id;  // usually the file stem
    RasterImage image;
};

enum class PieceStatus { Matched, Serial, TemplateTooSmall };

const char* to_string(PieceStatus s);

struct PieceOutcome {
    std::string piece_id;
    std::string scan_id;
    Segment segment;
    PieceLabel label;
    PieceStatus status = PieceStatus::Matched;
    std::optional<TemplateChoice> choice;
    std::vector<MatchResult> matches;  // best first; empty unless Matched
};

// A scan holding one segment yields a piece named after the scan; several
// segments yield "<scan>_<k>" in segment order.
std::vector<PieceOutcome> run_pipeline(const GroundTruthSet& set, const std::vector<PieceScan>& scans,
                                       const PipelineConfig& cfg);

std::vector<PieceScan> load_scans(const std::filesystem::path& dir);

// ---- batch CSV ----

inline constexpr const char* kBatchCsvHeader =
    "piece_id,ground_truth_id,rotation,x,y,match_value,unrotated_center_x,unrotated_center_y";

std::string batch_csv(const std::vector<PieceOutcome>& outcomes);
std::vector<MatchResult> parse_batch_csv(const std::string& text);

// ---- JSON records ----

nlohmann::json to_json(const MatchResult& r);
MatchResult match_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OracleRecord& o);
OracleRecord oracle_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PieceLabel& l);
nlohmann::json to_json(const RecoveryReport& r);
nlohmann::json manifest_json(const GroundTruthSet& set);

audit::AuditLedger ledger_from_json(const nlohmann::json& j);
nlohmann::json to_json(const audit::AuditReport& r);

// ---- images ----

// Side-by-side panel: annotated reference view, template, piece scan.
RasterImage mapping_panel(const RasterImage& annotated_view, const RasterImage& template_image,
                          const RasterImage& piece_scan);

// Segment mask as a black-on-white image, and back.
RasterImage mask_image(const BinaryMask& mask);
BinaryMask mask_from_image(const RasterImage& img);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace shredmap
