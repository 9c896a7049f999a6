#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "shredmap/error.hpp"
#include "shredmap/pipeline.hpp"

using namespace shredmap;
using nlohmann::json;

TEST_CASE("batch CSV round trip keeps every field") {
    PieceOutcome o;
    o.piece_id = "p1";
    o.matches.push_back({"p1", "eur50_front", 271, 33, 48, 60, 50, 0.123456789012345678, {101.25, 7.5}});
    PieceOutcome none;
    none.piece_id = "p2";
    const std::string csv = batch_csv({o, none});
    CHECK(csv.rfind(kBatchCsvHeader, 0) == 0);
    const auto rows = parse_batch_csv(csv);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].piece_id == "p1");
    CHECK(rows[0].ground_truth_id == "eur50_front");
    CHECK(rows[0].rotation == 271);
    CHECK(rows[0].x == 33);
    CHECK(rows[0].y == 48);
    // Sixteen significant digits, like the reference output format.
    CHECK(rows[0].match_value == 0.1234567890123457);
    CHECK(rows[0].unrotated_center.x == 101.25);
}

TEST_CASE("malformed batch CSV is rejected with the line number") {
    CHECK_THROWS_AS(parse_batch_csv("id,gt\n"), InputError);
    const std::string h = std::string(kBatchCsvHeader) + "\n";
    CHECK_THROWS_WITH(parse_batch_csv(h + "a,b,1,2\n"), doctest::Contains("line 2"));
    CHECK_THROWS_WITH(parse_batch_csv(h + "a,b,x,2,3,0.5,1,1\n"), doctest::Contains("malformed"));
    CHECK(parse_batch_csv(h + "\n").empty());
}

TEST_CASE("JSON records round trip") {
    const MatchResult r{"p", "g", 12, 3, 4, 5, 6, 0.75, {1.5, 2.5}};
    const MatchResult back = match_result_from_json(to_json(r));
    CHECK(back.piece_id == "p");
    CHECK(back.rotation == 12);
    CHECK(back.w == 5);
    CHECK(back.match_value == 0.75);
    CHECK(back.unrotated_center.y == 2.5);
    CHECK_THROWS_AS(match_result_from_json(json{{"rotation", 1}}), InputError);

    OracleRecord o;
    o.piece_id = "n_003";
    o.ground_truth_id = "n";
    o.polygon = {{0, 0}, {10, 0}, {10, 5}};
    o.center = {6.6, 1.6};
    o.scan_rotation = 200;
    o.source_box = {0, 0, 11, 6};
    o.margin = 12;
    const OracleRecord ob = oracle_from_json(json::parse(to_json(o).dump()));
    CHECK(ob.polygon.size() == 3);
    CHECK(ob.polygon[2].y == 5.0);
    CHECK(ob.source_box == o.source_box);
    CHECK(ob.scan_rotation == 200);
    CHECK_THROWS_AS(oracle_from_json(json::object()), InputError);
}

TEST_CASE("ledger JSON accepts decimal strings and numbers") {
    const json j = {{"gross_paperweight_g", "175.6"}, {"empty_container_g", 60},   {"stones_g", "87.7"},
                    {"bag_gross_g", "39.4"},          {"bag_tare_g", 11.1},        {"per_note_g", "1.4"},
                    {"claimed_notes", 138}};
    const audit::AuditLedger l = ledger_from_json(j);
    CHECK(l.bag_tare.milligrams() == 11100);
    CHECK(l.empty_container.milligrams() == 60000);
    CHECK(l.claimed_notes == 138);
    json bad = j;
    bad["stones_g"] = true;
    CHECK_THROWS_AS(ledger_from_json(bad), InputError);
    bad = j;
    bad.erase("claimed_notes");
    CHECK_THROWS_AS(ledger_from_json(bad), InputError);
}

TEST_CASE("mask images round trip") {
    std::mt19937_64 rng(81);
    const BinaryMask m = oracle::random_mask(rng, 17, 9, 0.5);
    CHECK(mask_from_image(mask_image(m)) == m);
}

TEST_CASE("mapping panel lays the three images out left to right") {
    const RasterImage a(30, 20, kRed), b(10, 40, Rgb{0, 0, 255}), c(5, 5, Rgb{0, 255, 0});
    const RasterImage p = mapping_panel(a, b, c);
    CHECK(p.width() == 30 + 10 + 5 + 4 * 16);
    CHECK(p.height() == 40 + 2 * 16);
    CHECK(p.at(16, 16) == kRed);
    CHECK(p.at(16 + 30 + 16, 16) == Rgb{0, 0, 255});
    CHECK(p.at(0, 0) == kWhite);
}

TEST_CASE("pipeline matches regular pieces and routes serial pieces away") {
    const RasterImage note = synth_note(240, 160, 91);
    const GroundTruthSet set({make_entry("note", note)}, 10);

    // Two pieces on one scan: a clean crop, and a crop with a serial printed on it.
    RasterImage scan(300, 160, kWhite);
    paste(scan, crop(note, {20, 30, 70, 60}), 10, 10);
    RasterImage serial = crop(note, {120, 40, 110, 70});
    render_digits(serial, 6, 20, "7715", 2, Rgb{10, 10, 10});
    paste(scan, serial, 150, 60);
    RasterImage tiny(60, 40, kWhite);
    paste(tiny, crop(note, {150, 120, 20, 20}), 20, 10);

    PipelineConfig cfg;
    cfg.match.rotation_step = 10;
    const auto out = run_pipeline(set, {{"scan", scan}, {"tiny", tiny}}, cfg);
    REQUIRE(out.size() == 3);
    CHECK(out[0].piece_id == "scan_0");
    CHECK(out[0].status == PieceStatus::Serial);
    CHECK(out[0].matches.empty());
    CHECK(out[1].piece_id == "scan_1");
    REQUIRE(out[1].status == PieceStatus::Matched);
    CHECK(out[1].matches[0].rotation == 0);
    CHECK(out[1].matches[0].unrotated_center.x == doctest::Approx(20 + 34.5).epsilon(0.02));
    CHECK(out[1].matches[0].unrotated_center.y == doctest::Approx(30 + 29.5).epsilon(0.02));
    CHECK(out[2].piece_id == "tiny");
    CHECK(out[2].status == PieceStatus::TemplateTooSmall);
    CHECK(std::string(to_string(PieceStatus::TemplateTooSmall)) == "template too small");
}
