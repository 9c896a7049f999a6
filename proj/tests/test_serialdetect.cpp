#include "doctest.h"
#include "shredmap/error.hpp"
#include "shredmap/serialdetect.hpp"
#include "shredmap/shredsim.hpp"

using namespace shredmap;

namespace {

Segment piece_with_digits(int w, int h, const std::string& digits, int scale, std::uint64_t seed = 61) {
    RasterImage scan(w + 40, h + 40, kWhite);
    RasterImage note = synth_note(w, h, seed);
    if (!digits.empty()) render_digits(note, 10, h / 2 - 4 * scale, digits, scale, Rgb{20, 20, 30});
    paste(scan, note, 20, 20);
    auto segs = segment_scan(scan);
    REQUIRE(segs.size() == 1);
    return segs[0];
}

}  // namespace

TEST_CASE("a row of serial digits reads as S, a plain note as R") {
    const PieceLabel s = classify(piece_with_digits(200, 80, "0724158", 2), {}, "s1");
    CHECK(s.label == PieceClass::Serial);
    CHECK(s.piece_id == "s1");
    CHECK(s.evidence.size() >= 5);
    CHECK(s.confidence > 0.5);
    for (std::size_t i = 1; i < s.evidence.size(); ++i) CHECK(s.evidence[i].x > s.evidence[i - 1].x);

    const PieceLabel r = classify(piece_with_digits(200, 80, "", 2));
    CHECK(r.label == PieceClass::Regular);
    CHECK(r.evidence.empty());
    CHECK(r.confidence < 0.25);
    CHECK(std::string(to_string(PieceClass::Serial)) == "S");
    CHECK(std::string(to_string(PieceClass::Regular)) == "R");
}

TEST_CASE("too few glyphs stay regular") {
    CHECK(classify(piece_with_digits(200, 80, "42", 2)).label == PieceClass::Regular);
}

TEST_CASE("scaling the detector with the image preserves the decision") {
    const Segment big = piece_with_digits(420, 170, "3141592", 6);
    CHECK(classify(big).label == PieceClass::Regular);  // 42 px glyphs exceed the default height range
    CHECK(classify(big, GlyphRowParams{}.scaled(3.0)).label == PieceClass::Serial);
    const GlyphRowParams p = GlyphRowParams{}.scaled(2.5);
    CHECK(p.glyph_h_min == 20);
    CHECK(p.glyph_h_max == 100);
    CHECK(p.aspect_min == GlyphRowParams{}.aspect_min);
}

TEST_CASE("confidence grows with the number of aligned glyphs") {
    const double three = classify(piece_with_digits(220, 80, "123", 2)).confidence;
    const double six = classify(piece_with_digits(220, 80, "123456", 2)).confidence;
    const double twelve = classify(piece_with_digits(320, 80, "123456789012", 2)).confidence;
    CHECK(three < six);
    CHECK(six <= twelve);
    CHECK(twelve == 1.0);
}

TEST_CASE("routing partitions pieces stably") {
    std::vector<Segment> pieces(4);
    for (int i = 0; i < 4; ++i) pieces[i].origin_x = i;
    std::vector<PieceLabel> labels(4);
    labels[1].label = PieceClass::Serial;
    labels[3].label = PieceClass::Serial;
    const auto [regular, serial] = route(pieces, labels);
    REQUIRE(regular.size() == 2);
    REQUIRE(serial.size() == 2);
    CHECK(regular[0].origin_x == 0);
    CHECK(regular[1].origin_x == 2);
    CHECK(serial[0].origin_x == 1);
    CHECK(serial[1].origin_x == 3);
    const auto idx = route_indices(labels);
    CHECK(idx.first == std::vector<std::size_t>{0, 2});
    CHECK(idx.second == std::vector<std::size_t>{1, 3});
    labels.pop_back();
    CHECK_THROWS_AS(route(pieces, labels), Error);
}
