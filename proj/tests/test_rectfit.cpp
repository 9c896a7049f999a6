#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "shredmap/error.hpp"
#include "shredmap/rectfit.hpp"

using namespace shredmap;

TEST_CASE("largest interior rectangle matches brute force") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<int> dim(1, 24);
        const int w = dim(rng), h = dim(rng);
        const BinaryMask m = trial % 2 ? oracle::random_blob_mask(rng, w, h) : oracle::random_mask(rng, w, h, 0.8);
        if (m.count() == 0) {
            CHECK_THROWS_WITH(largest_interior_rect(m), "empty mask");
            continue;
        }
        const RectRegion r = largest_interior_rect(m);
        CHECK(r.area() == oracle::brute_max_rect_area(m));
        CHECK(r.x >= 0);
        CHECK(r.y >= 0);
        CHECK(r.x + r.w <= w);
        CHECK(r.y + r.h <= h);
        CHECK(oracle::rect_all_true(m, r));
    }
}

TEST_CASE("ties prefer the wider rectangle, then the topmost, then the leftmost") {
    // A 2x3 vertical and a 3x2 horizontal block of equal area.
    BinaryMask m(10, 10);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 2; ++x) m.set(x, y, true);
    for (int y = 6; y < 8; ++y)
        for (int x = 5; x < 8; ++x) m.set(x, y, true);
    CHECK(largest_interior_rect(m) == RectRegion{5, 6, 3, 2});

    BinaryMask two(9, 5);
    for (int x : {0, 1, 6, 7}) {
        two.set(x, 3, true);
        two.set(x, 4, true);
    }
    for (int x : {4, 5}) {
        two.set(x, 1, true);
        two.set(x, 2, true);
    }
    CHECK(largest_interior_rect(two) == RectRegion{4, 1, 2, 2});
}

TEST_CASE("rotate_mask agrees with quarter turns and keeps area roughly") {
    std::mt19937_64 rng(22);
    const BinaryMask m = oracle::random_blob_mask(rng, 19, 11);
    const BinaryMask q = rotate_mask(m, 90);
    CHECK(q.width() == 11);
    CHECK(q.height() == 19);
    CHECK(q.count() == m.count());
    CHECK(rotate_mask(rotate_mask(m, 180), 180) == m);

    BinaryMask solid(60, 30, true);
    const BinaryMask r = rotate_mask(solid, 30);
    CHECK(r.count() == doctest::Approx(1800.0).epsilon(0.06));
}

TEST_CASE("best_template picks the rotation that straightens a tilted rectangle") {
    // A 60x24 textured rectangle, tilted by 20 degrees on a white scan.
    RasterImage flat(60, 24);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 60; ++x) flat.at(x, y) = {std::uint8_t(40 + x), std::uint8_t(60 + 3 * y), 90};
    const RasterImage tilted = rotate(flat, 20, kWhite);
    auto segs = segment_scan(tilted, {245, 50, 1});
    REQUIRE(segs.size() == 1);
    const TemplateChoice c = best_template(segs[0], {});
    INFO("rotation ", c.piece_rotation, " rect ", c.rect.w, "x", c.rect.h);
    // Straight up to a quarter turn; equal areas go to the smallest rotation.
    const int off = (c.piece_rotation - 340 + 360) % 90;
    CHECK((off <= 3 || off >= 87));
    CHECK(c.piece_rotation < 90);
    CHECK(c.area >= 50 * 18);
    CHECK(c.template_image.width() == c.rect.w);
    CHECK(c.template_image.height() == c.rect.h);
    CHECK(c.area == c.rect.area());
    for (const Rgb& p : c.template_image.pixels()) CHECK(std::min({p.r, p.g, p.b}) < 245);

    // The anchor is the fragment centroid seen from the template corner; for
    // a near-symmetric piece it sits near the middle of the template.
    CHECK(c.anchor.x == doctest::Approx((c.rect.w - 1) * 0.5).epsilon(0.1));
    CHECK(c.anchor.y == doctest::Approx((c.rect.h - 1) * 0.5).epsilon(0.15));
}

TEST_CASE("coarser steps never beat the full sweep") {
    RasterImage flat(50, 20, Rgb{30, 80, 120});
    const RasterImage tilted = rotate(flat, 33, kWhite);
    auto segs = segment_scan(tilted, {245, 50, 1});
    REQUIRE(segs.size() == 1);
    const long long full = best_template(segs[0], {1, 245}).area;
    for (int step : {2, 3, 5, 10, 45, 90}) {
        const TemplateChoice c = best_template(segs[0], {step, 245});
        CHECK(c.area <= full);
        CHECK(c.piece_rotation % step == 0);
    }
}

TEST_CASE("best_template validates its inputs") {
    Segment s;
    s.mask = BinaryMask(4, 4, true);
    CHECK_THROWS_WITH(best_template(s, {7, 245}), doctest::Contains("divide 360"));
    CHECK_THROWS_WITH(best_template(s, {0, 245}), doctest::Contains("divide 360"));
    s.mask = BinaryMask(4, 4, false);
    CHECK_THROWS_WITH(best_template(s, {}), "empty mask");
}

TEST_CASE("template_from_image uses the whole image and its center") {
    const TemplateChoice c = template_from_image(RasterImage(9, 4));
    CHECK(c.rect == RectRegion{0, 0, 9, 4});
    CHECK(c.area == 36);
    CHECK(c.piece_rotation == 0);
    CHECK(c.anchor.x == 4.0);
    CHECK(c.anchor.y == 1.5);
}
