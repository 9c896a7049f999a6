#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "shredmap/error.hpp"
#include "shredmap/image.hpp"
#include "shredmap/shredsim.hpp"

using namespace shredmap;

namespace {

RasterImage random_raster(std::mt19937_64& rng, int w, int h) {
    std::uniform_int_distribution<int> c(0, 255);
    RasterImage img(w, h);
    for (Rgb& p : img.pixels()) p = {std::uint8_t(c(rng)), std::uint8_t(c(rng)), std::uint8_t(c(rng))};
    return img;
}

}  // namespace

TEST_CASE("to_gray uses Rec.601 luma weights") {
    RasterImage img(3, 1);
    img.at(0, 0) = kRed;
    img.at(1, 0) = kWhite;
    img.at(2, 0) = {0, 0, 0};
    const GrayImage g = to_gray(img);
    CHECK(g.at(0, 0) == doctest::Approx(0.299).epsilon(1e-12));
    CHECK(g.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.at(2, 0) == 0.0);
}

TEST_CASE("to_gray is monotone in every channel") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> c(0, 254);
    for (int i = 0; i < 500; ++i) {
        RasterImage img(2, 1);
        img.at(0, 0) = {std::uint8_t(c(rng)), std::uint8_t(c(rng)), std::uint8_t(c(rng))};
        img.at(1, 0) = img.at(0, 0);
        switch (i % 3) {
            case 0: img.at(1, 0).r++; break;
            case 1: img.at(1, 0).g++; break;
            default: img.at(1, 0).b++;
        }
        const GrayImage g = to_gray(img);
        CHECK(g.at(1, 0) > g.at(0, 0));
    }
}

TEST_CASE("rotated canvas is the tight box of the rotated pixel centers") {
    const RotationFrame f(100, 50, 30);
    CHECK(f.dst_width() == 112);
    CHECK(f.dst_height() == 93);
    CHECK(RotationFrame(100, 50, 90).dst_width() == 50);
    CHECK(RotationFrame(100, 50, 90).dst_height() == 100);
    CHECK(RotationFrame(100, 50, 180).dst_width() == 100);
    CHECK(RotationFrame(1, 1, 45).dst_width() == 1);
    const RasterImage r = rotate(RasterImage(100, 50), 30);
    CHECK(r.width() == 112);
    CHECK(r.height() == 93);
}

TEST_CASE("rotation frame maps are inverse to each other") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-20.0, 120.0);
    for (int deg : {0, 1, 17, 45, 90, 133, 180, 271, 359, -30, 725}) {
        const RotationFrame f(97, 41, deg);
        for (int i = 0; i < 50; ++i) {
            const PointF p{u(rng), u(rng)};
            const PointF q = f.to_source(f.to_rotated(p));
            CHECK(q.x == doctest::Approx(p.x).epsilon(1e-12).scale(100));
            CHECK(q.y == doctest::Approx(p.y).epsilon(1e-12).scale(100));
        }
    }
}

TEST_CASE("rotation is counter-clockwise about the center") {
    // The right-pointing x axis ends up pointing up after +90 degrees.
    const RotationFrame f(11, 11, 90);
    const PointF right = f.to_rotated({10.0, 5.0});
    CHECK(right.x == doctest::Approx(5.0));
    CHECK(right.y == doctest::Approx(0.0));
    const PointF c = f.to_rotated({5.0, 5.0});
    CHECK(c.x == doctest::Approx(5.0));
    CHECK(c.y == doctest::Approx(5.0));
}

TEST_CASE("quarter turns are lossless") {
    std::mt19937_64 rng(3);
    const RasterImage img = random_raster(rng, 13, 7);
    CHECK(rotate(img, 0) == img);
    CHECK(rotate(rotate(img, 90), 270) == img);
    CHECK(rotate(rotate(img, 180), 180) == img);
    CHECK(rotate(rotate(rotate(rotate(img, 90), 90), 90), 90) == img);
    CHECK(rotate(img, 360) == img);
    CHECK(rotate(img, -90) == rotate(img, 270));
    const RasterImage q = rotate(img, 90);
    CHECK(q.width() == 7);
    CHECK(q.height() == 13);
    // Top-right source corner goes to the top-left after a CCW quarter turn.
    CHECK(q.at(0, 0) == img.at(12, 0));
}

TEST_CASE("bilinear rotation keeps interior values and fills uncovered corners") {
    RasterImage flat(40, 20, Rgb{120, 130, 140});
    const RasterImage r = rotate(flat, 30, kWhite);
    CHECK(r.at(0, 0) == kWhite);
    CHECK(r.at(r.width() / 2, r.height() / 2) == Rgb{120, 130, 140});

    const GrayImage field(40, 20, 0.25);
    const GrayImage rf = rotate_field(field, 30, 1.0);
    CHECK(rf.at(0, 0) == 1.0);
    CHECK(rf.at(rf.width() / 2, rf.height() / 2) == doctest::Approx(0.25));
}

TEST_CASE("rotation commutes with luminance up to rounding") {
    const RasterImage note = synth_note(60, 40, 9);
    const GrayImage a = to_gray(rotate(note, 37));
    const GrayImage b = rotate_field(to_gray(note), 37, 1.0);
    REQUIRE(a.width() == b.width());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    CHECK(worst <= 0.5 / 255.0 + 1e-12);
}

TEST_CASE("normalize_degrees and exact quarter-turn trigonometry") {
    CHECK(normalize_degrees(-1) == 359);
    CHECK(normalize_degrees(720) == 0);
    CHECK(normalize_degrees(365) == 5);
    CHECK(cos_degrees(90) == 0.0);
    CHECK(sin_degrees(-90) == -1.0);
    CHECK(cos_degrees(180) == -1.0);
    CHECK(sin_degrees(30) == doctest::Approx(0.5));
}

TEST_CASE("crop copies the region and rejects out-of-bounds regions by name") {
    std::mt19937_64 rng(4);
    const RasterImage img = random_raster(rng, 10, 8);
    const RasterImage c = crop(img, {2, 3, 4, 5});
    CHECK(c.width() == 4);
    CHECK(c.height() == 5);
    CHECK(c.at(0, 0) == img.at(2, 3));
    CHECK(c.at(3, 4) == img.at(5, 7));
    CHECK_THROWS_AS(crop(img, {8, 0, 3, 1}), BoundsError);
    CHECK_THROWS_WITH(crop(img, {8, 0, 3, 1}), doctest::Contains("x+w=11"));
    CHECK_THROWS_WITH(crop(img, {0, -1, 1, 1}), doctest::Contains("y=-1"));
    CHECK_THROWS_AS(crop(img, {0, 0, 0, 1}), BoundsError);
    CHECK_THROWS_AS(crop(to_gray(img), {0, 0, 11, 1}), BoundsError);
}

TEST_CASE("integral image rectangle queries equal direct sums") {
    std::mt19937_64 rng(5);
    const GrayImage g = oracle::random_gray(rng, 23, 17);
    const IntegralImage t = integral(g);
    std::uniform_int_distribution<int> xs(0, 22), ys(0, 16);
    for (int i = 0; i < 300; ++i) {
        int x0 = xs(rng), x1 = xs(rng), y0 = ys(rng), y1 = ys(rng);
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        double s = 0.0, s2 = 0.0;
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                s += g.at(x, y);
                s2 += g.at(x, y) * g.at(x, y);
            }
        CHECK(t.rect_sum(x0, y0, x1 - x0 + 1, y1 - y0 + 1) == doctest::Approx(s).epsilon(1e-12));
        CHECK(t.rect_sumsq(x0, y0, x1 - x0 + 1, y1 - y0 + 1) == doctest::Approx(s2).epsilon(1e-12));
    }
    CHECK(t.sum_entry(0, 5) == 0.0);
    CHECK(t.sum_entry(7, 0) == 0.0);
}

TEST_CASE("constant-window detection is exact") {
    std::mt19937_64 rng(6);
    GrayImage g(20, 12, 0.5);
    std::uniform_int_distribution<int> xs(0, 19), ys(0, 11), ws(1, 20), hs(1, 12);
    for (int k = 0; k < 6; ++k) g.at(xs(rng), ys(rng)) = 0.5 + 1e-15;
    const IntegralImage t(g);
    for (int i = 0; i < 400; ++i) {
        const int x = xs(rng), y = ys(rng);
        const int w = std::min(ws(rng), 20 - x), h = std::min(hs(rng), 12 - y);
        bool constant = true;
        for (int v = y; v < y + h; ++v)
            for (int u = x; u < x + w; ++u) constant = constant && g.at(u, v) == g.at(x, y);
        CHECK(t.rect_constant(x, y, w, h) == constant);
    }
}

TEST_CASE("downsample2 averages 2x2 blocks and drops odd edges") {
    GrayImage g(5, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) g.at(x, y) = x + 10 * y;
    const GrayImage d = downsample2(g);
    CHECK(d.width() == 2);
    CHECK(d.height() == 1);
    CHECK(d.at(0, 0) == doctest::Approx(5.5));
    CHECK(d.at(1, 0) == doctest::Approx(7.5));
}

TEST_CASE("paste clips at the destination border") {
    RasterImage dst(4, 4, kWhite);
    const RasterImage src(3, 3, kRed);
    paste(dst, src, 2, -1);
    CHECK(dst.at(2, 0) == kRed);
    CHECK(dst.at(3, 1) == kRed);
    CHECK(dst.at(3, 2) == kWhite);
    CHECK(dst.at(1, 0) == kWhite);
}
