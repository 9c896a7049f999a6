#include <cmath>
#include <random>

#include "doctest.h"
#include "shredmap/audit.hpp"
#include "shredmap/error.hpp"

using namespace shredmap;
using audit::Grams;

namespace {

audit::AuditLedger souvenir() {
    audit::AuditLedger l;
    l.gross_paperweight = Grams::parse("175.6");
    l.empty_container = Grams::parse("60.0");
    l.stones = Grams::parse("87.7");
    l.bag_gross = Grams::parse("39.4");
    l.bag_tare = Grams::parse("11.1");
    l.per_note = Grams::parse("1.4");
    l.claimed_notes = 138;
    return l;
}

}  // namespace

TEST_CASE("grams parse exactly and print shortest") {
    CHECK(Grams::parse("39.4").milligrams() == 39400);
    CHECK(Grams::parse(" 11.1 ").milligrams() == 11100);
    CHECK(Grams::parse("7").milligrams() == 7000);
    CHECK(Grams::parse(".5").milligrams() == 500);
    CHECK(Grams::parse("1.234").milligrams() == 1234);
    CHECK(Grams::parse("-2.5").milligrams() == -2500);
    CHECK(Grams::parse("39.4").str() == "39.4");
    CHECK(Grams::parse("7").str() == "7.0");
    CHECK(Grams::parse("1.230").str() == "1.23");
    CHECK(Grams::parse("-0.05").str() == "-0.05");
    // Decimal subtraction is exact: 39.4 - 11.1 is 28.3, not 28.299999...
    CHECK((Grams::parse("39.4") - Grams::parse("11.1")).str() == "28.3");
    for (const char* bad : {"", ".", "abc", "1.2345", "1,5", "1.5g", "--1", "1e3"}) {
        CHECK_THROWS_AS(Grams::parse(bad), InputError);
    }
}

TEST_CASE("grams str round-trips through parse") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::int64_t> mg(-10'000'000, 10'000'000);
    for (int i = 0; i < 1000; ++i) {
        const Grams g = Grams::from_milligrams(mg(rng));
        CHECK(Grams::parse(g.str()) == g);
    }
}

TEST_CASE("souvenir ledger arithmetic") {
    const audit::AuditLedger l = souvenir();
    const audit::AuditReport r = audit::run_audit(l);
    CHECK(r.net_shreds_g == doctest::Approx(28.3));
    CHECK(r.equivalent_notes == doctest::Approx(28.3 / 1.4));
    CHECK(r.rounded_notes == 20);
    CHECK(r.claim_fraction == doctest::Approx(28.3 / 1.4 / 138));
    CHECK(r.rounded_claim_fraction == doctest::Approx(20.0 / 138));
    CHECK(r.mass_balance_residual_g == doctest::Approx(0.4));
    CHECK(r.full_cylinder_shreds_g == doctest::Approx(115.6));
    CHECK(r.full_cylinder_equivalent_notes == doctest::Approx(115.6 / 1.4));
    CHECK(r.full_cylinder_claim_fraction == doctest::Approx(115.6 / 1.4 / 138));

    const std::string table = audit::format_report(l, r);
    CHECK(table.find("39.4 - 11.1 = 28.3 g") != std::string::npos);
    CHECK(table.find("20.21") != std::string::npos);
    CHECK(table.find("20 / 138 = 14.5%") != std::string::npos);
    CHECK(table.find("82.57") != std::string::npos);
}

TEST_CASE("equivalent notes scale linearly") {
    for (double w : {0.0, 1.4, 2.8, 28.3, 100.0}) {
        CHECK(audit::equivalent_notes(2 * w, 1.4) == doctest::Approx(2 * audit::equivalent_notes(w, 1.4)));
        CHECK(audit::equivalent_notes(w, 2.8) == doctest::Approx(audit::equivalent_notes(w, 1.4) / 2));
    }
    CHECK(audit::claim_fraction(69, 138) == 0.5);
}

TEST_CASE("ledger validation") {
    CHECK_THROWS_AS(audit::equivalent_notes(1.0, 0.0), Error);
    CHECK_THROWS_AS(audit::claim_fraction(1.0, 0.0), Error);

    audit::AuditLedger l = souvenir();
    l.bag_tare = Grams::parse("40.0");
    CHECK_THROWS_WITH(audit::run_audit(l), doctest::Contains("below its tare"));
    l = souvenir();
    l.per_note = Grams();
    CHECK_THROWS_AS(audit::run_audit(l), Error);
    l = souvenir();
    l.claimed_notes = 0;
    CHECK_THROWS_AS(audit::run_audit(l), Error);
    l = souvenir();
    l.stones = Grams::parse("-1");
    CHECK_THROWS_WITH(audit::run_audit(l), doctest::Contains(">= 0"));
    CHECK_NOTHROW(audit::run_audit(souvenir()));
}
