#include "shredmap/audit.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "shredmap/error.hpp"

namespace shredmap::audit {

Grams Grams::parse(const std::string& text) {
    auto fail = [&] { throw InputError("malformed weight '" + text + "' (expected grams like 39.4)"); };
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
    std::int64_t whole = 0;
    int int_digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        whole = whole * 10 + (text[i++] - '0');
        if (++int_digits > 12) fail();
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (++frac_digits > 3) fail();
            frac = frac * 10 + (text[i++] - '0');
        }
    }
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i != text.size() || (int_digits == 0 && frac_digits == 0)) fail();
    for (int d = frac_digits; d < 3; ++d) frac *= 10;
    const std::int64_t mg = whole * 1000 + frac;
    return Grams(negative ? -mg : mg);
}

std::string Grams::str() const {
    const std::int64_t a = mg_ < 0 ? -mg_ : mg_;
    std::string frac = std::to_string(1000 + a % 1000).substr(1);
    while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
    return (mg_ < 0 ? "-" : "") + std::to_string(a / 1000) + "." + frac;
}

void AuditLedger::validate() const {
    const Grams zero;
    if (gross_paperweight < zero || empty_container < zero || stones < zero || bag_gross < zero ||
        bag_tare < zero) {
        throw Error("weights must be >= 0");
    }
    if (per_note <= zero) throw Error("per-note weight must be > 0");
    if (claimed_notes <= 0) throw Error("claimed note count must be > 0");
}

Grams net_shreds(Grams bag_gross, Grams bag_tare) {
    if (bag_gross < bag_tare) {
        throw Error("bag gross weight " + bag_gross.str() + " g is below its tare " + bag_tare.str() + " g");
    }
    return bag_gross - bag_tare;
}

double equivalent_notes(double net_g, double per_note_g) {
    if (!(per_note_g > 0.0)) throw Error("per-note weight must be > 0");
    return net_g / per_note_g;
}

double claim_fraction(double equivalent, double claimed) {
    if (!(claimed > 0.0)) throw Error("claimed note count must be > 0");
    return equivalent / claimed;
}

double mass_balance(const AuditLedger& l) {
    const Grams shreds = l.bag_gross - l.bag_tare;
    return (l.empty_container + l.stones + shreds - l.gross_paperweight).value();
}

AuditReport run_audit(const AuditLedger& l) {
    l.validate();
    AuditReport r;
    const Grams net = net_shreds(l.bag_gross, l.bag_tare);
    r.net_shreds_g = net.value();
    r.equivalent_notes = equivalent_notes(r.net_shreds_g, l.per_note.value());
    r.claim_fraction = claim_fraction(r.equivalent_notes, static_cast<double>(l.claimed_notes));
    r.rounded_notes = std::llround(r.equivalent_notes);
    r.rounded_claim_fraction =
        claim_fraction(static_cast<double>(r.rounded_notes), static_cast<double>(l.claimed_notes));
    r.mass_balance_residual_g = mass_balance(l);
    const Grams full = l.gross_paperweight - l.empty_container;
    r.full_cylinder_shreds_g = full.value();
    r.full_cylinder_equivalent_notes = equivalent_notes(r.full_cylinder_shreds_g, l.per_note.value());
    r.full_cylinder_claim_fraction =
        claim_fraction(r.full_cylinder_equivalent_notes, static_cast<double>(l.claimed_notes));
    return r;
}

std::string format_report(const AuditLedger& l, const AuditReport& r) {
    std::ostringstream out;
    char line[160];
    auto row = [&](const char* label, const std::string& value) {
        std::snprintf(line, sizeof line, "  %-44s %s\n", label, value.c_str());
        out << line;
    };
    auto num = [](double v, int digits) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", digits, v);
        return std::string(buf);
    };
    const Grams net = l.bag_gross - l.bag_tare;

    out << "Shred weight\n";
    row("bag with shreds", l.bag_gross.str() + " g");
    row("empty bag", l.bag_tare.str() + " g");
    row("shreds = bag with shreds - empty bag", l.bag_gross.str() + " - " + l.bag_tare.str() + " = " +
                                                    net.str() + " g");
    out << "Mass balance\n";
    row("container + stones + shreds", l.empty_container.str() + " + " + l.stones.str() + " + " + net.str() +
                                           " = " + (l.empty_container + l.stones + net).str() + " g");
    row("sealed souvenir", l.gross_paperweight.str() + " g");
    row("residual", num(r.mass_balance_residual_g, 1) + " g");
    out << "Equivalent notes\n";
    row("shreds / one note", net.str() + " / " + l.per_note.str() + " = " + num(r.equivalent_notes, 2));
    row("fraction of claim", num(r.equivalent_notes, 2) + " / " + std::to_string(l.claimed_notes) + " = " +
                                 num(100.0 * r.claim_fraction, 1) + "%");
    row("rounded", std::to_string(r.rounded_notes) + " / " + std::to_string(l.claimed_notes) + " = " +
                       num(100.0 * r.rounded_claim_fraction, 1) + "%");
    out << "If the container held only shreds\n";
    row("souvenir - container", l.gross_paperweight.str() + " - " + l.empty_container.str() + " = " +
                                    num(r.full_cylinder_shreds_g, 1) + " g");
    row("equivalent notes", num(r.full_cylinder_equivalent_notes, 2));
    row("fraction of claim", num(100.0 * r.full_cylinder_claim_fraction, 1) + "%");
    return out.str();
}

}  // namespace shredmap::audit
