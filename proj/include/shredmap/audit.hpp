#pragma once

// Weight bookkeeping for a shredded-note souvenir: net shred weight,
// equivalent note count, fraction of the labelled claim, and mass balance.

#include <cstdint>
#include <string>

namespace shredmap::audit {

// Exact decimal grams, stored as milligrams. Scale readouts carry one
// fractional digit; up to three are accepted.
class Grams {
public:
    constexpr Grams() = default;
    static constexpr Grams from_milligrams(std::int64_t mg) { return Grams(mg); }
    // Throws shredmap::InputError on malformed text.
    static Grams parse(const std::string& text);

    constexpr std::int64_t milligrams() const { return mg_; }
    constexpr double value() const { return static_cast<double>(mg_) / 1000.0; }
    std::string str() const;  // shortest form, at least one fractional digit

    friend constexpr Grams operator+(Grams a, Grams b) { return Grams(a.mg_ + b.mg_); }
    friend constexpr Grams operator-(Grams a, Grams b) { return Grams(a.mg_ - b.mg_); }
    friend constexpr auto operator<=>(Grams, Grams) = default;

private:
    constexpr explicit Grams(std::int64_t mg) : mg_(mg) {}
    std::int64_t mg_ = 0;
};

struct AuditLedger {
    Grams gross_paperweight;  // sealed souvenir
    Grams empty_container;
    Grams stones;
    Grams bag_gross;  // bag holding every shred
    Grams bag_tare;   // the same bag empty
    Grams per_note;
    long long claimed_notes = 0;

    void validate() const;  // throws shredmap::Error
};

Grams net_shreds(Grams bag_gross, Grams bag_tare);
double equivalent_notes(double net_g, double per_note_g);
double claim_fraction(double equivalent, double claimed);
double mass_balance(const AuditLedger& ledger);  // grams, container+stones+shreds-gross

struct AuditReport {
    double net_shreds_g = 0.0;
    double equivalent_notes = 0.0;
    double claim_fraction = 0.0;
    long long rounded_notes = 0;  // equivalent_notes to the nearest whole note
    double rounded_claim_fraction = 0.0;
    double mass_balance_residual_g = 0.0;
    // Had the container held nothing but shreds.
    double full_cylinder_shreds_g = 0.0;
    double full_cylinder_equivalent_notes = 0.0;
    double full_cylinder_claim_fraction = 0.0;
};

AuditReport run_audit(const AuditLedger& ledger);

// Plain-text derivation table.
std::string format_report(const AuditLedger& ledger, const AuditReport& report);

}  // namespace shredmap::audit
