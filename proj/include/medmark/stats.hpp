#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace medmark {

// Discordant-pair table for two classifiers scored on the same items.
// b = n01 (A wrong, B right), c = n10 (A right, B wrong).
struct PairedOutcomes {
    std::uint64_t n00 = 0;
    std::uint64_t n01 = 0;
    std::uint64_t n10 = 0;
    std::uint64_t n11 = 0;

    std::uint64_t b() const { return n01; }
    std::uint64_t c() const { return n10; }
    std::uint64_t total() const { return n00 + n01 + n10 + n11; }
};

enum class McNemarMethod {
    Chi2CC,  // continuity-corrected chi-square, the default
    Exact,   // two-sided binomial(min(b,c); b+c, 1/2)
    Auto,    // Exact when b+c < 25, Chi2CC otherwise
};

struct McNemarResult {
    double statistic = 0.0;  // chi-square value; 0 for the exact method
    double p_value = 1.0;
    McNemarMethod method_used = McNemarMethod::Chi2CC;
};

// Chi2CC: chi2 = max(|b-c|-1, 0)^2 / (b+c), p = upper tail of chi-square
// with one degree of freedom. Exact: p = min(1, 2*P(X <= min(b,c))) with
// X ~ Binomial(b+c, 1/2). Requires b+c >= 1.
McNemarResult mcnemar(const PairedOutcomes& po, McNemarMethod method = McNemarMethod::Chi2CC);

// Tally (A wrong/right x B wrong/right); labels and predictions are 0/1.
PairedOutcomes paired_outcomes(const std::vector<int>& labels, const std::vector<int>& preds_a,
                               const std::vector<int>& preds_b);

// acc - baseline for each entry; all values must lie in [0,1].
std::vector<double> zero_normalized_deltas(double baseline_acc, const std::vector<double>& accs);

}  // namespace medmark
