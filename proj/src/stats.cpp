#include "medmark/stats.hpp"

#include <cmath>

#include "medmark/errors.hpp"

namespace medmark {

namespace {

// P(X <= k) for X ~ Binomial(n, 1/2), summed in log space for large n.
double binomial_cdf_half(std::uint64_t k, std::uint64_t n) {
    double cdf = 0.0;
    double log_pmf = -static_cast<double>(n) * std::log(2.0);  // P(X=0)
    for (std::uint64_t i = 0; i <= k; ++i) {
        if (i > 0) {
            log_pmf += std::log(static_cast<double>(n - i + 1)) - std::log(static_cast<double>(i));
        }
        cdf += std::exp(log_pmf);
    }
    return cdf;
}

}  // namespace

McNemarResult mcnemar(const PairedOutcomes& po, McNemarMethod method) {
    const std::uint64_t b = po.b();
    const std::uint64_t c = po.c();
    if (b + c == 0) throw ArgumentError("McNemar needs at least one discordant pair");

    if (method == McNemarMethod::Auto) {
        method = (b + c < 25) ? McNemarMethod::Exact : McNemarMethod::Chi2CC;
    }

    McNemarResult res;
    res.method_used = method;
    if (method == McNemarMethod::Exact) {
        const std::uint64_t lo = b < c ? b : c;
        const double p = 2.0 * binomial_cdf_half(lo, b + c);
        res.statistic = 0.0;
        res.p_value = p < 1.0 ? p : 1.0;
        return res;
    }

    const double diff = b > c ? static_cast<double>(b - c) : static_cast<double>(c - b);
    const double adj = diff > 1.0 ? diff - 1.0 : 0.0;  // continuity correction, clamped
    res.statistic = adj * adj / static_cast<double>(b + c);
    // upper tail of chi-square with 1 dof
    res.p_value = std::erfc(std::sqrt(res.statistic / 2.0));
    return res;
}

PairedOutcomes paired_outcomes(const std::vector<int>& labels, const std::vector<int>& preds_a,
                               const std::vector<int>& preds_b) {
    if (labels.empty()) throw ArgumentError("paired outcomes need at least one item");
    if (labels.size() != preds_a.size() || labels.size() != preds_b.size()) {
        throw ArgumentError("labels and predictions have different lengths");
    }

    PairedOutcomes po;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i], a = preds_a[i], pb = preds_b[i];
        if ((y != 0 && y != 1) || (a != 0 && a != 1) || (pb != 0 && pb != 1)) {
            throw ArgumentError("labels and predictions must be binary 0/1");
        }
        const bool a_right = a == y;
        const bool b_right = pb == y;
        if (!a_right && !b_right) ++po.n00;
        else if (!a_right && b_right) ++po.n01;
        else if (a_right && !b_right) ++po.n10;
        else ++po.n11;
    }
    return po;
}

std::vector<double> zero_normalized_deltas(double baseline_acc, const std::vector<double>& accs) {
    if (baseline_acc < 0.0 || baseline_acc > 1.0) throw ArgumentError("baseline accuracy outside [0,1]");
    std::vector<double> out;
    out.reserve(accs.size());
    for (double a : accs) {
        if (a < 0.0 || a > 1.0) throw ArgumentError("accuracy outside [0,1]");
        out.push_back(a - baseline_acc);
    }
    return out;
}

}  // namespace medmark
