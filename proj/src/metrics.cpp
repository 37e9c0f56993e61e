#include "eor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eor/numeric.hpp"

namespace eor {

double unfairnessAUC(const DeltaTrace& trace) {
    KahanAccumulator acc;
    for (double d : trace.delta) acc.add(std::fabs(d));
    return acc.value();
}

double effectiveness(const DeltaTrace& trace) {
    const double n = static_cast<double>(trace.n);
    KahanAccumulator acc;
    for (std::size_t k = 1; k <= trace.n; ++k)
        acc.add((1.0 - static_cast<double>(k) / n) - trace.total_cost[k - 1]);
    return acc.value();
}

double effectiveness(const CandidatePool& pool, const InclusionEstimate& incl, Mode mode) {
    const double n = static_cast<double>(pool.size());
    KahanAccumulator acc;
    for (std::size_t k = 1; k <= pool.size(); ++k)
        acc.add((1.0 - static_cast<double>(k) / n) - totalCost(pool, incl, k, mode));
    return acc.value();
}

EvalReport evaluate(const CandidatePool& pool, const Ranking& ranking, Mode mode) {
    EvalReport report;
    report.trace = deltaTrace(pool, ranking, mode);
    report.unfairness = unfairnessAUC(report.trace);
    report.effectiveness = effectiveness(report.trace);
    report.ndcg = ndcg(pool, ranking, mode);
    return report;
}

std::vector<double> ndcg(const CandidatePool& pool, const Ranking& ranking, Mode gains) {
    validateRanking(pool, ranking);
    const std::size_t m = ranking.size();
    std::vector<double> gain_sorted(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) gain_sorted[i] = pool.relevance(i, gains);
    std::sort(gain_sorted.begin(), gain_sorted.end(), std::greater<>());

    bool all_zero = gain_sorted.empty() || gain_sorted.front() <= 0.0;
    std::vector<double> out(m, 1.0);
    if (all_zero) return out;  // 0/0 convention: perfectly ordered

    KahanAccumulator dcg, idcg;
    for (std::size_t pos = 0; pos < m; ++pos) {
        double discount = 1.0 / std::log2(static_cast<double>(pos) + 2.0);
        dcg.add(pool.relevance(ranking[pos], gains) * discount);
        idcg.add(gain_sorted[pos] * discount);
        out[pos] = idcg.value() > 0.0 ? dcg.value() / idcg.value() : 1.0;
    }
    return out;
}

CalibrationCurve calibrationCurve(const std::vector<double>& probs,
                                  const std::vector<int>& labels, int nbins, Binning binning) {
    if (labels.size() != probs.size() || probs.empty())
        throw MissingLabels("calibration needs one label per probability");
    if (nbins < 1) throw BadParams("need at least one bin");

    std::vector<std::size_t> idx(probs.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

    CalibrationCurve curve;
    auto flush = [&](std::size_t lo, std::size_t hi) {  // [lo, hi) over sorted order
        if (hi <= lo) return;
        KahanAccumulator pred;
        std::size_t pos = 0;
        for (std::size_t r = lo; r < hi; ++r) {
            pred.add(probs[idx[r]]);
            pos += static_cast<std::size_t>(labels[idx[r]] != 0);
        }
        CalibrationBin bin;
        bin.count = hi - lo;
        bin.mean_predicted = pred.value() / static_cast<double>(bin.count);
        bin.fraction_positive = static_cast<double>(pos) / static_cast<double>(bin.count);
        curve.bins.push_back(bin);
    };

    const std::size_t n = probs.size();
    if (binning == Binning::EqualCount) {
        std::size_t bins = std::min<std::size_t>(nbins, n);
        std::size_t base = n / bins, extra = n % bins;
        std::size_t lo = 0;
        for (std::size_t b = 0; b < bins; ++b) {
            std::size_t len = base + (b < extra ? 1 : 0);
            flush(lo, lo + len);
            lo += len;
        }
    } else {
        std::size_t lo = 0;
        for (int b = 0; b < nbins; ++b) {
            double edge = static_cast<double>(b + 1) / nbins;
            std::size_t hi = lo;
            while (hi < n && (probs[idx[hi]] < edge || b + 1 == nbins)) ++hi;
            flush(lo, hi);  // empty width bins are skipped
            lo = hi;
        }
    }
    return curve;
}

PlattParams plattFit(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw BadParams("need one label per score");
    std::size_t pos = 0;
    for (int l : labels) pos += static_cast<std::size_t>(l != 0);
    std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        throw SingleClass("Platt scaling needs both classes present");

    // Platt's smoothed targets.
    const double t_pos = (static_cast<double>(pos) + 1.0) / (static_cast<double>(pos) + 2.0);
    const double t_neg = 1.0 / (static_cast<double>(neg) + 2.0);

    double a = 1.0, b = 0.0;
    auto negLogLik = [&](double aa, double bb) {
        KahanAccumulator ll;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            double t = labels[i] ? t_pos : t_neg;
            double z = aa * scores[i] + bb;
            // -[t log p + (1-t) log(1-p)] in the overflow-safe form
            double l = (z >= 0.0) ? (std::log1p(std::exp(-z)) + (1.0 - t) * z)
                                  : (std::log1p(std::exp(z)) - t * z);
            ll.add(l);
        }
        return ll.value();
    };

    PlattParams params;
    double f = negLogLik(a, b);
    for (int it = 0; it < 100; ++it) {
        double g0 = 0.0, g1 = 0.0, h00 = 1e-12, h01 = 0.0, h11 = 1e-12;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            double t = labels[i] ? t_pos : t_neg;
            double z = a * scores[i] + b;
            double p = 1.0 / (1.0 + std::exp(-z));
            double d = p - t;
            double w = std::max(p * (1.0 - p), 1e-12);
            g0 += d * scores[i];
            g1 += d;
            h00 += w * scores[i] * scores[i];
            h01 += w * scores[i];
            h11 += w;
        }
        params.iterations = it + 1;
        if (std::sqrt(g0 * g0 + g1 * g1) < 1e-8) break;
        double det = h00 * h11 - h01 * h01;
        if (std::fabs(det) < 1e-300) break;
        double step_a = (h11 * g0 - h01 * g1) / det;
        double step_b = (h00 * g1 - h01 * g0) / det;
        double scale = 1.0;
        for (int half = 0; half < 32; ++half) {  // damped Newton
            double fa = negLogLik(a - scale * step_a, b - scale * step_b);
            if (fa <= f + 1e-12) {
                a -= scale * step_a;
                b -= scale * step_b;
                f = fa;
                break;
            }
            scale *= 0.5;
        }
    }
    params.a = a;
    params.b = b;
    return params;
}

std::vector<double> plattApply(const PlattParams& params, const std::vector<double>& scores) {
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        out[i] = 1.0 / (1.0 + std::exp(-(params.a * scores[i] + params.b)));
    return out;
}

}  // namespace eor
