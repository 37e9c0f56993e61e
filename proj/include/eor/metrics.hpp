#pragma once

#include <vector>

#include "eor/core.hpp"

namespace eor {

// Area under the unfairness curve: sum_k |delta(sigma_k)|.
double unfairnessAUC(const DeltaTrace& trace);

// Full evaluation of one ranking: the unfairness AUC, the effectiveness
// against the exact uniform cost, the per-k nDCG curve, and the delta
// trace (which carries the per-group cost curves).
struct EvalReport {
    double unfairness = 0.0;
    double effectiveness = 0.0;
    std::vector<double> ndcg;
    DeltaTrace trace;
};

EvalReport evaluate(const CandidatePool& pool, const Ranking& ranking,
                    Mode mode = Mode::Probs);

// sum_k [ c_uniform(k) - c_pi(k) ] with the exact uniform cost 1 - k/n.
double effectiveness(const DeltaTrace& trace);
double effectiveness(const CandidatePool& pool, const InclusionEstimate& incl,
                     Mode mode = Mode::Probs);

// Per-k nDCG with discount 1/log2(pos+1); the ideal ranking sorts the
// gains descending. All-zero gains define nDCG = 1 everywhere.
std::vector<double> ndcg(const CandidatePool& pool, const Ranking& ranking,
                         Mode gains = Mode::Probs);

struct CalibrationBin {
    double mean_predicted = 0.0;
    double fraction_positive = 0.0;
    std::size_t count = 0;
};

struct CalibrationCurve {
    std::vector<CalibrationBin> bins;
};

enum class Binning { EqualCount, EqualWidth };

// Reliability curve over nbins bins (equal-count by default, ties kept in
// stable order; the equal-width variant is available behind the flag).
CalibrationCurve calibrationCurve(const std::vector<double>& probs,
                                  const std::vector<int>& labels, int nbins = 20,
                                  Binning binning = Binning::EqualCount);

struct PlattParams {
    double a = 1.0;  // slope
    double b = 0.0;  // intercept
    int iterations = 0;
};

// Maximum-likelihood fit of sigmoid(a*s + b) with Platt's target smoothing
// (N+ + 1)/(N+ + 2) and 1/(N- + 2); Newton iterations until the gradient
// norm drops below 1e-8 (at most 100 steps).
PlattParams plattFit(const std::vector<double>& scores, const std::vector<int>& labels);

std::vector<double> plattApply(const PlattParams& params, const std::vector<double>& scores);

}  // namespace eor
