#pragma once

#include <cstdint>
#include <vector>

#include "eor/core.hpp"

namespace eor {

enum class Relation { LessEq, Equal, GreaterEq };

struct LpConstraint {
    std::vector<double> coeffs;
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
};

// Dense LP instance: maximize objective . x subject to the constraint rows
// and per-variable bounds [lower, upper] (upper may be +infinity).
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LpConstraint> constraints;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t varCount() const { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective_value = 0.0;
    int iterations = 0;
};

// Two-phase dense-tableau simplex. Dantzig pricing with a permanent switch
// to Bland's rule after a degenerate stall, which guarantees termination.
// Tolerances: pivot 1e-11, feasibility 1e-8, optimality 1e-9.
LPSolution simplexSolve(const LinearProgram& lp);

enum class IlpMethod {
    // Restricted search over per-group PRP prefixes. Whenever the cap comes
    // from a group-prefix solution (the EOR trace) this is feasible and a
    // lower bound on the true optimum; it is NOT exact in general, because
    // a tight cap can force a non-prefix selection inside a group.
    GroupPrefix,
    // Every C(n,k) subset; n <= 24. The exact ILP and the oracle.
    Exhaustive,
};

struct IlpResult {
    std::vector<std::uint32_t> subset;
    double objective = 0.0;  // sum of selected probs
};

// Best size-k subset maximizing sum p_i subject to the pairwise constraint
// |sum_{i in g} q_i - sum_{i in h} q_i| <= delta_cap, q_i = p_i/nRel(g).
IlpResult ilpTopK(const CandidatePool& pool, std::size_t k, double delta_cap,
                  IlpMethod method = IlpMethod::GroupPrefix);

// LP relaxation of the top-k selection problem (x in [0,1]^n, sum x <= k,
// G(G-1) pairwise delta rows). objective_value is in sum-of-probs units.
LPSolution eorPrimalLP(const CandidatePool& pool, std::size_t k, double delta_cap);

// Dual variables constructed from the EOR solution at prefix k, the
// certified duality gap and the phi*delta optimality bound. All
// *_objective fields are in normalized (cost-fraction) units.
struct DualCertificate {
    std::size_t k = 0;
    int group_count = 0;
    std::vector<double> lambda_pair;       // [g * G + h], ordered pairs g != h
    double lambda_k = 0.0;
    std::vector<double> lambda_prime;      // per candidate
    double delta = 0.0;                    // delta(sigma^EOR_k)
    double phi = 0.0;
    double bound = 0.0;                    // phi * delta
    double dual_objective = 0.0;
    double lp_objective = 0.0;
    double eor_objective = 0.0;
    double gap = 0.0;                      // dual_objective - lp_objective
    std::vector<std::size_t> k_last;       // selected count per group
    std::vector<std::uint32_t> ref_index;  // candidate whose prob is p_g
    std::vector<char> selected;            // candidate in EOR top-k
};

DualCertificate dualCertificate(const CandidatePool& pool, const Ranking& eor_ranking,
                                std::size_t k);

struct CertificateReport {
    bool feasible = false;       // every check passes at 1e-9
    double residual_max = 0.0;   // worst dual-constraint violation (positive = bad)
    double min_dual = 0.0;       // most negative dual variable
    double off_selected_max = 0.0;  // max lambda' outside the selected set
    double gap = 0.0;
    double bound = 0.0;
    double pair_gap_bound = 0.0;  // sum over pairs 2*lambda*delta
    bool gap_in_range = false;    // -tol <= gap <= pair_gap_bound + tol
};

CertificateReport verifyCertificate(const DualCertificate& cert, const CandidatePool& pool,
                                    std::size_t k);

// A-priori bound on the EOR slack: (top_A/nRel(A) + top_B/nRel(B))/2 for
// two groups, max_g top_g/nRel(g) for more.
double deltaMaxBound(const CandidatePool& pool);

// Position weights v_j = 1/log2(j+1), positions 1..n.
std::vector<double> positionWeights(std::size_t n);

// Doubly stochastic ranking matrix from the exposure LP.
struct DoublyStochasticRanking {
    std::size_t n = 0;
    std::vector<double> matrix;   // row-major [candidate][position]
    std::vector<double> weights;  // v_j
    double objective = 0.0;       // P^T Sigma v
    // Smallest total |Exposure(g)/U(g) - Exposure(h)/U(h)| achievable over
    // the Birkhoff polytope; 0 (up to solver tolerance) when the exact
    // proportionality constraints are feasible.
    double exposure_violation = 0.0;
    bool exposure_feasible = true;

    double at(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
    // P(i in top k) = sum of the first k position columns.
    double prefixInclusion(std::size_t k, std::size_t i) const;
    // Position-discounted attention per group, normalized by group size.
    std::vector<double> groupExposure(const CandidatePool& pool) const;
};

// Maximize P^T Sigma v over doubly stochastic matrices subject to
// exposure proportionality between every pair of groups. Skewed pools can
// make the exact equality constraints unsatisfiable (a small group may be
// unable to absorb its share of exposure even from the top positions), so
// the solve is two-stage: minimize the total constraint violation first,
// then maximize utility at that violation level. n <= 100.
DoublyStochasticRanking exposureLP(const CandidatePool& pool);

struct RankAggregationResult {
    Ranking ranking;
    double achieved_ratio = 0.0;
    bool satisfied = false;
};

// PRP modified by adjacent swaps (over-exposed-group candidate directly
// above an under-exposed-group one) until min/max group exposure reaches
// the threshold; best effort otherwise.
RankAggregationResult rankAggregationExposure(const CandidatePool& pool,
                                              double threshold = 0.95);

}  // namespace eor
