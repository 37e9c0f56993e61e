#include <algorithm>
#include <cmath>
#include <limits>

#include "eor/numeric.hpp"
#include "eor/optim.hpp"
#include "eor/policies.hpp"

namespace eor {

namespace {

constexpr double kFeasSlack = 1e-12;  // keeps the EOR point itself feasible

struct PoolView {
    std::vector<double> nrel;            // per group
    double total_nrel = 0.0;
    std::vector<std::vector<double>> prefix_p;  // per group, prefix sums of PRP probs
    std::vector<std::vector<double>> prefix_q;  // same over q_i = p_i/nRel(g)
    std::vector<std::vector<std::uint32_t>> queue;

    explicit PoolView(const CandidatePool& pool) {
        auto stats = groupStats(pool);
        nrel.resize(stats.size());
        for (std::size_t g = 0; g < stats.size(); ++g) {
            nrel[g] = stats[g].n_rel;
            total_nrel += nrel[g];
        }
        GroupQueues queues(pool);
        prefix_p.resize(stats.size());
        prefix_q.resize(stats.size());
        queue.resize(stats.size());
        for (int g = 0; g < pool.groupCount(); ++g) {
            queue[g] = queues.queue(g);
            KahanAccumulator p_acc, q_acc;
            prefix_p[g].push_back(0.0);
            prefix_q[g].push_back(0.0);
            for (std::uint32_t idx : queue[g]) {
                p_acc.add(pool.prob(idx));
                q_acc.add(pool.prob(idx) / nrel[g]);
                prefix_p[g].push_back(p_acc.value());
                prefix_q[g].push_back(q_acc.value());
            }
        }
    }
};

bool pairwiseFeasible(const std::vector<double>& qsum, double cap) {
    double lo = qsum[0], hi = qsum[0];
    for (double v : qsum) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo <= cap + kFeasSlack;
}

void enumerateCompositions(const PoolView& view, std::size_t k, double cap, std::size_t g,
                           std::vector<std::size_t>& take, std::size_t left,
                           std::vector<double>& qsum, double& best_obj,
                           std::vector<std::size_t>& best_take, bool& found) {
    const std::size_t g_count = view.nrel.size();
    if (g + 1 == g_count) {
        if (left > view.queue[g].size()) return;
        take[g] = left;
        qsum[g] = view.prefix_q[g][left];
        if (!pairwiseFeasible(qsum, cap)) return;
        double obj = 0.0;
        for (std::size_t h = 0; h < g_count; ++h) obj += view.prefix_p[h][take[h]];
        if (!found || obj > best_obj) {
            found = true;
            best_obj = obj;
            best_take = take;
        }
        return;
    }
    std::size_t cap_g = std::min(left, view.queue[g].size());
    for (std::size_t c = 0; c <= cap_g; ++c) {
        take[g] = c;
        qsum[g] = view.prefix_q[g][c];
        enumerateCompositions(view, k, cap, g + 1, take, left - c, qsum, best_obj, best_take,
                              found);
    }
}

}  // namespace

IlpResult ilpTopK(const CandidatePool& pool, std::size_t k, double delta_cap,
                  IlpMethod method) {
    if (delta_cap < 0.0) throw BadParams("delta cap must be nonnegative");
    if (k > pool.size()) throw BadParams("k exceeds pool size");
    PoolView view(pool);
    const int g_count = pool.groupCount();

    if (method == IlpMethod::GroupPrefix) {
        std::vector<std::size_t> take(g_count, 0), best_take;
        std::vector<double> qsum(g_count, 0.0);
        double best_obj = 0.0;
        bool found = false;
        enumerateCompositions(view, k, delta_cap, 0, take, k, qsum, best_obj, best_take, found);
        if (!found) throw InfeasibleProblem("no size-k subset meets the delta cap");
        IlpResult result;
        result.objective = best_obj;
        for (int g = 0; g < g_count; ++g)
            for (std::size_t i = 0; i < best_take[g]; ++i)
                result.subset.push_back(view.queue[g][i]);
        return result;
    }

    // Exhaustive enumeration over all C(n,k) subsets.
    const std::size_t n = pool.size();
    if (n > 24) throw TooLarge("exhaustive ILP enumeration is limited to n <= 24");
    auto next_combination = [n](std::vector<std::size_t>& pick) {
        std::size_t m = pick.size();
        for (std::size_t i = m; i-- > 0;) {
            if (pick[i] < n - m + i) {
                ++pick[i];
                for (std::size_t j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    double best_obj = 0.0;
    std::vector<std::size_t> best_pick;
    bool found = false;
    std::vector<double> qsum(g_count);
    do {
        qsum.assign(g_count, 0.0);
        double obj = 0.0;
        for (std::size_t idx : pick) {
            int g = pool.group(idx);
            qsum[g] += pool.prob(idx) / view.nrel[g];
            obj += pool.prob(idx);
        }
        if (pairwiseFeasible(qsum, delta_cap) && (!found || obj > best_obj)) {
            found = true;
            best_obj = obj;
            best_pick = pick;
        }
    } while (next_combination(pick));
    if (!found) throw InfeasibleProblem("no size-k subset meets the delta cap");
    IlpResult result;
    result.objective = best_obj;
    for (std::size_t idx : best_pick) result.subset.push_back(static_cast<std::uint32_t>(idx));
    return result;
}

LPSolution eorPrimalLP(const CandidatePool& pool, std::size_t k, double delta_cap) {
    if (delta_cap < 0.0) throw BadParams("delta cap must be nonnegative");
    if (k > pool.size()) throw BadParams("k exceeds pool size");
    PoolView view(pool);
    const std::size_t n = pool.size();
    const int g_count = pool.groupCount();

    LinearProgram lp;
    lp.objective.assign(pool.probs().begin(), pool.probs().end());
    lp.lower.assign(n, 0.0);
    lp.upper.assign(n, 1.0);

    LpConstraint select_k;
    select_k.coeffs.assign(n, 1.0);
    select_k.rel = Relation::LessEq;
    select_k.rhs = static_cast<double>(k);
    lp.constraints.push_back(std::move(select_k));

    // Q_{g,h}^T x <= cap for every ordered pair (G(G-1) rows).
    for (int g = 0; g < g_count; ++g) {
        for (int h = 0; h < g_count; ++h) {
            if (g == h) continue;
            LpConstraint row;
            row.coeffs.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (pool.group(i) == g) row.coeffs[i] = pool.prob(i) / view.nrel[g];
                else if (pool.group(i) == h) row.coeffs[i] = -pool.prob(i) / view.nrel[h];
            }
            row.rel = Relation::LessEq;
            row.rhs = delta_cap + kFeasSlack;
            lp.constraints.push_back(std::move(row));
        }
    }
    return simplexSolve(lp);
}

DualCertificate dualCertificate(const CandidatePool& pool, const Ranking& eor_ranking,
                                std::size_t k) {
    if (k < 1 || k > eor_ranking.size()) throw BadParams("prefix k out of range");
    PoolView view(pool);
    const int g_count = pool.groupCount();
    const std::size_t n = pool.size();
    const double total = view.total_nrel;

    DualCertificate cert;
    cert.k = k;
    cert.group_count = g_count;
    cert.k_last.assign(g_count, 0);
    cert.ref_index.assign(g_count, 0);
    cert.selected.assign(n, 0);

    for (std::size_t pos = 0; pos < k; ++pos) {
        std::uint32_t idx = eor_ranking[pos];
        cert.selected[idx] = 1;
        cert.k_last[pool.group(idx)]++;
    }

    // p_g: the last element selected from g, or the first available one if
    // none was selected; when the queue is exhausted, the last selected.
    std::vector<double> p(g_count), q(g_count);
    for (int g = 0; g < g_count; ++g) {
        std::size_t kg = cert.k_last[g];
        std::size_t ref = (kg == 0) ? 0 : kg - 1;
        cert.ref_index[g] = view.queue[g][ref];
        p[g] = pool.prob(cert.ref_index[g]);
        q[g] = p[g] / view.nrel[g];
    }

    // lambda_{g,h} = [ (p_g - p_h)/(q_g + q_h) ]_+ / ((G-1) * sum nRel)
    cert.lambda_pair.assign(static_cast<std::size_t>(g_count) * g_count, 0.0);
    const double pair_scale = 1.0 / ((g_count - 1) * total);
    for (int g = 0; g < g_count; ++g) {
        for (int h = 0; h < g_count; ++h) {
            if (g == h) continue;
            double u = (p[g] - p[h]) / (q[g] + q[h]);
            cert.lambda_pair[g * g_count + h] = pair_scale * std::max(u, 0.0);
        }
    }

    // lambda_k = p_g/sum nRel - q_g * sum_{h != g}(lambda_{g,h} - lambda_{h,g});
    // identical for both groups when G = 2, the maximum over groups keeps
    // the dual feasible in general.
    auto pair_net = [&](int g) {
        double s = 0.0;
        for (int h = 0; h < g_count; ++h) {
            if (h == g) continue;
            s += cert.lambda_pair[g * g_count + h] - cert.lambda_pair[h * g_count + g];
        }
        return s;
    };
    cert.lambda_k = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < g_count; ++g)
        cert.lambda_k = std::max(cert.lambda_k, p[g] / total - q[g] * pair_net(g));

    // lambda'_i = [ p_i/sum nRel - lambda_k - q_i * pair term ]_+ ; zero for
    // every candidate outside the selected set.
    cert.lambda_prime.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        int g = pool.group(i);
        double qi = pool.prob(i) / view.nrel[g];
        double v = pool.prob(i) / total - cert.lambda_k - qi * pair_net(g);
        cert.lambda_prime[i] = std::max(v, 0.0);
    }

    cert.delta = deltaMulti(pool, eor_ranking, k);

    // phi = 2/((G-1) sum nRel) * sum over unordered pairs |p_g - p_h|/(q_g + q_h)
    double pair_sum = 0.0;
    for (int g = 0; g < g_count; ++g)
        for (int h = g + 1; h < g_count; ++h)
            pair_sum += std::fabs(p[g] - p[h]) / (q[g] + q[h]);
    cert.phi = 2.0 * pair_scale * pair_sum;
    cert.bound = cert.phi * cert.delta;

    // Dual objective (normalized units).
    KahanAccumulator dual;
    for (int g = 0; g < g_count; ++g)
        for (int h = 0; h < g_count; ++h)
            if (g != h) dual.add(cert.delta * cert.lambda_pair[g * g_count + h]);
    dual.add(static_cast<double>(k) * cert.lambda_k);
    for (double lp : cert.lambda_prime) dual.add(lp);
    cert.dual_objective = dual.value();

    LPSolution lp = eorPrimalLP(pool, k, cert.delta);
    if (lp.status != LpStatus::Optimal)
        throw NumericalFailure("primal LP did not solve to optimality");
    cert.lp_objective = lp.objective_value / total;

    KahanAccumulator eor_obj;
    for (std::size_t pos = 0; pos < k; ++pos) eor_obj.add(pool.prob(eor_ranking[pos]));
    cert.eor_objective = eor_obj.value() / total;

    cert.gap = cert.dual_objective - cert.lp_objective;
    return cert;
}

CertificateReport verifyCertificate(const DualCertificate& cert, const CandidatePool& pool,
                                    std::size_t k) {
    constexpr double kTol = 1e-9;
    PoolView view(pool);
    const int g_count = pool.groupCount();
    const double total = view.total_nrel;

    CertificateReport report;
    report.gap = cert.gap;
    report.bound = cert.bound;

    report.min_dual = cert.lambda_k;
    for (double v : cert.lambda_pair) report.min_dual = std::min(report.min_dual, v);
    for (double v : cert.lambda_prime) report.min_dual = std::min(report.min_dual, v);

    for (std::size_t i = 0; i < pool.size(); ++i)
        if (!cert.selected[i])
            report.off_selected_max = std::max(report.off_selected_max, cert.lambda_prime[i]);

    // Dual constraint: q_i * sum_{h != g}(lambda_{g,h} - lambda_{h,g}) +
    // lambda_k + lambda'_i >= p_i / sum nRel, componentwise.
    for (std::size_t i = 0; i < pool.size(); ++i) {
        int g = pool.group(i);
        double qi = pool.prob(i) / view.nrel[g];
        double net = 0.0;
        for (int h = 0; h < g_count; ++h) {
            if (h == g) continue;
            net += cert.lambda_pair[g * g_count + h] - cert.lambda_pair[h * g_count + g];
        }
        double lhs = qi * net + cert.lambda_k + cert.lambda_prime[i];
        double violation = pool.prob(i) / total - lhs;
        report.residual_max = std::max(report.residual_max, violation);
    }

    double pair_bound = 0.0;
    for (double v : cert.lambda_pair) pair_bound += 2.0 * v * cert.delta;
    report.pair_gap_bound = pair_bound;
    report.gap_in_range = cert.gap >= -kTol && cert.gap <= pair_bound + kTol;

    report.feasible = report.residual_max <= kTol && report.min_dual >= -kTol &&
                      report.off_selected_max <= kTol && report.gap_in_range &&
                      cert.k == k;
    return report;
}

double deltaMaxBound(const CandidatePool& pool) {
    PoolView view(pool);
    const int g_count = pool.groupCount();
    std::vector<double> top(g_count);
    for (int g = 0; g < g_count; ++g)
        top[g] = pool.prob(view.queue[g][0]) / view.nrel[g];
    if (g_count == 2) return 0.5 * (top[0] + top[1]);
    return *std::max_element(top.begin(), top.end());
}

}  // namespace eor
