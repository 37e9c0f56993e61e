#include <algorithm>
#include <cmath>
#include <limits>

#include "eor/errors.hpp"
#include "eor/optim.hpp"

namespace eor {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-8;
constexpr double kOptTol = 1e-9;

// Dense two-phase tableau. Variables are shifted by their lower bounds;
// finite upper bounds become explicit rows.
class Simplex {
public:
    explicit Simplex(const LinearProgram& lp) : lp_(lp) { build(); }

    LPSolution run() {
        LPSolution sol;
        if (artificial_begin_ < cols_) {
            if (!phase(/*phase1=*/true)) throw NumericalFailure("simplex iteration cap hit");
            if (objectiveValue() < -kFeasTol) {
                sol.status = LpStatus::Infeasible;
                sol.iterations = iterations_;
                return sol;
            }
            driveOutArtificials();
        }
        setPhase2Objective();
        if (!phase(/*phase1=*/false)) throw NumericalFailure("simplex iteration cap hit");
        if (unbounded_) {
            sol.status = LpStatus::Unbounded;
            sol.iterations = iterations_;
            return sol;
        }
        sol.status = LpStatus::Optimal;
        sol.iterations = iterations_;
        sol.x.assign(lp_.varCount(), 0.0);
        for (std::size_t r = 0; r < rows_; ++r) {
            int b = basis_[r];
            if (b >= 0 && static_cast<std::size_t>(b) < lp_.varCount())
                sol.x[b] = rhs(r);
        }
        for (std::size_t j = 0; j < lp_.varCount(); ++j) sol.x[j] += lp_.lower[j];
        double obj = 0.0;
        for (std::size_t j = 0; j < lp_.varCount(); ++j) obj += lp_.objective[j] * sol.x[j];
        sol.objective_value = obj;
        return sol;
    }

private:
    const LinearProgram& lp_;
    std::size_t rows_ = 0, cols_ = 0;  // cols excludes the rhs column
    std::size_t artificial_begin_ = 0;
    std::vector<double> t_;            // (rows_+1) x (cols_+1); last row = objective
    std::vector<int> basis_;
    int iterations_ = 0;
    bool unbounded_ = false;

    double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
    double rhs(std::size_t r) const { return at(r, cols_); }
    double objectiveValue() const { return at(rows_, cols_); }

    void build() {
        const std::size_t nvar = lp_.varCount();
        if (lp_.lower.size() != nvar || lp_.upper.size() != nvar)
            throw BadParams("LP bounds have wrong shape");

        struct Row {
            std::vector<double> a;
            Relation rel;
            double b;
        };
        std::vector<Row> work;
        work.reserve(lp_.constraints.size() + nvar);
        for (const LpConstraint& c : lp_.constraints) {
            if (c.coeffs.size() != nvar) throw BadParams("LP row has wrong shape");
            Row r{c.coeffs, c.rel, c.rhs};
            // shift by lower bounds: A(x - lo) rel b - A lo
            for (std::size_t j = 0; j < nvar; ++j) r.b -= c.coeffs[j] * lp_.lower[j];
            work.push_back(std::move(r));
        }
        for (std::size_t j = 0; j < nvar; ++j) {
            if (std::isfinite(lp_.upper[j])) {
                Row r;
                r.a.assign(nvar, 0.0);
                r.a[j] = 1.0;
                r.rel = Relation::LessEq;
                r.b = lp_.upper[j] - lp_.lower[j];
                work.push_back(std::move(r));
            }
        }
        for (Row& r : work) {
            if (r.b < 0.0) {  // keep rhs nonnegative
                for (double& v : r.a) v = -v;
                r.b = -r.b;
                if (r.rel == Relation::LessEq) r.rel = Relation::GreaterEq;
                else if (r.rel == Relation::GreaterEq) r.rel = Relation::LessEq;
            }
        }

        rows_ = work.size();
        std::size_t n_slack = 0, n_art = 0;
        for (const Row& r : work) {
            if (r.rel != Relation::Equal) ++n_slack;
            if (r.rel != Relation::LessEq) ++n_art;  // >= and = rows need artificials
        }
        artificial_begin_ = nvar + n_slack;
        cols_ = nvar + n_slack + n_art;
        t_.assign((rows_ + 1) * (cols_ + 1), 0.0);
        basis_.assign(rows_, -1);

        std::size_t slack_col = nvar, art_col = artificial_begin_;
        for (std::size_t i = 0; i < rows_; ++i) {
            const Row& r = work[i];
            for (std::size_t j = 0; j < nvar; ++j) at(i, j) = r.a[j];
            at(i, cols_) = r.b;
            if (r.rel == Relation::LessEq) {
                at(i, slack_col) = 1.0;
                basis_[i] = static_cast<int>(slack_col++);
            } else if (r.rel == Relation::GreaterEq) {
                at(i, slack_col++) = -1.0;
                at(i, art_col) = 1.0;
                basis_[i] = static_cast<int>(art_col++);
            } else {
                at(i, art_col) = 1.0;
                basis_[i] = static_cast<int>(art_col++);
            }
        }

        // Phase-1 objective: maximize -(sum of artificials). Express the
        // objective row in terms of the nonbasic columns.
        if (artificial_begin_ < cols_) {
            for (std::size_t c = artificial_begin_; c < cols_; ++c) at(rows_, c) = 1.0;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (basis_[i] >= static_cast<int>(artificial_begin_))
                    for (std::size_t c = 0; c <= cols_; ++c) at(rows_, c) -= at(i, c);
            }
        }
    }

    void setPhase2Objective() {
        for (std::size_t c = 0; c <= cols_; ++c) at(rows_, c) = 0.0;
        for (std::size_t j = 0; j < lp_.varCount(); ++j) at(rows_, j) = -lp_.objective[j];
        for (std::size_t i = 0; i < rows_; ++i) {
            int b = basis_[i];
            if (b >= 0 && static_cast<std::size_t>(b) < lp_.varCount() &&
                lp_.objective[b] != 0.0) {
                double cb = lp_.objective[b];
                for (std::size_t c = 0; c <= cols_; ++c) at(rows_, c) += cb * at(i, c);
            }
        }
    }

    void pivot(std::size_t prow, std::size_t pcol) {
        double piv = at(prow, pcol);
        double inv = 1.0 / piv;
        for (std::size_t c = 0; c <= cols_; ++c) at(prow, c) *= inv;
        at(prow, pcol) = 1.0;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == prow) continue;
            double f = at(r, pcol);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(prow, c);
            at(r, pcol) = 0.0;
        }
        basis_[prow] = static_cast<int>(pcol);
        ++iterations_;
    }

    // Entering column; artificials stay out in phase 2.
    int chooseEntering(bool phase1, bool bland) const {
        std::size_t limit = phase1 ? cols_ : artificial_begin_;
        int best = -1;
        double best_val = -kOptTol;
        for (std::size_t c = 0; c < limit; ++c) {
            double v = at(rows_, c);
            if (v < best_val) {
                if (bland) return static_cast<int>(c);
                best_val = v;
                best = static_cast<int>(c);
            }
        }
        return best;
    }

    int chooseLeaving(std::size_t pcol) const {
        int best = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows_; ++r) {
            double a = at(r, pcol);
            if (a <= kPivotTol) continue;
            double ratio = rhs(r) / a;
            if (ratio < best_ratio - 1e-15 ||
                (std::fabs(ratio - best_ratio) <= 1e-15 &&
                 (best < 0 || basis_[r] < basis_[best]))) {
                best_ratio = ratio;
                best = static_cast<int>(r);
            }
        }
        return best;
    }

    bool phase(bool phase1) {
        const int cap = 1000 + 40 * static_cast<int>(rows_ + cols_);
        bool bland = false;
        int stall = 0;
        double last_obj = objectiveValue();
        for (int it = 0; it < cap; ++it) {
            int pcol = chooseEntering(phase1, bland);
            if (pcol < 0) return true;  // optimal for this phase
            int prow = chooseLeaving(static_cast<std::size_t>(pcol));
            if (prow < 0) {
                if (phase1) throw NumericalFailure("phase-1 subproblem unbounded");
                unbounded_ = true;
                return true;
            }
            pivot(static_cast<std::size_t>(prow), static_cast<std::size_t>(pcol));
            double obj = objectiveValue();
            if (obj > last_obj + kOptTol) {
                stall = 0;
                last_obj = obj;
            } else if (++stall > 64) {
                bland = true;  // degenerate stall: Bland's rule from here on
            }
        }
        return false;
    }

    // Pivot leftover basic artificials onto any usable structural column;
    // rows with no such column are redundant and are zeroed.
    void driveOutArtificials() {
        for (std::size_t r = 0; r < rows_; ++r) {
            if (basis_[r] < static_cast<int>(artificial_begin_)) continue;
            std::size_t c = 0;
            for (; c < artificial_begin_; ++c)
                if (std::fabs(at(r, c)) > kPivotTol) break;
            if (c < artificial_begin_) {
                pivot(r, c);
            } else {
                for (std::size_t j = 0; j <= cols_; ++j) at(r, j) = 0.0;
                basis_[r] = -1;
            }
        }
    }
};

}  // namespace

LPSolution simplexSolve(const LinearProgram& lp) {
    for (double v : lp.objective)
        if (!std::isfinite(v)) throw BadParams("LP objective must be finite");
    for (const auto& c : lp.constraints) {
        if (!std::isfinite(c.rhs)) throw BadParams("LP rhs must be finite");
        for (double v : c.coeffs)
            if (!std::isfinite(v)) throw BadParams("LP coefficients must be finite");
    }
    Simplex solver(lp);
    return solver.run();
}

}  // namespace eor
