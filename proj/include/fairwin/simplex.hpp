#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fairwin {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
    LpStatus status = LpStatus::kInfeasible;
    double objective = 0.0;
    std::vector<double> x;
};

// Dense two-phase primal simplex over x >= 0.
//
// Built for the small structured programs this library produces: cutting
// plane masters with a few dozen variables and reference solves in tests.
// Dantzig pricing with a Bland fallback once the objective stalls, explicit
// artificial variables, redundant rows dropped after phase one.  Not meant
// for large or badly conditioned input.
class LpProblem {
public:
    explicit LpProblem(std::size_t nvars) : n_(nvars), c_(nvars, 0.0) {}

    void set_objective(std::vector<double> c) {
        if (c.size() != n_) throw std::invalid_argument("lp: objective size mismatch");
        c_ = std::move(c);
    }

    // rel is one of '<', '=', '>' with the usual inequality-or-equal reading.
    void add_row(const std::vector<std::pair<std::size_t, double>>& coeffs, char rel, double rhs) {
        if (rel != '<' && rel != '=' && rel != '>')
            throw std::invalid_argument("lp: bad relation");
        Row r;
        r.a.assign(n_, 0.0);
        for (const auto& [j, v] : coeffs) {
            if (j >= n_) throw std::invalid_argument("lp: column out of range");
            r.a[j] += v;
        }
        r.rel = rel;
        r.rhs = rhs;
        rows_.push_back(std::move(r));
    }

    LpResult solve() const {
        const std::size_t m = rows_.size();
        // column layout: [structural | slack/surplus | artificial]
        std::size_t nslack = 0;
        for (const auto& r : rows_)
            if (r.rel != '=') ++nslack;

        // normalize to rhs >= 0, count artificials
        std::vector<double> sign(m, 1.0);
        std::size_t nart = 0;
        for (std::size_t i = 0; i < m; ++i) {
            char rel = rows_[i].rel;
            if (rows_[i].rhs < 0.0) {
                sign[i] = -1.0;
                rel = rel == '<' ? '>' : rel == '>' ? '<' : '=';
            }
            // after normalization a '<' row starts feasible with its slack;
            // '=' and '>' rows need an artificial
            if (rel != '<') ++nart;
        }

        const std::size_t ncols = n_ + nslack + nart;
        std::vector<std::vector<double>> t(m, std::vector<double>(ncols + 1, 0.0));
        std::vector<std::size_t> basis(m);
        {
            std::size_t slack_at = n_, art_at = n_ + nslack;
            for (std::size_t i = 0; i < m; ++i) {
                char rel = rows_[i].rel;
                if (sign[i] < 0.0) rel = rel == '<' ? '>' : rel == '>' ? '<' : '=';
                for (std::size_t j = 0; j < n_; ++j) t[i][j] = sign[i] * rows_[i].a[j];
                t[i][ncols] = sign[i] * rows_[i].rhs;
                if (rel == '<') {
                    t[i][slack_at] = 1.0;
                    basis[i] = slack_at++;
                } else if (rel == '>') {
                    t[i][slack_at] = -1.0;
                    ++slack_at;
                    t[i][art_at] = 1.0;
                    basis[i] = art_at++;
                } else {
                    t[i][art_at] = 1.0;
                    basis[i] = art_at++;
                }
                // row equilibration keeps pivot tolerances meaningful
                double mx = 0.0;
                for (std::size_t j = 0; j <= ncols; ++j) mx = std::max(mx, std::abs(t[i][j]));
                if (mx > 0.0)
                    for (std::size_t j = 0; j <= ncols; ++j) t[i][j] /= mx;
            }
        }

        std::vector<std::size_t> live_rows(m);
        for (std::size_t i = 0; i < m; ++i) live_rows[i] = i;

        LpResult out;
        if (nart > 0) {
            // phase 1: minimize the sum of artificials
            std::vector<double> obj(ncols, 0.0);
            for (std::size_t j = n_ + nslack; j < ncols; ++j) obj[j] = 1.0;
            double val = run(t, basis, live_rows, obj, /*ban_from=*/ncols);
            if (val > kFeasTol) {
                out.status = LpStatus::kInfeasible;
                return out;
            }
            purge_artificials(t, basis, live_rows, n_ + nslack);
        }

        std::vector<double> obj(ncols, 0.0);
        for (std::size_t j = 0; j < n_; ++j) obj[j] = c_[j];
        const double val = run(t, basis, live_rows, obj, /*ban_from=*/n_ + nslack);
        if (std::isinf(val)) {
            out.status = LpStatus::kUnbounded;
            return out;
        }

        out.status = LpStatus::kOptimal;
        out.x.assign(n_, 0.0);
        for (std::size_t r = 0; r < live_rows.size(); ++r) {
            const std::size_t i = live_rows[r];
            if (basis[i] < n_) out.x[basis[i]] = t[i].back();
        }
        double o = 0.0;
        for (std::size_t j = 0; j < n_; ++j) o += c_[j] * out.x[j];
        out.objective = o;
        return out;
    }

private:
    struct Row {
        std::vector<double> a;
        char rel = '<';
        double rhs = 0.0;
    };

    static constexpr double kPivTol = 1e-9;
    static constexpr double kFeasTol = 1e-7;

    // Runs simplex for min obj'x on the current tableau.  Columns at index
    // >= ban_from never enter.  Returns the achieved objective, +inf when
    // unbounded.  Throws if the iteration cap is hit.
    static double run(std::vector<std::vector<double>>& t, std::vector<std::size_t>& basis,
                      const std::vector<std::size_t>& live_rows, const std::vector<double>& obj,
                      std::size_t ban_from) {
        const std::size_t ncols = obj.size();
        // reduced-cost row: r = obj - obj_B * B^-1 A
        std::vector<double> red(ncols + 1, 0.0);
        for (std::size_t j = 0; j < ncols; ++j) red[j] = obj[j];
        for (const std::size_t i : live_rows) {
            const double cb = obj[basis[i]];
            if (cb != 0.0)
                for (std::size_t j = 0; j <= ncols; ++j) red[j] -= cb * t[i][j];
        }

        const std::size_t cap = 200 * (live_rows.size() + ncols) + 2000;
        std::size_t stall = 0;
        double last = -red[ncols];
        bool bland = false;
        for (std::size_t iter = 0; iter < cap; ++iter) {
            // entering column
            std::size_t enter = ncols;
            if (!bland) {
                double best = -kPivTol;
                for (std::size_t j = 0; j < ban_from; ++j)
                    if (red[j] < best) {
                        best = red[j];
                        enter = j;
                    }
            } else {
                for (std::size_t j = 0; j < ban_from; ++j)
                    if (red[j] < -kPivTol) {
                        enter = j;
                        break;
                    }
            }
            if (enter == ncols) return -red[ncols];  // optimal

            // ratio test
            std::size_t leave_pos = live_rows.size();
            double best_ratio = 0.0;
            for (std::size_t r = 0; r < live_rows.size(); ++r) {
                const std::size_t i = live_rows[r];
                if (t[i][enter] > kPivTol) {
                    const double ratio = t[i].back() / t[i][enter];
                    if (leave_pos == live_rows.size() || ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && basis[i] < basis[live_rows[leave_pos]])) {
                        best_ratio = ratio;
                        leave_pos = r;
                    }
                }
            }
            if (leave_pos == live_rows.size()) return std::numeric_limits<double>::infinity();

            pivot(t, basis, live_rows, red, live_rows[leave_pos], enter);

            if (-red[ncols] < last - 1e-12) {
                last = -red[ncols];
                stall = 0;
                bland = false;
            } else if (++stall > 2 * (live_rows.size() + ncols)) {
                bland = true;
            }
        }
        throw std::runtime_error("lp: iteration cap exceeded");
    }

    static void pivot(std::vector<std::vector<double>>& t, std::vector<std::size_t>& basis,
                      const std::vector<std::size_t>& live_rows, std::vector<double>& red,
                      std::size_t prow, std::size_t pcol) {
        const double pv = t[prow][pcol];
        const std::size_t w = t[prow].size();
        for (std::size_t j = 0; j < w; ++j) t[prow][j] /= pv;
        t[prow][pcol] = 1.0;
        for (const std::size_t i : live_rows) {
            if (i == prow) continue;
            const double f = t[i][pcol];
            if (f != 0.0) {
                for (std::size_t j = 0; j < w; ++j) t[i][j] -= f * t[prow][j];
                t[i][pcol] = 0.0;
            }
        }
        const double f = red[pcol];
        if (f != 0.0) {
            for (std::size_t j = 0; j < w; ++j) red[j] -= f * t[prow][j];
            red[pcol] = 0.0;
        }
        basis[prow] = pcol;
    }

    // After phase 1, pivot basic artificials out; rows where that is
    // impossible are redundant and get dropped.
    static void purge_artificials(std::vector<std::vector<double>>& t,
                                  std::vector<std::size_t>& basis,
                                  std::vector<std::size_t>& live_rows, std::size_t art_from) {
        std::vector<std::size_t> kept;
        for (const std::size_t i : live_rows) {
            if (basis[i] < art_from) {
                kept.push_back(i);
                continue;
            }
            std::size_t pcol = art_from;
            for (std::size_t j = 0; j < art_from; ++j)
                if (std::abs(t[i][j]) > 1e-8) {
                    pcol = j;
                    break;
                }
            if (pcol == art_from) continue;  // 0 = 0 row, drop
            // local pivot without a reduced-cost row
            const double pv = t[i][pcol];
            for (auto& v : t[i]) v /= pv;
            t[i][pcol] = 1.0;
            for (const std::size_t r : live_rows) {
                if (r == i) continue;
                const double f = t[r][pcol];
                if (f != 0.0) {
                    for (std::size_t j = 0; j < t[r].size(); ++j) t[r][j] -= f * t[i][j];
                    t[r][pcol] = 0.0;
                }
            }
            basis[i] = pcol;
            kept.push_back(i);
        }
        live_rows = std::move(kept);
    }

    std::size_t n_;
    std::vector<double> c_;
    std::vector<Row> rows_;
};

} // namespace fairwin
