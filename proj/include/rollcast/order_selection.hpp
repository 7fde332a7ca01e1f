#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rollcast/calendar.hpp"
#include "rollcast/random.hpp"
#include "rollcast/sarimax.hpp"
#include "rollcast/series.hpp"

namespace rollcast {

/// Cartesian grid of candidate (p, d, q) orders, optionally sharing one
/// seasonal order and one exogenous matrix across all candidates.
struct GridSpec {
    std::vector<int> p_values;
    int d = 0;
    std::vector<int> q_values;
    std::optional<SeasonalOrder> seasonal;
    bool with_exog = false;
    double timeout_per_candidate_seconds = 60.0;
};

enum class CandidateStatus { converged, not_converged, timed_out, error };

inline const char* to_string(CandidateStatus status) {
    switch (status) {
        case CandidateStatus::converged: return "converged";
        case CandidateStatus::not_converged: return "not_converged";
        case CandidateStatus::timed_out: return "timed_out";
        case CandidateStatus::error: return "error";
    }
    return "error";
}

struct CandidateResult {
    ModelOrder order;
    SeasonalOrder seasonal;
    double aic = std::numeric_limits<double>::infinity();
    double loglik = -std::numeric_limits<double>::infinity();
    CandidateStatus status = CandidateStatus::error;
    double seconds = 0.0;
    std::string message;  // diagnostic detail for error rows
};

/// Full grid outcome: every candidate appears exactly once. Converged rows
/// come first, ascending by AIC (ties: smaller p+q, then smaller p); rows
/// that failed to converge are segregated at the bottom in grid order.
struct RankedCandidates {
    std::vector<CandidateResult> rows;
};

/// Thrown when not a single candidate converges; carries the full table so
/// callers can still report per-candidate diagnostics.
struct GridSearchError : std::runtime_error {
    RankedCandidates table;
    GridSearchError(const std::string& what, RankedCandidates t)
        : std::runtime_error(what), table(std::move(t)) {}
};

/// Fits every (p, d, q) candidate and ranks by AIC. Candidates run on a
/// bounded worker pool pulling from a shared atomic counter; each gets its
/// own seed derived from (seed, grid index), so the table is identical
/// regardless of the worker count. Timeouts and failures are recorded with a
/// status, never dropped.
inline RankedCandidates grid_search(const TimeSeries& series, const GridSpec& spec, int jobs = 1,
                                    std::uint64_t seed = 0, const ExogMatrix* exog = nullptr) {
    if (spec.p_values.empty() || spec.q_values.empty()) {
        throw std::invalid_argument("grid_search: empty candidate order set");
    }
    for (int p : spec.p_values) {
        if (p < 0) throw std::invalid_argument("grid_search: negative p candidate");
    }
    for (int q : spec.q_values) {
        if (q < 0) throw std::invalid_argument("grid_search: negative q candidate");
    }
    if (spec.d < 0) throw std::invalid_argument("grid_search: negative d");
    if (!(spec.timeout_per_candidate_seconds > 0.0)) {
        throw std::invalid_argument("grid_search: timeout must be positive");
    }
    if (jobs < 1) throw std::invalid_argument("grid_search: jobs must be at least 1");
    if (spec.with_exog && exog == nullptr) {
        throw std::invalid_argument("grid_search: exogenous matrix requested but not provided");
    }

    std::vector<int> ps = spec.p_values, qs = spec.q_values;
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

    const SeasonalOrder seasonal = spec.seasonal.value_or(SeasonalOrder{});
    const ExogMatrix* used_exog = spec.with_exog ? exog : nullptr;

    struct Candidate {
        ModelOrder order;
        std::size_t index;
    };
    std::vector<Candidate> grid;
    for (int p : ps) {
        for (int q : qs) {
            grid.push_back({ModelOrder{p, spec.d, q}, grid.size()});
        }
    }

    std::vector<CandidateResult> results(grid.size());
    std::atomic<std::size_t> cursor{0};
    const auto timeout = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(spec.timeout_per_candidate_seconds));

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= grid.size()) return;
            CandidateResult& row = results[i];
            row.order = grid[i].order;
            row.seasonal = seasonal;
            const auto start = std::chrono::steady_clock::now();
            try {
                FitOptions options;
                options.seed = mix_seed(seed, static_cast<std::uint64_t>(i));
                options.deadline = start + timeout;
                const FittedModel fitted = fit(series, grid[i].order, seasonal, used_exog, options);
                row.aic = fitted.aic;
                row.loglik = fitted.loglik;
                if (fitted.converged) {
                    row.status = CandidateStatus::converged;
                } else if (std::chrono::steady_clock::now() >= *options.deadline) {
                    row.status = CandidateStatus::timed_out;
                } else {
                    row.status = CandidateStatus::not_converged;
                }
            } catch (const std::exception& e) {
                row.status = CandidateStatus::error;
                row.message = e.what();
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };

    const int n_workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(jobs), grid.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Deterministic ranking: converged ascending by AIC with the documented
    // tie-breaks; everything else after, in grid order.
    std::vector<std::size_t> perm(results.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        const CandidateResult& ra = results[a];
        const CandidateResult& rb = results[b];
        const bool ca = ra.status == CandidateStatus::converged;
        const bool cb = rb.status == CandidateStatus::converged;
        if (ca != cb) return ca;
        if (!ca) return a < b;
        if (ra.aic != rb.aic) return ra.aic < rb.aic;
        const int sum_a = ra.order.p + ra.order.q;
        const int sum_b = rb.order.p + rb.order.q;
        if (sum_a != sum_b) return sum_a < sum_b;
        if (ra.order.p != rb.order.p) return ra.order.p < rb.order.p;
        return a < b;
    });

    RankedCandidates ranked;
    ranked.rows.reserve(results.size());
    for (std::size_t i : perm) ranked.rows.push_back(std::move(results[i]));

    const bool any_converged =
        !ranked.rows.empty() && ranked.rows.front().status == CandidateStatus::converged;
    if (!any_converged) {
        std::string what = "grid_search: no candidate converged;";
        for (const CandidateResult& row : ranked.rows) {
            what += " (" + std::to_string(row.order.p) + "," + std::to_string(row.order.d) + "," +
                    std::to_string(row.order.q) + ")=" + to_string(row.status);
            if (!row.message.empty()) what += "[" + row.message + "]";
        }
        throw GridSearchError(what, std::move(ranked));
    }
    return ranked;
}

/// Minimum-AIC converged order, ties broken by smaller p+q then smaller p.
/// Tables from grid_search are already sorted this way, but the argmin is
/// recomputed so the rule holds for any row ordering.
inline ModelOrder best(const RankedCandidates& ranked) {
    const CandidateResult* winner = nullptr;
    for (const CandidateResult& row : ranked.rows) {
        if (row.status != CandidateStatus::converged) continue;
        if (!winner) {
            winner = &row;
            continue;
        }
        if (row.aic != winner->aic) {
            if (row.aic < winner->aic) winner = &row;
            continue;
        }
        const int sum_row = row.order.p + row.order.q;
        const int sum_win = winner->order.p + winner->order.q;
        if (sum_row != sum_win) {
            if (sum_row < sum_win) winner = &row;
            continue;
        }
        if (row.order.p < winner->order.p) winner = &row;
    }
    if (!winner) throw std::runtime_error("best: no converged candidate in the ranked table");
    return winner->order;
}

/// Ranked table as CSV. Rows that produced no usable likelihood leave the
/// aic/loglik cells empty; the status column explains why.
inline void write_grid_csv(std::ostream& out, const RankedCandidates& ranked) {
    out << "p,d,q,P,D,Q,S,aic,loglik,status,seconds\n";
    char buf[64];
    for (const CandidateResult& row : ranked.rows) {
        out << row.order.p << ',' << row.order.d << ',' << row.order.q << ',' << row.seasonal.P
            << ',' << row.seasonal.D << ',' << row.seasonal.Q << ',' << row.seasonal.S << ',';
        if (std::isfinite(row.aic)) {
            std::snprintf(buf, sizeof(buf), "%.6f", row.aic);
            out << buf;
        }
        out << ',';
        if (std::isfinite(row.loglik)) {
            std::snprintf(buf, sizeof(buf), "%.6f", row.loglik);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.3f", row.seconds);
        out << ',' << to_string(row.status) << ',' << buf << '\n';
    }
}

}  // namespace rollcast
