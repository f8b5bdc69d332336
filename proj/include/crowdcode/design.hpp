#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "analytic.hpp"
#include "codebook.hpp"
#include "rng.hpp"

namespace crowdcode {

using DesignObjective = std::function<double(const CodeMatrix&)>;

struct AnnealSchedule {
    double initial_temperature = 0.1;
    double cooling_factor = 0.95;
    int moves_per_temperature = 0;  // 0 means 50*N
    double min_temperature = 1e-4;
    std::uint64_t seed = 0;
    bool balanced_moves = false;  // resample a balanced column instead of flipping a bit

    void check() const {
        if (initial_temperature <= 0 || min_temperature <= 0)
            throw std::invalid_argument("temperatures must be positive");
        if (cooling_factor <= 0 || cooling_factor >= 1)
            throw std::invalid_argument("cooling factor must lie in (0,1)");
    }
};

struct DesignResult {
    CodeMatrix matrix;
    double objective;
    std::vector<double> best_trace;  // best objective seen, per epoch / sweep
};

/// Simulated annealing from a seed-matched random balanced start. Returns the
/// best matrix ever visited, so the result never scores worse than the start.
inline DesignResult anneal(int num_classes, int num_workers, const DesignObjective& objective,
                           const AnnealSchedule& schedule) {
    schedule.check();
    std::mt19937_64 rng = make_engine(schedule.seed, 0x5a);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick_row(0, num_classes - 1);
    std::uniform_int_distribution<int> pick_col(0, num_workers - 1);

    CodeMatrix current = random_balanced_matrix(num_classes, num_workers, schedule.seed);
    double cur_obj = objective(current);
    CodeMatrix best = current;
    double best_obj = cur_obj;

    std::vector<double> trace;
    const int moves = schedule.moves_per_temperature > 0 ? schedule.moves_per_temperature
                                                         : 50 * num_workers;
    for (double temp = schedule.initial_temperature; temp >= schedule.min_temperature;
         temp *= schedule.cooling_factor) {
        for (int mv = 0; mv < moves; ++mv) {
            const int j = pick_col(rng);
            CodeMatrix cand = [&] {
                if (schedule.balanced_moves) {
                    const CodeMatrix col =
                        random_balanced_matrix(num_classes, 1, rng());
                    return current.with_column(j, col.to_column_ints()[0]);
                }
                const auto cols = current.to_column_ints();
                return current.with_column(j, cols[j] ^ (std::uint64_t{1} << pick_row(rng)));
            }();
            const double cand_obj = objective(cand);
            const double delta = cand_obj - cur_obj;
            if (delta <= 0 || unif(rng) < std::exp(-delta / temp)) {
                current = std::move(cand);
                cur_obj = cand_obj;
                if (cur_obj < best_obj) {
                    best = current;
                    best_obj = cur_obj;
                }
            }
        }
        trace.push_back(best_obj);
    }
    return {std::move(best), best_obj, std::move(trace)};
}

/// Greedy cyclic column replacement: sweep the columns, trying every candidate
/// column value at each position; stop when a full sweep yields no improvement.
/// Ties keep the incumbent.
inline DesignResult cyclic_column_replacement(const CodeMatrix& start,
                                              const DesignObjective& objective,
                                              bool balanced_only = true) {
    const int m = start.num_classes(), n = start.num_workers();
    std::vector<std::uint64_t> candidates;
    const std::uint64_t limit = std::uint64_t{1} << m;
    const int ones = (m + 1) / 2;
    for (std::uint64_t c = 0; c < limit; ++c)
        if (!balanced_only || std::popcount(c) == ones) candidates.push_back(c);

    CodeMatrix current = start;
    double cur_obj = objective(current);
    std::vector<double> trace{cur_obj};
    bool improved = true;
    while (improved) {
        improved = false;
        for (int j = 0; j < n; ++j) {
            std::uint64_t best_col = current.to_column_ints()[j];
            double best_obj = cur_obj;
            for (std::uint64_t c : candidates) {
                if (c == best_col) continue;
                const double obj = objective(current.with_column(j, c));
                if (obj < best_obj) {
                    best_obj = obj;
                    best_col = c;
                }
            }
            if (best_obj < cur_obj) {
                current = current.with_column(j, best_col);
                cur_obj = best_obj;
                improved = true;
            }
            trace.push_back(cur_obj);
        }
    }
    return {std::move(current), cur_obj, std::move(trace)};
}

}  // namespace crowdcode
