#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "codebook.hpp"

namespace crowdcode {

struct FusionDecision {
    int decided_class = 0;
    int tie_count = 1;
    bool was_tie = false;
};

/// Worker's local M-ary decision: the true class with probability p, each
/// other class with probability (1-p)/(M-1).
inline int local_decision(int true_class, double reliability, int num_classes,
                          std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) < reliability) return true_class;
    std::uniform_int_distribution<int> other(0, num_classes - 2);
    int y = other(rng);
    if (y >= true_class) ++y;
    return y;
}

/// u_j = a_{y_j, j}: the bit the worker's question assigns to its decision.
inline Answer binary_answer(int local_class, std::span<const std::uint8_t> column) {
    return static_cast<Answer>(column[local_class]);
}

inline AnswerVector answers_from_decisions(const CodeMatrix& a, const std::vector<int>& decisions) {
    AnswerVector u(a.num_workers());
    for (int j = 0; j < a.num_workers(); ++j)
        u[j] = static_cast<Answer>(a.bit(decisions[j], j));
    return u;
}

/// Minimum-Hamming-distance fusion; ties broken uniformly at random.
inline FusionDecision decode_hamming(const CodeMatrix& a, const AnswerVector& u,
                                     std::mt19937_64& rng) {
    const DecisionProfile prof = decision_profile(a, u);
    FusionDecision d;
    d.tie_count = prof.tie_count;
    d.was_tie = prof.tie_count > 1;
    if (prof.tie_count == 1) {
        d.decided_class = prof.argmin_rows[0];
    } else {
        std::uniform_int_distribution<int> pick(0, prof.tie_count - 1);
        d.decided_class = prof.argmin_rows[pick(rng)];
    }
    return d;
}

/// Contiguous bit-group layout, sizes as equal as possible; when log2 M does
/// not divide N the larger blocks sit on the more significant bits.
inline std::vector<int> contiguous_group_map(int num_classes, int num_workers) {
    const int b = log2_exact(num_classes);
    const int base = num_workers / b;
    const int extra = num_workers % b;
    std::vector<int> map(num_workers);
    int j = 0;
    for (int g = 0; g < b; ++g) {
        const int size = base + (g < extra ? 1 : 0);
        if (size == 0) throw std::invalid_argument("group map: empty bit group");
        for (int k = 0; k < size; ++k) map[j++] = g;
    }
    return map;
}

/// Round-robin layout; splits adjacent partner pairs across bit groups.
inline std::vector<int> round_robin_group_map(int num_classes, int num_workers) {
    const int b = log2_exact(num_classes);
    if (num_workers < b) throw std::invalid_argument("group map: empty bit group");
    std::vector<int> map(num_workers);
    for (int j = 0; j < num_workers; ++j) map[j] = j % b;
    return map;
}

/// Bit sent by a worker in bit-group g: the g-th most significant bit of its
/// local class decision.
inline Answer majority_bit_answer(int local_class, int group, int num_classes) {
    const int b = log2_exact(num_classes);
    return static_cast<Answer>((local_class >> (b - 1 - group)) & 1);
}

/// Per-bit majority over present answers; per-bit ties broken uniformly at
/// random; bits concatenated big-endian into the class index.
inline FusionDecision decode_majority(int num_classes, const std::vector<int>& group_map,
                                      const AnswerVector& u, std::mt19937_64& rng) {
    const int b = log2_exact(num_classes);
    if (u.size() != group_map.size())
        throw std::invalid_argument("decode_majority: answer length mismatch");
    std::vector<int> ones(b, 0), zeros(b, 0), members(b, 0);
    for (std::size_t j = 0; j < u.size(); ++j) {
        const int g = group_map[j];
        if (g < 0 || g >= b) throw std::invalid_argument("decode_majority: bad group index");
        ++members[g];
        if (u[j] == 1)
            ++ones[g];
        else if (u[j] == 0)
            ++zeros[g];
    }
    FusionDecision d;
    std::uniform_int_distribution<int> coin(0, 1);
    int cls = 0;
    for (int g = 0; g < b; ++g) {
        if (members[g] == 0) throw std::invalid_argument("decode_majority: empty bit group");
        int bit;
        if (ones[g] > zeros[g])
            bit = 1;
        else if (ones[g] < zeros[g])
            bit = 0;
        else {
            bit = coin(rng);
            d.was_tie = true;
            d.tie_count *= 2;
        }
        cls = (cls << 1) | bit;
    }
    d.decided_class = cls;
    return d;
}

}  // namespace crowdcode
