#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rng.hpp"

namespace crowdcode {

/// One worker answer: 0, 1, or missing.
using Answer = std::int8_t;
inline constexpr Answer kMissing = -1;
using AnswerVector = std::vector<Answer>;

/// M x N binary code matrix. Row l is the codeword for class l, column j is
/// worker j's binary question. Immutable after construction.
class CodeMatrix {
public:
    CodeMatrix(int num_classes, int num_workers, std::vector<std::uint8_t> bits)
        : m_(num_classes), n_(num_workers), bits_(std::move(bits)) {
        if (m_ < 2) throw std::invalid_argument("CodeMatrix: need at least 2 classes");
        if (n_ < 1) throw std::invalid_argument("CodeMatrix: need at least 1 worker");
        if (static_cast<int>(bits_.size()) != m_ * n_)
            throw std::invalid_argument("CodeMatrix: bit count does not match M*N");
        for (auto b : bits_)
            if (b > 1) throw std::invalid_argument("CodeMatrix: entries must be 0 or 1");
        pack_rows();
    }

    // Column integers r_j = sum_l a_{lj} 2^l; row 0 is the least significant bit.
    static CodeMatrix from_column_ints(const std::vector<std::uint64_t>& cols, int num_classes) {
        if (num_classes < 2 || num_classes > 63)
            throw std::invalid_argument("from_column_ints: M must be in [2,63]");
        const std::uint64_t limit = std::uint64_t{1} << num_classes;
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(num_classes) * cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j] >= limit)
                throw std::invalid_argument("from_column_ints: column " + std::to_string(j) +
                                            " value " + std::to_string(cols[j]) +
                                            " out of range for M=" + std::to_string(num_classes));
            for (int l = 0; l < num_classes; ++l)
                bits[static_cast<std::size_t>(l) * cols.size() + j] =
                    static_cast<std::uint8_t>((cols[j] >> l) & 1u);
        }
        return CodeMatrix(num_classes, static_cast<int>(cols.size()), std::move(bits));
    }

    std::vector<std::uint64_t> to_column_ints() const {
        std::vector<std::uint64_t> cols(n_, 0);
        for (int j = 0; j < n_; ++j)
            for (int l = 0; l < m_; ++l)
                cols[j] |= std::uint64_t{bit(l, j)} << l;
        return cols;
    }

    int num_classes() const { return m_; }
    int num_workers() const { return n_; }
    std::uint8_t bit(int row, int col) const {
        return bits_[static_cast<std::size_t>(row) * n_ + col];
    }
    std::span<const std::uint8_t> row(int l) const {
        return {bits_.data() + static_cast<std::size_t>(l) * n_, static_cast<std::size_t>(n_)};
    }
    /// Row packed with worker j at bit j. Only available for N <= 64; the
    /// exact evaluators that need it enforce a far smaller cap anyway.
    std::uint64_t row_bits(int l) const {
        if (row_bits_.empty())
            throw std::invalid_argument("row_bits: unavailable for N > 64");
        return row_bits_[l];
    }

    /// Number of ones in column j.
    int column_weight(int j) const {
        int w = 0;
        for (int l = 0; l < m_; ++l) w += bit(l, j);
        return w;
    }

    bool has_distinct_rows() const {
        std::set<std::vector<std::uint8_t>> seen;
        for (int l = 0; l < m_; ++l) seen.emplace(row(l).begin(), row(l).end());
        return static_cast<int>(seen.size()) == m_;
    }

    CodeMatrix with_column(int j, std::uint64_t col_int) const {
        auto cols = to_column_ints();
        cols[j] = col_int;
        return from_column_ints(cols, m_);
    }

    std::uint64_t fingerprint() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int k = 0; k < 8; ++k) {
                h ^= (v >> (8 * k)) & 0xffu;
                h *= 0x100000001b3ULL;
            }
        };
        mix(static_cast<std::uint64_t>(m_));
        mix(static_cast<std::uint64_t>(n_));
        for (auto c : to_column_ints()) mix(c);
        return h;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"m", m_}, {"columns", to_column_ints()}};
    }
    static CodeMatrix from_json(const nlohmann::json& j) {
        return from_column_ints(j.at("columns").get<std::vector<std::uint64_t>>(),
                                j.at("m").get<int>());
    }

private:
    void pack_rows() {
        if (n_ > 64) return;  // packed form unavailable; Monte Carlo paths don't need it
        row_bits_.assign(m_, 0);
        for (int l = 0; l < m_; ++l)
            for (int j = 0; j < n_; ++j)
                row_bits_[l] |= std::uint64_t{bit(l, j)} << j;
    }

    int m_;
    int n_;
    std::vector<std::uint8_t> bits_;
    std::vector<std::uint64_t> row_bits_;
};

/// Hamming distance over non-missing positions; missing entries contribute the
/// same (zero) to every row, which leaves the argmin unchanged.
inline int hamming_distance(const AnswerVector& u, std::span<const std::uint8_t> row) {
    if (u.size() != row.size())
        throw std::invalid_argument("hamming_distance: length mismatch");
    int d = 0;
    for (std::size_t j = 0; j < u.size(); ++j)
        if (u[j] != kMissing && u[j] != static_cast<Answer>(row[j])) ++d;
    return d;
}

struct DecisionProfile {
    int min_distance = 0;
    std::vector<int> argmin_rows;
    int tie_count = 0;  // number of rows tied at minimum distance

    bool contains(int l) const {
        return std::find(argmin_rows.begin(), argmin_rows.end(), l) != argmin_rows.end();
    }
};

inline DecisionProfile decision_profile(const CodeMatrix& a, const AnswerVector& u) {
    if (static_cast<int>(u.size()) != a.num_workers())
        throw std::invalid_argument("decision_profile: answer length mismatch");
    DecisionProfile p;
    p.min_distance = a.num_workers() + 1;
    for (int l = 0; l < a.num_classes(); ++l) {
        int d = hamming_distance(u, a.row(l));
        if (d < p.min_distance) {
            p.min_distance = d;
            p.argmin_rows.clear();
        }
        if (d == p.min_distance) p.argmin_rows.push_back(l);
    }
    p.tie_count = static_cast<int>(p.argmin_rows.size());
    return p;
}

inline bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

inline int log2_exact(int m) {
    if (!is_power_of_two(m)) throw std::invalid_argument("M must be a power of two");
    return std::countr_zero(static_cast<unsigned>(m));
}

/// Code matrix whose Hamming decoding reproduces bitwise majority voting:
/// column j in group i = floor(j / (N / log2 M)) carries the i-th most
/// significant bit of the class index.
inline CodeMatrix majority_equivalent_matrix(int num_classes, int num_workers) {
    const int b = log2_exact(num_classes);
    if (num_workers % b != 0)
        throw std::invalid_argument("majority_equivalent_matrix: N must be divisible by log2 M");
    const int per_group = num_workers / b;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(num_classes) * num_workers);
    for (int l = 0; l < num_classes; ++l)
        for (int j = 0; j < num_workers; ++j) {
            const int group = j / per_group;
            bits[static_cast<std::size_t>(l) * num_workers + j] =
                static_cast<std::uint8_t>((l >> (b - 1 - group)) & 1);
        }
    return CodeMatrix(num_classes, num_workers, std::move(bits));
}

/// Each column is a uniformly random arrangement of ceil(M/2) ones.
inline CodeMatrix random_balanced_matrix(int num_classes, int num_workers, std::uint64_t seed) {
    std::mt19937_64 rng = make_engine(seed);
    const int ones = (num_classes + 1) / 2;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(num_classes) * num_workers, 0);
    std::vector<int> idx(num_classes);
    for (int j = 0; j < num_workers; ++j) {
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int k = 0; k < ones; ++k)
            bits[static_cast<std::size_t>(idx[k]) * num_workers + j] = 1;
    }
    return CodeMatrix(num_classes, num_workers, std::move(bits));
}

/// Blockwise column repetition (the sub-optimal large-N construction).
inline CodeMatrix concatenate(const CodeMatrix& a, int times) {
    if (times < 1) throw std::invalid_argument("concatenate: times must be positive");
    auto cols = a.to_column_ints();
    std::vector<std::uint64_t> out;
    out.reserve(cols.size() * times);
    for (int t = 0; t < times; ++t) out.insert(out.end(), cols.begin(), cols.end());
    return CodeMatrix::from_column_ints(out, a.num_classes());
}

struct ValidationReport {
    bool distinct_rows = true;
    std::vector<std::string> warnings;
};

inline ValidationReport validate(const CodeMatrix& a) {
    ValidationReport r;
    r.distinct_rows = a.has_distinct_rows();
    if (!r.distinct_rows)
        r.warnings.push_back("duplicate rows: decoding stays well-defined via ties");
    return r;
}

}  // namespace crowdcode
