#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "codebook.hpp"
#include "crowd.hpp"

namespace crowdcode {

/// Largest N for which the 2^N received-vector enumeration is attempted.
inline constexpr int kEnumCap = 22;
/// Largest stick-breaking truncation accepted by the grouped evaluators.
inline constexpr int kTruncationCap = 16;

struct ExactPerfReport {
    double value = 0.0;
    std::string method;
    int num_classes = 0;
    int num_workers = 0;
    double mu = 0.0;
    std::optional<double> rho;
    std::optional<double> kappa;
    std::optional<int> truncation;
    std::uint64_t matrix_fingerprint = 0;
};

struct BoundReport {
    double value = 0.0;
    bool condition_holds = false;
    // margin[i*M + l] = sum_j (a_lj ^ a_ij)(2 q_{i,j} - 1); all must be < 0.
    std::vector<double> margins;
    int num_classes = 0;
};

namespace detail {

struct Kahan {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

inline double ipow(double x, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= x;
    return r;
}

inline double binom(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0.0;  // combinatorial convention
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Minimum distance and tie count for every received vector. Shared by the
/// exact coding evaluators; cost(i, l) needs only (d_{i,l} == dmin_i, tie_i).
struct DistanceTable {
    std::vector<std::uint8_t> dmin;
    std::vector<std::uint8_t> ties;

    explicit DistanceTable(const CodeMatrix& a) {
        const int n = a.num_workers();
        const int m = a.num_classes();
        const std::size_t size = std::size_t{1} << n;
        dmin.assign(size, static_cast<std::uint8_t>(n + 1));
        ties.assign(size, 0);
        for (std::size_t i = 0; i < size; ++i) {
            int best = n + 1, cnt = 0;
            for (int l = 0; l < m; ++l) {
                const int d = std::popcount(i ^ a.row_bits(l));
                if (d < best) {
                    best = d;
                    cnt = 1;
                } else if (d == best) {
                    ++cnt;
                }
            }
            dmin[i] = static_cast<std::uint8_t>(best);
            ties[i] = static_cast<std::uint8_t>(cnt);
        }
    }
};

/// Fills table[i] = prod_j (i_j ? w1[j] : 1 - w1[j]) for all i in {0,1}^N.
inline void fill_product_table(const std::vector<double>& w1, std::vector<double>& table) {
    const int n = static_cast<int>(w1.size());
    table.assign(std::size_t{1} << n, 0.0);
    table[0] = 1.0;
    std::size_t size = 1;
    for (int j = 0; j < n; ++j) {
        const double hi = w1[j], lo = 1.0 - w1[j];
        for (std::size_t i = 0; i < size; ++i) {
            table[i + size] = table[i] * hi;
            table[i] *= lo;
        }
        size <<= 1;
    }
}

inline void require_enum_cap(int n) {
    if (n > kEnumCap)
        throw std::invalid_argument(
            "exact enumeration refused for N=" + std::to_string(n) + " (cap " +
            std::to_string(kEnumCap) + "); use the Monte Carlo engine instead");
}

}  // namespace detail

/// Tie cost of a global decision H_l given the decision profile of the
/// received vector: 1 - 1/rho inside the argmin set, 1 outside.
inline double cost(const DecisionProfile& profile, int true_class) {
    if (profile.contains(true_class)) return 1.0 - 1.0 / profile.tie_count;
    return 1.0;
}

/// Exact expected misclassification probability of Hamming fusion for an
/// i.i.d. crowd with mean reliability mu, by enumeration of all 2^N received
/// vectors.
inline ExactPerfReport pe_iid_coding(const CodeMatrix& a, double mu) {
    if (mu < 0 || mu > 1) throw std::invalid_argument("mu must lie in [0,1]");
    const int n = a.num_workers(), m = a.num_classes();
    detail::require_enum_cap(n);

    const detail::DistanceTable dist(a);
    const std::size_t size = std::size_t{1} << n;
    std::vector<double> w1(n), table;
    detail::Kahan acc;
    for (int l = 0; l < m; ++l) {
        for (int j = 0; j < n; ++j) {
            const int others = a.column_weight(j) - a.bit(l, j);
            w1[j] = mu * a.bit(l, j) + (1.0 - mu) / (m - 1) * others;
        }
        detail::fill_product_table(w1, table);
        const std::uint64_t rb = a.row_bits(l);
        for (std::size_t i = 0; i < size; ++i) {
            const bool in_region = std::popcount(i ^ rb) == dist.dmin[i];
            const double c = in_region ? 1.0 - 1.0 / dist.ties[i] : 1.0;
            acc.add(table[i] * c);
        }
    }
    ExactPerfReport r;
    r.value = acc.sum / m;
    r.method = "iid-coding";
    r.num_classes = m;
    r.num_workers = n;
    r.mu = mu;
    r.matrix_fingerprint = a.fingerprint();
    return r;
}

/// P(Binomial(n,p) > k) = sum_{j=floor(k)+1}^{n} C(n,j) p^j (1-p)^{n-j}.
inline double survival_binomial(int n, double p, double k) {
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0,1]");
    int start = static_cast<int>(std::floor(k)) + 1;
    if (start < 0) start = 0;
    if (start > n) return 0.0;
    detail::Kahan acc;
    for (int j = start; j <= n; ++j)
        acc.add(detail::binom(n, j) * detail::ipow(p, j) * detail::ipow(1.0 - p, n - j));
    return acc.sum;
}

/// Exact expected misclassification probability of bitwise majority voting for
/// an i.i.d. crowd: closed form in the per-bit error rate q = M(1-mu)/(2(M-1)).
inline ExactPerfReport pe_iid_majority(int num_classes, int num_workers, double mu) {
    const int b = log2_exact(num_classes);
    if (num_workers % b != 0)
        throw std::invalid_argument("majority needs N divisible by log2 M");
    if (mu < 0 || mu > 1) throw std::invalid_argument("mu must lie in [0,1]");
    const int nt = num_workers / b;
    const double q = num_classes * (1.0 - mu) / (2.0 * (num_classes - 1));
    const double half = nt / 2.0;
    const double bit_term = 1.0 + survival_binomial(nt, 1.0 - q, half) - survival_binomial(nt, q, half);
    ExactPerfReport r;
    r.value = 1.0 - detail::ipow(bit_term, b) / num_classes;
    r.method = "iid-majority";
    r.num_classes = num_classes;
    r.num_workers = num_workers;
    r.mu = mu;
    return r;
}

namespace detail {

// Convex in theta; bracketed golden-section search on [0, theta_max].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

}  // namespace detail

/// Large-deviations upper bound on the Hamming-fusion misclassification
/// probability for fixed per-worker reliabilities. Valid (condition_holds)
/// only when every pairwise margin is negative.
inline BoundReport chernoff_bound(const CodeMatrix& a, const std::vector<double>& p) {
    const int n = a.num_workers(), m = a.num_classes();
    if (static_cast<int>(p.size()) != n)
        throw std::invalid_argument("chernoff_bound: reliability vector length mismatch");
    for (double v : p)
        if (v < 0 || v > 1) throw std::invalid_argument("reliabilities must lie in [0,1]");

    // q[i][j] = P(u_j != a_ij | H_i)
    std::vector<std::vector<double>> q(m, std::vector<double>(n, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            for (int l = 0; l < m; ++l) {
                const int diff = a.bit(i, j) ^ a.bit(l, j);
                if (diff) v += (l == i) ? p[j] : (1.0 - p[j]) / (m - 1);
            }
            q[i][j] = v;
        }

    BoundReport rep;
    rep.num_classes = m;
    rep.margins.assign(static_cast<std::size_t>(m) * m, 0.0);
    rep.condition_holds = true;
    for (int i = 0; i < m; ++i)
        for (int l = 0; l < m; ++l) {
            if (l == i) continue;
            double margin = 0.0;
            for (int j = 0; j < n; ++j)
                if (a.bit(l, j) ^ a.bit(i, j)) margin += 2.0 * q[i][j] - 1.0;
            rep.margins[static_cast<std::size_t>(i) * m + l] = margin;
            if (margin >= 0.0) rep.condition_holds = false;
        }
    if (!rep.condition_holds) return rep;

    detail::Kahan acc;
    for (int i = 0; i < m; ++i)
        for (int l = 0; l < m; ++l) {
            if (l == i) continue;
            auto exponent = [&](double theta) {
                double s = 0.0;
                for (int j = 0; j < n; ++j)
                    if (a.bit(l, j) ^ a.bit(i, j))
                        s += std::log(q[i][j] * std::exp(theta) +
                                      (1.0 - q[i][j]) * std::exp(-theta));
                return s;
            };
            acc.add(std::exp(detail::golden_min(exponent, 0.0, 50.0, 1e-9)));
        }
    rep.value = acc.sum / m;
    return rep;
}

/// Exact expected misclassification probability of Hamming fusion under the
/// peer-dependent reward model: partners (2k,2k+1) have reliability covariance
/// rho, pairs are mutually independent.
inline ExactPerfReport pe_paired_coding(const CodeMatrix& a, double mu, double rho) {
    const int n = a.num_workers(), m = a.num_classes();
    if (n % 2 != 0) throw std::invalid_argument("paired evaluation needs even N");
    if (mu < 0 || mu > 1) throw std::invalid_argument("mu must lie in [0,1]");
    detail::require_enum_cap(n);

    const double cross = rho + mu * mu;  // E[p_j p_{j_p}]
    const double scale = m / (2.0 * (m - 1.0));
    const double r_pair = scale * scale * ((1.0 - mu) * (1.0 - mu) + rho);

    const detail::DistanceTable dist(a);
    const std::size_t size = std::size_t{1} << n;
    std::vector<double> table;
    detail::Kahan acc;
    for (int l = 0; l < m; ++l) {
        // Per pair, the four (i_j, i_{j_p}) factor values.
        table.assign(size, 0.0);
        table[0] = 1.0;
        std::size_t filled = 1;
        for (int pr = 0; pr < n / 2; ++pr) {
            const int j = 2 * pr, jp = 2 * pr + 1;
            const double aj = a.bit(l, j), ajp = a.bit(l, jp);
            const double bj = a.column_weight(j) - a.bit(l, j);
            const double bjp = a.column_weight(jp) - a.bit(l, jp);
            const double ej = mu * aj + (1.0 - mu) / (m - 1) * bj;
            const double ejp = mu * ajp + (1.0 - mu) / (m - 1) * bjp;
            const double x = cross * aj * ajp +
                             (mu - cross) / (m - 1) * (aj * bjp + ajp * bj) +
                             4.0 * r_pair / (m * m) * bj * bjp;
            const double f00 = 1.0 - ej - ejp + x;
            const double f10 = ej - x;   // i_j = 1, i_{j_p} = 0
            const double f01 = ejp - x;  // i_j = 0, i_{j_p} = 1
            const double f11 = x;
            for (std::size_t i = 0; i < filled; ++i) {
                const double base = table[i];
                table[i] = base * f00;
                table[i + filled] = base * f10;
                table[i + 2 * filled] = base * f01;
                table[i + 3 * filled] = base * f11;
            }
            filled <<= 2;
        }
        const std::uint64_t rb = a.row_bits(l);
        for (std::size_t i = 0; i < size; ++i) {
            const bool in_region = std::popcount(i ^ rb) == dist.dmin[i];
            const double c = in_region ? 1.0 - 1.0 / dist.ties[i] : 1.0;
            acc.add(table[i] * c);
        }
    }
    ExactPerfReport rep;
    rep.value = acc.sum / m;
    rep.method = "paired-coding";
    rep.num_classes = m;
    rep.num_workers = n;
    rep.mu = mu;
    rep.rho = rho;
    rep.matrix_fingerprint = a.fingerprint();
    return rep;
}

/// Pair-count polynomial of the paired-majority closed form.
inline double paired_majority_bj(int nt, int j, double q, double r) {
    const int half = nt / 2;
    detail::Kahan acc;
    for (int g = 0; g <= (nt - j) / 2; ++g) {
        const double ways = detail::binom(half, g) * detail::binom(half - g, j + g - half);
        if (ways == 0.0) continue;
        acc.add(ways * detail::ipow(2.0 * (q - r), nt - j - 2 * g) *
                detail::ipow(r - 2.0 * q * r + r * r, g));
    }
    return acc.sum;
}

/// Exact expected misclassification probability of bitwise majority voting
/// with paired workers (partners share a bit group); needs N divisible by
/// 2 log2 M so each group holds whole pairs.
inline ExactPerfReport pe_paired_majority(int num_classes, int num_workers, double mu,
                                          double rho) {
    const int b = log2_exact(num_classes);
    if (num_workers % (2 * b) != 0)
        throw std::invalid_argument("paired majority needs N divisible by 2 log2 M");
    if (mu < 0 || mu > 1) throw std::invalid_argument("mu must lie in [0,1]");
    const int nt = num_workers / b;
    const double q = num_classes * (1.0 - mu) / (2.0 * (num_classes - 1));
    const double scale = num_classes / (2.0 * (num_classes - 1.0));
    const double r = scale * scale * ((1.0 - mu) * (1.0 - mu) + rho);
    const int half = nt / 2;
    detail::Kahan acc;
    for (int j = half + 1; j <= nt; ++j)
        acc.add(paired_majority_bj(nt, j, q, r) *
                (detail::ipow(1.0 - 2.0 * q + r, j - half) - detail::ipow(r, j - half)));
    ExactPerfReport rep;
    rep.value = 1.0 - detail::ipow(1.0 + acc.sum, b) / num_classes;
    rep.method = "paired-majority";
    rep.num_classes = num_classes;
    rep.num_workers = num_workers;
    rep.mu = mu;
    rep.rho = rho;
    return rep;
}

namespace detail {

inline void require_grouped_budget(int n, int truncation) {
    require_enum_cap(n);
    if (truncation > kTruncationCap)
        throw std::invalid_argument("grouped evaluation refused for L=" +
                                    std::to_string(truncation) + " (cap " +
                                    std::to_string(kTruncationCap) +
                                    "); use the Monte Carlo engine instead");
}

}  // namespace detail

/// Literal evaluation of the latent-group formula: the assignment sum weighted
/// by the stick-breaking probabilities times the i.i.d. inner product. As
/// printed, the inner product does not depend on the assignment, so the
/// assignment sum factors out as the truncated-process mass.
inline ExactPerfReport pe_grouped_coding(const CodeMatrix& a, double mu, double kappa,
                                         int truncation) {
    detail::require_grouped_budget(a.num_workers(), truncation);
    const double mass = assignment_mass(a.num_workers(), truncation, kappa);
    ExactPerfReport rep = pe_iid_coding(a, mu);
    rep.value *= mass;
    rep.method = "grouped-coding";
    rep.kappa = kappa;
    rep.truncation = truncation;
    return rep;
}

inline ExactPerfReport pe_grouped_paired_coding(const CodeMatrix& a, double mu, double rho,
                                                double kappa, int truncation) {
    detail::require_grouped_budget(a.num_workers(), truncation);
    const double mass = assignment_mass(a.num_workers(), truncation, kappa);
    ExactPerfReport rep = pe_paired_coding(a, mu, rho);
    rep.value *= mass;
    rep.method = "grouped-paired-coding";
    rep.kappa = kappa;
    rep.truncation = truncation;
    return rep;
}

}  // namespace crowdcode
