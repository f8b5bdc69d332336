#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <json.hpp>

#include "rng.hpp"

namespace crowdcode {

// ---------------------------------------------------------------------------
// Reliability distributions
// ---------------------------------------------------------------------------

/// Mixture of random-guess workers (reliability p_spammer, typically 1/M) and
/// perfect workers (p_hammer); quality is the hammer fraction.
struct SpammerHammer {
    double quality;
    double p_spammer;
    double p_hammer = 1.0;
};

struct BetaDist {
    double alpha;
    double beta;
};

using ReliabilityDist = std::variant<SpammerHammer, BetaDist>;

inline void check_dist(const ReliabilityDist& d) {
    if (const auto* sh = std::get_if<SpammerHammer>(&d)) {
        if (sh->quality < 0 || sh->quality > 1 || sh->p_spammer < 0 || sh->p_spammer > 1 ||
            sh->p_hammer < 0 || sh->p_hammer > 1)
            throw std::invalid_argument("spammer-hammer parameters must lie in [0,1]");
    } else {
        const auto& b = std::get<BetaDist>(d);
        if (b.alpha <= 0 || b.beta <= 0)
            throw std::invalid_argument("beta parameters must be positive");
    }
}

inline double dist_mean(const ReliabilityDist& d) {
    if (const auto* sh = std::get_if<SpammerHammer>(&d))
        return sh->quality * sh->p_hammer + (1.0 - sh->quality) * sh->p_spammer;
    const auto& b = std::get<BetaDist>(d);
    return b.alpha / (b.alpha + b.beta);
}

inline double dist_variance(const ReliabilityDist& d) {
    if (const auto* sh = std::get_if<SpammerHammer>(&d)) {
        const double m = dist_mean(d);
        return sh->quality * sh->p_hammer * sh->p_hammer +
               (1.0 - sh->quality) * sh->p_spammer * sh->p_spammer - m * m;
    }
    const auto& b = std::get<BetaDist>(d);
    const double s = b.alpha + b.beta;
    return b.alpha * b.beta / (s * s * (s + 1.0));
}

/// Inverse CDF. Beta(1/2,1/2) has the closed form sin^2(pi u / 2).
inline double dist_quantile(const ReliabilityDist& d, double u) {
    if (u <= 0) u = 0;
    if (u >= 1) u = 1;
    if (const auto* sh = std::get_if<SpammerHammer>(&d)) {
        const double lo = std::min(sh->p_spammer, sh->p_hammer);
        const double hi = std::max(sh->p_spammer, sh->p_hammer);
        const double mass_lo = (sh->p_spammer <= sh->p_hammer) ? 1.0 - sh->quality : sh->quality;
        return u < mass_lo ? lo : hi;
    }
    const auto& b = std::get<BetaDist>(d);
    if (b.alpha == 0.5 && b.beta == 0.5) {
        const double s = std::sin(1.5707963267948966 * u);
        return s * s;
    }
    return boost::math::quantile(boost::math::beta_distribution<>(b.alpha, b.beta), u);
}

// ---------------------------------------------------------------------------
// Crowd specification
// ---------------------------------------------------------------------------

enum class CrowdVariant { IID, Paired, LatentGroups, LatentGroupsPaired };

struct CrowdSpec {
    CrowdVariant variant = CrowdVariant::IID;
    ReliabilityDist dist = BetaDist{1.0, 1.0};
    double rho = 0.0;       // pair covariance (Paired variants)
    double kappa = 1.0;     // stick-breaking concentration (LatentGroups variants)
    int truncation = 10;    // stick-breaking truncation L

    bool paired() const {
        return variant == CrowdVariant::Paired || variant == CrowdVariant::LatentGroupsPaired;
    }
    bool grouped() const {
        return variant == CrowdVariant::LatentGroups ||
               variant == CrowdVariant::LatentGroupsPaired;
    }
};

inline double mean_reliability(const CrowdSpec& spec) { return dist_mean(spec.dist); }

/// User-facing knobs use the correlation coefficient; the evaluators take the
/// covariance. The bridge is rho = rho_corr * Var(p).
inline double covariance_from_correlation(const ReliabilityDist& d, double rho_corr) {
    if (rho_corr < -1 || rho_corr > 1)
        throw std::invalid_argument("correlation coefficient must lie in [-1,1]");
    return rho_corr * dist_variance(d);
}

inline void check_spec(const CrowdSpec& spec) {
    check_dist(spec.dist);
    if (spec.paired() && std::abs(spec.rho) > dist_variance(spec.dist) + 1e-12)
        throw std::invalid_argument("pair covariance exceeds the reliability variance");
    if (spec.grouped()) {
        if (spec.kappa <= 0) throw std::invalid_argument("kappa must be positive");
        if (spec.truncation < 1) throw std::invalid_argument("truncation must be positive");
    }
}

// ---------------------------------------------------------------------------
// Latent-group assignment probability (finite-truncation stick breaking)
// ---------------------------------------------------------------------------

struct GroupAssignment {
    std::vector<int> labels;  // s_j in {0,...,L-1}
    int num_groups = 1;

    std::vector<long> counts() const {
        std::vector<long> n(num_groups, 0);
        for (int s : labels) {
            if (s < 0 || s >= num_groups)
                throw std::invalid_argument("group label out of range");
            ++n[s];
        }
        return n;
    }
};

inline double lbeta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double assignment_prob_from_counts(const std::vector<long>& counts, double kappa,
                                          long num_workers) {
    if (kappa <= 0) throw std::invalid_argument("kappa must be positive");
    double lp = 0.0;
    long prefix = 0;
    for (long nl : counts) {
        prefix += nl;
        lp += lbeta(static_cast<double>(nl) + 1.0,
                    static_cast<double>(num_workers) + kappa - static_cast<double>(prefix)) -
              lbeta(1.0, kappa);
    }
    return std::exp(lp);
}

inline double group_assignment_prob(const GroupAssignment& s, double kappa) {
    return assignment_prob_from_counts(s.counts(), kappa, static_cast<long>(s.labels.size()));
}

/// Total probability mass of the truncated process: sum of P(S=s) over all
/// L^N assignments, enumerated by count vector with multinomial weights.
inline double assignment_mass(long num_workers, int truncation, double kappa) {
    std::vector<long> counts(truncation, 0);
    double total = 0.0;
    auto rec = [&](auto&& self, int level, long remaining, double log_multinom) -> void {
        if (level == truncation - 1) {
            counts[level] = remaining;
            const double lm = log_multinom - std::lgamma(static_cast<double>(remaining) + 1.0);
            total += std::exp(lm) * assignment_prob_from_counts(counts, kappa, num_workers);
            return;
        }
        for (long k = 0; k <= remaining; ++k) {
            counts[level] = k;
            self(self, level + 1, remaining - k,
                 log_multinom - std::lgamma(static_cast<double>(k) + 1.0));
        }
    };
    rec(rec, 0, num_workers, std::lgamma(static_cast<double>(num_workers) + 1.0));
    return total;
}

// ---------------------------------------------------------------------------
// Gaussian copula for paired reliabilities
// ---------------------------------------------------------------------------

namespace detail {

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475); }

/// E[p1 p2] when (p1,p2) are the marginal quantiles of a bivariate normal with
/// copula correlation c. Composite Gauss-Legendre over the unit square.
inline double copula_cross_moment(const ReliabilityDist& d, double c) {
    using gauss = boost::math::quadrature::gauss<double, 15>;
    constexpr int panels = 8;
    const boost::math::normal_distribution<> nd;

    std::vector<double> node_u, node_w;
    for (int p = 0; p < panels; ++p) {
        const double a = static_cast<double>(p) / panels;
        const double b = static_cast<double>(p + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t k = 0; k < gauss::abscissa().size(); ++k) {
            const double x = gauss::abscissa()[k];
            const double w = gauss::weights()[k] * half;
            node_u.push_back(mid + half * x);
            node_w.push_back(w);
            if (k > 0 || x != 0.0) {
                node_u.push_back(mid - half * x);
                node_w.push_back(w);
            }
        }
    }
    const std::size_t n = node_u.size();
    std::vector<double> q1(n), z(n);
    for (std::size_t k = 0; k < n; ++k) {
        q1[k] = dist_quantile(d, node_u[k]);
        z[k] = boost::math::quantile(nd, node_u[k]);
    }
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double inner = 0.0;
        for (std::size_t m = 0; m < n; ++m)
            inner += node_w[m] * dist_quantile(d, std_normal_cdf(c * z[k] + s * z[m]));
        acc += node_w[k] * q1[k] * inner;
    }
    return acc;
}

/// Copula correlation whose induced linear covariance equals rho. Bisection on
/// the monotone map c -> cov(c).
inline double calibrate_copula(const ReliabilityDist& d, double rho) {
    const double mu = dist_mean(d);
    auto cov = [&](double c) { return copula_cross_moment(d, c) - mu * mu; };
    if (std::abs(rho) < 1e-14) return 0.0;
    double lo = -1.0, hi = 1.0;
    const double cov_lo = cov(lo), cov_hi = cov(hi);
    if (rho < cov_lo - 1e-9 || rho > cov_hi + 1e-9)
        throw std::invalid_argument("pair covariance " + std::to_string(rho) +
                                    " is infeasible for this marginal (achievable range [" +
                                    std::to_string(cov_lo) + "," + std::to_string(cov_hi) + "])");
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cov(mid) < rho)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Draws reliability vectors for a fixed CrowdSpec. Calibrates the pair copula
/// once at construction; sampling itself is cheap and deterministic given the
/// engine state.
class CrowdSampler {
public:
    explicit CrowdSampler(CrowdSpec spec) : spec_(std::move(spec)) {
        check_spec(spec_);
        if (spec_.variant == CrowdVariant::Paired)
            copula_c_ = detail::calibrate_copula(spec_.dist, spec_.rho);
        else if (spec_.variant == CrowdVariant::LatentGroupsPaired)
            copula_c_ = spec_.rho >= 0 ? std::min(1.0, spec_.rho / std::max(1e-12, dist_variance(spec_.dist)))
                                       : std::max(-1.0, spec_.rho / std::max(1e-12, dist_variance(spec_.dist)));
    }

    const CrowdSpec& spec() const { return spec_; }
    double copula_correlation() const { return copula_c_; }

    std::vector<double> sample(int num_workers, std::mt19937_64& rng,
                               GroupAssignment* groups_out = nullptr) const {
        if (spec_.paired() && num_workers % 2 != 0)
            throw std::invalid_argument("paired crowds need an even number of workers");
        switch (spec_.variant) {
            case CrowdVariant::IID: return sample_iid(num_workers, rng);
            case CrowdVariant::Paired: return sample_paired(num_workers, rng);
            case CrowdVariant::LatentGroups:
            case CrowdVariant::LatentGroupsPaired:
                return sample_grouped(num_workers, rng, groups_out);
        }
        throw std::logic_error("unreachable");
    }

private:
    std::vector<double> sample_iid(int n, std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> p(n);
        for (auto& v : p) v = dist_quantile(spec_.dist, unif(rng));
        return p;
    }

    // Partners are (0,1),(2,3),...; cross-pair independence.
    std::vector<double> sample_paired(int n, std::mt19937_64& rng) const {
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double c = copula_c_, s = std::sqrt(std::max(0.0, 1.0 - c * c));
        std::vector<double> p(n);
        for (int k = 0; k < n / 2; ++k) {
            const double z1 = gauss(rng);
            const double z2 = c * z1 + s * gauss(rng);
            p[2 * k] = dist_quantile(spec_.dist, detail::std_normal_cdf(z1));
            p[2 * k + 1] = dist_quantile(spec_.dist, detail::std_normal_cdf(z2));
        }
        return p;
    }

    std::vector<double> sample_grouped(int n, std::mt19937_64& rng,
                                       GroupAssignment* groups_out) const {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const int big_l = spec_.truncation;

        // Stick weights; the residual stick is lumped into the last label.
        std::vector<double> lambda(big_l, 0.0);
        double stick = 1.0;
        for (int l = 0; l < big_l - 1; ++l) {
            const double gamma = 1.0 - std::pow(unif(rng), 1.0 / spec_.kappa);
            lambda[l] = gamma * stick;
            stick *= (1.0 - gamma);
        }
        lambda[big_l - 1] = stick;

        GroupAssignment assign;
        assign.num_groups = big_l;
        assign.labels.resize(n);
        for (int j = 0; j < n; ++j) {
            double u = unif(rng), acc = 0.0;
            int s = big_l - 1;
            for (int l = 0; l < big_l; ++l) {
                acc += lambda[l];
                if (u < acc) {
                    s = l;
                    break;
                }
            }
            assign.labels[j] = s;
        }

        std::vector<double> group_rel(big_l);
        for (auto& r : group_rel) {
            double r0 = dist_quantile(spec_.dist, unif(rng));
            group_rel_clamp(r0);
            r = r0;
        }

        // p_j ~ Beta(r/(1-r), 1), so E[p_j] = r; inverse CDF is u^{1/shape}.
        std::vector<double> p(n);
        if (spec_.variant == CrowdVariant::LatentGroups) {
            for (int j = 0; j < n; ++j) {
                const double r = group_rel[assign.labels[j]];
                p[j] = std::pow(unif(rng), (1.0 - r) / r);
            }
        } else {
            std::normal_distribution<double> gauss(0.0, 1.0);
            const double c = copula_c_, s = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int k = 0; k < n / 2; ++k) {
                const double z1 = gauss(rng);
                const double z2 = c * z1 + s * gauss(rng);
                const double r1 = group_rel[assign.labels[2 * k]];
                const double r2 = group_rel[assign.labels[2 * k + 1]];
                p[2 * k] = std::pow(detail::std_normal_cdf(z1), (1.0 - r1) / r1);
                p[2 * k + 1] = std::pow(detail::std_normal_cdf(z2), (1.0 - r2) / r2);
            }
        }
        if (groups_out) *groups_out = std::move(assign);
        return p;
    }

    static void group_rel_clamp(double& r) {
        // Keeps the Beta shape parameter r/(1-r) finite; r=1 effectively maps
        // to the point mass p=1.
        if (r < 1e-6) r = 1e-6;
        if (r > 1.0 - 1e-6) r = 1.0 - 1e-6;
    }

    CrowdSpec spec_;
    double copula_c_ = 0.0;
};

inline std::vector<double> sample_reliabilities(const CrowdSpec& spec, int num_workers,
                                                std::uint64_t seed) {
    CrowdSampler sampler(spec);
    auto rng = make_engine(seed);
    return sampler.sample(num_workers, rng);
}

// ---------------------------------------------------------------------------
// JSON config form
// ---------------------------------------------------------------------------

inline nlohmann::json dist_to_json(const ReliabilityDist& d) {
    if (const auto* sh = std::get_if<SpammerHammer>(&d))
        return {{"type", "spammer-hammer"},
                {"q", sh->quality},
                {"p_spammer", sh->p_spammer},
                {"p_hammer", sh->p_hammer}};
    const auto& b = std::get<BetaDist>(d);
    return {{"type", "beta"}, {"alpha", b.alpha}, {"beta", b.beta}};
}

inline ReliabilityDist dist_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "spammer-hammer")
        return SpammerHammer{j.at("q").get<double>(), j.at("p_spammer").get<double>(),
                             j.value("p_hammer", 1.0)};
    if (type == "beta") return BetaDist{j.at("alpha").get<double>(), j.at("beta").get<double>()};
    throw std::invalid_argument("unknown reliability distribution type: " + type);
}

inline nlohmann::json spec_to_json(const CrowdSpec& s) {
    static const char* names[] = {"iid", "paired", "latent-groups", "latent-groups-paired"};
    nlohmann::json j{{"variant", names[static_cast<int>(s.variant)]},
                     {"dist", dist_to_json(s.dist)}};
    if (s.paired()) j["rho_corr"] = s.rho / dist_variance(s.dist);
    if (s.grouped()) {
        j["kappa"] = s.kappa;
        j["truncation"] = s.truncation;
    }
    return j;
}

inline CrowdSpec spec_from_json(const nlohmann::json& j) {
    CrowdSpec s;
    const std::string v = j.at("variant").get<std::string>();
    if (v == "iid")
        s.variant = CrowdVariant::IID;
    else if (v == "paired")
        s.variant = CrowdVariant::Paired;
    else if (v == "latent-groups")
        s.variant = CrowdVariant::LatentGroups;
    else if (v == "latent-groups-paired")
        s.variant = CrowdVariant::LatentGroupsPaired;
    else
        throw std::invalid_argument("unknown crowd variant: " + v);
    s.dist = dist_from_json(j.at("dist"));
    if (j.contains("rho_corr"))
        s.rho = covariance_from_correlation(s.dist, j.at("rho_corr").get<double>());
    s.kappa = j.value("kappa", 1.0);
    s.truncation = j.value("truncation", 10);
    check_spec(s);
    return s;
}

}  // namespace crowdcode
