#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "codebook.hpp"
#include "crowd.hpp"
#include "fusion.hpp"
#include "rng.hpp"

namespace crowdcode {

enum class ResamplePolicy { ReliabilitiesPerTrial, FixedCrowd };
enum class PartnerPlacement { SameBitGroup, Independent };

struct MajorityDescriptor {
    int num_classes = 2;
    std::vector<int> group_map;
};

inline MajorityDescriptor make_majority_descriptor(int num_classes, int num_workers,
                                                   PartnerPlacement placement) {
    if (placement == PartnerPlacement::SameBitGroup)
        return {num_classes, contiguous_group_map(num_classes, num_workers)};
    return {num_classes, round_robin_group_map(num_classes, num_workers)};
}

struct SimConfig {
    std::optional<CodeMatrix> matrix;
    std::optional<MajorityDescriptor> majority;
    CrowdSpec crowd;
    long trials = 100000;
    std::uint64_t seed = 0;
    ResamplePolicy resample = ResamplePolicy::ReliabilitiesPerTrial;

    int num_workers() const {
        if (matrix) return matrix->num_workers();
        if (majority) return static_cast<int>(majority->group_map.size());
        throw std::invalid_argument("SimConfig: need a code matrix or a majority descriptor");
    }
    int num_classes() const {
        if (matrix) return matrix->num_classes();
        return majority->num_classes;
    }
};

struct McEstimate {
    double pe = 0.0;
    double stderr_ = 0.0;
    long trials = 0;
    long errors = 0;
};

struct McResult {
    std::optional<McEstimate> coding;
    std::optional<McEstimate> majority;
};

/// End-to-end Monte Carlo: per trial draw a class, reliabilities, local
/// decisions and answers, then decode. Trial t uses the stream derived from
/// (seed, t), so estimates are reproducible and order-independent. Coding and
/// majority estimates share local decisions (paired comparison).
inline McResult run_mc(const SimConfig& config, std::ostream* trace = nullptr) {
    if (config.trials < 1) throw std::invalid_argument("run_mc: trials must be >= 1");
    if (config.matrix && config.majority &&
        config.matrix->num_workers() != static_cast<int>(config.majority->group_map.size()))
        throw std::invalid_argument("run_mc: matrix and majority worker counts differ");

    const int n = config.num_workers();
    const int m = config.num_classes();
    const CrowdSampler sampler(config.crowd);

    std::vector<double> fixed_p;
    if (config.resample == ResamplePolicy::FixedCrowd) {
        auto rng = make_engine(config.seed, 0);
        fixed_p = sampler.sample(n, rng);
    }

    if (trace) *trace << "trial,true_class,answers,decoded\n";

    long code_errors = 0, maj_errors = 0;
    std::vector<int> decisions(n);
    for (long t = 0; t < config.trials; ++t) {
        auto rng = make_engine(config.seed, static_cast<std::uint64_t>(t) + 1);
        std::uniform_int_distribution<int> pick_class(0, m - 1);
        const int truth = pick_class(rng);

        const std::vector<double>& p =
            config.resample == ResamplePolicy::FixedCrowd ? fixed_p : sampler.sample(n, rng);
        for (int j = 0; j < n; ++j) decisions[j] = local_decision(truth, p[j], m, rng);

        int decoded = -1;
        if (config.matrix) {
            const AnswerVector u = answers_from_decisions(*config.matrix, decisions);
            decoded = decode_hamming(*config.matrix, u, rng).decided_class;
            if (decoded != truth) ++code_errors;
            if (trace) {
                *trace << t << ',' << truth << ',';
                for (auto a : u) *trace << (a == kMissing ? '-' : static_cast<char>('0' + a));
                *trace << ',' << decoded << '\n';
            }
        }
        if (config.majority) {
            AnswerVector u(n);
            for (int j = 0; j < n; ++j)
                u[j] = majority_bit_answer(decisions[j], config.majority->group_map[j], m);
            const int maj = decode_majority(m, config.majority->group_map, u, rng).decided_class;
            if (maj != truth) ++maj_errors;
        }
    }

    auto estimate = [&](long errors) {
        McEstimate e;
        e.trials = config.trials;
        e.errors = errors;
        e.pe = static_cast<double>(errors) / config.trials;
        e.stderr_ = std::sqrt(e.pe * (1.0 - e.pe) / config.trials);
        return e;
    };
    McResult r;
    if (config.matrix) r.coding = estimate(code_errors);
    if (config.majority) r.majority = estimate(maj_errors);
    return r;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

enum class SweepAxis { Reliability, Quality, Beta, RhoCorr, Kappa };

struct SweepRow {
    double param = 0.0;
    std::optional<McEstimate> code_mc;
    std::optional<McEstimate> maj_mc;
    std::optional<double> code_exact;
    std::optional<double> maj_exact;
    std::optional<double> bound;
};

namespace detail {

inline CrowdSpec apply_axis(CrowdSpec spec, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::Reliability:
            spec.dist = SpammerHammer{0.0, value, 1.0};  // degenerate: every p_j = value
            break;
        case SweepAxis::Quality: {
            auto sh = std::get<SpammerHammer>(spec.dist);
            sh.quality = value;
            spec.dist = sh;
            break;
        }
        case SweepAxis::Beta: {
            auto b = std::get<BetaDist>(spec.dist);
            b.beta = value;
            spec.dist = b;
            break;
        }
        case SweepAxis::RhoCorr:
            spec.rho = covariance_from_correlation(spec.dist, value);
            break;
        case SweepAxis::Kappa:
            spec.kappa = value;
            break;
    }
    return spec;
}

}  // namespace detail

/// Monte Carlo estimates plus the exact evaluators and the Chernoff bound
/// wherever they apply at this size.
inline SweepRow evaluate_point(const SimConfig& config, double param_value) {
    SweepRow row;
    row.param = param_value;
    const McResult mc = run_mc(config);
    row.code_mc = mc.coding;
    row.maj_mc = mc.majority;

    const double mu = mean_reliability(config.crowd);
    const int m = config.num_classes();
    const int n = config.num_workers();
    const bool maj_ok = config.majority && is_power_of_two(m);
    try {
        if (config.matrix && n <= kEnumCap) {
            switch (config.crowd.variant) {
                case CrowdVariant::IID:
                    row.code_exact = pe_iid_coding(*config.matrix, mu).value;
                    break;
                case CrowdVariant::Paired:
                    row.code_exact = pe_paired_coding(*config.matrix, mu, config.crowd.rho).value;
                    break;
                case CrowdVariant::LatentGroups:
                    row.code_exact = pe_grouped_coding(*config.matrix, mu, config.crowd.kappa,
                                                       config.crowd.truncation)
                                         .value;
                    break;
                case CrowdVariant::LatentGroupsPaired:
                    row.code_exact =
                        pe_grouped_paired_coding(*config.matrix, mu, config.crowd.rho,
                                                 config.crowd.kappa, config.crowd.truncation)
                            .value;
                    break;
            }
        }
        if (maj_ok && config.crowd.variant == CrowdVariant::IID && n % log2_exact(m) == 0)
            row.maj_exact = pe_iid_majority(m, n, mu).value;
        if (maj_ok && config.crowd.variant == CrowdVariant::Paired &&
            n % (2 * log2_exact(m)) == 0)
            row.maj_exact = pe_paired_majority(m, n, mu, config.crowd.rho).value;
    } catch (const std::invalid_argument&) {
        // exact evaluation out of budget at this size; MC columns stand alone
    }
    if (config.matrix && config.crowd.variant == CrowdVariant::IID) {
        const BoundReport b = chernoff_bound(*config.matrix, std::vector<double>(n, mu));
        if (b.condition_holds) row.bound = b.value;
    }
    return row;
}

/// One row per grid point, each with an independently derived seed stream.
inline std::vector<SweepRow> sweep(const SimConfig& base, SweepAxis axis,
                                   const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        SimConfig config = base;
        config.crowd = detail::apply_axis(base.crowd, axis, grid[k]);
        config.seed = derive_seed(base.seed, 1000 + k);
        rows.push_back(evaluate_point(config, grid[k]));
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "param,pe_code_mc,se_code,pe_maj_mc,se_maj,pe_code_exact,pe_maj_exact,bound\n";
    auto opt = [](std::ostream& o, const std::optional<double>& v) {
        if (v) o << *v;
    };
    for (const auto& r : rows) {
        out << r.param << ',';
        if (r.code_mc)
            out << r.code_mc->pe << ',' << r.code_mc->stderr_ << ',';
        else
            out << ",,";
        if (r.maj_mc)
            out << r.maj_mc->pe << ',' << r.maj_mc->stderr_ << ',';
        else
            out << ",,";
        opt(out, r.code_exact);
        out << ',';
        opt(out, r.maj_exact);
        out << ',';
        opt(out, r.bound);
        out << '\n';
    }
}

}  // namespace crowdcode
