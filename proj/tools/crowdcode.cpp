// Command-line front end: code-matrix design, exact evaluation, Chernoff
// bounds, Monte Carlo simulation, parameter sweeps, dataset scoring, and
// canned figure-reproduction runs. Every file-producing run also writes
// <out>.manifest.json recording the subcommand, the full parameter set, the
// seed, the tool version, input fingerprints, and the output paths.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <crowdcode/analytic.hpp>
#include <crowdcode/codebook.hpp>
#include <crowdcode/crowd.hpp>
#include <crowdcode/datasets.hpp>
#include <crowdcode/design.hpp>
#include <crowdcode/fusion.hpp>
#include <crowdcode/rng.hpp>
#include <crowdcode/simkit.hpp>

using json = nlohmann::json;
using namespace crowdcode;

#ifndef CROWDCODE_VERSION
#define CROWDCODE_VERSION "dev"
#endif

namespace {

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

CodeMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
    json j;
    in >> j;
    return CodeMatrix::from_json(j);
}

void save_matrix(const CodeMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << a.to_json().dump(2) << '\n';
}

void write_manifest(const std::string& first_output, const std::string& subcommand,
                    json params, std::uint64_t seed, json inputs,
                    std::vector<std::string> outputs) {
    const std::string path = first_output + ".manifest.json";
    json m{{"subcommand", subcommand}, {"params", std::move(params)},       {"seed", seed},
           {"version", CROWDCODE_VERSION}, {"inputs", std::move(inputs)},
           {"outputs", std::move(outputs)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << m.dump(2) << '\n';
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t pos = 0;
        grid.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument("bad grid value: " + cell);
    }
    if (grid.empty()) throw std::invalid_argument("empty grid");
    return grid;
}

void write_rows(const std::string& out_path, const std::vector<SweepRow>& rows) {
    if (out_path.empty()) {
        std::cout << std::setprecision(12);
        write_sweep_csv(std::cout, rows);
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << std::setprecision(12);
    write_sweep_csv(out, rows);
}

// Crowd-model flags shared by simulate/sweep/design/reproduce-figure.
struct CrowdFlags {
    std::string variant = "iid";
    std::string model = "spammer-hammer";
    double q = 1.0;
    double p_spammer = -1.0;  // -1 means 1/M
    double p_hammer = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double rho_corr = 0.0;
    double kappa = 1.0;
    int truncation = 10;

    void attach(CLI::App* cmd) {
        cmd->add_option("--variant", variant, "crowd dependence model")
            ->check(CLI::IsMember({"iid", "paired", "latent-groups", "latent-groups-paired"}));
        cmd->add_option("--model", model, "reliability distribution")
            ->check(CLI::IsMember({"spammer-hammer", "beta"}));
        cmd->add_option("--q", q, "hammer fraction (spammer-hammer)");
        cmd->add_option("--p-spammer", p_spammer, "spammer reliability (default 1/M)");
        cmd->add_option("--p-hammer", p_hammer, "hammer reliability");
        cmd->add_option("--alpha", alpha, "beta distribution alpha");
        cmd->add_option("--beta", beta, "beta distribution beta");
        cmd->add_option("--rho-corr", rho_corr, "partner reliability correlation in [-1,1]");
        cmd->add_option("--kappa", kappa, "stick-breaking concentration");
        cmd->add_option("--truncation", truncation, "stick-breaking truncation L");
    }

    CrowdSpec build(int num_classes) const {
        CrowdSpec s;
        if (variant == "paired")
            s.variant = CrowdVariant::Paired;
        else if (variant == "latent-groups")
            s.variant = CrowdVariant::LatentGroups;
        else if (variant == "latent-groups-paired")
            s.variant = CrowdVariant::LatentGroupsPaired;
        if (model == "beta")
            s.dist = BetaDist{alpha, beta};
        else
            s.dist = SpammerHammer{q, p_spammer < 0 ? 1.0 / num_classes : p_spammer, p_hammer};
        if (s.paired()) s.rho = covariance_from_correlation(s.dist, rho_corr);
        s.kappa = kappa;
        s.truncation = truncation;
        check_spec(s);
        return s;
    }

    json to_json() const {
        return {{"variant", variant},   {"model", model},
                {"q", q},               {"p_spammer", p_spammer},
                {"p_hammer", p_hammer}, {"alpha", alpha},
                {"beta", beta},         {"rho_corr", rho_corr},
                {"kappa", kappa},       {"truncation", truncation}};
    }
};

// ---------------------------------------------------------------------------
// design
// ---------------------------------------------------------------------------

struct DesignArgs {
    int m = 4, n = 10;
    double mu = 0.9;
    std::uint64_t seed = 0;
    std::string out;
    double t0 = 0.1, cooling = 0.95, tmin = 1e-4;
    int moves = 0;
    bool balanced = true;
    bool refine_ccr = false;
};

int run_design(const DesignArgs& a) {
    if (a.n > kEnumCap)
        throw std::invalid_argument("design objective needs N <= " + std::to_string(kEnumCap));
    const DesignObjective objective = [&](const CodeMatrix& cand) {
        return pe_iid_coding(cand, a.mu).value;
    };
    AnnealSchedule sched;
    sched.initial_temperature = a.t0;
    sched.cooling_factor = a.cooling;
    sched.min_temperature = a.tmin;
    sched.moves_per_temperature = a.moves;
    sched.seed = a.seed;
    sched.balanced_moves = a.balanced;
    DesignResult result = anneal(a.m, a.n, objective, sched);
    if (a.refine_ccr) {
        DesignResult refined = cyclic_column_replacement(result.matrix, objective, a.balanced);
        if (refined.objective <= result.objective) result = std::move(refined);
    }
    save_matrix(result.matrix, a.out);
    const json params{{"m", a.m},
                      {"n", a.n},
                      {"mu", a.mu},
                      {"objective_value", result.objective},
                      {"schedule",
                       {{"t0", a.t0},
                        {"cooling", a.cooling},
                        {"tmin", a.tmin},
                        {"moves_per_temperature", a.moves},
                        {"balanced_moves", a.balanced},
                        {"refine_ccr", a.refine_ccr}}}};
    write_manifest(a.out, "design", params, a.seed, json::object(), {a.out});
    std::cout << std::setprecision(12) << "objective " << result.objective << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// eval-exact
// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string matrix;
    double mu = 0.9;
    std::optional<double> rho;       // pair covariance, direct
    std::optional<double> rho_corr;  // pair correlation (needs variance; Beta(0.5,0.5))
    std::optional<double> kappa;
    int truncation = 3;
    bool majority = false;
    int m = 4, n = 10;
};

int run_eval_exact(const EvalArgs& a) {
    double rho = 0.0;
    bool paired = false;
    if (a.rho && a.rho_corr) throw std::invalid_argument("give --rho or --rho-corr, not both");
    if (a.rho) {
        rho = *a.rho;
        paired = true;
    } else if (a.rho_corr) {
        rho = covariance_from_correlation(BetaDist{0.5, 0.5}, *a.rho_corr);
        paired = true;
    }
    double value = 0.0;
    if (a.majority) {
        value = paired ? pe_paired_majority(a.m, a.n, a.mu, rho).value
                       : pe_iid_majority(a.m, a.n, a.mu).value;
    } else {
        if (a.matrix.empty()) throw std::invalid_argument("--matrix required unless --majority");
        const CodeMatrix mat = load_matrix(a.matrix);
        if (a.kappa)
            value = paired
                        ? pe_grouped_paired_coding(mat, a.mu, rho, *a.kappa, a.truncation).value
                        : pe_grouped_coding(mat, a.mu, *a.kappa, a.truncation).value;
        else
            value = paired ? pe_paired_coding(mat, a.mu, rho).value
                           : pe_iid_coding(mat, a.mu).value;
    }
    std::cout << std::setprecision(15) << value << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

int run_bound(const std::string& matrix_path, double mu) {
    const CodeMatrix mat = load_matrix(matrix_path);
    const BoundReport b = chernoff_bound(mat, std::vector<double>(mat.num_workers(), mu));
    json out{{"value", b.value}, {"condition_holds", b.condition_holds}};
    std::cout << out.dump() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// simulate / sweep
// ---------------------------------------------------------------------------

struct SimArgs {
    std::string matrix;
    bool majority = false;
    int m = 4, n = 10;
    CrowdFlags crowd;
    long trials = 100000;
    std::uint64_t seed = 0;
    std::string out;
    std::string axis = "p";
    std::string grid;
};

SimConfig build_sim_config(const SimArgs& a) {
    SimConfig cfg;
    int m = a.m, n = a.n;
    if (!a.matrix.empty()) {
        cfg.matrix = load_matrix(a.matrix);
        m = cfg.matrix->num_classes();
        n = cfg.matrix->num_workers();
    }
    if (a.majority || a.matrix.empty())
        cfg.majority = make_majority_descriptor(m, n, PartnerPlacement::SameBitGroup);
    cfg.crowd = a.crowd.build(m);
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    return cfg;
}

json sim_params(const SimArgs& a) {
    return {{"matrix", a.matrix}, {"majority", a.majority}, {"m", a.m},
            {"n", a.n},           {"crowd", a.crowd.to_json()}, {"trials", a.trials}};
}

int run_simulate(const SimArgs& a) {
    const SimConfig cfg = build_sim_config(a);
    const SweepRow row = evaluate_point(cfg, mean_reliability(cfg.crowd));
    write_rows(a.out, {row});
    if (!a.out.empty()) {
        json inputs = json::object();
        if (cfg.matrix) inputs["matrix_fingerprint"] = cfg.matrix->fingerprint();
        write_manifest(a.out, "simulate", sim_params(a), a.seed, inputs, {a.out});
    }
    return 0;
}

SweepAxis parse_axis(const std::string& axis) {
    if (axis == "p") return SweepAxis::Reliability;
    if (axis == "q") return SweepAxis::Quality;
    if (axis == "beta") return SweepAxis::Beta;
    if (axis == "rho-corr") return SweepAxis::RhoCorr;
    if (axis == "kappa") return SweepAxis::Kappa;
    throw std::invalid_argument("unknown sweep axis: " + axis);
}

int run_sweep(const SimArgs& a) {
    const SimConfig base = build_sim_config(a);
    const auto rows = sweep(base, parse_axis(a.axis), parse_grid(a.grid));
    write_rows(a.out, rows);
    if (!a.out.empty()) {
        json params = sim_params(a);
        params["axis"] = a.axis;
        params["grid"] = a.grid;
        json inputs = json::object();
        if (base.matrix) inputs["matrix_fingerprint"] = base.matrix->fingerprint();
        write_manifest(a.out, "sweep", params, a.seed, inputs, {a.out});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// dataset
// ---------------------------------------------------------------------------

struct DatasetArgs {
    std::string csv;
    int m = 8;
    std::string matrix = "design";  // file path, or "design" to anneal one
    std::uint64_t seed = 0;
    std::string out;
};

int run_dataset(const DatasetArgs& a) {
    const auto records = load_csv(a.csv);
    const int n = static_cast<int>(records.front().worker_values.size());
    CodeMatrix mat = [&] {
        if (a.matrix != "design") return load_matrix(a.matrix);
        if (n > kEnumCap)
            throw std::invalid_argument("cannot design a matrix for N > " +
                                        std::to_string(kEnumCap) + " workers");
        AnnealSchedule sched;
        sched.cooling_factor = 0.9;
        sched.moves_per_temperature = 10 * n;
        sched.min_temperature = 1e-3;
        sched.seed = derive_seed(a.seed, 0xde);
        sched.balanced_moves = true;
        const DesignObjective objective = [&](const CodeMatrix& cand) {
            return pe_iid_coding(cand, 0.9).value;
        };
        return anneal(a.m, n, objective, sched).matrix;
    }();
    const auto groups = contiguous_group_map(a.m, n);
    const EvalReport rep = evaluate_dataset(records, mat, groups, a.seed, a.csv);
    json out{{"dataset", rep.dataset_name},
             {"coding_error_fraction", rep.coding_error_fraction},
             {"majority_error_fraction", rep.majority_error_fraction},
             {"task_count", rep.task_count},
             {"matrix_fingerprint", rep.matrix_fingerprint},
             {"matrix", mat.to_json()}};
    if (a.out.empty()) {
        std::cout << out.dump(2) << '\n';
    } else {
        out["manifest"] = a.out + ".manifest.json";
        std::ofstream f(a.out);
        if (!f) throw std::runtime_error("cannot write " + a.out);
        f << out.dump(2) << '\n';
        write_manifest(a.out, "dataset",
                       {{"csv", a.csv}, {"m", a.m}, {"matrix", a.matrix}}, a.seed,
                       {{"matrix_fingerprint", rep.matrix_fingerprint}}, {a.out});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce-figure
// ---------------------------------------------------------------------------

const std::vector<std::uint64_t> kM4Cols = {5, 12, 3, 10, 12, 9, 9, 10, 9, 12};
const std::vector<std::uint64_t> kM8Cols = {150, 150, 90,  240, 240, 153, 102, 204,
                                            204, 204, 170, 170, 170, 170, 170};

struct FigureArgs {
    std::string figure;
    long trials = 10000;
    std::uint64_t seed = 1;
    std::string out;
};

SimConfig figure_base(const CodeMatrix& mat, const CrowdSpec& crowd, const FigureArgs& a) {
    SimConfig cfg;
    cfg.matrix = mat;
    cfg.majority =
        make_majority_descriptor(mat.num_classes(), mat.num_workers(),
                                 PartnerPlacement::SameBitGroup);
    cfg.crowd = crowd;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    return cfg;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

// Designed-vs-random-vs-majority comparison across crowd quality.
void figure_design_comparison(const FigureArgs& a, std::ostream& out) {
    const int m = 8, n = 15;
    const std::vector<double> q_grid = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    out << "param,pe_sa,pe_random,pe_majority\n";
    for (double q : q_grid) {
        const double mu = q + (1.0 - q) / m;
        const DesignObjective objective = [&](const CodeMatrix& cand) {
            return pe_iid_coding(cand, mu).value;
        };
        AnnealSchedule sched;
        sched.cooling_factor = 0.85;
        sched.moves_per_temperature = 2 * n;
        sched.min_temperature = 1e-3;
        sched.seed = a.seed;
        sched.balanced_moves = true;
        const DesignResult designed = anneal(m, n, objective, sched);
        const double random_pe = objective(random_balanced_matrix(m, n, a.seed));
        const double majority_pe = pe_iid_majority(m, n, mu).value;
        out << q << ',' << designed.objective << ',' << random_pe << ',' << majority_pe << '\n';
    }
}

int run_figure(const FigureArgs& args) {
    FigureArgs a = args;
    if (a.out.empty()) a.out = a.figure + ".csv";
    std::vector<std::string> outputs{a.out};
    const auto m4 = CodeMatrix::from_column_ints(kM4Cols, 4);
    const auto m8 = CodeMatrix::from_column_ints(kM8Cols, 8);

    auto grid_range = [](double lo, double hi, double step) {
        std::vector<double> g;
        for (int k = 0;; ++k) {
            double v = lo + k * step;
            if (v > hi + 1e-9) break;
            if (std::abs(v) < 1e-12) v = 0.0;
            g.push_back(std::min(v, hi));  // guard against accumulation past hi
        }
        return g;
    };
    auto emit = [&](const std::vector<SweepRow>& rows, const std::string& path) {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << std::setprecision(12);
        write_sweep_csv(f, rows);
    };

    if (a.figure == "fig2") {
        // exact + MC coding/majority error against a common worker reliability
        CrowdSpec crowd;
        crowd.dist = SpammerHammer{0.0, 0.5, 1.0};
        emit(sweep(figure_base(m4, crowd, a), SweepAxis::Reliability,
                   grid_range(0.3, 1.0, 0.05)),
             a.out);
    } else if (a.figure == "fig3") {
        CrowdSpec crowd;
        crowd.dist = SpammerHammer{0.5, 0.25, 1.0};
        emit(sweep(figure_base(m4, crowd, a), SweepAxis::Quality, grid_range(0.0, 1.0, 0.1)),
             a.out);
    } else if (a.figure == "fig4" || a.figure == "fig5") {
        // M=8 at N=15 (exact + MC) and the 6x concatenation N=90 (MC only)
        CrowdSpec crowd;
        SweepAxis axis;
        std::vector<double> grid;
        if (a.figure == "fig4") {
            crowd.dist = SpammerHammer{0.5, 0.125, 1.0};
            axis = SweepAxis::Quality;
            grid = grid_range(0.0, 1.0, 0.1);
        } else {
            crowd.dist = BetaDist{1.0, 1.0};
            axis = SweepAxis::Beta;  // mean reliability 1/(1+beta)
            grid = {4.0, 2.0, 1.0, 0.5, 0.25};
        }
        emit(sweep(figure_base(m8, crowd, a), axis, grid), a.out);
        const std::string out90 = sibling_path(a.out, "_n90");
        emit(sweep(figure_base(concatenate(m8, 6), crowd, a), axis, grid), out90);
        outputs.push_back(out90);
    } else if (a.figure == "fig6") {
        std::ofstream f(a.out);
        if (!f) throw std::runtime_error("cannot write " + a.out);
        f << std::setprecision(12);
        figure_design_comparison(a, f);
    } else if (a.figure == "fig7") {
        CrowdSpec crowd;
        crowd.variant = CrowdVariant::Paired;
        crowd.dist = BetaDist{0.5, 0.5};
        emit(sweep(figure_base(random_balanced_matrix(8, 12, a.seed), crowd, a),
                   SweepAxis::RhoCorr, grid_range(-0.9, 0.9, 0.3)),
             a.out);
    } else if (a.figure == "fig8" || a.figure == "fig9") {
        CrowdSpec crowd;
        crowd.dist = BetaDist{0.5, 0.5};
        const std::vector<double> grid = {0.1, 1.0, 10.0, 100.0};
        // truncation large enough that the residual stick is negligible at
        // the largest kappa on the grid
        crowd.truncation = 520;
        if (a.figure == "fig8") {
            crowd.variant = CrowdVariant::LatentGroups;
            emit(sweep(figure_base(m8, crowd, a), SweepAxis::Kappa, grid), a.out);
        } else {
            crowd.variant = CrowdVariant::LatentGroupsPaired;
            crowd.rho = covariance_from_correlation(crowd.dist, -0.5);
            emit(sweep(figure_base(random_balanced_matrix(8, 12, a.seed), crowd, a),
                       SweepAxis::Kappa, grid),
                 a.out);
        }
    } else {
        throw std::invalid_argument("unknown figure: " + a.figure);
    }
    write_manifest(a.out, "reproduce-figure",
                   {{"figure", a.figure}, {"trials", a.trials}}, a.seed, json::object(),
                   outputs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crowd classification with binary code matrices"};
    app.set_version_flag("--version", CROWDCODE_VERSION);
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    DesignArgs design_args;
    auto* design = app.add_subcommand("design", "anneal a code matrix");
    design->add_option("--m", design_args.m, "number of classes")->required();
    design->add_option("--n", design_args.n, "number of workers")->required();
    design->add_option("--mu", design_args.mu, "design-point mean reliability");
    design->add_option("--seed", design_args.seed, "random seed");
    design->add_option("--out", design_args.out, "output matrix JSON")->required();
    design->add_option("--t0", design_args.t0, "initial temperature");
    design->add_option("--cooling", design_args.cooling, "cooling factor");
    design->add_option("--tmin", design_args.tmin, "final temperature");
    design->add_option("--moves", design_args.moves, "moves per temperature (0 = 50N)");
    design->add_flag("--full-columns{false},--balanced-columns{true}", design_args.balanced,
                     "search all columns vs balanced columns only");
    design->add_flag("--ccr", design_args.refine_ccr, "refine with cyclic column replacement");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval-exact", "exact misclassification probability");
    eval->add_option("--matrix", eval_args.matrix, "matrix JSON file");
    eval->add_option("--mu", eval_args.mu, "mean worker reliability")->required();
    eval->add_option("--rho", eval_args.rho, "partner reliability covariance");
    eval->add_option("--rho-corr", eval_args.rho_corr,
                     "partner correlation (Beta(0.5,0.5) variance bridge)");
    eval->add_option("--kappa", eval_args.kappa, "stick-breaking concentration");
    eval->add_option("--truncation", eval_args.truncation, "stick-breaking truncation");
    eval->add_flag("--majority", eval_args.majority, "evaluate bitwise majority instead");
    eval->add_option("--m", eval_args.m, "classes (majority mode)");
    eval->add_option("--n", eval_args.n, "workers (majority mode)");

    std::string bound_matrix;
    double bound_mu = 0.9;
    auto* bound = app.add_subcommand("bound", "Chernoff upper bound");
    bound->add_option("--matrix", bound_matrix, "matrix JSON file")->required();
    bound->add_option("--mu", bound_mu, "common worker reliability");

    SimArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo at one parameter point");
    SimArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo + exact values over a grid");
    for (auto [cmd, sa] : {std::pair{simulate, &sim_args}, std::pair{sweep_cmd, &sweep_args}}) {
        cmd->add_option("--matrix", sa->matrix, "matrix JSON file");
        cmd->add_flag("--majority", sa->majority, "also decode by bitwise majority");
        cmd->add_option("--m", sa->m, "classes (when no matrix is given)");
        cmd->add_option("--n", sa->n, "workers (when no matrix is given)");
        sa->crowd.attach(cmd);
        cmd->add_option("--trials", sa->trials, "Monte Carlo trials")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", sa->seed, "random seed");
        cmd->add_option("--out", sa->out, "output CSV (default stdout)");
    }
    sweep_cmd->add_option("--axis", sweep_args.axis, "swept parameter")
        ->check(CLI::IsMember({"p", "q", "beta", "rho-corr", "kappa"}));
    sweep_cmd->add_option("--grid", sweep_args.grid, "comma-separated grid values")->required();

    DatasetArgs dataset_args;
    auto* dataset = app.add_subcommand("dataset", "score a gold-labeled rating CSV");
    dataset->add_option("--csv", dataset_args.csv, "input CSV")->required();
    dataset->add_option("--m", dataset_args.m, "number of classes");
    dataset->add_option("--matrix", dataset_args.matrix, "matrix JSON file, or 'design'");
    dataset->add_option("--seed", dataset_args.seed, "random seed");
    dataset->add_option("--out", dataset_args.out, "output JSON report (default stdout)");

    FigureArgs figure_args;
    auto* figure = app.add_subcommand("reproduce-figure", "emit the data behind a figure");
    figure->add_option("figure", figure_args.figure, "fig2..fig9")
        ->required()
        ->check(CLI::IsMember(
            {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"}));
    figure->add_option("--trials", figure_args.trials, "Monte Carlo trials")
        ->check(CLI::PositiveNumber);
    figure->add_option("--seed", figure_args.seed, "random seed");
    figure->add_option("--out", figure_args.out, "output CSV (default <figure>.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (design->parsed()) return run_design(design_args);
        if (eval->parsed()) return run_eval_exact(eval_args);
        if (bound->parsed()) return run_bound(bound_matrix, bound_mu);
        if (simulate->parsed()) return run_simulate(sim_args);
        if (sweep_cmd->parsed()) return run_sweep(sweep_args);
        if (dataset->parsed()) return run_dataset(dataset_args);
        if (figure->parsed()) return run_figure(figure_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
