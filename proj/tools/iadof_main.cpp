#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "iadof/alignment.hpp"
#include "iadof/constructions.hpp"
#include "iadof/solver.hpp"

namespace {

using namespace iadof;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string pretty(const Fraction& f) {
    char decimal[64];
    std::snprintf(decimal, sizeof decimal, "%.6g", f.value());
    return f.str() + " (" + decimal + ")";
}

void print_violations(const std::vector<Violation>& violations) {
    for (const Violation& v : violations) {
        if (v.kind == Violation::Kind::ForbiddenCell)
            std::cerr << "  - cell (" << v.row_a + 1 << ", " << v.col + 1 << ") holds label "
                      << v.label << " but no message is requested there\n";
        else
            std::cerr << "  - column " << v.col + 1 << " repeats label " << v.label << " in rows "
                      << v.row_a + 1 << " and " << v.row_b + 1 << "\n";
    }
}

void print_score_table(std::ostream& out, const ScoreValue& s) {
    out << "score: " << pretty(s.value()) << "\n";
    out << "row  support  interference  cost\n";
    for (size_t p = 0; p < s.per_row.size(); ++p) {
        const RowBreakdown& r = s.per_row[p];
        out << std::setw(3) << p + 1 << "  " << std::setw(7) << r.row_support << "  "
            << std::setw(12) << r.interference << "  " << std::setw(4)
            << r.row_support + r.interference << "\n";
    }
}

std::string score_json(const ScoreValue& s) {
    std::ostringstream out;
    out << "{\n  \"denominator\": " << s.denominator << ",\n  \"numerator\": " << s.numerator
        << ",\n  \"per_row\": [";
    for (size_t p = 0; p < s.per_row.size(); ++p) {
        if (p) out << ',';
        out << "\n    {\"interference\": " << s.per_row[p].interference
            << ", \"row_support\": " << s.per_row[p].row_support << "}";
    }
    out << "\n  ],\n  \"value\": \"" << s.value().str() << "\"\n}\n";
    return out.str();
}

int run_score(const std::string& spec_path, const std::string& g_path, bool json) {
    const ChannelSpec spec = parse_spec(read_file(spec_path));
    const IndexMatrix g = parse_index_matrix(read_file(g_path));
    ScoreValue s;
    try {
        s = score(g, spec);
    } catch (const InvalidIndexMatrix& e) {
        std::cerr << e.what() << "\n";
        print_violations(e.violations);
        return 1;
    }
    if (json)
        std::cout << score_json(s);
    else
        print_score_table(std::cout, s);
    return 0;
}

int run_solve(const std::string& spec_path, const SolveConfig& config, const std::string& out_path,
              bool json) {
    const ChannelSpec spec = parse_spec(read_file(spec_path));
    SolveReport report;
    try {
        report = solve(spec, config);
    } catch (const SolverRefusal& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    if (!out_path.empty()) write_file(out_path, to_plain_text(report.best_g));
    if (json) {
        std::cout << to_json_text(report);
        return 0;
    }
    std::cout << "score: " << pretty(report.best_score.value()) << "\n"
              << "optimal: " << (report.optimal ? "yes" : "no") << "\n"
              << "nodes explored: " << report.nodes_explored << "\n"
              << "elapsed: " << std::fixed << std::setprecision(3) << report.elapsed_s << " s\n";
    if (out_path.empty())
        std::cout << "best G:\n" << to_plain_text(report.best_g);
    else
        std::cout << "wrote best G to " << out_path << "\n";
    return 0;
}

int run_construct(int K, int m, const std::string& variant, const std::string& out_path) {
    const SymmetricFamily family(K, m);
    const bool layered = variant == "corollary";
    const IndexMatrix g = layered ? corollary_g(family) : classic_g(family);
    const Fraction formula =
        layered ? Fraction(static_cast<long long>(K) * m - K % m, 2 * m - 1)
                : Fraction(static_cast<long long>(K) * m, m + std::min(K - 1, 2 * m - 2));
    const Fraction recomputed = score(g, family.spec()).value();
    std::ostream& info = out_path.empty() ? std::cerr : std::cout;
    info << "formula score: " << pretty(formula) << "\n"
         << "recomputed score: " << pretty(recomputed) << "\n";
    if (out_path.empty())
        std::cout << to_plain_text(g);
    else
        write_file(out_path, to_plain_text(g));
    return 0;
}

int run_verify(const std::string& spec_path, const std::string& g_path, const VerifyConfig& config,
               bool json) {
    const ChannelSpec spec = parse_spec(read_file(spec_path));
    const IndexMatrix g = parse_index_matrix(read_file(g_path));
    VerificationReport report;
    try {
        report = verify(spec, g, config);
    } catch (const InstanceTooLarge& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    if (json) {
        std::cout << to_json_text(report);
        return report.pass ? 0 : 1;
    }
    std::cout << "backend: " << report.backend << "   eta: " << report.eta
              << "   trials: " << report.trials << "   seed: " << report.seed << "\n"
              << "gamma: " << report.gamma << "   block length: " << report.block_len
              << "   busiest receiver: " << report.p_max + 1 << "\n";
    std::cout << "labels:";
    for (const auto& [label, members] : report.set_sizes)
        std::cout << " " << label << " (" << members << " links)";
    std::cout << "\n";
    std::cout << "valid filling: " << (report.valid_g ? "yes" : "no") << "\n"
              << "property 1: " << (report.property1_ok ? "ok" : "violated") << "\n"
              << "exponent patterns: " << (report.exponents_injective ? "distinct" : "colliding")
              << "\n"
              << "containment: " << (report.containment_ok ? "ok" : "broken") << "\n"
              << "columns fit: " << (report.columns_fit ? "yes" : "no") << "\n";
    for (const StructuralIssue& issue : report.issues) {
        std::cout << "  - " << issue.what;
        if (issue.p >= 0) {
            std::cout << " at (" << issue.p + 1;
            if (issue.q >= 0) std::cout << ", " << issue.q + 1;
            std::cout << ")";
        }
        std::cout << "\n";
    }
    std::cout << "receiver  desired  interference  total  rank  dof\n";
    for (const ReceiverReport& r : report.per_receiver)
        std::cout << std::setw(8) << r.p + 1 << "  " << std::setw(7) << r.desired_cols << "  "
                  << std::setw(12) << r.interference_cols << "  " << std::setw(5) << r.total_cols
                  << "  " << (r.full_rank ? "full " : "SHORT") << "  " << r.dof_ratio.str() << "\n";
    if (report.failed_trial >= 0)
        std::cout << "first failing draw: trial " << report.failed_trial + 1 << "\n";
    std::cout << "overall: " << (report.pass ? "pass" : "fail") << "\n";
    return report.pass ? 0 : 1;
}

int run_sweep(int K, const std::string& out_path, const std::string& gnuplot_path) {
    const std::vector<DominanceRow> table = dominance_check(K, K);
    const std::string csv = dominance_csv(table);
    if (out_path.empty())
        std::cout << csv;
    else
        write_file(out_path, csv);
    if (!gnuplot_path.empty()) write_file(gnuplot_path, dominance_gnuplot(table));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Puzzle scoring, solving, and interference-alignment verification for"
                 " partially connected channels"};
    app.require_subcommand(1);

    std::string spec_path, g_path, out_path, gnuplot_path;
    bool json = false;
    int K = 0, m = 0;
    std::string variant = "corollary", mode = "exact", backend = "exact";
    SolveConfig solve_config;
    VerifyConfig verify_config;
    double budget = 0.0;

    CLI::App* score_cmd = app.add_subcommand("score", "Score a filling against a channel spec");
    score_cmd->add_option("--spec", spec_path, "channel spec file")
        ->required()
        ->check(CLI::ExistingFile);
    score_cmd->add_option("--g", g_path, "filling file")->required()->check(CLI::ExistingFile);
    score_cmd->add_flag("--json", json, "emit JSON instead of a table");

    CLI::App* solve_cmd = app.add_subcommand("solve", "Search for a best-scoring filling");
    solve_cmd->add_option("--spec", spec_path, "channel spec file")
        ->required()
        ->check(CLI::ExistingFile);
    solve_cmd->add_option("--mode", mode, "exact, heuristic, or brute")
        ->check(CLI::IsMember({"exact", "heuristic", "brute"}));
    solve_cmd->add_option("--budget", budget, "time budget in seconds");
    solve_cmd->add_option("--seed", solve_config.seed, "random seed");
    solve_cmd->add_option("--jobs", solve_config.parallelism, "worker threads")
        ->check(CLI::PositiveNumber);
    int max_label = 0;
    solve_cmd->add_option("--max-label", max_label, "largest label the search may use")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--brute-cap", solve_config.brute_force_cell_cap,
                          "largest support brute force accepts");
    solve_cmd->add_option("--restarts", solve_config.restarts, "hill-climb restarts")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--out", out_path, "write the best filling here");
    solve_cmd->add_flag("--json", json, "emit the report as JSON");

    CLI::App* construct_cmd =
        app.add_subcommand("construct", "Emit a ready-made filling for the cyclic family");
    construct_cmd->add_option("--K", K, "user count")->required()->check(CLI::PositiveNumber);
    construct_cmd->add_option("--m", m, "links per row")->required()->check(CLI::PositiveNumber);
    construct_cmd->add_option("--variant", variant, "corollary (layered) or classic")
        ->check(CLI::IsMember({"corollary", "classic"}));
    construct_cmd->add_option("--out", out_path, "write the filling here");

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "Check the alignment scheme a filling induces");
    verify_cmd->add_option("--spec", spec_path, "channel spec file")
        ->required()
        ->check(CLI::ExistingFile);
    verify_cmd->add_option("--g", g_path, "filling file")->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--eta", verify_config.eta, "precoder exponent range")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--trials", verify_config.trials, "independent coefficient draws")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--backend", backend, "exact or float rank computation")
        ->check(CLI::IsMember({"exact", "float"}));
    verify_cmd->add_option("--seed", verify_config.seed, "random seed");
    verify_cmd->add_option("--jobs", verify_config.parallelism, "worker threads")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--cap", verify_config.column_cap, "refuse matrices wider than this")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_flag("--json", json, "emit the report as JSON");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Score both constructions for every m at a given K");
    sweep_cmd->add_option("--K", K, "user count")->required()->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", out_path, "write CSV here instead of stdout");
    sweep_cmd->add_option("--gnuplot", gnuplot_path, "also write a gnuplot script here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*score_cmd) return run_score(spec_path, g_path, json);
        if (*solve_cmd) {
            solve_config.mode = mode == "exact"     ? SolveConfig::Mode::Exact
                                : mode == "brute"   ? SolveConfig::Mode::BruteForce
                                                    : SolveConfig::Mode::Heuristic;
            if (budget > 0.0) solve_config.time_budget_s = budget;
            if (max_label > 0) solve_config.max_label = max_label;
            return run_solve(spec_path, solve_config, out_path, json);
        }
        if (*construct_cmd) return run_construct(K, m, variant, out_path);
        if (*verify_cmd) {
            verify_config.backend = backend == "float" ? RankBackend::Float : RankBackend::Exact;
            return run_verify(spec_path, g_path, verify_config, json);
        }
        if (*sweep_cmd) return run_sweep(K, out_path, gnuplot_path);
    } catch (const InstanceTooLarge& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const InvalidIndexMatrix& e) {
        std::cerr << e.what() << "\n";
        print_violations(e.violations);
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error";
        if (e.line > 0) {
            std::cerr << " at line " << e.line;
            if (e.column > 0) std::cerr << ", column " << e.column;
        }
        std::cerr << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 2;
}
