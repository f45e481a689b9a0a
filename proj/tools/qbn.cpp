// Command-line front end: net/ensemble/POM files, reduction recipes,
// entropy expressions, probability queries, information measures, property
// suites and the worked protocol tables.
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qbn/density.hpp"
#include "qbn/infotheory.hpp"
#include "qbn/measure.hpp"
#include "qbn/netfile.hpp"
#include "qbn/protocols.hpp"
#include "qbn/qprob.hpp"
#include "qbn/suites.hpp"

namespace {

using namespace qbn;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

void print_value(double v) { std::printf("%.9f\n", v); }

std::array<Cplx, 2> parse_alpha2(const std::string& text) {
    auto parts = std::vector<std::string>{};
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 2) throw SyntaxError("--alpha needs two comma-separated literals", 0);
    return {parse_complex(parts[0]), parse_complex(parts[1])};
}

std::array<Cplx, 4> parse_alpha4(const std::string& text) {
    auto parts = std::vector<std::string>{};
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) throw SyntaxError("--alpha needs four comma-separated literals", 0);
    return {parse_complex(parts[0]), parse_complex(parts[1]), parse_complex(parts[2]),
            parse_complex(parts[3])};
}

int run_validate(const std::string& file) {
    QbNet net = load_net_file(file);
    ValidationReport rep = validate(net);
    if (rep.ok()) {
        std::printf("ok\n");
        return kExitOk;
    }
    for (const auto& v : rep.violations)
        std::printf("violation\t%s\t%s\t%.3e\n", v.constraint.c_str(),
                    v.node.empty() ? "-" : v.node.c_str(), v.residual);
    return kExitValidation;
}

int run_entropy(const std::string& file, const std::string& recipe, const std::string& expr,
                const std::string& kind, const std::string& dump) {
    QbNet net = load_net_file(file);
    DensityMatrix rho =
        recipe.empty() ? meta_density(net) : apply_recipe(net, parse_recipe(recipe));
    if (!dump.empty()) {
        std::ofstream out(dump);
        if (!out) throw Error("cannot write file: " + dump);
        dump_matrix_tsv(rho.matrix(), out);
    }
    double v = kind == "H" ? h_rho(rho, expr) : s_entropy(rho, expr);
    print_value(v);
    return kExitOk;
}

int run_reduce(const std::string& file, const std::string& recipe) {
    QbNet net = load_net_file(file);
    DensityMatrix rho =
        recipe.empty() ? meta_density(net) : apply_recipe(net, parse_recipe(recipe));
    dump_matrix_tsv(rho.matrix(), std::cout);
    return kExitOk;
}

int run_probs(const std::string& file, const std::string& gamma_arg, const std::string& cond_arg) {
    QbNet net = load_net_file(file);
    std::vector<std::string> gamma;
    {
        std::string cur;
        for (char c : gamma_arg + ",") {
            if (c == ',') {
                if (!cur.empty()) gamma.push_back(cur);
                cur.clear();
            } else if (!isspace(static_cast<unsigned char>(c))) {
                cur += c;
            }
        }
    }
    ProbTable table;
    if (cond_arg.empty()) {
        table = p_gamma(net, gamma);
    } else {
        std::vector<std::string> g2;
        std::vector<int> x2;
        std::string cur;
        for (char c : cond_arg + ",") {
            if (c == ',') {
                if (!cur.empty()) {
                    size_t eq = cur.find('=');
                    if (eq == std::string::npos)
                        throw SyntaxError("--given needs node=state pairs", 0);
                    g2.push_back(cur.substr(0, eq));
                    x2.push_back(std::stoi(cur.substr(eq + 1)));
                }
                cur.clear();
            } else if (!isspace(static_cast<unsigned char>(c))) {
                cur += c;
            }
        }
        table = p_gamma_cond(net, gamma, g2, x2);
    }
    std::vector<int> dims = table.dims();
    for (uint64_t f = 0; f < table.p.size(); ++f) {
        std::vector<int> idx = unflatten_index(dims, f);
        for (size_t i = 0; i < idx.size(); ++i) std::printf("%d\t", idx[i]);
        std::printf("%.9f\n", table.p[f]);
    }
    return kExitOk;
}

int run_holevo(const std::string& file) {
    Ensemble e = load_ensemble_file(file);
    print_value(holevo(e));
    return kExitOk;
}

int run_accinfo(const std::string& file, int outcomes, int restarts, uint64_t seed) {
    Ensemble e = load_ensemble_file(file);
    int m = outcomes > 0 ? outcomes : e.dim * e.dim;
    AccInfoResult res = maximize_accessible_info(e, m, restarts, seed);
    print_value(res.value);
    return kExitOk;
}

int run_check(const std::string& suite, int trials, uint64_t seed) {
    std::vector<SuiteResult> results;
    if (suite == "table1") {
        results = run_table1_suite(trials, seed);
    } else if (suite == "dp") {
        results = run_dp_suite(trials, seed);
    } else if (suite == "protocols") {
        results = run_protocol_suite(seed);
    } else {
        throw SyntaxError("unknown suite: " + suite, 0);
    }
    for (const auto& r : results)
        std::printf("%s\t%s\tworst %.3e%s%s\n", r.pass ? "pass" : "FAIL", r.name.c_str(), r.worst,
                    r.detail.empty() ? "" : "\t", r.detail.c_str());
    return all_pass(results) ? kExitOk : kExitValidation;
}

void print_fixture(const ProtocolFixture& fx) {
    for (const auto& c : fx.checks)
        std::printf("%s\t%s\texpected %.9f\tactual %.9f\n", c.pass() ? "pass" : "FAIL",
                    c.name.c_str(), c.expected, c.actual);
}

int run_demo(const std::string& name, const std::string& alpha, const std::string& export_path,
             uint64_t seed) {
    ProtocolFixture fx{epr_net()};
    if (name == "epr") {
        fx = epr_net();
    } else if (name == "eraser") {
        fx = eraser_net();
    } else if (name == "teleport") {
        auto a = alpha.empty() ? std::array<Cplx, 2>{Cplx(0.6), Cplx(0.8)} : parse_alpha2(alpha);
        fx = teleport_net(a);
    } else if (name == "densecode") {
        auto a = alpha.empty()
                     ? std::array<Cplx, 4>{Cplx(0.5), Cplx(0.5), Cplx(0.5), Cplx(0.5)}
                     : parse_alpha4(alpha);
        fx = dense_coding_net(a);
    } else if (name == "sysenv") {
        fx = sys_env_net(2, random_sys_env_params(2, 2, 2, 2, seed));
    } else if (name == "twomix") {
        fx = two_mixtures_net(random_two_mix_params(2, 2, 2, 2, seed));
    } else if (name == "holevo") {
        Ensemble e = trine_ensemble();
        Pom pom = trine_pom();
        std::printf("holevo information\t%.9f\n", holevo(e));
        std::printf("paper POM information\t%.9f\n", mutual_info(channel(e, pom)));
        HolevoNetReport rep = holevo_net_check(e, pom);
        std::printf("%s\tinformation-bound net\tworst %.3e\n", rep.ok(1e-8) ? "pass" : "FAIL",
                    std::max({rep.mutual_chain_residual, rep.h_equals_s_residual,
                              rep.diagonal_residual, rep.outcome_residual, -rep.chain_slack}));
        return rep.ok(1e-8) ? kExitOk : kExitValidation;
    } else {
        throw SyntaxError("unknown demo: " + name, 0);
    }
    print_fixture(fx);
    if (!export_path.empty()) save_net_file(fx.net, export_path);
    return fx.all_pass() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Bayesian net toolkit"};
    app.require_subcommand(1);

    std::string file, recipe, expr, kind = "S", gamma, cond, dump, suite, demo_name, alpha,
                     export_path;
    int outcomes = 0, restarts = 32, trials = 100;
    uint64_t seed = 7;

    auto* validate_cmd = app.add_subcommand("validate", "check a net file");
    validate_cmd->add_option("file", file)->required();

    auto* entropy_cmd = app.add_subcommand("entropy", "entropy of a reduced state");
    entropy_cmd->add_option("file", file)->required();
    entropy_cmd->add_option("--recipe", recipe, "reduction recipe applied to the meta state");
    entropy_cmd->add_option("--expr", expr, "entropy expression")->required();
    entropy_cmd->add_option("--kind", kind, "S (von Neumann) or H (diagonal)")
        ->check(CLI::IsMember({"S", "H"}));
    entropy_cmd->add_option("--dump-matrix", dump, "write the reduced matrix as TSV");

    auto* reduce_cmd = app.add_subcommand("reduce", "dump a reduced density matrix as TSV");
    reduce_cmd->add_option("file", file)->required();
    reduce_cmd->add_option("--recipe", recipe);

    auto* probs_cmd = app.add_subcommand("probs", "probability table for a node set");
    probs_cmd->add_option("file", file)->required();
    probs_cmd->add_option("--gamma", gamma, "comma-separated node names")->required();
    probs_cmd->add_option("--given", cond, "comma-separated node=state conditions");

    auto* holevo_cmd = app.add_subcommand("holevo", "Holevo information of an ensemble");
    holevo_cmd->add_option("file", file)->required();

    auto* acc_cmd = app.add_subcommand("accinfo", "maximize accessible information");
    acc_cmd->add_option("file", file)->required();
    acc_cmd->add_option("--outcomes", outcomes, "POM outcomes (default dim^2)");
    acc_cmd->add_option("--restarts", restarts);
    acc_cmd->add_option("--seed", seed);

    auto* check_cmd = app.add_subcommand("check", "run a property suite");
    check_cmd->add_option("suite", suite, "table1 | dp | protocols")->required();
    check_cmd->add_option("--trials", trials);
    check_cmd->add_option("--seed", seed);

    auto* demo_cmd = app.add_subcommand("demo", "replay a worked example");
    demo_cmd
        ->add_option("name", demo_name,
                     "epr | eraser | teleport | densecode | sysenv | twomix | holevo")
        ->required();
    demo_cmd->add_option("--alpha", alpha, "input amplitudes (complex literals)");
    demo_cmd->add_option("--export", export_path, "write the demo net to a file");
    demo_cmd->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitParse;
    }

    try {
        if (app.got_subcommand(validate_cmd)) return run_validate(file);
        if (app.got_subcommand(entropy_cmd)) return run_entropy(file, recipe, expr, kind, dump);
        if (app.got_subcommand(reduce_cmd)) return run_reduce(file, recipe);
        if (app.got_subcommand(probs_cmd)) return run_probs(file, gamma, cond);
        if (app.got_subcommand(holevo_cmd)) return run_holevo(file);
        if (app.got_subcommand(acc_cmd)) return run_accinfo(file, outcomes, restarts, seed);
        if (app.got_subcommand(check_cmd)) return run_check(suite, trials, seed);
        if (app.got_subcommand(demo_cmd)) return run_demo(demo_name, alpha, export_path, seed);
    } catch (const SyntaxError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitParse;
    } catch (const qbn::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitOk;
}
