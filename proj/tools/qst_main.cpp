// Command-line front end: generate / analyze / verify / plot / sweep.
// Exit codes: 0 ok, 1 usage, 2 validation, 3 solver failure,
// 4 verification failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qst/analysis.hpp"
#include "qst/config.hpp"
#include "qst/errors.hpp"
#include "qst/fem.hpp"
#include "qst/json_io.hpp"
#include "qst/plots.hpp"
#include "qst/topology.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerification = 4;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw qst::IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw qst::IoError("cannot write " + path.string());
    out << content;
}

void emit_error(const char* code, int exit_code, const std::string& message) {
    std::string escaped;
    for (char ch : message) {
        if (ch == '"' || ch == '\\')
            escaped += '\\';
        if (ch == '\n') {
            escaped += "\\n";
            continue;
        }
        escaped += ch;
    }
    std::cerr << "{\"error\":{\"code\":\"" << code << "\",\"exit\":" << exit_code << ",\"message\":\""
              << escaped << "\"}}\n";
}

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    // NaN = not given on the command line; the config file (or its
    // default) applies then
    double tol_fem = std::numeric_limits<double>::quiet_NaN();
    double tol_closed_form = std::numeric_limits<double>::quiet_NaN();
    bool allow_nonnegative_delta = false;
};

qst::RunConfig load_config(const CommonOptions& opt) {
    qst::RunConfig rc = qst::parse_run_config(read_file(opt.config_path));
    if (!opt.out_dir.empty())
        rc.output_dir = opt.out_dir;
    if (rc.output_dir.empty())
        rc.output_dir = ".";
    if (std::isfinite(opt.tol_fem))
        rc.tol_fem = opt.tol_fem;
    if (std::isfinite(opt.tol_closed_form))
        rc.tol_closed_form = opt.tol_closed_form;
    return rc;
}

fs::path prepare_out_dir(const qst::RunConfig& rc) {
    const fs::path dir(rc.output_dir);
    fs::create_directories(dir);
    return dir;
}

int cmd_generate(const CommonOptions& opt) {
    const qst::RunConfig rc = load_config(opt);
    const qst::Topology topo = qst::build_topology(rc.structure);
    const fs::path dir = prepare_out_dir(rc);
    write_file(dir / "topology.json", qst::topology_to_json(topo));
    std::cout << topo.nodes.size() << " nodes, " << topo.members.size() << " members, "
              << topo.supports.size() << " supports\n";
    std::cout << "wrote " << (dir / "topology.json").string() << "\n";
    return kExitOk;
}

int cmd_analyze(const CommonOptions& opt, std::ostream& out = std::cout) {
    const qst::RunConfig rc = load_config(opt);
    const qst::Topology topo = qst::build_topology(rc.structure);
    const qst::AnalysisResult analysis = qst::analyze(rc.structure, opt.allow_nonnegative_delta);
    const fs::path dir = prepare_out_dir(rc);
    write_file(dir / "analysis.json", qst::analysis_to_json(analysis));
    write_file(dir / "supports.csv", qst::supports_csv(analysis));
    write_file(dir / "nodes.csv", qst::nodes_csv(topo, analysis));
    out << "wrote " << (dir / "analysis.json").string() << ", supports.csv, nodes.csv\n";
    return kExitOk;
}

int cmd_verify(const CommonOptions& opt, const std::string& topology_path,
               const std::string& analysis_path, std::ostream& out = std::cout) {
    const qst::RunConfig rc = load_config(opt);
    const qst::Topology topo = topology_path.empty()
                                   ? qst::build_topology(rc.structure)
                                   : qst::topology_from_json(read_file(topology_path));
    const qst::AnalysisResult analysis =
        analysis_path.empty() ? qst::analyze(rc.structure, opt.allow_nonnegative_delta)
                              : qst::analysis_from_json(read_file(analysis_path));
    for (double k : analysis.stiffness)
        if (!(k > 0.0))
            throw qst::ValidationError("verification needs positive support stiffnesses "
                                       "(non-settling delta field?)");

    const qst::FemSystem sys = qst::assemble(topo, analysis.stiffness);
    const qst::FemSolution sol = qst::solve(sys, rc.structure.load);
    qst::ComparisonReport report = qst::compare(topo, rc.structure, sol, analysis, rc.tol_fem);

    // closed-form identity checks, independent of the FEM route
    {
        qst::CategoryReport pvw;
        pvw.name = "pvw_residuals";
        pvw.tolerance = rc.tol_closed_form;
        for (double r : qst::pvw_residuals(rc.structure, analysis.delta))
            pvw.max_abs = std::max(pvw.max_abs, std::abs(r));
        pvw.deviation = pvw.max_abs;
        pvw.pass = pvw.deviation <= pvw.tolerance;

        qst::CategoryReport mu_forms;
        mu_forms.name = "mu_expansion_form";
        mu_forms.tolerance = rc.tol_closed_form;
        const auto expansion = qst::horizontal_displacements_expansion(rc.structure);
        for (std::size_t lvl = 0; lvl < analysis.mu.size(); ++lvl)
            for (std::size_t t = 0; t < analysis.mu[lvl].size(); ++t)
                mu_forms.max_abs =
                    std::max(mu_forms.max_abs, std::abs(analysis.mu[lvl][t] - expansion[lvl][t]));
        mu_forms.deviation = mu_forms.max_abs;
        mu_forms.pass = mu_forms.deviation <= mu_forms.tolerance;

        report.categories.insert(report.categories.begin(), {pvw, mu_forms});
        report.pass = report.pass && pvw.pass && mu_forms.pass;
    }

    const fs::path dir = prepare_out_dir(rc);
    write_file(dir / "fem_solution.json", qst::solution_to_json(sol));
    write_file(dir / "verification.json", qst::report_to_json(report));
    const std::string text = qst::report_to_text(report);
    write_file(dir / "verification.txt", text);
    out << text;
    return report.pass ? kExitOk : kExitVerification;
}

int cmd_plot(const CommonOptions& opt, const qst::PlotOptions& cli_plot, bool what_set,
             bool magnify_set, bool depth_set, bool cantor_r_set) {
    qst::RunConfig rc = load_config(opt);
    if (what_set)
        rc.plot.what = cli_plot.what;
    if (magnify_set)
        rc.plot.magnify = cli_plot.magnify;
    if (depth_set)
        rc.plot.sample_depth = cli_plot.sample_depth;
    if (cantor_r_set)
        rc.plot.cantor_r = cli_plot.cantor_r;
    if (rc.plot.sample_depth < 1 || rc.plot.sample_depth > 20)
        throw qst::ValidationError("plot.sample_depth: must lie in 1..20");

    qst::PlotFiles files;
    if (rc.plot.what == "takagi") {
        files = qst::plot_takagi(rc.structure, rc.plot.sample_depth);
    } else if (rc.plot.what == "cantor") {
        files = qst::plot_cantor(rc.plot.cantor_r, rc.plot.sample_depth);
    } else if (rc.plot.what == "j") {
        files = qst::plot_j(rc.structure, rc.plot.sample_depth);
    } else if (rc.plot.what == "deformed") {
        const qst::Topology topo = qst::build_topology(rc.structure);
        const qst::AnalysisResult analysis = qst::analyze(rc.structure, opt.allow_nonnegative_delta);
        files = qst::plot_deformed(topo, analysis, rc.plot.magnify);
    } else if (rc.plot.what == "displacements") {
        const qst::AnalysisResult analysis = qst::analyze(rc.structure, opt.allow_nonnegative_delta);
        files = qst::plot_displacement_functions(rc.structure, analysis,
                                                 std::min(rc.plot.sample_depth, 12), rc.plot.magnify);
    } else {
        throw qst::ValidationError("unknown plot kind \"" + rc.plot.what +
                                   "\" (expected deformed | displacements | takagi | cantor | j)");
    }

    const fs::path dir = prepare_out_dir(rc);
    for (const auto& [name, content] : files) {
        write_file(dir / name, content);
        std::cout << "wrote " << (dir / name).string() << "\n";
    }
    return kExitOk;
}

int severity(int a, int b) { return std::max(a, b); }

// One sweep entry, fully buffered so parallel workers cannot interleave
// their output.
std::pair<int, std::string> run_one_sweep_entry(const std::string& config_path,
                                                const fs::path& out_root, double tol_fem,
                                                bool with_verify) {
    std::ostringstream out;
    CommonOptions opt;
    opt.config_path = config_path;
    opt.tol_fem = tol_fem;
    opt.out_dir = (out_root / fs::path(config_path).stem()).string();
    int code = kExitOk;
    try {
        code = cmd_analyze(opt, out);
        if (code == kExitOk && with_verify)
            code = cmd_verify(opt, "", "", out);
    } catch (const qst::SolverError& e) {
        out << e.what() << "\n";
        code = kExitSolver;
    } catch (const qst::Error& e) {
        out << e.what() << "\n";
        code = kExitValidation;
    }
    return {code, out.str()};
}

int cmd_sweep(const std::vector<std::string>& configs, const std::string& out_dir, double tol_fem,
              bool with_verify, int jobs) {
    const fs::path out_root = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(out_root);
    int exit_code = kExitOk;
    std::vector<std::pair<std::string, std::future<std::pair<int, std::string>>>> running;
    const int parallel = std::max(1, jobs);

    std::size_t next = 0;
    while (next < configs.size() || !running.empty()) {
        while (next < configs.size() && static_cast<int>(running.size()) < parallel) {
            const std::string path = configs[next++];
            running.emplace_back(path, std::async(std::launch::async, [path, out_root, tol_fem,
                                                                       with_verify]() {
                                     return run_one_sweep_entry(path, out_root, tol_fem, with_verify);
                                 }));
        }
        auto& [path, fut] = running.front();
        const auto [code, text] = fut.get();
        std::cout << text << "sweep " << path << ": " << (code == kExitOk ? "OK" : "FAIL")
                  << " (exit " << code << ")\n";
        exit_code = severity(exit_code, code);
        running.erase(running.begin());
    }
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"universal quasi-Sierpinski truss: closed-form analysis and FEM verification"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string topology_path, analysis_path;
    qst::PlotOptions plot;
    std::vector<std::string> sweep_configs;
    std::string sweep_out;
    bool sweep_verify = false;
    int jobs = 1;

    auto add_common = [&opt](CLI::App* cmd, bool with_tols = false) {
        cmd->add_option("--config", opt.config_path, "config JSON file")->required();
        cmd->add_option("--out", opt.out_dir, "output directory (overrides the config)");
        cmd->add_flag("--allow-nonnegative-delta", opt.allow_nonnegative_delta,
                      "accept boundary data with non-settling supports");
        if (with_tols) {
            cmd->add_option("--tol-fem", opt.tol_fem, "relative FEM comparison tolerance");
            cmd->add_option("--tol-closed-form", opt.tol_closed_form,
                            "closed-form identity tolerance");
        }
    };

    auto* gen = app.add_subcommand("generate", "build the truss and write topology.json");
    add_common(gen);

    auto* ana = app.add_subcommand("analyze", "closed-form analysis to JSON and CSV tables");
    add_common(ana);

    auto* ver = app.add_subcommand("verify", "cross-check the closed form against the FEM solver");
    add_common(ver, true);
    ver->add_option("--topology", topology_path, "use a previously generated topology.json");
    ver->add_option("--analysis", analysis_path, "use a previously written analysis.json");

    auto* plt = app.add_subcommand("plot", "emit SVG/CSV plots");
    add_common(plt);
    auto* what_opt = plt->add_option("--what", plot.what, "deformed | displacements | takagi | cantor | j");
    auto* mag_opt = plt->add_option("--magnify", plot.magnify, "displacement magnification");
    auto* depth_opt = plt->add_option("--depth", plot.sample_depth, "log2 of the sample count");
    auto* cr_opt = plt->add_option("--cantor-r", plot.cantor_r, "base parameter of the staircase");

    auto* swp = app.add_subcommand("sweep", "run several configs into per-config directories");
    swp->add_option("--config", sweep_configs, "config JSON files")->required()->expected(-1);
    swp->add_option("--out", sweep_out, "output root directory");
    swp->add_option("--tol-fem", opt.tol_fem, "relative FEM comparison tolerance");
    swp->add_option("--jobs", jobs, "parallel workers");
    swp->add_flag("--verify", sweep_verify, "also run the FEM cross-check per config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed())
            return cmd_generate(opt);
        if (ana->parsed())
            return cmd_analyze(opt);
        if (ver->parsed())
            return cmd_verify(opt, topology_path, analysis_path);
        if (plt->parsed())
            return cmd_plot(opt, plot, what_opt->count() > 0, mag_opt->count() > 0,
                            depth_opt->count() > 0, cr_opt->count() > 0);
        if (swp->parsed())
            return cmd_sweep(sweep_configs, sweep_out, opt.tol_fem, sweep_verify, jobs);
    } catch (const qst::ValidationError& e) {
        emit_error("validation", kExitValidation, e.what());
        return kExitValidation;
    } catch (const qst::DomainError& e) {
        emit_error("domain", kExitValidation, e.what());
        return kExitValidation;
    } catch (const qst::SolverError& e) {
        emit_error("solver", kExitSolver, e.what());
        return kExitSolver;
    } catch (const qst::IoError& e) {
        emit_error("io", kExitValidation, e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        emit_error("internal", kExitSolver, e.what());
        return kExitSolver;
    }
    return kExitUsage;
}
