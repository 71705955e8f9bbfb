#include "vecthost/config.hpp"
#include "vecthost/io.hpp"
#include "vecthost/steady.hpp"
#include "vecthost/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

using namespace vecthost;

void print_warnings(const ScenarioBuild& sb) {
    for (const auto& w : sb.warnings) std::cerr << "warning: " << w << "\n";
}

std::string describe_scenario(const Scenario& sc) {
    const Grid& g = *sc.grid;
    std::ostringstream os;
    os << "grid " << g.nx() << "x" << g.ny() << " (h = " << g.h() << "), vector habitat "
       << g.star_count() << " cells, seed region " << g.starstar_count() << " cells\n";
    os << "cohorts " << sc.cohorts << " (a_max = " << sc.a_max << ", da = dt), tau = " << sc.tau
       << " (index " << sc.tau_index << ")\n";
    os << "dt = " << sc.dt << ", t_end = " << sc.t_end << ", record every " << sc.output_every
       << " step(s), mode " << (sc.strict ? "paper" : "lab") << "\n";
    os << "floors: d_star = " << sc.coeffs.d_star << ", m_star = " << sc.coeffs.m_star
       << ", beta_star = " << sc.coeffs.beta_star << ", lambda_star = " << sc.coeffs.lambda_star
       << "\n";
    return os.str();
}

int do_run(const std::string& config_path, const std::string& out_dir) {
    ScenarioBuild sb = build_scenario(load_config(config_path));
    print_warnings(sb);
    const Scenario& sc = sb.scenario;

    AssumptionReport assumptions = validate_assumptions(sc.coeffs, *sc.grid, sc.init);
    RunResult res = run(sc);

    Thresholds th = default_thresholds(res.series, *res.rho_star);
    ConvergenceReport conv = detect_limits(res.series, th, sc.coeffs.sigma2_sup());

    std::filesystem::create_directories(out_dir);
    auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };
    write_file(path("series.csv"), series_csv(res.series));
    write_file(path("final_state.csv"), final_state_csv(*res.final_state));
    write_file(path("rho_star.csv"), rho_star_csv(*res.rho_star));

    std::ostringstream rep;
    rep << describe_scenario(sc);
    rep << "\nmodel assumptions:\n";
    for (const auto& ch : assumptions.checks)
        rep << "  " << ch.id << " " << (ch.pass ? "ok" : "VIOLATED: " + ch.detail) << "\n";
    rep << "\nvector steady state: elliptic residual " << res.rho_star_residual << "\n";
    rep << "largest |phi + psi - rho| relative gap: " << res.max_phi_psi_rho_gap << "\n";
    rep << "largest per-record mass-ledger residual: " << res.max_abs_mass_residual << "\n";
    rep << "transfer clamp engaged: " << (res.any_clamp ? "yes" : "no") << "\n\n";
    rep << conv.text();
    write_file(path("report.txt"), rep.str());

    const DiagRow& last = res.series.rows.back();
    std::cout << "finished at t = " << last.t << ": hosts " << last.U << ", infected hosts "
              << last.V << ", infected vectors (L1) " << last.psi_L1 << "\n";
    std::cout << "wrote " << path("series.csv") << ", final_state.csv, rho_star.csv, report.txt"
              << "\n";
    return 0;
}

int do_steady(const std::string& config_path, const std::string& out_dir) {
    ScenarioBuild sb = build_scenario(load_config(config_path));
    print_warnings(sb);
    const Scenario& sc = sb.scenario;

    SteadyResult st = solve_rho_star(*sc.grid, sc.coeffs, sc.tol.steady_tol, sc.tol.cg_tol);
    std::filesystem::create_directories(out_dir);
    auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };
    write_file(path("rho_star.csv"), rho_star_csv(st.rho_star));
    std::ostringstream res;
    res << "residual_inf = " << format_number(st.residual_inf) << "\n"
        << "march_steps = " << st.march_steps << "\n"
        << "newton_steps = " << st.newton_steps << "\n"
        << "newton_ok = " << (st.newton_ok ? "yes" : "no") << "\n";
    write_file(path("residual.txt"), res.str());
    std::cout << "steady state written, residual " << st.residual_inf
              << (st.newton_ok ? "" : " (polish did not converge)") << "\n";
    return st.newton_ok ? 0 : 2;
}

int do_verify(const std::string& config_path) {
    Config cfg = load_config(config_path);
    std::vector<VerifyCheck> checks;
    bool ok = run_verify_suite(cfg, checks);
    for (const auto& c : checks)
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << "\n";
    std::cout << (ok ? "all checks passed" : "SUITE FAILED") << "\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-volume vector-host epidemic simulator with infection age"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";

    CLI::App* cmd_run = app.add_subcommand("run", "march the coupled system, write CSV + report");
    cmd_run->add_option("--config", config_path, "scenario config file")->required();
    cmd_run->add_option("--out", out_dir, "output directory (created if absent)");

    CLI::App* cmd_steady =
        app.add_subcommand("steady", "solve the vector steady state only");
    cmd_steady->add_option("--config", config_path, "scenario config file")->required();
    cmd_steady->add_option("--out", out_dir, "output directory (created if absent)");

    CLI::App* cmd_verify = app.add_subcommand(
        "verify", "run the built-in oracle suite on a small canonical geometry");
    cmd_verify->add_option("--config", config_path, "scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) return do_run(config_path, out_dir);
        if (cmd_steady->parsed()) return do_steady(config_path, out_dir);
        return do_verify(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
