// qcsim: two-qubit common-bath correlation dynamics.
// Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence,
// 4 resource budget exceeded.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "cli_support.hpp"
#include "qcorr/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two-qubit correlation dynamics in a shared random-matrix "
                 "bath"};
    app.set_version_flag("--version", qcsim::kVersion);
    app.fallthrough();
    app.set_config("--config", "", "Read key=value defaults from a file");
    app.require_subcommand(1);

    qcsim::Scenario sc;

    app.add_option("--init", sc.init,
                   "Initial family: product|bell1|bell2|werner")
        ->capture_default_str();
    app.add_option("--alpha", sc.alpha,
                   "Family amplitude (mixing weight for werner)")
        ->capture_default_str();
    app.add_option("--beta", sc.beta,
                   "Second amplitude; defaults to sqrt(1-alpha^2)");
    app.add_option("--werner-k", sc.werner_k,
                   "Werner backbone: 1 (inner pair) or 2 (outer pair)")
        ->capture_default_str();

    app.add_option("--dos", sc.dos,
                   "Bath density of states: lorentzian|flat|file:PATH")
        ->capture_default_str();
    app.add_option("--gamma", sc.gamma, "Lorentzian half width")
        ->capture_default_str();
    app.add_option("--gamma0", sc.gamma0, "Flat-band uniform decay rate")
        ->capture_default_str();
    app.add_option("--env-energy", sc.env_energy,
                   "Bath energy the qubits probe")
        ->capture_default_str();
    app.add_option("--qubit-splitting,--s", sc.splitting,
                   "Single-qubit level splitting")
        ->capture_default_str();

    app.add_option("--v", sc.v, "System-bath coupling amplitude")
        ->capture_default_str();
    app.add_option("--n", sc.n, "Bath levels per draw")
        ->capture_default_str();
    app.add_option("--draws", sc.draws, "Monte Carlo coupling draws")
        ->capture_default_str();
    app.add_option("--model", sc.model,
                   "Bath topology: common|independent|free-ancilla")
        ->capture_default_str();
    app.add_option("--seed", sc.seed, "Master RNG seed")
        ->capture_default_str();

    app.add_option("--tau-max", sc.tau_max, "Scaled-time grid end")
        ->capture_default_str();
    app.add_option("--tau-steps", sc.tau_steps, "Scaled-time grid steps")
        ->capture_default_str();
    app.add_option("--t-max", sc.t_max, "Lab-time grid end")
        ->capture_default_str();
    app.add_option("--t-steps", sc.t_steps, "Lab-time grid steps")
        ->capture_default_str();
    app.add_option("--t", sc.time_point, "Probe time for variance-scan")
        ->capture_default_str();
    app.add_option("--n-list", sc.n_list,
                   "Comma-separated bath sizes for variance-scan")
        ->capture_default_str();
    app.add_option("--z-imag", sc.z_imag, "Imaginary part of the probe z")
        ->capture_default_str();
    app.add_option("--e-from", sc.e_from, "Resolvent grid start")
        ->capture_default_str();
    app.add_option("--e-to", sc.e_to, "Resolvent grid end")
        ->capture_default_str();
    app.add_option("--e-steps", sc.e_steps, "Resolvent grid steps")
        ->capture_default_str();
    app.add_option("--kernel-form", sc.kernel_form,
                   "Self-consistency variant: uniform|block")
        ->capture_default_str();

    app.add_option("--param", sc.sweep_param,
                   "Sweep parameter: alpha|alpha0..3|gamma|env-energy")
        ->capture_default_str();
    app.add_option("--from", sc.sweep_from, "Sweep start")
        ->capture_default_str();
    app.add_option("--to", sc.sweep_to, "Sweep end")->capture_default_str();
    app.add_option("--steps", sc.sweep_steps, "Sweep steps")
        ->capture_default_str();

    app.add_option("--out", sc.out, "CSV output path");
    app.add_option("--threads", sc.threads,
                   "BLAS thread count (0 keeps the environment setting)")
        ->capture_default_str();

    const char* commands[] = {"evolve",   "stationary",    "sweep",
                              "markov-check", "finite-n", "variance-scan",
                              "resolvent", "compare"};
    const char* blurbs[] = {
        "Correlation trajectory under the limiting shared-bath channel",
        "Long-time state and its correlation report",
        "Concurrence surface over a parameter grid",
        "Semigroup diagnostic of the limiting channel",
        "Finite-bath Monte Carlo ensemble statistics",
        "Entry variance versus bath size",
        "Self-consistent resolvent pair over an energy grid",
        "Finite-bath mean against the limiting channel"};
    for (std::size_t i = 0; i < std::size(commands); ++i)
        app.add_subcommand(commands[i], blurbs[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        return qcsim::run_command(app.get_subcommands().at(0)->get_name(),
                                  sc);
    } catch (const qcorr::ValidationError& e) {
        std::fprintf(stderr, "error: validation: %s\n", e.what());
        return 2;
    } catch (const qcorr::ConvergenceError& e) {
        std::fprintf(stderr, "error: convergence: %s\n", e.what());
        return 3;
    } catch (const qcorr::BudgetError& e) {
        std::fprintf(stderr, "error: budget: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 1;
    }
}
