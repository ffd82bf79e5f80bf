#pragma once

// Shared pieces of the qcsim command line tool: the flag bag, scenario
// construction, CSV/manifest emission, and the per-command runners.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcorr/dos.hpp"
#include "qcorr/xstate.hpp"

namespace qcsim {

inline constexpr const char* kVersion = "0.3.0";

// Every user-facing knob across all subcommands. Each command consumes a
// subset; the run manifest lists the rest under "inert_params" so downstream
// tooling can tell which recorded values actually shaped the output.
struct Scenario {
    std::string init = "bell2";
    double alpha = 0.2;
    std::optional<double> beta;  // defaults to sqrt(1 - alpha^2)
    int werner_k = 1;

    std::string dos = "lorentzian";
    double gamma = 0.8;    // Lorentzian half width
    double gamma0 = 0.1;   // flat-band uniform rate
    double env_energy = 2.0;
    double splitting = 1.0;

    double v = 0.2;
    int n = 200;
    int draws = 100;
    std::string model = "common";
    std::uint64_t seed = 20260821;

    double tau_max = 20.0;
    int tau_steps = 200;
    double t_max = 15.0;
    int t_steps = 60;
    double time_point = 5.0;  // variance-scan probe time
    std::string n_list = "100,200,400";
    double z_imag = 0.5;
    double e_from = -6.0, e_to = 6.0;
    int e_steps = 120;
    std::string kernel_form = "uniform";

    std::string sweep_param = "alpha";
    double sweep_from = 0.1, sweep_to = 0.9;
    int sweep_steps = 8;

    std::string out;
    int threads = 0;  // 0 keeps the library / environment default
};

qcorr::InitialCondition initial_condition(const Scenario& sc);
std::unique_ptr<qcorr::DensityOfStates> scenario_dos(const Scenario& sc);

// "C2" = common bath, family index 2; commands without an initial state get
// the bare bath letter.
std::string model_label(const std::string& command, const Scenario& sc);

std::vector<std::string> inert_params(const std::string& command,
                                      const Scenario& sc);

std::string format_g(double x);  // %.12g, derived quantities
std::string format_e(double x);  // %.17g, state-level quantities

// Writes through a temporary sibling and renames, so readers never observe a
// partial file; the temporary is removed if anything fails.
void write_text_atomic(const std::string& path, const std::string& body);

struct RunEvent {
    std::string kind;  // "ESD" or "ESB"
    double tau;
};

void write_manifest(const std::string& command, const Scenario& sc,
                    const std::vector<RunEvent>& events, double wall_seconds);

int run_command(const std::string& command, const Scenario& sc);

} // namespace qcsim
