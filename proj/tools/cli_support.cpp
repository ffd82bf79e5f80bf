#include "cli_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qcorr/channel.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/meanfield.hpp"
#include "qcorr/oracle.hpp"
#include "qcorr/quantifiers.hpp"

extern "C" void openblas_set_num_threads(int);

namespace qcsim {

using nlohmann::json;
using namespace qcorr;

namespace {

std::vector<double> linspace(double a, double b, int steps) {
    if (steps < 1) throw ValidationError("step count must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * i / steps;
    return v;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const int value = std::stoi(item, &pos);
            if (pos != item.size() || value < 1)
                throw std::invalid_argument(item);
            out.push_back(value);
        } catch (const std::exception&) {
            throw ValidationError("bad entry '" + item + "' in list '" +
                                  text + "'");
        }
    }
    if (out.empty()) throw ValidationError("empty list '" + text + "'");
    return out;
}

Family parse_family(const std::string& name) {
    if (name == "product") return Family::product;
    if (name == "bell1") return Family::bell1;
    if (name == "bell2") return Family::bell2;
    if (name == "werner") return Family::werner;
    throw ValidationError("unknown initial family '" + name + "'");
}

bool is_flat_dos(const Scenario& sc) { return sc.dos == "flat"; }
bool is_lorentzian_dos(const Scenario& sc) { return sc.dos == "lorentzian"; }

OracleParams oracle_params(const Scenario& sc, std::vector<double> times) {
    OracleParams p;
    p.n = sc.n;
    p.v = sc.v;
    p.s = sc.splitting;
    p.env_energy = sc.env_energy;
    p.draws = sc.draws;
    p.seed = sc.seed;
    p.model = parse_env_model(sc.model);
    p.times = std::move(times);
    return p;
}

void require_out(const Scenario& sc) {
    if (sc.out.empty())
        throw ValidationError("this command needs --out for its CSV");
}

struct CsvBuilder {
    std::string text;

    void cell(const std::string& s) {
        if (!text.empty() && text.back() != '\n') text += ',';
        text += s;
    }
    void endrow() { text += '\n'; }
    void comment(const std::string& s) { text += "# " + s + "\n"; }
};

// --- command runners -------------------------------------------------------

void run_evolve(const Scenario& sc, std::vector<RunEvent>& events) {
    require_out(sc);
    const auto dos = scenario_dos(sc);
    const XState rho0 = make_state(initial_condition(sc));
    const auto ch =
        CommonEnvChannel::from_dos(*dos, sc.env_energy, sc.splitting);
    const Trajectory tr =
        trajectory(ch, rho0, linspace(0.0, sc.tau_max, sc.tau_steps));

    CsvBuilder csv;
    csv.cell("tau");
    csv.cell("negativity");
    csv.cell("concurrence");
    csv.cell("discord");
    csv.cell("entropy");
    csv.endrow();
    for (const auto& ev : tr.events) {
        events.push_back({ev.death ? "ESD" : "ESB", ev.tau});
        csv.comment(std::string(ev.death ? "ESD" : "ESB") +
                    " tau=" + format_g(ev.tau));
    }
    for (std::size_t i = 0; i < tr.taus.size(); ++i) {
        const QuantifierReport& q = tr.reports[i];
        csv.cell(format_g(tr.taus[i]));
        csv.cell(format_g(q.negativity));
        csv.cell(format_g(q.concurrence));
        csv.cell(format_g(q.discord));
        csv.cell(format_g(q.entropy));
        csv.endrow();
    }
    write_text_atomic(sc.out, csv.text);
    std::printf("evolve rows=%zu events=%zu out=%s\n", tr.taus.size(),
                tr.events.size(), sc.out.c_str());
}

void run_stationary(const Scenario& sc) {
    const auto dos = scenario_dos(sc);
    const XState rho0 = make_state(initial_condition(sc));
    const auto ch =
        CommonEnvChannel::from_dos(*dos, sc.env_energy, sc.splitting);
    const XState st = ch.stationary(rho0);
    const QuantifierReport q = report(st);
    const BlockCoords bc = st.block_coords();
    std::printf("r11=%s\n", format_e(st.r11()).c_str());
    std::printf("a1=%s\n", format_e(bc.a1).c_str());
    std::printf("a2=%s\n", format_e(bc.a2).c_str());
    std::printf("r44=%s\n", format_e(st.r44()).c_str());
    std::printf("negativity=%s\n", format_g(q.negativity).c_str());
    std::printf("concurrence=%s\n", format_g(q.concurrence).c_str());
    std::printf("discord=%s\n", format_g(q.discord).c_str());
    std::printf("entropy=%s\n", format_g(q.entropy).c_str());
    if (!sc.out.empty()) {
        CsvBuilder csv;
        for (const char* h : {"r11", "a1", "a2", "r44", "negativity",
                              "concurrence", "discord", "entropy"})
            csv.cell(h);
        csv.endrow();
        csv.cell(format_e(st.r11()));
        csv.cell(format_e(bc.a1));
        csv.cell(format_e(bc.a2));
        csv.cell(format_e(st.r44()));
        csv.cell(format_g(q.negativity));
        csv.cell(format_g(q.concurrence));
        csv.cell(format_g(q.discord));
        csv.cell(format_g(q.entropy));
        csv.endrow();
        write_text_atomic(sc.out, csv.text);
    }
}

void run_sweep(const Scenario& sc) {
    require_out(sc);
    const std::string& par = sc.sweep_param;
    const InitialCondition base_ic = initial_condition(sc);
    const bool over_alpha = par == "alpha" || par == "alpha0" ||
                            par == "alpha1" || par == "alpha2" ||
                            par == "alpha3";
    if (par.size() == 6 && par.rfind("alpha", 0) == 0) {
        const int digit = par[5] - '0';
        if (digit != family_index(base_ic.family))
            throw ValidationError("sweep parameter '" + par +
                                  "' does not match family '" + sc.init + "'");
    }
    if (!over_alpha && par != "gamma" && par != "env-energy")
        throw ValidationError("unknown sweep parameter '" + par + "'");
    if (par == "gamma" && !is_lorentzian_dos(sc))
        throw ValidationError("gamma sweep needs the lorentzian bath");

    const std::vector<double> values =
        linspace(sc.sweep_from, sc.sweep_to, sc.sweep_steps);
    const std::vector<double> taus = linspace(0.0, sc.tau_max, sc.tau_steps);

    std::vector<std::vector<double>> cols;  // concurrence per value, per tau
    for (double value : values) {
        Scenario sv = sc;
        if (over_alpha)
            sv.alpha = value;
        else if (par == "gamma")
            sv.gamma = value;
        else
            sv.env_energy = value;
        const auto dos = scenario_dos(sv);
        const XState rho0 = make_state(initial_condition(sv));
        const auto ch =
            CommonEnvChannel::from_dos(*dos, sv.env_energy, sv.splitting);
        std::vector<double> col;
        col.reserve(taus.size());
        for (double tau : taus)
            col.push_back(concurrence(ch.evolve(rho0, tau)));
        cols.push_back(std::move(col));
    }

    CsvBuilder csv;
    csv.cell("tau");
    for (double value : values) csv.cell(format_g(value));
    csv.endrow();
    for (std::size_t i = 0; i < taus.size(); ++i) {
        csv.cell(format_g(taus[i]));
        for (const auto& col : cols) csv.cell(format_g(col[i]));
        csv.endrow();
    }
    write_text_atomic(sc.out, csv.text);
    std::printf("sweep param=%s columns=%zu rows=%zu out=%s\n", par.c_str(),
                values.size(), taus.size(), sc.out.c_str());
}

void run_markov_check(const Scenario& sc) {
    const auto dos = scenario_dos(sc);
    const auto ch =
        CommonEnvChannel::from_dos(*dos, sc.env_energy, sc.splitting);
    const MarkovDiagnostic d = ch.markov_diagnostic();
    const bool markovian = d.is_flat && d.max_semigroup_residual <= 1e-10;
    std::printf("det_phi3_inf=%s max_semigroup_residual=%s markovian=%s\n",
                format_g(d.det_phi3_inf).c_str(),
                format_g(d.max_semigroup_residual).c_str(),
                markovian ? "true" : "false");
}

void run_finite_n(const Scenario& sc) {
    require_out(sc);
    const auto dos = scenario_dos(sc);
    const XState rho0 = make_state(initial_condition(sc));
    const OracleResult res = ensemble(
        *dos, rho0, oracle_params(sc, linspace(0.0, sc.t_max, sc.t_steps)));

    CsvBuilder csv;
    csv.cell("t");
    csv.cell("tau");
    for (const char* h : {"m_r11", "m_r22", "m_r33", "m_r44", "m_re_r14",
                          "m_im_r14", "m_re_r23", "m_im_r23"})
        csv.cell(h);
    for (const char* h :
         {"v_r11", "v_r22", "v_r33", "v_r44", "v_r14", "v_r23"})
        csv.cell(h);
    for (const char* h :
         {"se_r11", "se_r22", "se_r33", "se_r44", "se_r14", "se_r23"})
        csv.cell(h);
    csv.cell("max_draw_x_violation");
    csv.endrow();
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        const Mat4& m = res.mean[i];
        csv.cell(format_g(res.times[i]));
        csv.cell(format_g(sc.v * sc.v * res.times[i]));
        csv.cell(format_e(m(0, 0).real()));
        csv.cell(format_e(m(1, 1).real()));
        csv.cell(format_e(m(2, 2).real()));
        csv.cell(format_e(m(3, 3).real()));
        csv.cell(format_e(m(0, 3).real()));
        csv.cell(format_e(m(0, 3).imag()));
        csv.cell(format_e(m(1, 2).real()));
        csv.cell(format_e(m(1, 2).imag()));
        const Eigen::Matrix4d& var = res.variance[i];
        const Eigen::Matrix4d& se = res.std_error[i];
        for (const auto* mat : {&var, &se}) {
            csv.cell(format_g((*mat)(0, 0)));
            csv.cell(format_g((*mat)(1, 1)));
            csv.cell(format_g((*mat)(2, 2)));
            csv.cell(format_g((*mat)(3, 3)));
            csv.cell(format_g((*mat)(0, 3)));
            csv.cell(format_g((*mat)(1, 2)));
        }
        csv.cell(format_g(res.draw_x_violation[i]));
        csv.endrow();
    }
    write_text_atomic(sc.out, csv.text);
    std::printf("finite-n rows=%zu draws=%d out=%s\n", res.times.size(),
                res.draws, sc.out.c_str());
}

void run_variance_scan(const Scenario& sc) {
    require_out(sc);
    const auto dos = scenario_dos(sc);
    const XState rho0 = make_state(initial_condition(sc));
    const std::vector<int> sizes = parse_int_list(sc.n_list);
    const double t = sc.time_point;

    std::vector<double> max_vars;
    CsvBuilder csv;
    csv.cell("n");
    csv.cell("max_entry_variance");
    csv.cell("bound");
    csv.endrow();
    for (int n : sizes) {
        Scenario sn = sc;
        sn.n = n;
        const OracleResult res =
            ensemble(*dos, rho0, oracle_params(sn, {t}));
        const double mv = res.variance[0].maxCoeff();
        // 4^4 (2v)^2 t^2 / n
        const double bound = 1024.0 * sc.v * sc.v * t * t / n;
        max_vars.push_back(mv);
        csv.cell(format_g(n));
        csv.cell(format_g(mv));
        csv.cell(format_g(bound));
        csv.endrow();
    }
    double fitted_p = std::numeric_limits<double>::quiet_NaN();
    if (sizes.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const auto m = static_cast<double>(sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const double x = std::log(sizes[i]), y = std::log(max_vars[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        fitted_p = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
        csv.comment("fitted_p=" + format_g(fitted_p));
    }
    write_text_atomic(sc.out, csv.text);
    std::printf("variance-scan sizes=%zu fitted_p=%s out=%s\n", sizes.size(),
                format_g(fitted_p).c_str(), sc.out.c_str());
}

void run_resolvent(const Scenario& sc) {
    require_out(sc);
    const auto dos = scenario_dos(sc);
    SolverOptions opt;
    if (sc.kernel_form == "uniform")
        opt.form = KernelForm::uniform_gap;
    else if (sc.kernel_form == "block")
        opt.form = KernelForm::block_gap;
    else
        throw ValidationError("unknown kernel form '" + sc.kernel_form + "'");

    CsvBuilder csv;
    for (const char* h :
         {"e", "re_g_plus", "im_g_plus", "re_g_minus", "im_g_minus"})
        csv.cell(h);
    csv.endrow();
    for (double e : linspace(sc.e_from, sc.e_to, sc.e_steps)) {
        const ResolventSample r = solve_selfconsistent(
            *dos, sc.splitting, sc.v, cplx(e, sc.z_imag), opt);
        csv.cell(format_g(e));
        csv.cell(format_e(r.g_plus.real()));
        csv.cell(format_e(r.g_plus.imag()));
        csv.cell(format_e(r.g_minus.real()));
        csv.cell(format_e(r.g_minus.imag()));
        csv.endrow();
    }
    write_text_atomic(sc.out, csv.text);
    std::printf("resolvent points=%d form=%s out=%s\n", sc.e_steps + 1,
                sc.kernel_form.c_str(), sc.out.c_str());
}

void run_compare(const Scenario& sc) {
    require_out(sc);
    if (sc.model != "common")
        throw ValidationError(
            "compare checks the shared-bath limit; --model must be common");
    const auto dos = scenario_dos(sc);
    const XState rho0 = make_state(initial_condition(sc));
    const OracleResult res = ensemble(
        *dos, rho0, oracle_params(sc, linspace(0.0, sc.t_max, sc.t_steps)));
    const auto ch =
        CommonEnvChannel::from_dos(*dos, sc.env_energy, sc.splitting);
    const std::vector<CompareRow> rows =
        bvh_compare(res, rho0, ch, sc.splitting, sc.v);

    CsvBuilder csv;
    csv.cell("t");
    csv.cell("tau");
    for (const char* label : compare_labels()) {
        csv.cell(std::string("channel_") + label);
        csv.cell(std::string("sampled_") + label);
        csv.cell(std::string("dev_") + label);
    }
    csv.cell("mean_x_violation");
    csv.endrow();
    double max_dev = 0.0;
    for (const auto& row : rows) {
        csv.cell(format_g(row.t));
        csv.cell(format_g(row.tau));
        for (int i = 0; i < 10; ++i) {
            csv.cell(format_g(row.channel_value[i]));
            csv.cell(format_g(row.sampled_value[i]));
            csv.cell(format_g(row.deviation[i]));
            max_dev = std::max(max_dev, row.deviation[i]);
        }
        csv.cell(format_g(row.mean_x_violation));
        csv.endrow();
    }
    write_text_atomic(sc.out, csv.text);
    std::printf("compare rows=%zu max_dev=%s out=%s\n", rows.size(),
                format_g(max_dev).c_str(), sc.out.c_str());
}

} // namespace

InitialCondition initial_condition(const Scenario& sc) {
    InitialCondition ic;
    ic.family = parse_family(sc.init);
    ic.alpha = sc.alpha;
    ic.beta = sc.beta;
    ic.werner_k = sc.werner_k;
    return ic;
}

std::unique_ptr<DensityOfStates> scenario_dos(const Scenario& sc) {
    return make_dos(sc.dos, sc.gamma, sc.gamma0);
}

std::string model_label(const std::string& command, const Scenario& sc) {
    std::string letter = "C";
    if (command == "finite-n" || command == "variance-scan" ||
        command == "compare") {
        if (sc.model == "independent") letter = "I";
        if (sc.model == "free-ancilla" || sc.model == "free_ancilla")
            letter = "F";
    }
    if (command == "markov-check" || command == "resolvent") return letter;
    return letter +
           std::to_string(family_index(parse_family(sc.init)));
}

std::vector<std::string> inert_params(const std::string& command,
                                      const Scenario& sc) {
    static const std::vector<std::string> all = {
        "init",      "alpha",     "beta",     "werner-k", "dos",
        "gamma",     "gamma0",    "env-energy", "splitting", "v",
        "n",         "draws",     "model",    "seed",     "tau-max",
        "tau-steps", "t-max",     "t-steps",  "t",        "n-list",
        "z-imag",    "e-from",    "e-to",     "e-steps",  "kernel-form",
        "param",     "from",      "to",       "steps",    "threads"};

    std::set<std::string> used;
    const auto family_keys = [&] {
        used.insert({"init", "alpha"});
        const Family f = parse_family(sc.init);
        if (f == Family::bell1 || f == Family::bell2) used.insert("beta");
        if (f == Family::werner) used.insert("werner-k");
    };
    const auto dos_keys = [&] {
        used.insert("dos");
        if (is_lorentzian_dos(sc)) used.insert("gamma");
        if (is_flat_dos(sc)) used.insert("gamma0");
    };
    // The flat band has uniform rates and no level shifts, so the probe
    // energy and splitting drop out of the limiting channel.
    const auto rate_keys = [&] {
        if (!is_flat_dos(sc)) used.insert({"env-energy", "splitting"});
    };

    if (command == "evolve") {
        family_keys();
        dos_keys();
        rate_keys();
        used.insert({"tau-max", "tau-steps"});
    } else if (command == "stationary") {
        family_keys();
        dos_keys();
        rate_keys();
    } else if (command == "sweep") {
        family_keys();
        dos_keys();
        rate_keys();
        used.insert({"tau-max", "tau-steps", "param", "from", "to", "steps"});
        if (sc.sweep_param.rfind("alpha", 0) == 0) used.erase("alpha");
        if (sc.sweep_param == "gamma") used.erase("gamma");
        if (sc.sweep_param == "env-energy") used.erase("env-energy");
    } else if (command == "markov-check") {
        dos_keys();
        rate_keys();
    } else if (command == "finite-n" || command == "compare") {
        family_keys();
        dos_keys();
        used.insert({"env-energy", "splitting", "v", "n", "draws", "model",
                     "seed", "t-max", "t-steps"});
    } else if (command == "variance-scan") {
        family_keys();
        dos_keys();
        used.insert({"env-energy", "splitting", "v", "draws", "model", "seed",
                     "t", "n-list"});
    } else if (command == "resolvent") {
        dos_keys();
        used.insert({"splitting", "v", "z-imag", "e-from", "e-to", "e-steps",
                     "kernel-form"});
    } else {
        throw ValidationError("unknown command '" + command + "'");
    }

    std::vector<std::string> inert;
    for (const auto& key : all)
        if (!used.count(key)) inert.push_back(key);
    return inert;
}

std::string format_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string format_e(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << body;
        f.flush();
        if (!f.good()) {
            f.close();
            std::remove(tmp.c_str());
            throw std::runtime_error("failed writing '" + tmp + "'");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("failed moving '" + tmp + "' into place");
    }
}

void write_manifest(const std::string& command, const Scenario& sc,
                    const std::vector<RunEvent>& events,
                    double wall_seconds) {
    json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["model_label"] = model_label(command, sc);
    j["wall_time_s"] = wall_seconds;
    j["output"] = sc.out;
    json params;
    params["init"] = sc.init;
    params["alpha"] = sc.alpha;
    if (sc.beta)
        params["beta"] = *sc.beta;
    else
        params["beta"] = nullptr;
    params["werner-k"] = sc.werner_k;
    params["dos"] = sc.dos;
    params["gamma"] = sc.gamma;
    params["gamma0"] = sc.gamma0;
    params["env-energy"] = sc.env_energy;
    params["splitting"] = sc.splitting;
    params["v"] = sc.v;
    params["n"] = sc.n;
    params["draws"] = sc.draws;
    params["model"] = sc.model;
    params["seed"] = sc.seed;
    params["tau-max"] = sc.tau_max;
    params["tau-steps"] = sc.tau_steps;
    params["t-max"] = sc.t_max;
    params["t-steps"] = sc.t_steps;
    params["t"] = sc.time_point;
    params["n-list"] = sc.n_list;
    params["z-imag"] = sc.z_imag;
    params["e-from"] = sc.e_from;
    params["e-to"] = sc.e_to;
    params["e-steps"] = sc.e_steps;
    params["kernel-form"] = sc.kernel_form;
    params["param"] = sc.sweep_param;
    params["from"] = sc.sweep_from;
    params["to"] = sc.sweep_to;
    params["steps"] = sc.sweep_steps;
    params["threads"] = sc.threads;
    j["params"] = std::move(params);
    j["inert_params"] = inert_params(command, sc);
    json ev = json::array();
    for (const auto& e : events) ev.push_back({{"kind", e.kind}, {"tau", e.tau}});
    j["events"] = std::move(ev);
    write_text_atomic(sc.out + ".manifest.json", j.dump(2) + "\n");
}

int run_command(const std::string& command, const Scenario& sc) {
    if (sc.threads > 0) openblas_set_num_threads(sc.threads);
    const auto start = std::chrono::steady_clock::now();
    std::vector<RunEvent> events;
    if (command == "evolve")
        run_evolve(sc, events);
    else if (command == "stationary")
        run_stationary(sc);
    else if (command == "sweep")
        run_sweep(sc);
    else if (command == "markov-check")
        run_markov_check(sc);
    else if (command == "finite-n")
        run_finite_n(sc);
    else if (command == "variance-scan")
        run_variance_scan(sc);
    else if (command == "resolvent")
        run_resolvent(sc);
    else if (command == "compare")
        run_compare(sc);
    else
        throw ValidationError("unknown command '" + command + "'");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!sc.out.empty()) write_manifest(command, sc, events, wall);
    return 0;
}

} // namespace qcsim
