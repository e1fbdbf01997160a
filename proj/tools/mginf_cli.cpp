// Command-line front end; talks to the library exclusively through the C API.
#include <mginf.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

[[noreturn]] void die(const std::string& context) {
    std::cerr << "error: " << context << ": " << mginf_last_error() << "\n";
    std::exit(1);
}

// default output directory: MGINF_OUTPUT_DIR, else cwd
std::string out_path(const std::string& name) {
    if (name.find('/') != std::string::npos) return name;
    if (const char* dir = std::getenv("MGINF_OUTPUT_DIR"))
        return std::string(dir) + "/" + name;
    return name;
}

std::vector<double> read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open samples file '" << path << "'\n";
        std::exit(1);
    }
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(std::stod(line));
        } catch (const std::exception&) {
            // header or comment line
        }
    }
    if (out.empty()) {
        std::cerr << "error: no numeric samples in '" << path << "'\n";
        std::exit(1);
    }
    return out;
}

struct DistFlags {
    std::string family = "exponential";
    std::vector<double> params = {1.0};
};

void add_dist_flags(CLI::App* cmd, DistFlags& f) {
    cmd->add_option("--family", f.family,
                    "service family: exponential|gamma|weibull|uniform|lognormal|dirac_mixture");
    cmd->add_option("--params", f.params,
                    "family parameters (dirac_mixture: atoms then weights)")
        ->expected(-1);
}

mginf_dist* make_dist(const DistFlags& f) {
    mginf_dist* d = mginf_dist_create(f.family.c_str(), f.params.data(), f.params.size());
    if (d == nullptr) die("creating distribution");
    return d;
}

struct EstimatorFlags {
    double x0 = 1.0;
    int ell = 2;
    double h = 0.0;
    bool auto_h = false;
    double lambda = 1.0;
    double kappa = 0.5;
    double beta = 1.0;
    double L = 1.0;
    double K = 1.0;
    double d = 0.5;
    double delta = 1.0;
    std::string samples_path;
};

void add_estimator_flags(CLI::App* cmd, EstimatorFlags& f, bool with_x0) {
    cmd->set_help_flag("--help", "print help");  // frees -h so --h can be the window width
    cmd->add_option("--samples", f.samples_path, "samples CSV (one value per line)")->required();
    cmd->add_option("--delta", f.delta, "sampling interval")->required();
    if (with_x0) cmd->add_option("--x0", f.x0, "evaluation point");
    cmd->add_option("--ell", f.ell, "polynomial degree");
    cmd->add_option("--h", f.h, "window width");
    cmd->add_flag("--auto-h", f.auto_h, "use the rate-optimal bandwidth");
    cmd->add_option("--lambda", f.lambda, "known arrival rate");
    cmd->add_option("--kappa", f.kappa, "margin parameter in (0,1)");
    cmd->add_option("--beta", f.beta, "declared smoothness");
    cmd->add_option("--L", f.L, "declared Holder constant");
    cmd->add_option("--K", f.K, "declared moment bound");
    cmd->add_option("--d", f.d, "smoothness interval half-width");
}

mginf_estimator_config to_config(const EstimatorFlags& f) {
    mginf_estimator_config cfg{};
    cfg.x0 = f.x0;
    cfg.ell = f.ell;
    cfg.h = f.auto_h ? 0.0 : f.h;
    cfg.lambda = f.lambda;
    cfg.kappa = f.kappa;
    cfg.beta = f.beta;
    cfg.L = f.L;
    cfg.K = f.K;
    cfg.d = f.d;
    return cfg;
}

json estimate_json(const mginf_estimate& e, bool combined) {
    json j;
    j["estimate"] = e.value;
    j["clipped"] = e.clipped;
    j["h_used"] = e.h_used;
    j["window"] = {e.window_lo, e.window_hi};
    j["weights_norm"] = {{"l1", e.weights_l1}, {"l2", e.weights_l2}};
    std::vector<std::string> warnings;
    std::stringstream ss(e.warnings);
    std::string w;
    while (std::getline(ss, w, ';'))
        if (!w.empty()) warnings.push_back(w);
    j["warnings"] = warnings;
    if (combined) {
        j["used_trivial"] = e.used_trivial != 0;
        j["trivial_bound"] = e.trivial_bound;
        j["theorem_bound"] = e.theorem_bound;
    }
    return j;
}

int cmd_simulate(const DistFlags& dist_flags, double lambda, double delta, int64_t n,
                 uint64_t seed, const std::string& out_prefix) {
    mginf_dist* d = make_dist(dist_flags);
    mginf_path* p = mginf_simulate(d, lambda, delta, n, seed);
    if (p == nullptr) die("simulate");

    const int64_t n_events = mginf_path_event_count(p);
    std::vector<double> epochs(static_cast<size_t>(n_events));
    std::vector<int32_t> kinds(static_cast<size_t>(n_events));
    if (n_events > 0 && mginf_path_events(p, epochs.data(), kinds.data()) != MGINF_OK)
        die("reading events");
    std::vector<double> samples(static_cast<size_t>(n));
    if (mginf_path_samples(p, samples.data()) != MGINF_OK) die("reading samples");

    json header;
    header["seed"] = seed;
    header["rho"] = mginf_path_rho(p);
    header["delta"] = delta;
    header["n"] = n;
    header["T"] = delta * static_cast<double>(n);
    header["initial_count"] = mginf_path_initial_count(p);

    const std::string events_path = out_path(out_prefix + ".events.csv");
    {
        std::ofstream out(events_path);
        out.precision(15);
        out << header.dump() << "\n";
        out << "epoch,kind\n";
        for (size_t i = 0; i < epochs.size(); ++i)
            out << epochs[i] << ',' << (kinds[i] == 0 ? "arrival" : "departure") << "\n";
    }
    const std::string samples_path = out_path(out_prefix + ".samples.csv");
    {
        std::ofstream out(samples_path);
        out.precision(15);
        out << "x\n";
        for (double v : samples) out << v << "\n";
    }
    std::cout << "wrote " << events_path << " and " << samples_path << "\n";

    mginf_path_free(p);
    mginf_dist_free(d);
    return 0;
}

int cmd_estimate(const std::string& which, const EstimatorFlags& flags) {
    const std::vector<double> x = read_samples_csv(flags.samples_path);
    const mginf_estimator_config cfg = to_config(flags);
    mginf_estimate est{};
    mginf_status st = MGINF_OK;
    bool combined = false;
    if (which == "g") {
        st = mginf_estimate_g(x.data(), x.size(), flags.delta, &cfg, &est);
    } else if (which == "g-combined") {
        combined = true;
        st = mginf_estimate_g_combined(x.data(), x.size(), flags.delta, &cfg, &est);
    } else if (which == "lambda") {
        st = mginf_estimate_lambda(x.data(), x.size(), flags.delta, &cfg, &est);
    } else {
        st = mginf_estimate_theta(x.data(), x.size(), flags.delta, &cfg, &est);
    }
    if (st != MGINF_OK) die("estimate-" + which);
    std::cout << estimate_json(est, combined).dump(2) << "\n";
    return 0;
}

int cmd_lower_bound(mginf_pair_params params, int64_t kl_n, bool calibrate,
                    const std::string& dump_prefix) {
    mginf_pair* pair =
        calibrate ? mginf_build_pair_calibrated(&params) : mginf_build_pair(&params);
    if (pair == nullptr) die("lower-bound");

    mginf_pair_info info{};
    mginf_pair_info_get(pair, &info);
    double kl = 0.0, floor_v = 0.0;
    if (mginf_pair_kl(pair, kl_n, &kl, &floor_v) != MGINF_OK) die("lower-bound KL");

    json j;
    j["N"] = info.N;
    j["N0"] = info.N0;
    j["a"] = info.a_closed;
    j["a_numeric"] = info.a_numeric;
    j["KL"] = kl;
    j["kl_n"] = kl_n;
    j["risk_floor"] = floor_v;
    j["f1_min"] = info.f1_min;
    j["b_n"] = info.b_n;
    j["int_abs_gamma1"] = info.int_abs_gamma1;
    j["constants"] = {{"c0", params.c0}, {"c1", params.c1}, {"c3", params.c3}, {"c21", params.c21}};
    std::cout << j.dump(2) << "\n";

    if (!dump_prefix.empty()) {
        std::vector<double> absc(info.grid_size), vals(info.grid_size);
        const char* names[4] = {"f0", "f1", "gamma0", "gamma1"};
        for (int which = 0; which < 4; ++which) {
            mginf_pair_grid_get(pair, which, absc.data(), vals.data());
            const std::string path = out_path(dump_prefix + "." + names[which] + ".csv");
            std::ofstream out(path);
            out.precision(15);
            out << (which < 2 ? "omega,value\n" : "t,value\n");
            for (size_t i = 0; i < info.grid_size; ++i)
                out << absc[i] << ',' << vals[i] << "\n";
        }
        std::cout << "dumped spectral/covariance grids with prefix " << dump_prefix << "\n";
    }
    mginf_pair_free(pair);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"M/G/inf queue simulation and service-time estimation toolkit"};
    app.require_subcommand(1);

    // simulate
    DistFlags sim_dist;
    double sim_lambda = 1.0, sim_delta = 1.0;
    int64_t sim_n = 100;
    uint64_t sim_seed = 1;
    std::string sim_out = "path";
    auto* sim = app.add_subcommand("simulate", "draw a stationary queue-length path");
    add_dist_flags(sim, sim_dist);
    sim->add_option("--lambda", sim_lambda, "arrival rate");
    sim->add_option("--delta", sim_delta, "sampling interval");
    sim->add_option("--n", sim_n, "number of samples");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "output prefix (<prefix>.events.csv, <prefix>.samples.csv)");

    // estimators
    EstimatorFlags g_flags, gc_flags, l_flags, t_flags;
    auto* eg = app.add_subcommand("estimate-g", "estimate G(x0) from a samples file");
    add_estimator_flags(eg, g_flags, true);
    auto* egc = app.add_subcommand("estimate-g-combined",
                                   "estimate G(x0) with the large-x0 trivial fallback");
    add_estimator_flags(egc, gc_flags, true);
    auto* el = app.add_subcommand("estimate-lambda", "estimate the arrival rate");
    add_estimator_flags(el, l_flags, false);
    auto* et = app.add_subcommand("estimate-theta",
                                  "estimate gamma'(x0) for a zero-mean Gaussian path");
    add_estimator_flags(et, t_flags, true);

    // risk
    std::string risk_config, risk_csv = "risk.csv", risk_json = "risk.json";
    auto* risk = app.add_subcommand("risk", "run a Monte Carlo risk ladder from a config file");
    risk->add_option("--config", risk_config, "experiment config file")->required();
    risk->add_option("--csv", risk_csv, "per-rung CSV output");
    risk->add_option("--json", risk_json, "JSON summary output");

    // lower-bound
    mginf_pair_params pp{};
    pp.beta = 1.0;
    pp.L = 1.0;
    pp.K = 1.0;
    pp.x0 = 1.0;
    pp.d = 0.5;
    pp.delta = 1.0 / 16.0;
    pp.T = 4096.0;
    pp.c0 = 1.0;
    pp.c1 = 1.0;
    pp.c3 = 0.25;
    pp.c21 = 4.0;
    pp.zeta_order = 8;
    int64_t kl_n = 1024;
    bool calibrate = false;
    std::string dump_prefix;
    auto* lb = app.add_subcommand("lower-bound", "build the two-point lower-bound pair");
    lb->add_option("--beta", pp.beta);
    lb->add_option("--L", pp.L);
    lb->add_option("--K", pp.K);
    lb->add_option("--x0", pp.x0);
    lb->add_option("--d", pp.d);
    lb->add_option("--delta", pp.delta);
    lb->add_option("--T", pp.T);
    lb->add_option("--c0", pp.c0);
    lb->add_option("--c1", pp.c1);
    lb->add_option("--c3", pp.c3);
    lb->add_option("--c21", pp.c21);
    lb->add_option("--zeta-order", pp.zeta_order);
    lb->add_option("--kl-n", kl_n, "Toeplitz dimension for the KL computation (<= 8192)");
    lb->add_flag("--calibrate", calibrate, "calibrate c0/c1/c3 before building");
    lb->add_option("--dump", dump_prefix, "dump f0/f1/gamma0/gamma1 CSV grids");

    // oracle-check
    uint64_t oc_seed = 1;
    double oc_scale = 1.0;
    std::string oc_csv = "oracle.csv";
    auto* oc = app.add_subcommand("oracle-check", "run the oracle-vs-simulation suite");
    oc->add_option("--seed", oc_seed, "RNG seed");
    oc->add_option("--mc-scale", oc_scale, "scale factor on Monte Carlo sample counts");
    oc->add_option("--csv", oc_csv, "pass/fail CSV output");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed())
        return cmd_simulate(sim_dist, sim_lambda, sim_delta, sim_n, sim_seed, sim_out);
    if (eg->parsed()) return cmd_estimate("g", g_flags);
    if (egc->parsed()) return cmd_estimate("g-combined", gc_flags);
    if (el->parsed()) return cmd_estimate("lambda", l_flags);
    if (et->parsed()) return cmd_estimate("theta", t_flags);
    if (risk->parsed()) {
        pp.min_lags = 0;
        const std::string csv = out_path(risk_csv), js = out_path(risk_json);
        if (mginf_run_risk_file(risk_config.c_str(), csv.c_str(), js.c_str()) != MGINF_OK)
            die("risk");
        std::cout << "wrote " << csv << " and " << js << "\n";
        return 0;
    }
    if (lb->parsed()) {
        pp.min_lags = kl_n;
        return cmd_lower_bound(pp, kl_n, calibrate, dump_prefix);
    }
    if (oc->parsed()) {
        int fails = 0;
        const std::string csv = out_path(oc_csv);
        if (mginf_oracle_suite(oc_seed, oc_scale, csv.c_str(), &fails) != MGINF_OK)
            die("oracle-check");
        std::cout << "wrote " << csv << "; failures: " << fails << "\n";
        return fails == 0 ? 0 : 2;
    }
    return 0;
}
