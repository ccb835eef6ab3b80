// Command-line driver: term-table export, model simulations, and the
// series-convergence studies, with reproducible seeded runs and manifests.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "tclplus/convergence.hpp"
#include "tclplus/expansion.hpp"
#include "tclplus/io.hpp"
#include "tclplus/ising.hpp"
#include "tclplus/jaynes_cummings.hpp"
#include "tclplus/linalg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tclplus;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 42;
    std::string out_dir = ".";
    int threads = 1;
};

void require_known_fields(const json& obj, const std::set<std::string>& allowed,
                          const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown field '" + it.key() + "' in " + where +
                              " config (misspelled physics parameters are rejected, not ignored)");
        }
    }
}

json load_config(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::string data;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) data.append(buf, n);
    std::fclose(f);
    json cfg = json::parse(data, nullptr, true, true);
    if (!cfg.contains("schema_version") || cfg["schema_version"] != 1) {
        throw ConfigError("config must declare schema_version = 1");
    }
    return cfg;
}

struct Manifest {
    std::string command;
    json config;
    GlobalOpts opts;
    std::vector<std::string> outputs;
    json notes = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const fs::path& dir) const {
        json m;
        m["command"] = command;
        m["config"] = config;
        m["seed"] = opts.seed;
        m["threads"] = opts.threads;
        m["tool_version"] = io::tool_version();
        m["outputs"] = outputs;
        if (!notes.empty()) m["notes"] = notes;
        m["duration_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        io::atomic_write(dir / "manifest.json", m.dump(2) + "\n");
    }
};

// ---- expand ----

json term_table_json(const std::string& method, int max_order) {
    const auto orders = (method == "tcl") ? expansion::expand_neumann_terms(max_order)
                                          : expansion::expand_pinv_terms(max_order);
    json table;
    table["schema_version"] = 1;
    table["method"] = method;
    table["max_order"] = max_order;
    table["orders"] = json::array();
    for (int n = 1; n <= max_order; ++n) {
        json entry;
        entry["order"] = n;
        entry["terms"] = json::array();
        for (const nc::Monomial& mono : orders[static_cast<std::size_t>(n - 1)].monomials()) {
            json term;
            term["coeff"] = mono.coeff;
            term["factors"] = json::array();
            for (const nc::Symbol& s : mono.factors) term["factors"].push_back(nc::name(s));
            entry["terms"].push_back(term);
        }
        table["orders"].push_back(entry);
    }
    if (method == "tclplus") {
        // The daggered words of the pseudoinverse expansion cancel on
        // merging; the peak counts record that they were present mid-sum.
        table["dagger_cancellation"] = json::array();
        for (const auto& s : expansion::dagger_cancellation_stats(max_order)) {
            table["dagger_cancellation"].push_back({{"order", s.order},
                                                    {"peak_daggered_terms", s.peak_daggered_terms},
                                                    {"surviving_daggered_terms",
                                                     s.surviving_daggered_terms}});
        }
    }
    return table;
}

int cmd_expand(const GlobalOpts& opts, int order, const std::string& method,
               std::string out_path) {
    if (order < 1 || order > 10) throw ConfigError("expand: order must be in 1..10");
    if (method != "tcl" && method != "tclplus") {
        throw ConfigError("expand: method must be 'tcl' or 'tclplus'");
    }
    Manifest manifest;
    manifest.command = "expand";
    manifest.opts = opts;
    manifest.config = {{"order", order}, {"method", method}};

    if (out_path.empty()) {
        out_path = (fs::path(opts.out_dir) /
                    ("terms_" + method + "_order" + std::to_string(order) + ".json"))
                       .string();
    }
    const json table = term_table_json(method, order);
    io::atomic_write(out_path, table.dump(2) + "\n");
    manifest.outputs.push_back(out_path);
    manifest.write(fs::path(out_path).parent_path().empty() ? fs::path(".")
                                                            : fs::path(out_path).parent_path());
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

// ---- simulate ----

jc::JcConfig parse_jc(const json& cfg) {
    require_known_fields(cfg, {"schema_version", "model", "gamma0", "omega0", "nu_b", "lambda",
                               "n_modes", "window", "t_max", "dt", "initial_c1", "methods",
                               "bath_dims"},
                         "jc");
    jc::JcConfig out;
    out.gamma0 = cfg.value("gamma0", out.gamma0);
    out.omega0 = cfg.value("omega0", out.omega0);
    out.nu_b = cfg.value("nu_b", out.nu_b);
    out.lambda = cfg.value("lambda", out.lambda);
    out.n_modes = cfg.value("n_modes", out.n_modes);
    out.window = cfg.value("window", out.window);
    out.t_max = cfg.value("t_max", out.t_max);
    out.dt = cfg.value("dt", out.dt);
    out.initial_c1 = cfg.value("initial_c1", out.initial_c1);
    return out;
}

ising::IsingConfig parse_ising(const json& cfg, std::uint64_t seed) {
    require_known_fields(cfg, {"schema_version", "model", "n_bath", "beta", "lambda", "t_max",
                               "dt", "omegas", "couplings", "initial_bloch", "methods"},
                         "ising");
    const int n = cfg.value("n_bath", 4);
    ising::IsingConfig out = ising::default_config(n, cfg.value("beta", 1.0), seed);
    out.lambda = cfg.value("lambda", out.lambda);
    out.t_max = cfg.value("t_max", out.t_max);
    out.dt = cfg.value("dt", out.dt);
    if (cfg.contains("omegas")) out.omegas = cfg["omegas"].get<std::vector<double>>();
    if (cfg.contains("couplings")) out.couplings = cfg["couplings"].get<std::vector<double>>();
    if (cfg.contains("initial_bloch")) {
        auto v = cfg["initial_bloch"].get<std::vector<double>>();
        if (v.size() != 3) throw ConfigError("initial_bloch must have three components");
        out.initial_bloch = {v[0], v[1], v[2]};
    }
    return out;
}

struct MethodSpec {
    std::string label;
    int order;      // 0 for exact/brute
    bool is_plus;
    bool is_exact;
    bool is_brute;
};

MethodSpec parse_method(const std::string& label, const std::string& model) {
    MethodSpec m{label, 0, false, false, false};
    if (label == "exact") {
        m.is_exact = true;
        return m;
    }
    if (label == "brute" && model == "ising") {
        m.is_brute = true;
        return m;
    }
    auto parse_order = [&](const std::string& prefix) -> int {
        if (label.rfind(prefix, 0) != 0) return -1;
        try {
            return std::stoi(label.substr(prefix.size()));
        } catch (...) {
            return -1;
        }
    };
    if (int o = parse_order("tclplus"); o > 0) {
        m.is_plus = true;
        m.order = o;
        return m;
    }
    if (int o = parse_order("tcl"); o > 0) {
        m.order = o;
        return m;
    }
    throw ConfigError("unknown method '" + label + "' for model " + model);
}

int cmd_simulate(const GlobalOpts& opts, const std::string& config_path) {
    const json cfg = load_config(config_path);
    const std::string model = cfg.value("model", "");
    if (model != "jc" && model != "ising") {
        throw ConfigError("simulate: config field 'model' must be 'jc' or 'ising'");
    }
    Manifest manifest;
    manifest.command = "simulate";
    manifest.opts = opts;
    manifest.config = cfg;
    const fs::path dir(opts.out_dir);

    std::vector<std::string> methods = cfg.value("methods", std::vector<std::string>{"exact"});

    if (model == "jc") {
        jc::JcConfig base = parse_jc(cfg);
        std::vector<int> bath_dims = cfg.value("bath_dims", std::vector<int>{1});
        for (const std::string& label : methods) {
            const MethodSpec spec = parse_method(label, model);
            for (int dim : bath_dims) {
                jc::JcConfig run = base;
                run.bath_dim_cutoff = dim;
                run.order = spec.order;
                run.method = spec.is_exact ? jc::Method::Exact
                             : spec.is_plus ? jc::Method::TCLplus
                                            : jc::Method::TCL;
                const jc::JcTrajectory traj = jc::run_jc(run);
                io::CsvWriter csv({"time", "rho11", "re_coherence", "im_coherence", "method",
                                   "order", "bath_dim"});
                for (std::size_t i = 0; i < traj.times.size(); ++i) {
                    csv.add_row({io::CsvWriter::cell(traj.times[i]),
                                 io::CsvWriter::cell(traj.rho11[i]),
                                 io::CsvWriter::cell(traj.coherence[i].real()),
                                 io::CsvWriter::cell(traj.coherence[i].imag()), label,
                                 io::CsvWriter::cell(spec.order), io::CsvWriter::cell(dim)});
                }
                const std::string name = "jc_" + label + "_dim" + std::to_string(dim) + ".csv";
                io::atomic_write(dir / name, csv.str());
                manifest.outputs.push_back((dir / name).string());
                if (traj.diverged_at) {
                    manifest.notes["diverged"][name] = *traj.diverged_at;
                }
            }
        }
    } else {
        ising::IsingConfig base = parse_ising(cfg, opts.seed);
        manifest.notes["resolved_couplings"] = base.couplings;
        manifest.notes["resolved_omegas"] = base.omegas;
        for (const std::string& label : methods) {
            const MethodSpec spec = parse_method(label, model);
            ising::IsingConfig run = base;
            run.order = spec.order == 0 ? 5 : spec.order;
            run.method = spec.is_exact   ? ising::Method::Exact
                         : spec.is_brute ? ising::Method::BruteForce
                         : spec.is_plus  ? ising::Method::TCLplus
                                         : ising::Method::TCL;
            const ising::BlochTrajectory traj = ising::run_ising(run);
            io::CsvWriter csv({"time", "vx", "vy", "vz", "method", "order", "N", "beta"});
            for (std::size_t i = 0; i < traj.times.size(); ++i) {
                csv.add_row({io::CsvWriter::cell(traj.times[i]), io::CsvWriter::cell(traj.vx[i]),
                             io::CsvWriter::cell(traj.vy[i]), io::CsvWriter::cell(traj.vz[i]),
                             label, io::CsvWriter::cell(spec.order),
                             io::CsvWriter::cell(run.n_bath), io::CsvWriter::cell(run.beta)});
            }
            const std::string name = "ising_" + label + ".csv";
            io::atomic_write(dir / name, csv.str());
            manifest.outputs.push_back((dir / name).string());
        }
    }
    manifest.write(dir);
    std::printf("wrote %zu trajectory file(s) to %s\n", manifest.outputs.size(),
                opts.out_dir.c_str());
    return 0;
}

// ---- convergence ----

ComplexMatrix parse_matrix(const json& spec) {
    if (spec.contains("diag")) {
        const auto d = spec["diag"].get<std::vector<double>>();
        ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                              static_cast<Eigen::Index>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
        }
        return m;
    }
    if (spec.contains("rows")) {
        const auto rows = spec["rows"].get<std::vector<std::vector<std::vector<double>>>>();
        const auto n = static_cast<Eigen::Index>(rows.size());
        ComplexMatrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
                throw ConfigError("matrix 'rows' must be square");
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                const auto& cell = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (cell.size() != 2) throw ConfigError("matrix entries are [re, im] pairs");
                m(i, j) = Complex(cell[0], cell[1]);
            }
        }
        return m;
    }
    throw ConfigError("matrix must be given as {\"diag\": [...]} or {\"rows\": [[[re,im],...]]}");
}

int cmd_convergence(const GlobalOpts& opts, const std::string& config_path) {
    const json cfg = load_config(config_path);
    const std::string mode = cfg.value("mode", "");
    Manifest manifest;
    manifest.command = "convergence";
    manifest.opts = opts;
    manifest.config = cfg;
    const fs::path dir(opts.out_dir);

    if (mode == "sweep") {
        require_known_fields(cfg, {"schema_version", "mode", "dim", "trials", "max_depth",
                                   "ensemble", "norms"},
                             "convergence sweep");
        convergence::SweepConfig sweep;
        sweep.dim = cfg.value("dim", 16);
        sweep.trials = cfg.value("trials", 50);
        sweep.max_depth = cfg.value("max_depth", 300L);
        sweep.threads = opts.threads;
        const std::string ens = cfg.value("ensemble", "chiral");
        if (ens == "chiral") {
            sweep.ensemble = convergence::Ensemble::Chiral;
        } else if (ens == "hermitian") {
            sweep.ensemble = convergence::Ensemble::Hermitian;
        } else if (ens == "ginibre") {
            sweep.ensemble = convergence::Ensemble::Ginibre;
        } else {
            throw ConfigError("ensemble must be 'chiral', 'hermitian' or 'ginibre'");
        }
        std::vector<double> norms = convergence::default_norm_grid();
        if (cfg.contains("norms")) {
            const json& ng = cfg["norms"];
            require_known_fields(ng, {"start", "stop", "step"}, "norms");
            norms.clear();
            const double start = ng.value("start", 0.05);
            const double stop = ng.value("stop", 1.6);
            const double step = ng.value("step", 0.05);
            if (step <= 0) throw ConfigError("norms.step must be > 0");
            // integer multiples avoid accumulation drift in the emitted grid
            for (long i = 0;; ++i) {
                const double x = start + static_cast<double>(i) * step;
                if (x > stop + 1e-12) break;
                norms.push_back(x);
            }
        }
        const auto rows = convergence::threshold_sweep(norms, opts.seed, sweep);
        io::CsvWriter csv({"norm", "tau_neumann_mean", "tau_neumann_std", "tau_pinv_mean",
                           "tau_pinv_std"});
        for (const auto& row : rows) {
            csv.add_row({io::CsvWriter::cell(row.norm), io::CsvWriter::cell(row.tau_neumann_mean),
                         io::CsvWriter::cell(row.tau_neumann_std),
                         io::CsvWriter::cell(row.tau_pinv_mean),
                         io::CsvWriter::cell(row.tau_pinv_std)});
        }
        io::atomic_write(dir / "depth_constants.csv", csv.str());
        manifest.outputs.push_back((dir / "depth_constants.csv").string());
        manifest.notes["ensemble"] = ens;
        manifest.write(dir);
        std::printf("wrote %s\n", (dir / "depth_constants.csv").string().c_str());
        return 0;
    }

    if (mode == "single") {
        require_known_fields(cfg, {"schema_version", "mode", "matrix", "max_depth"},
                             "convergence single");
        if (!cfg.contains("matrix")) throw ConfigError("single mode needs a 'matrix' field");
        const ComplexMatrix sigma = parse_matrix(cfg["matrix"]);
        const long max_depth = cfg.value("max_depth", 5000L);

        const auto pinv_curve =
            convergence::convergence_curve(sigma, convergence::SeriesKind::Pinv, max_depth);
        std::vector<double> neumann_col;
        bool neumann_has_reference = true;
        try {
            const auto c = convergence::convergence_curve(
                sigma, convergence::SeriesKind::Neumann, max_depth);
            neumann_col = c.errors;
        } catch (const SingularReference&) {
            // no inverse exists; report the growing partial-sum norms instead
            neumann_has_reference = false;
            neumann_col = convergence::partial_sum_norm_curve(
                              sigma, convergence::SeriesKind::Neumann, max_depth)
                              .errors;
        }
        io::CsvWriter csv({"depth", "err_neumann", "err_pinv"});
        for (std::size_t i = 0; i < pinv_curve.depths.size(); ++i) {
            csv.add_row({io::CsvWriter::cell(pinv_curve.depths[i]),
                         io::CsvWriter::cell(neumann_col[i]),
                         io::CsvWriter::cell(pinv_curve.errors[i])});
        }
        io::atomic_write(dir / "series_errors.csv", csv.str());
        manifest.outputs.push_back((dir / "series_errors.csv").string());
        manifest.notes["neumann_column"] =
            neumann_has_reference ? "error against the reference inverse"
                                  : "partial-sum norm (I - sigma is singular, no inverse exists)";
        manifest.write(dir);
        std::printf("wrote %s\n", (dir / "series_errors.csv").string().c_str());
        return 0;
    }

    throw ConfigError("convergence: config field 'mode' must be 'sweep' or 'single'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-convolutionless master equation toolkit (TCL and the Moore-Penrose "
                 "TCL+ variant)"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--seed", opts.seed, "base seed for every random quantity");
    app.add_option("--out-dir", opts.out_dir, "directory for outputs and manifests");
    app.add_option("--threads", opts.threads, "worker threads for sweeps")
        ->check(CLI::PositiveNumber);

    int expand_order = 4;
    std::string expand_method = "tcl";
    std::string expand_out;
    CLI::App* expand = app.add_subcommand("expand", "write per-order generator term tables");
    expand->add_option("--order", expand_order, "highest order to expand")->required();
    expand->add_option("--method", expand_method, "tcl or tclplus");
    expand->add_option("--out", expand_out, "output JSON path");

    std::string sim_config;
    CLI::App* simulate = app.add_subcommand("simulate", "run a model and write trajectories");
    simulate->add_option("--config", sim_config, "model config JSON")->required();

    std::string conv_config;
    CLI::App* conv = app.add_subcommand("convergence", "series convergence studies");
    conv->add_option("--config", conv_config, "convergence config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (expand->parsed()) return cmd_expand(opts, expand_order, expand_method, expand_out);
        if (simulate->parsed()) return cmd_simulate(opts, sim_config);
        if (conv->parsed()) return cmd_convergence(opts, conv_config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
