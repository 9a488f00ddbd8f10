#include "fsw/jobs.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <Eigen/Core>

#include "fsw/bands.hpp"
#include "fsw/discrete.hpp"
#include "fsw/example.hpp"
#include "fsw/multiplicity.hpp"
#include "fsw/perturbation.hpp"
#include "fsw/symbols.hpp"
#include "fsw/torus.hpp"

namespace fsw {

namespace {

// ---- config access ----------------------------------------------------------

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

const Json& require_field(const Json& obj, const char* key, const char* context) {
    if (!obj.is_object() || !obj.contains(key))
        fail(std::string("missing field '") + key + "' in " + context);
    return obj.at(key);
}

double num_or(const Json& obj, const char* key, double fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

int int_or(const Json& obj, const char* key, int fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

std::vector<int> int_list(const Json& v, const char* context) {
    if (!v.is_array()) fail(std::string(context) + " must be an array of integers");
    std::vector<int> out;
    for (const Json& e : v) {
        if (!e.is_number_integer()) fail(std::string(context) + " must hold integers");
        out.push_back(e.get<int>());
    }
    return out;
}

// ---- symbol construction ----------------------------------------------------

BuiltinParams parse_params(const Json& params) {
    BuiltinParams bp;
    if (params.is_null()) return bp;
    if (!params.is_object()) fail("'params' must be an object");
    for (const auto& [key, value] : params.items()) {
        if (key == "modes") {
            if (!value.is_array()) fail("'modes' must be an array of [frequency, coupling]");
            for (const Json& m : value) {
                if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() ||
                    !m[1].is_number())
                    fail("each mode must be a pair [integer frequency, numeric coupling]");
                bp.modes.emplace_back(m[0].get<int>(), m[1].get<double>());
            }
        } else if (key == "convention") {
            if (!value.is_string()) fail("'convention' must be a string");
            bp.convention = value.get<std::string>();
        } else if (value.is_number()) {
            bp.scalars[key] = value.get<double>();
        } else {
            fail("parameter '" + key + "' must be a number");
        }
    }
    return bp;
}

FourierTable parse_fourier(const Json& desc) {
    FourierTable table;
    table.dims = require_field(desc, "dims", "fourier table").get<int>();
    table.points_per_dim = require_field(desc, "points", "fourier table").get<int>();
    table.n = int_or(desc, "n", 1);
    if (table.dims < 1 || table.dims > 8) fail("fourier table 'dims' out of range");
    if (table.points_per_dim < 2) fail("fourier table needs at least 2 points per axis");
    if (table.n < 1) fail("fourier table 'n' must be positive");
    table.coef.assign(static_cast<size_t>(table.entry_count()),
                      Eigen::MatrixXcd::Zero(table.n, table.n));

    const Json& entries = require_field(desc, "entries", "fourier table");
    if (!entries.is_array()) fail("fourier 'entries' must be an array");
    for (const Json& entry : entries) {
        std::vector<int> freq = int_list(require_field(entry, "freq", "fourier entry"),
                                         "fourier entry 'freq'");
        if (static_cast<int>(freq.size()) != table.dims)
            fail("fourier entry 'freq' length must equal dims");
        const Json& value = require_field(entry, "value", "fourier entry");
        if (!value.is_array() || static_cast<int>(value.size()) != table.n)
            fail("fourier entry 'value' must be an n x n array of [re, im] pairs");
        Eigen::MatrixXcd m(table.n, table.n);
        for (int a = 0; a < table.n; ++a) {
            const Json& row = value[static_cast<size_t>(a)];
            if (!row.is_array() || static_cast<int>(row.size()) != table.n)
                fail("fourier entry 'value' must be an n x n array of [re, im] pairs");
            for (int b = 0; b < table.n; ++b) {
                const Json& cell = row[static_cast<size_t>(b)];
                if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
                    !cell[1].is_number())
                    fail("fourier entry cells must be [re, im] number pairs");
                m(a, b) = std::complex<double>(cell[0].get<double>(), cell[1].get<double>());
            }
        }
        try {
            table.coef[static_cast<size_t>(table.index_of(freq))] = m;
        } catch (const std::exception& e) {
            fail(std::string("fourier entry frequency out of range: ") + e.what());
        }
    }
    return table;
}

SymbolVariant parse_symbol(const Json& desc, int nu, const char* context) {
    if (desc.contains("builtin")) {
        const Json& name = desc.at("builtin");
        if (!name.is_string()) fail("'builtin' must be a string");
        BuiltinParams params =
            parse_params(desc.contains("params") ? desc.at("params") : Json());
        try {
            return builtin_symbol(name.get<std::string>(), params, nu);
        } catch (const std::invalid_argument& e) {
            fail(std::string(context) + ": " + e.what());
        }
    }
    if (desc.contains("fourier")) {
        FourierTable table = parse_fourier(desc.at("fourier"));
        try {
            if (table.dims == nu) return matrix_from_fourier(std::move(table), nu);
            return kernel_from_fourier(std::move(table), nu);
        } catch (const std::invalid_argument& e) {
            fail(std::string(context) + ": " + e.what());
        }
    }
    fail(std::string(context) + " needs either 'builtin' or 'fourier'");
}

MatrixSymbol matrix_symbol_from(const Json& config, int nu) {
    const Json& symbols = require_field(config, "symbols", "config");
    const Json& desc = require_field(symbols, "u", "config.symbols");
    SymbolVariant v = parse_symbol(desc, nu, "symbols.u");
    if (!std::holds_alternative<MatrixSymbol>(v))
        fail("symbols.u does not name a matrix symbol");
    return std::get<MatrixSymbol>(std::move(v));
}

KernelSymbol kernel_symbol_from(const Json& config, int nu) {
    const Json& symbols = require_field(config, "symbols", "config");
    const Json& desc = require_field(symbols, "k", "config.symbols");
    SymbolVariant v = parse_symbol(desc, nu, "symbols.k");
    if (!std::holds_alternative<KernelSymbol>(v))
        fail("symbols.k does not name a kernel symbol");
    return std::get<KernelSymbol>(std::move(v));
}

struct CommonInputs {
    int nu = 1;
    TorusGrid grid;
    int refine_limit = 3;
    Json tolerances;
};

CommonInputs common_inputs(const Json& config) {
    CommonInputs in;
    in.nu = int_or(config, "nu", 1);
    Json grid_cfg = config.contains("grid") ? config.at("grid") : Json::object();
    int points = int_or(grid_cfg, "points", 64);
    in.refine_limit = int_or(grid_cfg, "refine_limit", 3);
    try {
        in.grid = make_grid(in.nu, points);
    } catch (const std::invalid_argument& e) {
        fail(std::string("grid: ") + e.what());
    }
    in.tolerances = config.contains("tolerances") ? config.at("tolerances") : Json::object();
    return in;
}

// ---- serialization ----------------------------------------------------------

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

Json to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Json band_set_to_json(const BandSet& bands) {
    Json out;
    Json list = Json::array();
    for (const Band& b : bands.bands) list.push_back({b.lo, b.hi});
    out["bands"] = list;
    Json raw = Json::array();
    for (const Band& b : bands.branch_ranges) raw.push_back({b.lo, b.hi});
    out["branch_ranges"] = raw;
    out["gamma"] = bands.gamma;
    GammaPoints gp = gamma_points(bands);
    out["gamma_points"] = {{"values", gp.values}, {"collapsed", gp.collapsed}};
    out["resolution"] = bands.resolution;
    out["refinement_converged"] = bands.refinement_converged;
    out["endpoint_drift"] = bands.endpoint_drift;
    return out;
}

Json stability_to_json(const StabilityReport& r) {
    Json out;
    out["resolutions"] = r.resolutions;
    out["counts_per_gap"] = r.counts;
    out["eigenvalues_outside"] = r.outside;
    out["last_drift"] = std::isfinite(r.last_drift) ? Json(r.last_drift) : Json("unmatched");
    out["verdict"] = r.verdict;
    return out;
}

Json smoothness_to_json(const SmoothnessEstimate& s) {
    Json out;
    out["alpha_hat"] = s.infinite ? Json("infinite") : Json(s.alpha_hat);
    out["infinite"] = s.infinite;
    out["inconclusive"] = s.inconclusive;
    out["slope"] = s.slope;
    out["fit_quality"] = s.fit_quality;
    out["shells"] = {s.shell_min, s.shell_max};
    return out;
}

Json multiplicity_to_json(const std::vector<MultiplicityReport>& reports) {
    Json out = Json::array();
    for (const MultiplicityReport& r : reports) {
        Json entry;
        entry["z"] = r.z;
        entry["isolated"] = r.isolated;
        entry["mu_z"] = std::isfinite(r.mu_z) ? Json(r.mu_z) : Json("infinite");
        entry["component_count"] = r.component_count;
        entry["component_diameters"] = r.component_diameters;
        Json points = Json::array();
        for (const ExtremalPoint& p : r.points) {
            points.push_back({{"location", to_json(p.location)},
                              {"m_hat", p.m_hat},
                              {"fit_slope", p.fit.slope},
                              {"fit_intercept", p.fit.intercept},
                              {"fit_residual", p.fit.rms_residual},
                              {"radii", p.radii_used}});
        }
        entry["points"] = points;
        out.push_back(std::move(entry));
    }
    return out;
}

Json certificate_to_json(const CertificateVerdict& c) {
    Json out;
    out["verdict"] = c.verdict;
    out["reason"] = c.reason;
    out["mu"] = std::isfinite(c.mu) ? Json(c.mu) : Json("infinite");
    out["threshold"] = std::isfinite(c.threshold) ? Json(c.threshold) : Json("infinite");
    out["alpha_hat"] = std::isfinite(c.alpha_hat) ? Json(c.alpha_hat) : Json("infinite");
    return out;
}

Json report_skeleton(const std::string& command, const Json& config, std::uint64_t seed) {
    Json report;
    report["schema_version"] = 1;
    report["artifact"] = {{"name", "friedrichs-workbench"}, {"version", "0.1.0"}};
    report["command"] = command;
    report["seed"] = seed;
    report["config"] = config;
    report["timings_file"] = "timings.json";
    return report;
}

double auto_margin(const BandSet& bands, const Json& tolerances) {
    double margin = num_or(tolerances, "margin", 0.0);
    if (margin > 0.0) return margin;
    return std::max(10.0 * bands.endpoint_drift, 1e-6);
}

// ---- subcommands ------------------------------------------------------------

JobResult cmd_validate(const Json& config, std::uint64_t seed) {
    CommonInputs in = common_inputs(config);
    MatrixSymbol u = matrix_symbol_from(config, in.nu);
    KernelSymbol k = kernel_symbol_from(config, in.nu);
    double tol = num_or(in.tolerances, "symmetry", 1e-10);

    SymmetryReport rep = validate_symmetry(u, k, in.grid, tol);

    JobResult result;
    result.report = report_skeleton("validate", config, seed);
    result.report["results"]["symmetry"] = {{"u_max_deviation", rep.u_max_deviation},
                                            {"k_max_deviation", rep.k_max_deviation},
                                            {"tol", rep.tol},
                                            {"pass", rep.pass}};
    result.exit_code = rep.pass ? 0 : 2;
    result.summary_line = rep.pass
                              ? "validate: PASS (u dev " + format_double(rep.u_max_deviation) +
                                    ", k dev " + format_double(rep.k_max_deviation) + ")"
                              : "validate: FAIL (u dev " + format_double(rep.u_max_deviation) +
                                    ", k dev " + format_double(rep.k_max_deviation) + ")";
    result.report["summary"] = result.summary_line;
    return result;
}

JobResult cmd_bands(const Json& config, std::uint64_t seed) {
    CommonInputs in = common_inputs(config);
    MatrixSymbol u = matrix_symbol_from(config, in.nu);
    double endpoint_tol = num_or(in.tolerances, "band_endpoint", 1e-8);

    BandSet bands = compute_bands(u, in.grid, in.refine_limit, endpoint_tol);

    JobResult result;
    result.report = report_skeleton("bands", config, seed);
    result.report["results"]["band_set"] = band_set_to_json(bands);
    if (!bands.refinement_converged)
        result.report["results"]["warning"] = "band endpoints did not converge within the "
                                              "refinement limit";

    // branch CSV on the configured (initial) grid
    std::ostringstream csv;
    csv << "node";
    for (int a = 0; a < in.nu; ++a) csv << ",x" << (a + 1);
    for (int j = 0; j < u.n; ++j) csv << ",lambda" << (j + 1);
    csv << "\n";
    for (std::int64_t flat = 0; flat < in.grid.node_count(); ++flat) {
        Eigen::VectorXd x = in.grid.node(flat);
        Eigen::VectorXd lam = symbol_eigenvalues(u, x);
        csv << flat;
        for (int a = 0; a < in.nu; ++a) csv << "," << format_double(x[a]);
        for (int j = 0; j < u.n; ++j) csv << "," << format_double(lam[j]);
        csv << "\n";
    }
    result.csv["branches.csv"] = csv.str();

    std::ostringstream line;
    line << "bands:";
    for (const Band& b : bands.bands)
        line << " [" << format_double(b.lo) << ", " << format_double(b.hi) << "]";
    result.summary_line = line.str();
    result.report["summary"] = result.summary_line;
    return result;
}

JobResult cmd_eigs(const Json& config, std::uint64_t seed) {
    CommonInputs in = common_inputs(config);
    MatrixSymbol u = matrix_symbol_from(config, in.nu);
    KernelSymbol k = kernel_symbol_from(config, in.nu);

    const Json& eigs_cfg = require_field(config, "eigs", "config");
    std::vector<int> resolutions =
        int_list(require_field(eigs_cfg, "resolutions", "config.eigs"), "eigs.resolutions");
    if (resolutions.size() < 3) fail("eigs.resolutions needs at least 3 entries");

    AssembleOptions options;
    options.max_size = int_or(eigs_cfg, "max_size", 8192);

    BandSet bands =
        compute_bands(u, in.grid, in.refine_limit, num_or(in.tolerances, "band_endpoint", 1e-8));
    double margin = auto_margin(bands, in.tolerances);

    StabilityReport stability;
    try {
        stability = refine_count(u, k, bands, resolutions, margin, options);
    } catch (const std::invalid_argument& e) {
        fail(std::string("eigs: ") + e.what());
    }

    JobResult result;
    result.report = report_skeleton("eigs", config, seed);
    result.report["results"]["band_set"] = band_set_to_json(bands);
    result.report["results"]["margin"] = margin;
    result.report["results"]["stability"] = stability_to_json(stability);

    if (eigs_cfg.contains("birman_schwinger")) {
        const Json& bs = eigs_cfg.at("birman_schwinger");
        const Json& bracket = require_field(bs, "bracket", "eigs.birman_schwinger");
        if (!bracket.is_array() || bracket.size() != 2 || !bracket[0].is_number() ||
            !bracket[1].is_number())
            fail("eigs.birman_schwinger.bracket must be [lo, hi]");
        int bs_points = int_or(bs, "points", in.grid.points_per_dim);
        TorusGrid bs_grid = make_grid(in.nu, bs_points);
        double root = birman_schwinger_root(u, k, bs_grid, bracket[0].get<double>(),
                                            bracket[1].get<double>());
        result.report["results"]["birman_schwinger_root"] = root;
    }

    std::ostringstream csv;
    csv << "resolution,gap,eigenvalue\n";
    for (size_t r = 0; r < stability.outside.size(); ++r) {
        for (double z : stability.outside[r])
            csv << stability.resolutions[r] << "," << bands.gap_index(z) << ","
                << format_double(z) << "\n";
    }
    result.csv["gap_eigenvalues.csv"] = csv.str();

    result.summary_line = "eigs: verdict " + stability.verdict;
    result.report["summary"] = result.summary_line;
    return result;
}

JobResult cmd_certify(const Json& config, std::uint64_t seed) {
    CommonInputs in = common_inputs(config);
    MatrixSymbol u = matrix_symbol_from(config, in.nu);
    KernelSymbol k = kernel_symbol_from(config, in.nu);

    Json certify_cfg = config.contains("certify") ? config.at("certify") : Json::object();
    double extremal_tol = num_or(in.tolerances, "extremal", 1e-9);
    int mult_points = int_or(certify_cfg, "points", in.nu >= 2 ? 24 : 64);
    int smooth_points = int_or(certify_cfg, "smoothness_points", in.nu >= 2 ? 16 : 32);

    BandSet bands =
        compute_bands(u, in.grid, in.refine_limit, num_or(in.tolerances, "band_endpoint", 1e-8));
    TorusGrid mult_grid = make_grid(in.nu, mult_points);
    std::vector<MultiplicityReport> reports =
        total_multiplicity(u, bands, mult_grid, extremal_tol);
    double mu = max_mu(reports);

    TorusGrid smooth_grid = make_grid(in.nu, smooth_points);
    SmoothnessEstimate alpha = smoothness_index(k, smooth_grid);
    CertificateVerdict cert = finiteness_certificate(mu, in.nu, alpha);

    JobResult result;
    result.report = report_skeleton("certify", config, seed);
    result.report["results"]["band_set"] = band_set_to_json(bands);
    result.report["results"]["multiplicity"] = multiplicity_to_json(reports);
    result.report["results"]["smoothness"] = smoothness_to_json(alpha);
    result.report["results"]["certificate"] = certificate_to_json(cert);

    result.summary_line = "certify: " + cert.verdict +
                          (cert.reason.empty() ? "" : " (" + cert.reason + ")");
    result.report["summary"] = result.summary_line;
    return result;
}

JobResult cmd_split_test(const Json& config, std::uint64_t seed) {
    CommonInputs in = common_inputs(config);
    MatrixSymbol u = matrix_symbol_from(config, in.nu);
    KernelSymbol k = kernel_symbol_from(config, in.nu);

    const Json& split_cfg = require_field(config, "split", "config");
    int cutoff = int_or(split_cfg, "cutoff", 2);

    KernelSplit split;
    try {
        split = kernel_split(k, cutoff, in.grid);
    } catch (const std::invalid_argument& e) {
        fail(std::string("split: ") + e.what());
    }

    // reconstruction residue at seeded random pairs
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    double recon = 0.0;
    for (int trial = 0; trial < 64; ++trial) {
        Eigen::VectorXd x(in.nu), y(in.nu);
        for (int a = 0; a < in.nu; ++a) {
            x[a] = angle(rng);
            y[a] = angle(rng);
        }
        Eigen::MatrixXcd err = k.eval(x, y) - split.k1.eval(x, y) - split.k2.eval(x, y);
        recon = std::max(recon, err.cwiseAbs().maxCoeff());
    }

    JobResult result;
    result.report = report_skeleton("split-test", config, seed);
    result.report["results"]["split"] = {{"cutoff", split.cutoff},
                                         {"rank", split.rank},
                                         {"k1_symmetry_residue", split.k1_symmetry_residue},
                                         {"k2_symmetry_residue", split.k2_symmetry_residue},
                                         {"reconstruction_residue", recon}};

    if (split_cfg.contains("l2")) {
        const Json& l2 = split_cfg.at("l2");
        double z0 = require_field(l2, "z0", "split.l2").get<double>();
        std::vector<int> res =
            int_list(require_field(l2, "resolutions", "split.l2"), "split.l2.resolutions");
        WeightedL2Report rep = weighted_l2_diagnostic(u, z0, split.k1, res);
        result.report["results"]["weighted_l2"] = {{"z0", z0},
                                                   {"resolutions", rep.resolutions},
                                                   {"integral", rep.integral},
                                                   {"excluded_nodes", rep.excluded},
                                                   {"verdict", rep.verdict}};
    }

    int trials = int_or(split_cfg, "trials", 0);
    bool all_hold = true;
    if (trials > 0) {
        int pert_points = int_or(split_cfg, "points", 96);
        double amplitude = num_or(split_cfg, "amplitude", 0.5);
        int max_freq = int_or(split_cfg, "max_freq", 3);
        TorusGrid pert_grid = make_grid(in.nu, pert_points);
        BandSet bands = compute_bands(u, in.grid, in.refine_limit,
                                      num_or(in.tolerances, "band_endpoint", 1e-8));
        double margin = auto_margin(bands, in.tolerances);

        Json trials_json = Json::array();
        for (int t = 0; t < trials; ++t) {
            int rank = 1 + t % 3;
            std::mt19937_64 trial_rng(seed * 1000003ull + static_cast<std::uint64_t>(t));
            KernelSymbol pert =
                random_separable_kernel(in.nu, rank, max_freq, amplitude, trial_rng);
            RankPerturbationReport rep =
                rank_perturbation_experiment(u, k, pert, pert_grid, bands, margin);
            all_hold = all_hold && rep.bound_holds;
            trials_json.push_back({{"trial", t},
                                   {"rank", rep.rank},
                                   {"delta", rep.delta},
                                   {"max_abs_delta", rep.max_abs_delta},
                                   {"bound_holds", rep.bound_holds}});
        }
        result.report["results"]["rank_trials"] = trials_json;
        result.report["results"]["rank_bound_holds"] = all_hold;
    }

    result.summary_line = "split-test: rank " + std::to_string(split.rank) +
                          ", reconstruction residue " + format_double(recon) +
                          (trials > 0 ? (all_hold ? ", rank bound holds" : ", RANK BOUND VIOLATED")
                                      : "");
    result.report["summary"] = result.summary_line;
    return result;
}

JobResult cmd_example(const Json& config, std::uint64_t seed) {
    Json example_cfg = config.contains("example") ? config.at("example") : Json::object();
    int k_max = int_or(example_cfg, "k_max", 6);
    if (k_max < 1) fail("example.k_max must be >= 1");
    std::string convention_tag =
        example_cfg.contains("convention") ? example_cfg.at("convention").get<std::string>()
                                           : std::string("calibrated");
    int points = int_or(example_cfg, "points", 48);
    double match_tol = num_or(example_cfg, "match_tol", 1e-3);
    double margin = num_or(example_cfg, "margin", 1e-3);

    Convention convention;
    try {
        convention = parse_convention(convention_tag);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    ExampleModel model = build_example(k_max, convention);

    BandSet bands = compute_bands(model.u, make_grid(2, 32), 2);

    JobResult result;
    result.report = report_skeleton("example", config, seed);
    Json& results = result.report["results"];
    results["convention"] = convention_name(convention);
    results["beta"] = model.config.beta;
    results["kernel_scale"] = model.config.kernel_scale;
    results["c"] = model.config.c;
    results["c_cross_check_error"] = model.config.c_cross_check_error;
    results["band_set"] = band_set_to_json(bands);

    bool pass = true;
    std::string failure;

    std::vector<double> roots;
    try {
        roots = dispersion_roots(model.config);
        results["dispersion_roots"] = roots;
    } catch (const std::runtime_error& e) {
        results["dispersion_error"] = e.what();
        pass = false;
        failure = e.what();
    }

    std::vector<double> below;
    if (pass) {
        DiscretizedOperator op = assemble(model.u, model.k, make_grid(2, points));
        SpectralResult spectral = eig_outside(op, bands, margin);
        for (size_t i = 0; i < spectral.eigenvalues_outside.size(); ++i)
            if (spectral.gap_labels[i] == 0)
                below.push_back(spectral.eigenvalues_outside[i]);
        results["eigenvalues_below"] = below;

        if (below.size() != roots.size()) {
            pass = false;
            failure = "eigenvalue count " + std::to_string(below.size()) +
                      " does not match mode count " + std::to_string(roots.size());
        } else {
            double worst = 0.0;
            for (size_t i = 0; i < roots.size(); ++i)
                worst = std::max(worst, std::abs(roots[i] - below[i]));
            results["match_error"] = worst;
            if (worst > match_tol) {
                pass = false;
                failure = "root/eigenvalue mismatch " + format_double(worst);
            }
        }
    }

    if (pass) {
        AccumulationVerdict acc_roots = verify_accumulation(roots, bands);
        AccumulationVerdict acc_eigs = verify_accumulation(below, bands);
        results["accumulation_roots"] = {{"pass", acc_roots.pass},
                                         {"slope", acc_roots.slope},
                                         {"message", acc_roots.message}};
        results["accumulation_eigenvalues"] = {{"pass", acc_eigs.pass},
                                               {"slope", acc_eigs.slope},
                                               {"message", acc_eigs.message}};
        if (!acc_roots.pass || !acc_eigs.pass) {
            pass = false;
            failure = !acc_roots.pass ? acc_roots.message : acc_eigs.message;
        }
    }

    if (pass && convention == Convention::Calibrated) {
        double worst = 0.0;
        for (size_t i = 0; i < roots.size(); ++i) {
            double expected = -1.0 - std::exp(-static_cast<double>(i + 1));
            worst = std::max(worst, std::abs(roots[i] - expected));
        }
        results["calibrated_root_error"] = worst;
        if (worst > 1e-9) {
            pass = false;
            failure = "calibrated roots deviate by " + format_double(worst);
        }
    }

    // the extremal sets at both edges are circles; isolation must be rejected
    Json isolation = Json::array();
    for (double z : {-1.0, 1.0}) {
        ExtremalSetResult ess =
            find_extremal_set(phi_z(model.u, z), make_grid(2, 24), 1e-9, 2);
        isolation.push_back({{"z", z},
                             {"isolated", ess.isolated},
                             {"component_count", ess.final_components().size()},
                             {"max_diameter",
                              ess.final_components().empty()
                                  ? 0.0
                                  : ess.final_components().front().diameter}});
        if (ess.isolated) {
            pass = false;
            failure = "extremal set at z = " + format_double(z) +
                      " unexpectedly classified isolated";
        }
    }
    results["non_isolation"] = isolation;
    results["pass"] = pass;

    if (!roots.empty()) {
        std::ostringstream csv;
        csv << "k,dispersion_root,eigenvalue,log_gap_root,log_gap_eig\n";
        double edge = bands.bands.front().lo;
        for (size_t i = 0; i < roots.size(); ++i) {
            csv << (i + 1) << "," << format_double(roots[i]) << ",";
            if (i < below.size())
                csv << format_double(below[i]) << "," << format_double(std::log(edge - roots[i]))
                    << "," << format_double(std::log(edge - below[i]));
            else
                csv << ",," << format_double(std::log(edge - roots[i]));
            csv << "\n";
        }
        result.csv["accumulation.csv"] = csv.str();
    }

    result.summary_line =
        pass ? "example: PASS (" + convention_name(convention) + ", k_max " +
                   std::to_string(k_max) + ")"
             : "example: FAIL (" + failure + ")";
    result.report["summary"] = result.summary_line;
    return result;
}

} // namespace

Json parse_config_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        byte = std::min(byte, text.size());
        size_t line = 1, column = 1;
        for (size_t i = 0; i < byte; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what());
    }
}

Json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

JobResult execute(const std::string& command, const Json& config, std::uint64_t seed) {
    if (!config.is_object()) throw ConfigError("config root must be a JSON object");
    if (command == "validate") return cmd_validate(config, seed);
    if (command == "bands") return cmd_bands(config, seed);
    if (command == "eigs") return cmd_eigs(config, seed);
    if (command == "certify") return cmd_certify(config, seed);
    if (command == "split-test") return cmd_split_test(config, seed);
    if (command == "example") return cmd_example(config, seed);
    throw ConfigError("unknown command: " + command);
}

int run_command(const std::string& command, const Json& config, const std::string& out_dir,
                std::uint64_t seed, int threads) {
    if (threads > 0) Eigen::setNbThreads(threads);

    auto start = std::chrono::steady_clock::now();
    JobResult result = execute(command, config, seed);
    auto stop = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(stop - start).count();

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "report.json", std::ios::binary);
        out << result.report.dump(2) << "\n";
    }
    {
        Json timings = {{"command", command}, {"total_seconds", seconds}};
        std::ofstream out(std::filesystem::path(out_dir) / "timings.json", std::ios::binary);
        out << timings.dump(2) << "\n";
    }
    for (const auto& [name, content] : result.csv) {
        std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
        out << content;
    }

    std::cout << result.summary_line << "\n";
    return result.exit_code;
}

} // namespace fsw
