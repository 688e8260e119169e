#include "ptbox/cli.hpp"

#include "ptbox/em_scattering.hpp"
#include "ptbox/error.hpp"
#include "ptbox/inner_products.hpp"
#include "ptbox/io.hpp"
#include "ptbox/kernel_maps.hpp"
#include "ptbox/lineshape.hpp"
#include "ptbox/spectrum.hpp"
#include "ptbox/variational.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace ptbox::cli {

namespace {

using io::json;

// Failure carrying the exit code and the name of the operation that failed.
struct Failure {
    int code;
    std::string message;
};

[[noreturn]] void config_error(const std::string& msg) { throw Failure{kExitConfig, msg}; }

// Runs a module operation, tagging failures with its name.
template <class F>
auto step(const char* op, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Failure{kExitNumeric, std::string(op) + ": " + e.what()};
    } catch (const std::invalid_argument& e) {
        throw Failure{kExitConfig, std::string(op) + ": " + e.what()};
    }
}

int default_jobs() {
    if (const char* env = std::getenv("PTBOX_JOBS")) {
        try {
            const int j = std::stoi(env);
            if (j >= 1) return j;
        } catch (const std::exception&) {
        }
        config_error(std::string("PTBOX_JOBS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Appends flags from a flat JSON config for every key not given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return args;
    std::ifstream f(*path);
    if (!f) config_error("config: cannot open '" + *path + "'");
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::parse_error& e) {
        config_error("config: '" + *path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) config_error("config: top level must be an object");
    if (cfg.contains("command")) {
        if (!cfg["command"].is_string()) config_error("config: 'command' must be a string");
        if (args.empty() || args.front().rfind("-", 0) == 0) args.insert(args.begin(), cfg["command"].get<std::string>());
    }
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (it.key() == "command" || it.key() == "config") continue;
        std::string flag = "--" + it.key();
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        if (has_flag(args, flag)) continue;
        const json& v = it.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back(flag);
        } else if (v.is_number_float()) {
            args.push_back(flag);
            args.push_back(io::format_number(v.get<double>()));
        } else if (v.is_number()) {
            args.push_back(flag);
            args.push_back(v.dump());
        } else if (v.is_string()) {
            args.push_back(flag);
            args.push_back(v.get<std::string>());
        } else {
            config_error("config: value of '" + it.key() + "' must be a scalar");
        }
    }
    return args;
}

std::string path_in(const std::string& dir, const char* name) { return (std::filesystem::path(dir) / name).string(); }

void write(const std::string& path, const std::string& text) {
    try {
        io::write_file(path, text);
    } catch (const std::runtime_error& e) {
        throw Failure{kExitConfig, std::string("output: ") + e.what()};
    }
}

std::vector<double> parse_list(const std::string& text, std::size_t count, const char* name) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            config_error(std::string(name) + ": '" + item + "' is not a number");
        }
    }
    if (v.size() != count) {
        std::ostringstream os;
        os << name << ": expected " << count << " comma-separated numbers";
        config_error(os.str());
    }
    return v;
}

struct BoxOpts {
    std::optional<double> length;
    double ell1 = 0.0;
    double ell2 = 0.0;
};

void add_box(CLI::App* cmd, BoxOpts& b) {
    cmd->add_option("--L", b.length, "box length");
    cmd->add_option("--ell1", b.ell1, "boundary parameter ell1");
    cmd->add_option("--ell2", b.ell2, "boundary parameter ell2");
}

BoxConfig make_box(const BoxOpts& b) {
    if (!b.length) config_error("missing required parameter L");
    BoxConfig c{*b.length, {b.ell1, b.ell2}};
    step("validate box", [&] { validate(c); });
    return c;
}

json box_json(const BoxConfig& c) {
    return {{"L", c.length}, {"ell1", c.boundary.ell1}, {"ell2", c.boundary.ell2}};
}

// ---- spectrum ----

struct SpectrumOpts {
    BoxOpts box;
    int n = 5;
    std::string region;
    int profile_points = 201;
};

void cmd_spectrum(const SpectrumOpts& o, const std::string& dir, std::ostream& out) {
    const BoxConfig config = make_box(o.box);
    if (o.n < 1) config_error("n must be >= 1");
    if (o.profile_points < 2) config_error("profile-points must be >= 2");
    Spectrum sp;
    json extra;
    if (!o.region.empty()) {
        const auto r = parse_list(o.region, 4, "complex-region");
        const roots::Rect rect{r[0], r[1], r[2], r[3]};
        const ComplexRootReport rep = step("solve_complex_roots", [&] { return solve_complex_roots(config, rect); });
        sp = step("spectrum_from_roots", [&] { return spectrum_from_roots(config, rep.roots); });
        sp.broken = rep.broken;
        if (!rep.broken) {
            try {
                sp = normalize_biorthogonal(sp);
            } catch (const Error&) {
                // Left unnormalized, e.g. at a catastrophe point.
            }
        }
        extra["pairs"] = json::array();
        for (const auto& p : rep.pairs)
            extra["pairs"].push_back({{"k_re", p.k.real()},
                                      {"k_im", p.k.imag()},
                                      {"partner_re", p.partner.real()},
                                      {"partner_im", p.partner.imag()},
                                      {"partner_residual", p.partner_residual}});
    } else {
        sp = step("solve_real_spectrum", [&] { return solve_real_spectrum(config, o.n); });
    }
    json j = io::to_json(sp);
    if (!extra.is_null()) j["pairs"] = extra["pairs"];
    write(path_in(dir, "spectrum.json"), io::dump(j));

    std::vector<Mode> shown;
    for (const auto& m : sp.modes)
        if (static_cast<int>(shown.size()) < o.n) shown.push_back(m);
    std::vector<double> grid(o.profile_points);
    for (int i = 0; i < o.profile_points; ++i) grid[i] = config.length * i / (o.profile_points - 1);
    std::ostringstream csv;
    step("eigenfunction_eval", [&] { io::write_profile_csv(csv, shown, grid); });
    write(path_in(dir, "profile.csv"), csv.str());

    out << "spectrum: " << sp.modes.size() << " modes, " << sp.unidirectional.size() << " unidirectional, broken "
        << (sp.broken ? "true" : "false") << '\n';
}

// ---- inner ----

struct InnerOpts {
    BoxOpts box;
    int gram = 8;
    int terms = 24;
};

double deviation_from_identity(const Eigen::MatrixXcd& g) {
    return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

void cmd_inner(const InnerOpts& o, const std::string& dir, std::ostream& out) {
    const BoxConfig config = make_box(o.box);
    if (o.gram < 1) config_error("gram must be >= 1");
    if (o.terms < o.gram) config_error("terms must be >= gram");
    const Spectrum sp = step("solve_real_spectrum", [&] { return solve_real_spectrum(config, o.terms); });
    const auto bi = step("gram_matrix", [&] { return gram_matrix(sp, o.gram, inner::GramKind::biorthogonal); });
    const auto pt = step("gram_matrix", [&] { return gram_matrix(sp, o.gram, inner::GramKind::pt); });
    const auto cpt = step("gram_matrix", [&] { return gram_matrix(sp, o.gram, inner::GramKind::cpt, o.terms); });
    for (auto [name, g] : {std::pair{"gram_biorthogonal.csv", &bi}, {"gram_pt.csv", &pt}, {"gram_cpt.csv", &cpt}}) {
        std::ostringstream csv;
        io::write_gram_csv(csv, *g);
        write(path_in(dir, name), csv.str());
    }
    json j;
    j["config"] = box_json(config);
    j["size"] = o.gram;
    j["terms"] = o.terms;
    j["max_dev_biorthogonal"] = deviation_from_identity(bi);
    j["max_dev_cpt"] = deviation_from_identity(cpt);
    j["pt_diagonal"] = json::array();
    for (Eigen::Index i = 0; i < pt.rows(); ++i) j["pt_diagonal"].push_back(pt(i, i).real());
    if (config.boundary.ell1 == 0.0)
        j["catastrophe_levels"] = step("catastrophe_levels", [&] { return inner::catastrophe_levels(config, o.gram); });
    write(path_in(dir, "inner.json"), io::dump(j));
    out << "inner: CPT Gram max deviation " << io::format_number(deviation_from_identity(cpt))
        << ", biorthogonal Gram max deviation " << io::format_number(deviation_from_identity(bi)) << '\n';
}

// ---- variational ----

struct VariationalOpts {
    int n = 2;
    std::uint64_t seed = 0;
    double b_scale = 0.1;
    int starts = 0;
};

void cmd_variational(const VariationalOpts& o, const std::string& dir, std::ostream& out) {
    if (o.n < 1) config_error("n must be >= 1");
    if (o.starts < 0) config_error("starts must be >= 0");
    const auto h = step("random_pt_hamiltonian", [&] { return variational::random_pt_hamiltonian(o.n, o.b_scale, o.seed); });
    variational::ExtremizeOptions opt;
    opt.seed = o.seed;
    opt.starts = o.starts;
    std::vector<variational::ExtremizationReport> reports;
    for (int cls : {1, -1, 0}) reports.push_back(step("extremize", [&] { return variational::extremize(h, cls, opt); }));

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.matrix());
    std::vector<cd> dense(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(dense.begin(), dense.end(), [](cd a, cd b) { return a.real() < b.real(); });
    std::vector<double> found;
    for (const auto& r : reports)
        for (const auto& s : r.results) found.push_back(s.lambda);
    std::sort(found.begin(), found.end());

    json j;
    j["n"] = o.n;
    j["seed"] = o.seed;
    j["b_scale"] = o.b_scale;
    j["dense_eigenvalues"] = json::array();
    for (cd v : dense) j["dense_eigenvalues"].push_back({{"re", v.real()}, {"im", v.imag()}});
    json classes = io::to_json(reports);
    const int cls_order[] = {1, -1, 0};
    for (std::size_t i = 0; i < classes.size(); ++i) classes[i]["constraint_class"] = cls_order[i];
    j["classes"] = classes;
    j["stationary_lambdas"] = found;
    write(path_in(dir, "variational.json"), io::dump(j));

    out << "variational: lambda";
    for (double v : found) out << ' ' << io::format_number(v);
    out << '\n';
}

// ---- scatter ----

struct ScatterOpts {
    double rho = 1.0, mu = 0.0, theta = 0.0, phi = 0.0;
    std::optional<double> n_re;
    double n_im = 0.0, mu_r = 1.0, thickness = 0.0;
    double delta = 1.0;
    std::optional<double> k_min, k_max;
    std::optional<int> steps;
    std::string window;
    bool no_fit = false;
};

void cmd_scatter(const ScatterOpts& o, int jobs, const std::string& dir, std::ostream& out) {
    if (!o.k_min || !o.k_max || !o.steps) config_error("scatter needs k-min, k-max and steps");
    if (*o.steps < 2 || !(*o.k_max > *o.k_min)) config_error("empty k grid: need steps >= 2 and k-max > k-min");
    const auto grid = step("linear_grid", [&] { return em::linear_grid(*o.k_min, *o.k_max, *o.steps); });
    const em::DoubleBarrier db{{o.rho, o.mu, o.theta, o.phi}, o.delta};
    std::vector<em::SweepRow> rows;
    if (o.n_re) {
        if (!(o.thickness > 0.0)) config_error("physical slab needs thickness > 0");
        const em::MediumParams medium{{*o.n_re, o.n_im}, {o.mu_r, 0.0}};
        const double delta = o.delta, thickness = o.thickness;
        em::TransferBuilder builder = [medium, delta, thickness](double k) {
            return em::double_barrier_transfer(em::physical_slab_transfer(medium, thickness, k), delta, k);
        };
        rows = step("transmission_sweep", [&] { return em::transmission_sweep(builder, grid, jobs); });
    } else {
        rows = step("transmission_sweep", [&] { return em::transmission_sweep(db, grid, jobs); });
    }
    std::ostringstream csv;
    io::write_sweep_csv(csv, rows);
    write(path_in(dir, "sweep.csv"), csv.str());
    const auto poles = std::count_if(rows.begin(), rows.end(), [](const em::SweepRow& r) { return r.pole; });
    if (o.no_fit) {
        out << "scatter: " << rows.size() << " points, poles " << poles << '\n';
        return;
    }

    std::array<double, 2> win{};
    if (!o.window.empty()) {
        const auto w = parse_list(o.window, 2, "fit-window");
        win = {w[0], w[1]};
    } else {
        win = step("peak_window", [&] { return em::peak_window(rows); });
    }
    const em::ResonanceFit fit = step("fit_lineshape", [&] {
        return em::fit_lineshape(rows, win[0], win[1], o.n_re ? nullptr : &db);
    });
    json j = io::to_json(fit);
    j["window"] = {win[0], win[1]};
    j["poles"] = poles;
    if (!o.n_re && fit.parity) {
        for (auto [key, fn] : {std::pair{"predicted", &em::resonance_predict}, {"linearized", &em::resonance_linearized}}) {
            try {
                j[key] = io::to_json(fn(db.slab, db.delta, *fit.parity, fit.k_c));
            } catch (const Error& e) {
                j[key] = {{"error", e.what()}};
            }
        }
    }
    write(path_in(dir, "fit.json"), io::dump(j));
    out << "scatter: k_c=" << io::format_number(fit.k_c) << " Q=" << io::format_number(fit.Q)
        << " Z=" << io::format_number(fit.Z) << " Delta=" << io::format_number(fit.Delta)
        << " Q2=" << io::format_number(fit.Q2) << " poles=" << poles << '\n';
}

// ---- kernel ----

struct KernelOpts {
    double length = 1.0;
    double ell2 = 0.1;
    int terms = kernel::kDefaultTerms;
    int grid = 0;
    std::string method = "split";
    bool witness = false;
};

void cmd_kernel(const KernelOpts& o, int jobs, const std::string& dir, std::ostream& out) {
    if (o.terms < 1) config_error("N must be >= 1");
    if (o.grid < 0) config_error("grid must be >= 0");
    if (o.method != "split" && o.method != "direct") config_error("method must be 'split' or 'direct'");
    const kernel::Method method = o.method == "split" ? kernel::Method::split : kernel::Method::direct_sum;
    json j;
    j["L"] = o.length;
    j["ell2"] = o.ell2;
    j["N"] = o.terms;
    j["k2_bound"] = step("k2_bound", [&] { return kernel::k2_bound(o.length, o.ell2, o.terms); });
    if (o.witness) {
        const auto rep = step("nonlocality_report", [&] { return kernel::nonlocality_report(o.length, o.ell2); });
        j["witness"] = {{"found", rep.found},      {"x", rep.x},
                        {"x_prime", rep.xp},       {"K1_re", rep.k1.real()},
                        {"K1_im", rep.k1.imag()},  {"margin", rep.margin},
                        {"lower_bound", rep.lower_bound}};
        out << "kernel: witness " << (rep.found ? "found" : "not found") << " x=" << io::format_number(rep.x)
            << " x'=" << io::format_number(rep.xp) << " |K1|/bound=" << io::format_number(rep.margin) << '\n';
    }
    if (o.grid > 0) {
        std::vector<double> pts(o.grid);
        for (int i = 0; i < o.grid; ++i) pts[i] = o.length * (i + 0.5) / o.grid;
        const auto rows =
            step("kernel_grid", [&] { return kernel::kernel_grid(o.length, o.ell2, pts, o.terms, method, jobs); });
        std::ostringstream csv;
        io::write_kernel_csv(csv, rows);
        write(path_in(dir, "kernel.csv"), csv.str());
        out << "kernel: " << rows.size() << " grid values\n";
    }
    write(path_in(dir, "kernel.json"), io::dump(j));
    if (!o.witness && o.grid == 0) out << "kernel: K2 bound " << io::format_number(j["k2_bound"].get<double>()) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boundary-condition, spectrum, scattering and kernel computations for PT-symmetric boxes", "ptbox"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    std::optional<int> jobs_opt;

    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat JSON file of option values");
        cmd->add_option("--out-dir", out_dir, "directory for output files");
        cmd->add_option("--jobs", jobs_opt, "worker threads (default: PTBOX_JOBS or 1)");
    };

    SpectrumOpts so;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and mode profiles of the box");
    add_box(spectrum, so.box);
    spectrum->add_option("--n", so.n, "number of ladder modes");
    spectrum->add_option("--complex-region", so.region, "re_min,re_max,im_min,im_max for a complex root search");
    spectrum->add_option("--profile-points", so.profile_points, "samples in the profile CSV");
    common(spectrum);

    InnerOpts io_opts;
    auto* inner_cmd = app.add_subcommand("inner", "Gram matrices of the biorthogonal, PT and CPT inner products");
    add_box(inner_cmd, io_opts.box);
    inner_cmd->add_option("--gram", io_opts.gram, "Gram matrix size");
    inner_cmd->add_option("--terms", io_opts.terms, "modes in the C kernel");
    common(inner_cmd);

    VariationalOpts vo;
    auto* var_cmd = app.add_subcommand("variational", "stationary points of the PT functional for a random h");
    var_cmd->add_option("--n", vo.n, "half dimension of h");
    var_cmd->add_option("--seed", vo.seed, "random seed");
    var_cmd->add_option("--b-scale", vo.b_scale, "scale of the off-diagonal block");
    var_cmd->add_option("--starts", vo.starts, "Newton starts per class (0: 20 x dimension)");
    common(var_cmd);

    ScatterOpts sc;
    auto* scatter = app.add_subcommand("scatter", "double-barrier sweep and lineshape fit");
    scatter->add_option("--rho", sc.rho);
    scatter->add_option("--mu", sc.mu);
    scatter->add_option("--theta", sc.theta);
    scatter->add_option("--phi", sc.phi);
    scatter->add_option("--n-re", sc.n_re, "refractive index (selects a physical slab)");
    scatter->add_option("--n-im", sc.n_im);
    scatter->add_option("--mu-r", sc.mu_r);
    scatter->add_option("--thickness", sc.thickness);
    scatter->add_option("--delta", sc.delta, "separation of the two barriers");
    scatter->add_option("--k-min", sc.k_min);
    scatter->add_option("--k-max", sc.k_max);
    scatter->add_option("--steps", sc.steps);
    scatter->add_option("--fit-window", sc.window, "k_lo,k_hi (default: around the highest peak)");
    scatter->add_flag("--no-fit", sc.no_fit);
    common(scatter);

    KernelOpts ko;
    auto* kernel_cmd = app.add_subcommand("kernel", "similarity kernel to the hard-wall box");
    kernel_cmd->add_option("--L", ko.length);
    kernel_cmd->add_option("--ell2", ko.ell2);
    kernel_cmd->add_option("--N", ko.terms, "truncation");
    kernel_cmd->add_option("--grid", ko.grid, "grid points per axis for kernel.csv");
    kernel_cmd->add_option("--method", ko.method, "split or direct");
    kernel_cmd->add_flag("--witness", ko.witness, "search for a non-locality witness");
    common(kernel_cmd);

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            err << "config: " << e.what() << '\n';
            return kExitConfig;
        }
        const int jobs = jobs_opt ? *jobs_opt : default_jobs();
        if (jobs < 1) config_error("jobs must be >= 1");
        if (!std::filesystem::is_directory(out_dir)) config_error("out-dir '" + out_dir + "' is not a directory");

        if (spectrum->parsed())
            cmd_spectrum(so, out_dir, out);
        else if (inner_cmd->parsed())
            cmd_inner(io_opts, out_dir, out);
        else if (var_cmd->parsed())
            cmd_variational(vo, out_dir, out);
        else if (scatter->parsed())
            cmd_scatter(sc, jobs, out_dir, out);
        else
            cmd_kernel(ko, jobs, out_dir, out);
    } catch (const Failure& f) {
        err << "error: " << f.message << '\n';
        return f.code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

int main_entry(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace ptbox::cli
