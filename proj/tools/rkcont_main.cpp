// rkcont: optimal analytic-continuation bounds from a JSON problem
// description. Subcommands: spectrum, bound, curve, maximizer, recover,
// verify. Exit codes: 0 success, 1 verification failure, 2 configuration or
// validation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rkcont/rkcont.hpp"

namespace {

using nlohmann::json;
using namespace rkcont;

// 17 significant digits: lossless double round-trip, C locale '.' separator.
std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

struct CommonOptions {
    std::string config_path;
    std::string output_path;  // empty -> stdout
    std::string format;       // empty -> subcommand default
    std::optional<double> eps_min;
    std::optional<double> eps_max;
    std::optional<std::uint64_t> eps_count;
    std::uint64_t seed = 0;
};

void attach_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Path to the JSON run configuration")
        ->required();
    cmd->add_option("--output", opts.output_path, "Output file (default: stdout)");
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--eps-min", opts.eps_min, "Override: smallest eps of a log range");
    cmd->add_option("--eps-max", opts.eps_max, "Override: largest eps of a log range");
    cmd->add_option("--eps-count", opts.eps_count, "Override: number of eps values");
    cmd->add_option("--seed", opts.seed, "Seed for the verification perturbation tests");
}

void apply_eps_override(RunConfig& cfg, const CommonOptions& opts) {
    const bool any = opts.eps_min || opts.eps_max || opts.eps_count;
    if (!any) return;
    if (!(opts.eps_min && opts.eps_max && opts.eps_count)) {
        throw ConfigError("epsilons", "--eps-min, --eps-max and --eps-count must be given together");
    }
    const double lo = *opts.eps_min;
    const double hi = *opts.eps_max;
    const std::size_t count = static_cast<std::size_t>(*opts.eps_count);
    if (!(lo > 0.0)) throw ConfigError("epsilons.min", "must be positive");
    if (!(hi >= lo)) throw ConfigError("epsilons.max", "must be >= epsilons.min");
    if (count == 0) throw ConfigError("epsilons.count", "must be positive");
    cfg.epsilons.clear();
    if (count == 1) {
        cfg.epsilons.push_back(lo);
    } else {
        const double step = std::log(hi / lo) / static_cast<double>(count - 1);
        for (std::size_t i = 0; i < count; ++i) {
            cfg.epsilons.push_back(lo * std::exp(step * static_cast<double>(i)));
        }
    }
}

void write_output(const CommonOptions& opts, const std::string& content) {
    if (opts.output_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(opts.output_path, std::ios::binary);
    if (!out) throw ConfigError("output", "cannot open '" + opts.output_path + "' for writing");
    out << content;
}

struct Workspace {
    RunConfig cfg;
    GramData gram;
    SpectralData sd;
};

Workspace make_workspace(const CommonOptions& opts) {
    Workspace ws;
    ws.cfg = load_config(opts.config_path);
    apply_eps_override(ws.cfg, opts);
    ws.gram = assemble_gram(ws.cfg.kernel, ws.cfg.points, ws.cfg.target);
    ws.sd = build_spectral_data(ws.gram, ws.cfg.tolerances);
    return ws;
}

std::string pick_format(const CommonOptions& opts, const std::string& fallback) {
    return opts.format.empty() ? fallback : opts.format;
}

// ---------------------------------------------------------------- spectrum

int run_spectrum(const CommonOptions& opts) {
    const Workspace ws = make_workspace(opts);
    if (pick_format(opts, "json") != "json") {
        throw ConfigError("format", "subcommand 'spectrum' supports json output only");
    }
    json out;
    out["lambdas"] = ws.sd.lambdas;
    out["energies"] = ws.sd.energies;
    out["a0"] = ws.sd.a0;
    out["pzz"] = ws.sd.pzz;
    out["beta_sq"] = ws.sd.beta_sq;
    out["phi_infinity"] = phi_infinity(ws.sd);
    out["regime"] = std::string(regime_name(ws.sd.regime));
    out["rank"] = ws.sd.rank();
    out["clusters_merged"] = ws.sd.clusters_merged;
    write_output(opts, out.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------ bound, curve

json bound_row(const BoundResult& b) {
    json row;
    row["eps"] = b.eps;
    row["eta"] = b.eta ? json(*b.eta) : json(nullptr);
    row["A"] = b.A;
    row["A0"] = b.A0;
    row["sigma"] = b.sigma;
    row["asymptotic"] = b.asymptotic;
    row["regime"] = std::string(regime_name(b.regime));
    row["upper_bound_only"] = b.upper_bound_only;
    return row;
}

std::string bound_csv(const std::vector<BoundResult>& rows) {
    std::string out = "eps,eta,A,A0,sigma,asymptotic,regime\n";
    for (const BoundResult& b : rows) {
        const double eta = b.eta ? *b.eta : std::nan("");
        out += format_double(b.eps) + "," + format_double(eta) + "," + format_double(b.A) + "," +
               format_double(b.A0) + "," + format_double(b.sigma) + "," +
               format_double(b.asymptotic) + "," + std::string(regime_name(b.regime)) + "\n";
    }
    return out;
}

int run_bound(const CommonOptions& opts, const std::string& default_format) {
    const Workspace ws = make_workspace(opts);
    std::vector<BoundResult> rows;
    rows.reserve(ws.cfg.epsilons.size());
    for (double eps : ws.cfg.epsilons) {
        rows.push_back(compute_bound(ws.sd, eps, ws.cfg.tolerances.root_residual));
    }
    if (pick_format(opts, default_format) == "csv") {
        write_output(opts, bound_csv(rows));
    } else {
        json out = json::array();
        for (const BoundResult& b : rows) out.push_back(bound_row(b));
        write_output(opts, out.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- maximizer

int run_maximizer(const CommonOptions& opts) {
    const Workspace ws = make_workspace(opts);
    if (!ws.cfg.grid) {
        throw ConfigError("grid", "subcommand 'maximizer' requires a grid in the configuration");
    }
    if (ws.sd.regime == Regime::CompleteStability || ws.sd.regime == Regime::Degenerate) {
        throw ConfigError("maximizer",
                          "no extremal function is available in the " +
                              std::string(regime_name(ws.sd.regime)) + " regime");
    }
    const double eps = ws.cfg.epsilons.front();
    MaximizerRep rep;
    if (ws.sd.regime == Regime::KernelRegime ||
        eps * eps >= phi_infinity(ws.sd) * (1.0 - 1e-10)) {
        rep = kernel_section_maximizer(ws.sd);
    } else {
        rep = build_maximizer(ws.sd, ws.gram, eps, ws.cfg.tolerances.root_residual);
    }

    const GridSpec& g = *ws.cfg.grid;
    auto coord = [](double lo, double hi, std::size_t count, std::size_t i) {
        if (count == 1) return lo;
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    };

    const bool csv = pick_format(opts, "csv") == "csv";
    std::string text = "re,im,abs,arg\n";
    json rows = json::array();
    for (std::size_t iy = 0; iy < g.ny; ++iy) {
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const Complex zeta{coord(g.re_min, g.re_max, g.nx, ix),
                               coord(g.im_min, g.im_max, g.ny, iy)};
            double mod = std::nan("");
            double arg = std::nan("");
            if (in_domain(ws.cfg.kernel, zeta)) {
                const Complex value = evaluate_maximizer(rep, ws.cfg.kernel, ws.cfg.points,
                                                         ws.cfg.target, zeta);
                mod = std::abs(value);
                arg = std::arg(value);
            }
            if (csv) {
                text += format_double(zeta.real()) + "," + format_double(zeta.imag()) + "," +
                        format_double(mod) + "," + format_double(arg) + "\n";
            } else {
                json row;
                row["re"] = zeta.real();
                row["im"] = zeta.imag();
                row["abs"] = mod;
                row["arg"] = arg;
                rows.push_back(row);
            }
        }
    }
    write_output(opts, csv ? text : rows.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------ recover

int run_recover(const CommonOptions& opts) {
    const Workspace ws = make_workspace(opts);
    if (pick_format(opts, "json") != "json") {
        throw ConfigError("format", "subcommand 'recover' supports json output only");
    }
    const double eps = ws.cfg.epsilons.front();
    const RecoveryResult rec =
        optimal_coefficients(ws.sd, ws.gram, eps, ws.cfg.tolerances.root_residual);
    const BoundResult b = compute_bound(ws.sd, eps, ws.cfg.tolerances.root_residual);

    json out;
    json coeffs = json::array();
    for (Eigen::Index j = 0; j < rec.c.size(); ++j) coeffs.push_back(complex_to_json(rec.c(j)));
    out["c"] = coeffs;
    out["E"] = rec.E;
    out["eps"] = eps;
    out["equals_A"] = std::abs(rec.E - b.A) <= 1e-9 * std::max(b.A, 1e-300);
    out["upper_bound_only"] = rec.upper_bound_only;
    write_output(opts, out.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------- verify

int run_verify(const CommonOptions& opts) {
    const Workspace ws = make_workspace(opts);
    if (pick_format(opts, "json") != "json") {
        throw ConfigError("format", "subcommand 'verify' supports json output only");
    }
    const VerifyOptions& vo = ws.cfg.verify;
    std::mt19937_64 rng(opts.seed);
    bool all_pass = true;

    json out;
    out["seed"] = opts.seed;
    out["regime"] = std::string(regime_name(ws.sd.regime));

    const bool stable = ws.sd.regime == Regime::CompleteStability;
    const double scale = std::sqrt(ws.sd.pzz);
    const double lambda_scale = ws.sd.rank() > 0 ? ws.sd.eig_values(0) : 1.0;

    // Sandwich per eps: grid-based bounds that never consult the eta solver.
    json sandwich = json::array();
    if (!stable) {
        auto mu_grid = log_grid(1e-4 * scale, 1e4 * scale, vo.dual_grid);
        auto nu_grid = mu_grid;
        nu_grid.insert(nu_grid.begin(), 0.0);
        const auto eta_grid = log_grid(1e-6 * lambda_scale, 1e6 * lambda_scale, vo.primal_grid);
        for (double eps : ws.cfg.epsilons) {
            const BoundResult b = compute_bound(ws.sd, eps, ws.cfg.tolerances.root_residual);
            const double upper = dual_upper_bound(ws.sd, eps, mu_grid, nu_grid);
            const double lower = primal_lower_bound(ws.sd, ws.gram, eps, eta_grid);
            SandwichReport rep = make_sandwich(lower, upper, b.A);
            const double gap_rel = rep.gap / std::max(b.A, 1e-300);
            const bool pass = rep.pass && gap_rel <= vo.max_gap_rel;
            all_pass = all_pass && pass;
            json row;
            row["eps"] = eps;
            row["lower"] = rep.lower;
            row["upper"] = rep.upper;
            row["A"] = rep.A;
            row["gap"] = rep.gap;
            row["gap_rel"] = gap_rel;
            row["pass"] = pass;
            sandwich.push_back(row);
        }
    }
    out["sandwich"] = sandwich;
    out["sandwich_skipped"] = stable;

    // Asymptotic order of the first-order expansion, on a halving sequence
    // clamped into the solvable range.
    if (!stable) {
        double eps0 = 1e-2;
        if (ws.sd.regime == Regime::Generic) {
            eps0 = std::min(eps0, 0.3 * std::sqrt(phi_infinity(ws.sd)));
        }
        std::vector<double> seq;
        for (int k = 0; k < 5; ++k) seq.push_back(eps0 / std::pow(2.0, k));
        const AsymptoticReport rep =
            asymptotic_order_check(ws.sd, seq, ws.cfg.tolerances.root_residual);
        all_pass = all_pass && rep.pass;
        json asym;
        asym["eps"] = rep.eps;
        asym["remainder"] = rep.remainder;
        asym["ratio"] = rep.ratio;
        asym["A0"] = rep.A0;
        asym["sigma"] = rep.sigma;
        asym["pass"] = rep.pass;
        out["asymptotic"] = asym;
        out["asymptotic_skipped"] = false;
    } else {
        out["asymptotic"] = nullptr;
        out["asymptotic_skipped"] = true;
    }

    // Recovery optimality under random coefficient perturbations.
    json recovery = json::array();
    if (!stable) {
        for (double eps : ws.cfg.epsilons) {
            const RecoveryResult rec =
                optimal_coefficients(ws.sd, ws.gram, eps, ws.cfg.tolerances.root_residual);
            const BoundResult b = compute_bound(ws.sd, eps, ws.cfg.tolerances.root_residual);
            const double base = worst_case_error(ws.gram, rec.c, eps);
            bool never_better = true;
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (std::size_t k = 0; k < vo.perturbations; ++k) {
                Eigen::VectorXcd delta(rec.c.size());
                for (Eigen::Index i = 0; i < delta.size(); ++i) {
                    delta(i) = Complex{gauss(rng), gauss(rng)};
                }
                delta *= vo.perturbation_scale / delta.norm();
                if (worst_case_error(ws.gram, rec.c + delta, eps) < base - 1e-12) {
                    never_better = false;
                }
            }
            const bool equals_a = std::abs(rec.E - b.A) <= 1e-9 * std::max(b.A, 1e-300);
            const bool pass = never_better && equals_a;
            all_pass = all_pass && pass;
            json row;
            row["eps"] = eps;
            row["E"] = rec.E;
            row["A"] = b.A;
            row["equals_A"] = equals_a;
            row["perturbations_pass"] = never_better;
            row["pass"] = pass;
            recovery.push_back(row);
        }
    }
    out["recovery"] = recovery;
    out["recovery_skipped"] = stable;

    out["pass"] = all_pass;
    write_output(opts, out.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal analytic continuation bounds in reproducing kernel Hilbert spaces"};
    app.require_subcommand(1);

    CommonOptions opts;
    CLI::App* spectrum = app.add_subcommand("spectrum", "Spectral data of the instance");
    CLI::App* bound = app.add_subcommand("bound", "A_z(eps) and its expansion per eps");
    CLI::App* curve = app.add_subcommand("curve", "Same as bound, CSV over the eps range");
    CLI::App* maximizer = app.add_subcommand("maximizer", "Extremal function on a grid");
    CLI::App* recover = app.add_subcommand("recover", "Optimal linear recovery coefficients");
    CLI::App* verify = app.add_subcommand("verify", "Independent sandwich and order checks");
    for (CLI::App* cmd : {spectrum, bound, curve, maximizer, recover, verify}) {
        attach_common(cmd, opts);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (spectrum->parsed()) return run_spectrum(opts);
        if (bound->parsed()) return run_bound(opts, "json");
        if (curve->parsed()) return run_bound(opts, "csv");
        if (maximizer->parsed()) return run_maximizer(opts);
        if (recover->parsed()) return run_recover(opts);
        if (verify->parsed()) return run_verify(opts);
    } catch (const rkcont::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 2;
}
