// Command-line harness for the conformal-energy library: energies by both
// methods, cross-ratio distortion scans and bounds, variational probes,
// deformation curves, the lambda/square studies and the acceptance suite.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conf/acceptance.hpp"
#include "conf/circle_map.hpp"
#include "conf/cross_ratio.hpp"
#include "conf/disk_extension.hpp"
#include "conf/energy.hpp"
#include "conf/map_parser.hpp"
#include "conf/variational.hpp"

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr double pi = conf::two_pi / 2.0;

// exit codes
constexpr int kOk = 0;
constexpr int kAssertionFailure = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Report {
    json config;
    json results;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_csv(const Report& r, std::ostream& out) {
    for (const auto& [key, value] : r.config.items())
        out << "# config " << key << "=" << value.dump() << "\n";
    for (const auto& [key, value] : r.results.items())
        out << "# result " << key << "=" << value.dump() << "\n";
    if (!r.columns.empty()) {
        for (std::size_t i = 0; i < r.columns.size(); ++i)
            out << (i ? "," : "") << r.columns[i];
        out << "\n";
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
            out << "\n";
        }
    }
}

void emit(const Report& r, const std::string& path, const std::string& format) {
    std::ostringstream body;
    if (format == "json") {
        json doc;
        doc["config"] = r.config;
        doc["results"] = r.results;
        if (!r.columns.empty()) {
            doc["table"]["columns"] = r.columns;
            doc["table"]["rows"] = r.rows;
        }
        body << doc.dump(2) << "\n";
    } else {
        write_csv(r, body);
    }
    if (path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
        f << body.str();
    }
}

struct CommonOpts {
    std::string map_expr;
    std::size_t n = 256;
    std::string scheme = "subtracted";
    std::size_t refine = 1;
    std::string out;
    std::string format = "json";
};

void add_output_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out, "output file (stdout when omitted)");
    cmd->add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

void add_quad_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--n", o.n, "quadrature nodes per axis")->capture_default_str();
    cmd->add_option("--scheme", o.scheme, "double-integral scheme")
        ->check(CLI::IsMember({"subtracted", "staggered"}))
        ->capture_default_str();
    cmd->add_option("--refine", o.refine, "doubling levels for the error estimate")
        ->capture_default_str();
}

conf::QuadratureSpec quad_spec(const CommonOpts& o) {
    conf::QuadratureSpec q;
    q.n = o.n;
    q.scheme = o.scheme == "staggered" ? conf::QuadScheme::midpoint_excluded
                                       : conf::QuadScheme::midpoint_subtracted;
    q.refine = o.refine;
    return q;
}

json quad_config(const CommonOpts& o) {
    return {{"n", o.n}, {"scheme", o.scheme}, {"refine", o.refine}};
}

json base_config(const std::string& sub, const CommonOpts& o) {
    json c;
    c["subcommand"] = sub;
    c["version"] = kVersion;
    c["format"] = o.format;
    if (!o.map_expr.empty()) c["map"] = o.map_expr;
    return c;
}

json energy_json(const conf::EnergyEstimate& e) {
    return {{"value", e.value}, {"err", e.err}, {"n_used", e.n_used}, {"method", e.method}};
}

conf::DistortionGauge parse_gauge(const std::string& s) {
    if (s == "identity") return conf::DistortionGauge::identity();
    if (s.rfind("linear:alpha=", 0) == 0)
        return conf::DistortionGauge::linear(std::stod(s.substr(13)));
    if (s.rfind("table:", 0) == 0) {
        std::ifstream in(s.substr(6));
        if (!in) throw CLI::ValidationError("--eta", "cannot open gauge table '" + s.substr(6) + "'");
        std::vector<std::pair<double, double>> pairs;
        double t = 0.0, eta = 0.0;
        char comma = 0;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream row(line);
            if (row >> t >> comma >> eta && comma == ',') pairs.emplace_back(t, eta);
        }
        return conf::DistortionGauge::tabulated(std::move(pairs));
    }
    throw CLI::ValidationError("--eta", "expected identity, linear:alpha=<x> or table:<path>");
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError(what, "'" + item + "' is not a number");
        }
    }
    if (out.empty()) throw CLI::ValidationError(what, "empty list");
    return out;
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(x.size());
    ym /= static_cast<double>(x.size());
    double nu = 0.0, de = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        nu += (x[i] - xm) * (y[i] - ym);
        de += (x[i] - xm) * (x[i] - xm);
    }
    return nu / de;
}

json scan_results(const conf::EnvelopeReport& scan) {
    return {{"alpha_hat", scan.alpha_hat},
            {"n_samples", scan.n_samples},
            {"seed", scan.seed},
            {"max_cr_out", scan.max_cr_out},
            {"min_cr_in", scan.min_cr_in}};
}

void scan_table(const conf::EnvelopeReport& scan, Report& r) {
    r.columns = {"t", "eta_hat", "support", "interpolated"};
    for (const auto& b : scan.bins)
        r.rows.push_back({b.t, b.eta_hat, static_cast<double>(b.support),
                          b.interpolated ? 1.0 : 0.0});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal energy of circle homeomorphisms"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOpts o;
    std::string eta_expr = "identity";
    std::string phi_expr = "1";
    std::string lambdas_expr = "1e-1,3e-2,1e-2,3e-3,1e-3";
    double y_value = 0.0;
    std::size_t grid = 32;
    std::size_t truncation = 512;
    std::size_t modes = 8, max_steps = 100;
    std::size_t nr = 256, nphi = 512, curve_points = 32;
    bool gauss_radial = false, direct_boundary = false, compare_energy = false;
    std::size_t quadruples = 2000;
    std::uint64_t seed = 1;
    std::string coeffs_out;

    auto* c_energy = app.add_subcommand("energy", "double-integral conformal energy");
    c_energy->add_option("--map", o.map_expr, "map expression")->required();
    add_quad_opts(c_energy, o);
    add_output_opts(c_energy, o);

    auto* c_oracle = app.add_subcommand("oracle", "staggered-rule energy cross-check");
    c_oracle->add_option("--map", o.map_expr)->required();
    c_oracle->add_option("--n", o.n)->capture_default_str();
    add_output_opts(c_oracle, o);

    auto* c_bound = app.add_subcommand("bound", "quasi-Moebius energy bound of a gauge");
    c_bound->add_option("--eta", eta_expr, "identity | linear:alpha=<x> | table:<path>")
        ->capture_default_str();
    add_output_opts(c_bound, o);

    auto* c_scan = app.add_subcommand("scan", "cross-ratio distortion envelope");
    c_scan->add_option("--map", o.map_expr)->required();
    c_scan->add_option("--quadruples", quadruples)->capture_default_str();
    c_scan->add_option("--seed", seed)->capture_default_str();
    c_scan->add_flag("--compare", compare_energy, "also compare the bound against the energy");
    add_quad_opts(c_scan, o);
    add_output_opts(c_scan, o);

    auto* c_residual = app.add_subcommand("residual", "critical-point residual");
    c_residual->add_option("--map", o.map_expr)->required();
    auto* y_opt = c_residual->add_option("--y", y_value, "single evaluation point");
    c_residual->add_option("--grid", grid, "profile over this many uniform y points")
        ->capture_default_str();
    add_quad_opts(c_residual, o);
    add_output_opts(c_residual, o);

    auto* c_variation = app.add_subcommand("variation", "first variation along sin-series phi");
    c_variation->add_option("--map", o.map_expr)->required();
    c_variation->add_option("--phi", phi_expr, "comma-separated sine coefficients")
        ->capture_default_str();
    add_quad_opts(c_variation, o);
    add_output_opts(c_variation, o);

    auto* c_descend = app.add_subcommand("descend", "gradient descent on sine modes");
    c_descend->add_option("--map", o.map_expr)->required();
    c_descend->add_option("--modes", modes)->capture_default_str();
    c_descend->add_option("--max-steps", max_steps)->capture_default_str();
    add_quad_opts(c_descend, o);
    add_output_opts(c_descend, o);

    auto* c_douglas = app.add_subcommand("douglas", "harmonic-extension (Douglas) energy");
    c_douglas->add_option("--map", o.map_expr)->required();
    c_douglas->add_option("-M,--truncation", truncation)->capture_default_str();
    c_douglas->add_flag("--direct", direct_boundary,
                        "use the map's own boundary instead of its inverse");
    c_douglas->add_option("--coeffs-out", coeffs_out, "write boundary coefficients CSV here");
    add_output_opts(c_douglas, o);

    auto* c_curve = app.add_subcommand("deform-curve", "deformation bound curve B(t)");
    c_curve->add_option("--map", o.map_expr)->required();
    c_curve->add_option("-M,--truncation", truncation)->capture_default_str();
    c_curve->add_option("--nr", nr)->capture_default_str();
    c_curve->add_option("--nphi", nphi)->capture_default_str();
    c_curve->add_flag("--gauss", gauss_radial, "Gauss-Legendre radial nodes in r^2");
    c_curve->add_option("--points", curve_points, "t grid size on [0, 1)")->capture_default_str();
    add_output_opts(c_curve, o);

    auto* c_pwl = app.add_subcommand("study-pwl", "lambda sweep of the piecewise-linear family");
    c_pwl->add_option("--lambdas", lambdas_expr)->capture_default_str();
    c_pwl->add_option("--n", o.n = 4096, "oracle nodes per axis")->capture_default_str();
    add_output_opts(c_pwl, o);

    auto* c_square = app.add_subcommand("study-square", "the finite-energy non-quasi-Moebius pair");
    c_square->add_option("--n", o.n)->capture_default_str();
    c_square->add_option("--seed", seed)->capture_default_str();
    add_output_opts(c_square, o);

    auto* c_suite = app.add_subcommand("suite", "run the acceptance checklist");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    // configuration phase: map parsing errors are configuration errors
    conf::AngleMap map = conf::AngleMap::identity();
    try {
        if (!o.map_expr.empty()) map = conf::parse_map(o.map_expr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    const auto t_start = std::chrono::steady_clock::now();
    int status = kOk;
    try {
        Report r;
        if (*c_energy) {
            r.config = base_config("energy", o);
            r.config.update(quad_config(o));
            r.results["energy"] = energy_json(conf::conformal_energy(map, quad_spec(o)));
        } else if (*c_oracle) {
            r.config = base_config("oracle", o);
            r.config["n"] = o.n;
            const double coarse = conf::energy_oracle(map, o.n);
            const double fine = conf::energy_oracle(map, 2 * o.n);
            r.results["value"] = fine;
            r.results["doubling_difference"] = fine - coarse;
            r.results["err"] = 2.0 * std::abs(fine - coarse);  // first-order rule
        } else if (*c_bound) {
            r.config = base_config("bound", o);
            r.config["eta"] = eta_expr;
            r.results["bound"] = conf::qm_energy_bound(parse_gauge(eta_expr));
        } else if (*c_scan) {
            r.config = base_config("scan", o);
            r.config["quadruples"] = quadruples;
            r.config["seed"] = seed;
            const auto scan = conf::cr_distortion_scan(map, quadruples, seed);
            r.results = scan_results(scan);
            if (compare_energy) {
                r.config.update(quad_config(o));
                const auto cmp = conf::bound_vs_energy(map, quad_spec(o), scan);
                r.results["energy"] = energy_json(cmp.energy);
                r.results["bound_envelope"] = cmp.bound_envelope;
                r.results["bound_linear"] = cmp.bound_linear;
                r.results["gap_envelope"] = cmp.gap_envelope;
                r.results["gap_linear"] = cmp.gap_linear;
                r.results["tolerance"] = cmp.tolerance;
                r.results["envelope_ok"] = cmp.envelope_ok;
                r.results["linear_ok"] = cmp.linear_ok;
            }
            scan_table(scan, r);
        } else if (*c_residual) {
            r.config = base_config("residual", o);
            r.config.update(quad_config(o));
            if (y_opt->count() > 0) {
                r.config["y"] = y_value;
                const double res = conf::critical_residual(map, y_value, quad_spec(o));
                r.results["residual"] = res;
                r.results["u_form"] = conf::u_form_residual(map, y_value, quad_spec(o));
            } else {
                r.config["grid"] = grid;
                const auto prof = conf::residual_profile(map, grid, quad_spec(o));
                r.results["max_abs"] = prof.max_abs;
                r.results["resolution"] = prof.resolution;
                r.columns = {"y", "residual"};
                for (std::size_t i = 0; i < prof.y.size(); ++i)
                    r.rows.push_back({prof.y[i], prof.residual[i]});
            }
        } else if (*c_variation) {
            r.config = base_config("variation", o);
            r.config.update(quad_config(o));
            r.config["phi"] = phi_expr;
            const conf::Perturbation phi{parse_double_list(phi_expr, "--phi")};
            r.results["value"] = conf::first_variation(map, phi, quad_spec(o));
        } else if (*c_descend) {
            r.config = base_config("descend", o);
            r.config.update(quad_config(o));
            r.config["modes"] = modes;
            r.config["max_steps"] = max_steps;
            const auto tr = conf::descend(map, modes, max_steps, quad_spec(o));
            r.results["final_energy"] = tr.final_energy;
            r.results["final_grad_norm"] = tr.final_grad_norm;
            r.results["converged"] = tr.converged;
            r.results["stalled"] = tr.stalled;
            r.results["fitted_a"] = tr.fitted_a;
            r.results["fitted_rot"] = tr.fitted_rot;
            r.results["fit_sup_distance"] = tr.fit_sup_distance;
            r.results["final_coeffs"] = tr.final_coeffs;
            r.columns = {"step", "energy", "grad_norm", "step_size"};
            for (const auto& s : tr.steps)
                r.rows.push_back({static_cast<double>(s.step), s.energy, s.grad_norm, s.step_size});
        } else if (*c_douglas) {
            r.config = base_config("douglas", o);
            r.config["truncation"] = truncation;
            r.config["direct"] = direct_boundary;
            const conf::AngleMap boundary = direct_boundary ? map : map.inverse();
            const auto fb = conf::boundary_fourier(boundary, truncation);
            r.results["energy"] = conf::douglas_energy(fb);
            r.results["parseval_sum"] = fb.parseval_sum;
            r.results["tail_energy"] = fb.tail_energy;
            r.results["tail_decaying"] = fb.tail_decaying;
            r.results["samples"] = fb.samples;
            if (!coeffs_out.empty()) {
                std::ofstream f(coeffs_out);
                if (!f) throw std::runtime_error("cannot open '" + coeffs_out + "'");
                f << "k,re,im\n";
                const long M = static_cast<long>(truncation);
                for (long k = -M; k <= M; ++k)
                    f << k << "," << num(fb.coeff(k).real()) << "," << num(fb.coeff(k).imag())
                      << "\n";
            }
        } else if (*c_curve) {
            r.config = base_config("deform-curve", o);
            r.config["truncation"] = truncation;
            r.config["nr"] = nr;
            r.config["nphi"] = nphi;
            r.config["gauss"] = gauss_radial;
            r.config["points"] = curve_points;
            const auto fb = conf::boundary_fourier(map.inverse(), truncation);
            conf::GridSpec g;
            g.nr = nr;
            g.nphi = nphi;
            g.gauss_radial = gauss_radial;
            const auto field = conf::poisson_field(fb, g);
            std::vector<double> t(curve_points);
            for (std::size_t i = 0; i < curve_points; ++i)
                t[i] = static_cast<double>(i) / static_cast<double>(curve_points);
            const auto curve = conf::deformation_bound_curve(field, t);
            r.results["b0"] = curve.b0;
            r.results["limit_value"] = curve.limit_value;
            r.results["limit_identity_gap"] = curve.limit_identity_gap;
            r.results["strictly_increasing"] = curve.strictly_increasing;
            r.results["truncated"] = curve.truncated;
            r.results["max_abs_nu"] = field.max_abs_nu;
            r.results["min_J"] = field.min_J;
            r.results["flagged_cells"] = field.flag_count;
            r.columns = {"t", "B"};
            for (std::size_t i = 0; i < curve.t.size(); ++i) r.rows.push_back({curve.t[i], curve.B[i]});
        } else if (*c_pwl) {
            r.config = base_config("study-pwl", o);
            r.config["lambdas"] = lambdas_expr;
            r.config["n"] = o.n;
            const auto lambdas = parse_double_list(lambdas_expr, "--lambdas");
            std::vector<double> logs, fwd, inv;
            r.columns = {"lambda", "energy_forward", "energy_inverse"};
            for (double lam : lambdas) {
                const auto m = conf::AngleMap::pwl(lam);
                fwd.push_back(conf::energy_oracle(m, o.n));
                inv.push_back(conf::energy_oracle(m.inverse(), o.n));
                logs.push_back(std::log(1.0 / lam));
                r.rows.push_back({lam, fwd.back(), inv.back()});
            }
            const double fmin = *std::min_element(fwd.begin(), fwd.end());
            const double fmax = *std::max_element(fwd.begin(), fwd.end());
            r.results["forward_variation"] = (fmax - fmin) / fmin;
            r.results["inverse_slope"] = regression_slope(logs, inv);
            r.results["slope_target"] = (2.0 - 2.0 * std::cos(1.0)) / (2.0 * pi * pi);
        } else if (*c_square) {
            r.config = base_config("study-square", o);
            r.config["n"] = o.n;
            r.config["seed"] = seed;
            conf::QuadratureSpec q;
            q.n = o.n;
            q.refine = 2;
            const auto sq = conf::AngleMap::square();
            r.results["energy_square"] = energy_json(conf::conformal_energy(sq, q));
            r.results["energy_inverse"] = energy_json(conf::conformal_energy(sq.inverse(), q));
            const auto scan = conf::cr_distortion_scan(sq, 2000, seed);
            r.results["scan"] = scan_results(scan);
            scan_table(scan, r);
        } else if (*c_suite) {
            const auto results = conf::run_acceptance();
            const int failures = conf::report_acceptance(results, std::cout);
            status = failures == 0 ? kOk : kAssertionFailure;
        }
        if (!*c_suite) emit(r, o.out, o.format);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t_start);
    std::cerr << "timing: completed in " << elapsed.count() << " ms\n";
    return status;
}
