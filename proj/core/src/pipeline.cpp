#include "slpants/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <tuple>

#include "json.hpp"

#include "slpants/decay.hpp"
#include "slpants/mesh_io.hpp"
#include "slpants/reconstruction.hpp"
#include "slpants/solver.hpp"
#include "slpants/spectrum.hpp"
#include "slpants/topology.hpp"

namespace slpants {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
constexpr double kConvexityFloor = -1e-8;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The problem a config describes. The geometric path couples the monopole
// coefficient to the polygon; the hooks swap in manufactured data and mark
// the run non-geometric.
struct Setup {
    GHParams gh;
    BoundaryTrace trace;
    DirichletProblem pb;
};

Setup make_setup(const RunConfig& cfg) {
    Polygon poly(cfg.points);
    GHParams gh{poly, cfg.A};
    BoundaryTrace trace(poly, cfg.c);
    DirichletProblem pb;
    if (cfg.exact_boundary && *cfg.exact_boundary == "quadratic") {
        pb = make_quadratic_problem(cfg.constant_V.value_or(1.0));
    } else if (cfg.exact_boundary) {
        pb = make_exp_problem();
    } else if (cfg.constant_V) {
        const double v0 = *cfg.constant_V;
        pb.V = [v0](const Vec2&) { return v0; };
        pb.boundary = [trace](int edge, double t, const Vec2&) {
            return trace.edge_value(edge, t);
        };
        pb.geometric = false;
    } else {
        pb = make_gh_problem(gh, trace);
    }
    return Setup{std::move(gh), std::move(trace), std::move(pb)};
}

SolveParams solve_params(const RunConfig& cfg) {
    SolveParams sp;
    sp.scheme = cfg.scheme;
    sp.tol = cfg.tol;
    sp.max_iter = cfg.max_iter;
    sp.damping = cfg.damping;
    sp.init = cfg.init;
    return sp;
}

Json echo_config(const RunConfig& cfg) {
    Json j;
    Json pts = Json::array();
    for (const Vec2& p : cfg.points) pts.push_back(Json::array({p.x(), p.y()}));
    j["polygon"] = Json{{"points", pts}, {"A", cfg.A}, {"c", cfg.c}};
    j["grid"] = Json{{"h", cfg.h}, {"stencil_width", cfg.stencil_width}};
    j["solver"] = Json{{"scheme", scheme_name(cfg.scheme)},
                       {"tol", cfg.tol},
                       {"max_iter", cfg.max_iter},
                       {"damping", cfg.damping},
                       {"init", init_name(cfg.init)}};
    Json asym = Json{{"mesh_m", cfg.mesh_m},
                     {"threshold", cfg.threshold},
                     {"samples", cfg.samples}};
    asym["fit_window"] = cfg.fit_window
        ? Json(Json::array({cfg.fit_window->first, cfg.fit_window->second}))
        : Json(nullptr);
    j["asymptotics"] = asym;
    if (!cfg.family_members.empty()) j["family"] = Json{{"members", cfg.family_members}};
    j["outputs"] = Json{{"mesh_format", format_name(cfg.mesh_format)},
                        {"solution_csv", cfg.solution_csv},
                        {"mesh_path", cfg.mesh_path},
                        {"report", cfg.report}};
    Json hooks = Json::object();
    if (cfg.constant_V) hooks["constant_V"] = *cfg.constant_V;
    if (cfg.exact_boundary) hooks["exact_boundary"] = *cfg.exact_boundary;
    if (!hooks.empty()) j["hooks"] = hooks;
    return j;
}

std::string out_path(const RunOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    return (std::filesystem::path(opt.out_dir) / name).string();
}

void write_report(const Json& report, const RunConfig& cfg, const RunOptions& opt) {
    const std::string path = out_path(opt, cfg.report);
    std::ofstream out(path);
    out << report.dump(2) << "\n";
    if (!out) throw IoFailure("cannot write report '" + path + "'");
    if (!opt.quiet) std::cout << "report: " << path << "\n";
}

Json make_check(const char* name, double value, double threshold, bool pass) {
    return Json{{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}};
}

// Shared solve preamble: header blocks, the solve itself, and the solve
// block. On NonConvergence/SingularJacobian writes the failure report and
// returns kExitNonConvergence; the caller forwards it.
int run_solve(const RunConfig& cfg, const RunOptions& opt, const char* command,
              const Setup& setup, const Grid& grid, Json& report, Field& phi,
              SolveReport& sr, double& solve_s) {
    report["version"] = kVersion;
    report["command"] = command;
    report["config"] = echo_config(cfg);
    report["geometric"] = setup.pb.geometric;
    report["nodes"] = grid.node_count();
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::tie(phi, sr) = solve(grid, setup.pb, solve_params(cfg));
    } catch (const NonConvergence& e) {
        solve_s = seconds_since(t0);
        report["solve"] = Json{{"converged", false},
                               {"error", e.what()},
                               {"residual_history", e.residual_history}};
        report["timing"] = Json{{"solve_s", solve_s}, {"total_s", solve_s}};
        if (!opt.quiet) std::cout << command << ": solve did not converge\n";
        write_report(report, cfg, opt);
        return kExitNonConvergence;
    } catch (const SingularJacobian& e) {
        solve_s = seconds_since(t0);
        report["solve"] = Json{{"converged", false}, {"error", e.what()}};
        report["timing"] = Json{{"solve_s", solve_s}, {"total_s", solve_s}};
        if (!opt.quiet) std::cout << command << ": linearization became singular\n";
        write_report(report, cfg, opt);
        return kExitNonConvergence;
    }
    solve_s = seconds_since(t0);
    report["solve"] = Json{{"converged", sr.converged},
                           {"iterations", sr.iterations},
                           {"final_residual", sr.final_residual},
                           {"convexity_margin", sr.convexity_margin}};
    if (!opt.quiet)
        std::cout << command << ": converged in " << sr.iterations
                  << " iterations, residual " << sr.final_residual << "\n";
    return kExitOk;
}

// One edge of the decay-rate cross-check: eigenvalue at mesh_m and 2*mesh_m
// (the doubling gap certifies eigenvalue convergence), midline gradient
// samples, log-linear fit, comparison against the spectrum. Sampling or fit
// failures are recorded as a skip, not an error: bounded-gradient problems
// legitimately have no decaying end. `computed` marks a fit on samples that
// carry the cylindrical-end signature — only those bind the exit code —
// and `accepted` a fit that passes or matches a higher mode.
Json analyze_edge(const Grid& grid, const Field& phi, const DirichletProblem& pb,
                  const Polygon& poly, int edge, const RunConfig& cfg,
                  bool& computed, bool& accepted) {
    Json e;
    e["edge"] = edge;
    computed = false;
    accepted = false;
    try {
        const EdgeFrame frame(poly, edge);
        const auto vfun = [&pb, &frame](double s) { return pb.V(frame.to_world(Vec2(0.0, s))); };
        const EdgeSpectrum coarse = edge_eigen(vfun, frame.length(), cfg.mesh_m);
        const EdgeSpectrum fine = edge_eigen(vfun, frame.length(), 2 * cfg.mesh_m);
        e["lambda_sl"] = fine.lambda;
        e["lambda_stability"] = std::abs(fine.lambda - coarse.lambda) / fine.lambda;
        e["eigen_m"] = fine.m;
        std::optional<double> lo, hi;
        if (cfg.fit_window) {
            lo = cfg.fit_window->first;
            hi = cfg.fit_window->second;
        }
        const EdgeSamples s =
            edge_samples(grid, phi, pb, frame, 0.5 * frame.length(), cfg.samples, lo, hi);
        e["asymptotic"] = s.asymptotic;
        e["samples"] = s.size();
        const DecayFit fit = fit_decay_rate(s);
        const RateComparison cmp = compare_rates(fine, fit, cfg.threshold);
        e["lambda_fit"] = fit.lambda;
        e["r2"] = fit.r2;
        e["rel_error"] = cmp.rel_error;
        e["threshold"] = cfg.threshold;
        e["pass"] = cmp.pass;
        e["spectral_match_warning"] = cmp.spectral_match_warning;
        if (cmp.spectral_match_warning) {
            e["nearest_mode"] = cmp.nearest_mode;
            e["nearest_rel_error"] = cmp.nearest_rel_error;
        }
        computed = s.asymptotic;
        accepted = cmp.pass || cmp.spectral_match_warning;
    } catch (const Error& err) {
        e["skipped"] = err.what();
    }
    return e;
}

Json topology_block(const GraphMesh& mesh, int n_ends) {
    const QuotientTopology qt = measure_quotient(mesh, n_ends);
    const Classification cl = classify_total_space(qt);
    return Json{{"descriptor", cl.descriptor},
                {"connected_sum", cl.connected_sum},
                {"genus", qt.g},
                {"circle_boundaries", qt.b},
                {"ends", qt.n},
                {"euler_characteristic", qt.chi},
                {"boundary_cycles", qt.boundary_cycles},
                {"mesh_nodes", mesh.node_count()},
                {"mesh_triangles", mesh.triangle_count()}};
}

} // namespace

int cmd_solve(const RunConfig& cfg, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Setup setup = make_setup(cfg);
    const Grid grid = build_grid(setup.gh.polygon, cfg.h, cfg.stencil_width);

    Json report;
    Field phi;
    SolveReport sr;
    double solve_s = 0.0;
    if (int rc = run_solve(cfg, opt, "solve", setup, grid, report, phi, sr, solve_s))
        return rc;

    write_solution_csv(grid, phi, out_path(opt, cfg.solution_csv));

    const SLResiduals res = sl_residuals(grid, phi, setup.pb);
    report["residuals"] = Json{{"det_sup", res.det_sup},
                               {"curl_sup", res.curl_sup},
                               {"trace_margin", res.trace_margin},
                               {"det_nodes", res.det_nodes},
                               {"curl_nodes", res.curl_nodes}};
    report["affinity"] = boundary_affinity_check(grid, phi, setup.pb);

    Json edges = Json::array();
    if (setup.pb.geometric) {
        for (int i = 0; i < setup.gh.polygon.n(); ++i) {
            bool computed = false, accepted = false;
            edges.push_back(
                analyze_edge(grid, phi, setup.pb, setup.gh.polygon, i, cfg, computed, accepted));
        }
    }
    report["edges"] = edges;

    try {
        const GraphMesh mesh = build_graph_mesh(grid, phi, setup.pb);
        export_mesh(mesh, cfg.mesh_format, out_path(opt, cfg.mesh_path));
        report["topology"] = topology_block(mesh, setup.gh.polygon.n());
    } catch (const Error& e) {
        report["topology"] = Json{{"error", e.what()}};
    }

    const std::vector<double> closure = closure_values(grid, setup.pb);
    const double convexity = convexity_check(grid, phi, closure);
    const double trace = trace_margin(grid, phi, closure);
    Json checks = Json::array();
    checks.push_back(make_check("residual", sr.final_residual, cfg.tol, sr.converged));
    checks.push_back(
        make_check("convexity_margin", convexity, kConvexityFloor, convexity >= kConvexityFloor));
    checks.push_back(make_check("trace_margin", trace, 0.0, trace > 0.0));
    report["checks"] = checks;

    report["timing"] = Json{{"solve_s", solve_s}, {"total_s", seconds_since(t0)}};
    write_report(report, cfg, opt);
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Setup setup = make_setup(cfg);
    const Grid grid = build_grid(setup.gh.polygon, cfg.h, cfg.stencil_width);

    const std::string csv = out_path(opt, cfg.solution_csv);
    const SolutionCsv sol = read_solution_csv(csv);
    if (static_cast<int>(sol.phi.size()) != grid.node_count())
        throw GridMismatch("solution '" + csv + "' carries " + std::to_string(sol.phi.size()) +
                           " nodes but the configured grid has " +
                           std::to_string(grid.node_count()));
    const double node_tol = 1e-9 * (1.0 + setup.gh.polygon.diameter());
    Field phi(grid.node_count());
    for (int k = 0; k < grid.node_count(); ++k) {
        if ((sol.u[static_cast<size_t>(k)] - grid.node(k)).norm() > node_tol)
            throw GridMismatch("solution node " + std::to_string(k) +
                               " does not match the configured grid");
        phi[k] = sol.phi[static_cast<size_t>(k)];
    }

    Json report;
    report["version"] = kVersion;
    report["command"] = "verify";
    report["config"] = echo_config(cfg);
    report["geometric"] = setup.pb.geometric;
    report["nodes"] = grid.node_count();

    const Field res_field = ma_residual(grid, phi, setup.pb, cfg.scheme);
    double det_res = 0.0;
    for (double r : res_field.v) det_res = std::max(det_res, std::abs(r));
    const std::vector<double> closure = closure_values(grid, setup.pb);
    const double convexity = convexity_check(grid, phi, closure);
    const double trace = trace_margin(grid, phi, closure);

    const SLResiduals res = sl_residuals(grid, phi, setup.pb);
    report["residuals"] = Json{{"det_sup", res.det_sup},
                               {"curl_sup", res.curl_sup},
                               {"trace_margin", res.trace_margin},
                               {"det_nodes", res.det_nodes},
                               {"curl_nodes", res.curl_nodes}};
    report["affinity"] = boundary_affinity_check(grid, phi, setup.pb);

    Json checks = Json::array();
    checks.push_back(make_check("det_residual", det_res, 10.0 * cfg.tol, det_res <= 10.0 * cfg.tol));
    checks.push_back(
        make_check("convexity_margin", convexity, kConvexityFloor, convexity >= kConvexityFloor));
    checks.push_back(make_check("trace_margin", trace, 0.0, trace > 0.0));
    bool all_pass = true;
    for (const Json& c : checks) all_pass = all_pass && c.at("pass").get<bool>();
    report["checks"] = checks;

    report["timing"] = Json{{"total_s", seconds_since(t0)}};
    if (!opt.quiet)
        std::cout << "verify: " << (all_pass ? "pass" : "FAIL") << " (det residual " << det_res
                  << ", convexity " << convexity << ", trace " << trace << ")\n";
    write_report(report, cfg, opt);
    return all_pass ? kExitOk : kExitVerification;
}

int cmd_family(const RunConfig& cfg, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<double>> members = cfg.family_members;
    if (members.empty()) members.push_back(cfg.c);

    const Polygon poly(cfg.points);
    const Grid grid = build_grid(poly, cfg.h, cfg.stencil_width);

    Json report;
    report["version"] = kVersion;
    report["command"] = "family";
    report["config"] = echo_config(cfg);
    report["nodes"] = grid.node_count();

    std::vector<std::optional<Field>> fields;
    Json jmembers = Json::array();
    bool any_solve_failed = false;
    double solve_s = 0.0;
    for (size_t k = 0; k < members.size(); ++k) {
        RunConfig mc = cfg;
        mc.c = members[k];
        const Setup setup = make_setup(mc);
        Json blk;
        blk["c"] = members[k];
        const auto ts = std::chrono::steady_clock::now();
        try {
            auto [phi, sr] = solve(grid, setup.pb, solve_params(cfg));
            write_solution_csv(grid, phi,
                               out_path(opt, "solution_" + std::to_string(k) + ".csv"));
            blk["converged"] = sr.converged;
            blk["iterations"] = sr.iterations;
            blk["final_residual"] = sr.final_residual;
            fields.emplace_back(std::move(phi));
        } catch (const NonConvergence& e) {
            blk["converged"] = false;
            blk["error"] = e.what();
            fields.emplace_back(std::nullopt);
            any_solve_failed = true;
        } catch (const SingularJacobian& e) {
            blk["converged"] = false;
            blk["error"] = e.what();
            fields.emplace_back(std::nullopt);
            any_solve_failed = true;
        }
        solve_s += seconds_since(ts);
        jmembers.push_back(blk);
    }
    report["members"] = jmembers;

    // A boundary trace shifted by the affine function t.u changes the edge
    // offsets by c'_i - c_i = t . (p_{i+1} - p_i). Fitting t by least squares
    // over the edges detects translation-related pairs exactly; for those the
    // solutions must differ by the same affine function up to a constant.
    Json pairs = Json::array();
    double worst_dev = 0.0;
    bool any_pair_failed = false;
    for (size_t i = 0; i < members.size(); ++i) {
        for (size_t j = i + 1; j < members.size(); ++j) {
            if (!fields[i] || !fields[j]) continue;
            Mat2 M = Mat2::Zero();
            Vec2 rhs = Vec2::Zero();
            double dmax = 0.0;
            for (int e = 0; e < poly.n(); ++e) {
                const Vec2 ev = poly.edge_vector(e);
                const double d = members[j][static_cast<size_t>(e)] -
                                 members[i][static_cast<size_t>(e)];
                M += ev * ev.transpose();
                rhs += d * ev;
                dmax = std::max(dmax, std::abs(d));
            }
            const Vec2 t = M.ldlt().solve(rhs);
            double fit_res = 0.0;
            for (int e = 0; e < poly.n(); ++e)
                fit_res = std::max(fit_res,
                                   std::abs(members[j][static_cast<size_t>(e)] -
                                            members[i][static_cast<size_t>(e)] -
                                            t.dot(poly.edge_vector(e))));
            const bool related = fit_res <= 1e-9 * (1.0 + dmax);
            Json p = Json{{"i", i},
                          {"j", j},
                          {"translation", Json::array({t.x(), t.y()})},
                          {"fit_residual", fit_res},
                          {"related", related}};
            if (related) {
                const Field& fa = *fields[i];
                const Field& fb = *fields[j];
                double mean = 0.0;
                for (int k = 0; k < grid.node_count(); ++k)
                    mean += fb[k] - fa[k] - t.dot(grid.node(k));
                mean /= std::max(1, grid.node_count());
                double dev = 0.0;
                for (int k = 0; k < grid.node_count(); ++k)
                    dev = std::max(dev,
                                   std::abs(fb[k] - fa[k] - t.dot(grid.node(k)) - mean));
                p["max_deviation"] = dev;
                p["threshold"] = 10.0 * cfg.tol;
                p["pass"] = dev <= 10.0 * cfg.tol;
                worst_dev = std::max(worst_dev, dev);
                if (dev > 10.0 * cfg.tol) any_pair_failed = true;
            } else {
                p["note"] = "no-translation-match";
            }
            pairs.push_back(p);
        }
    }
    report["pairs"] = pairs;

    Json checks = Json::array();
    checks.push_back(make_check("affine_invariance", worst_dev, 10.0 * cfg.tol,
                                !any_pair_failed));
    report["checks"] = checks;

    report["timing"] = Json{{"solve_s", solve_s}, {"total_s", seconds_since(t0)}};
    if (!opt.quiet)
        std::cout << "family: " << members.size() << " members, " << pairs.size()
                  << " pairs, worst deviation " << worst_dev << "\n";
    write_report(report, cfg, opt);
    if (any_solve_failed) return kExitNonConvergence;
    return any_pair_failed ? kExitVerification : kExitOk;
}

int cmd_asymptotics(const RunConfig& cfg, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Setup setup = make_setup(cfg);
    const Grid grid = build_grid(setup.gh.polygon, cfg.h, cfg.stencil_width);

    Json report;
    Field phi;
    SolveReport sr;
    double solve_s = 0.0;
    if (int rc = run_solve(cfg, opt, "asymptotics", setup, grid, report, phi, sr, solve_s))
        return rc;

    Json edges = Json::array();
    bool any_rejected = false;
    for (int i = 0; i < setup.gh.polygon.n(); ++i) {
        bool computed = false, accepted = false;
        edges.push_back(
            analyze_edge(grid, phi, setup.pb, setup.gh.polygon, i, cfg, computed, accepted));
        if (computed && !accepted) any_rejected = true;
        if (!opt.quiet) {
            const Json& e = edges.back();
            if (e.contains("skipped"))
                std::cout << "edge " << i << ": skipped (" << e["skipped"].get<std::string>()
                          << ")\n";
            else
                std::cout << "edge " << i << ": lambda_sl " << e["lambda_sl"].get<double>()
                          << ", lambda_fit " << e["lambda_fit"].get<double>() << ", rel error "
                          << e["rel_error"].get<double>() << (e["pass"].get<bool>() ? "" : " [FAIL]")
                          << "\n";
        }
    }
    report["edges"] = edges;

    report["timing"] = Json{{"solve_s", solve_s}, {"total_s", seconds_since(t0)}};
    write_report(report, cfg, opt);
    return any_rejected ? kExitVerification : kExitOk;
}

int cmd_classify(const RunConfig& cfg, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Setup setup = make_setup(cfg);
    const Grid grid = build_grid(setup.gh.polygon, cfg.h, cfg.stencil_width);

    Json report;
    Field phi;
    SolveReport sr;
    double solve_s = 0.0;
    if (int rc = run_solve(cfg, opt, "classify", setup, grid, report, phi, sr, solve_s))
        return rc;

    int code = kExitOk;
    try {
        const GraphMesh mesh = build_graph_mesh(grid, phi, setup.pb);
        report["topology"] = topology_block(mesh, setup.gh.polygon.n());
        if (!opt.quiet)
            std::cout << "classify: " << report["topology"]["descriptor"].get<std::string>()
                      << "\n";
    } catch (const Error& e) {
        report["topology"] = Json{{"error", e.what()}};
        if (!opt.quiet) std::cout << "classify: failed (" << e.what() << ")\n";
        code = kExitVerification;
    }

    report["timing"] = Json{{"solve_s", solve_s}, {"total_s", seconds_since(t0)}};
    write_report(report, cfg, opt);
    return code;
}

int cmd_export(const RunConfig& cfg, const RunOptions& opt,
               std::optional<MeshFormat> format_override) {
    const auto t0 = std::chrono::steady_clock::now();
    const Setup setup = make_setup(cfg);
    const Grid grid = build_grid(setup.gh.polygon, cfg.h, cfg.stencil_width);

    Json report;
    Field phi;
    SolveReport sr;
    double solve_s = 0.0;
    if (int rc = run_solve(cfg, opt, "export", setup, grid, report, phi, sr, solve_s))
        return rc;

    const MeshFormat fmt = format_override.value_or(cfg.mesh_format);
    std::string name = cfg.mesh_path;
    if (format_override && name == "mesh." + format_name(cfg.mesh_format))
        name = "mesh." + format_name(fmt);    // keep the default name's extension honest

    const GraphMesh mesh = build_graph_mesh(grid, phi, setup.pb);
    export_mesh(mesh, fmt, out_path(opt, name));
    report["export"] = Json{{"format", format_name(fmt)},
                            {"path", name},
                            {"nodes", mesh.node_count()},
                            {"triangles", mesh.triangle_count()}};
    if (!opt.quiet) std::cout << "export: " << out_path(opt, name) << "\n";

    report["timing"] = Json{{"solve_s", solve_s}, {"total_s", seconds_since(t0)}};
    write_report(report, cfg, opt);
    return kExitOk;
}

} // namespace slpants
