#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "slpants/decay.hpp"
#include "slpants/mesh_io.hpp"
#include "slpants/reconstruction.hpp"
#include "slpants/solver.hpp"
#include "support.hpp"

using namespace slpants;

namespace {

Field fill(const Grid& g, double (*f)(const Vec2&)) {
    Field phi(g.node_count());
    for (int k = 0; k < g.node_count(); ++k) phi[k] = f(g.node(k));
    return phi;
}

double half_r2(const Vec2& u) { return 0.5 * u.squaredNorm(); }
double exp_half_r2(const Vec2& u) { return std::exp(0.5 * u.squaredNorm()); }

DirichletProblem affine_problem(double a, double b, double c) {
    DirichletProblem pb;
    pb.geometric = false;
    pb.V = [](const Vec2&) { return 1.0; };
    pb.boundary = [a, b, c](int, double, const Vec2& p) { return a * p.x() + b * p.y() + c; };
    return pb;
}

// a very flat triangle: one interior lattice row, no complete cells
Polygon sliver() { return Polygon({{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.12}}); }

} // namespace

TEST_CASE("gradient of the half-sum-of-squares is the identity map") {
    const DirichletProblem pb = make_quadratic_problem();
    for (const auto& [poly, h] : {std::pair(unit_square(), 0.1),
                                  std::pair(monopole_triangle(), 0.05)}) {
        const Grid g = build_grid(poly, h);
        const auto y = gradient_field(g, fill(g, half_r2), pb);
        for (int k = 0; k < g.node_count(); ++k) {
            CAPTURE(k);
            CHECK((y[static_cast<size_t>(k)] - g.node(k)).norm() < 1e-9);
        }
    }
}

TEST_CASE("affine data has a constant gradient on any lattice orientation") {
    const DirichletProblem pb = affine_problem(3.0, -2.0, 7.0);
    const Vec2 slope(3.0, -2.0);
    Mat2 rot = Eigen::Rotation2Dd(0.5).toRotationMatrix();
    Mat2 reflect;
    reflect << 1.0, 0.0, 0.0, -1.0;
    for (const Mat2& frame : {Mat2(Mat2::Identity()), rot, reflect}) {
        const Grid g = build_grid(unit_square(), 0.1, 3, frame);
        Field phi(g.node_count());
        for (int k = 0; k < g.node_count(); ++k)
            phi[k] = slope.dot(g.node(k)) + 7.0;
        const auto y = gradient_field(g, phi, pb);
        for (int k = 0; k < g.node_count(); ++k) {
            CAPTURE(k);
            CHECK((y[static_cast<size_t>(k)] - slope).norm() < 1e-9);
        }
    }
}

TEST_CASE("adding affine data translates the gradient field") {
    const Grid g = build_grid(unit_square(), 0.1);
    const Vec2 shift(0.7, -0.3);
    const DirichletProblem pb = make_exp_problem();
    DirichletProblem pb2 = make_exp_problem();
    pb2.boundary = [shift](int, double, const Vec2& p) {
        return std::exp(0.5 * p.squaredNorm()) + shift.dot(p);
    };
    const Field phi = fill(g, exp_half_r2);
    Field phi2 = phi;
    for (int k = 0; k < g.node_count(); ++k) phi2[k] += shift.dot(g.node(k));
    const auto y = gradient_field(g, phi, pb);
    const auto y2 = gradient_field(g, phi2, pb2);
    for (int k = 0; k < g.node_count(); ++k) {
        CAPTURE(k);
        CHECK((y2[static_cast<size_t>(k)] - y[static_cast<size_t>(k)] - shift).norm() < 1e-10);
    }
}

TEST_CASE("optimality residuals vanish on the quadratic") {
    const DirichletProblem pb = make_quadratic_problem();
    const Grid g = build_grid(unit_square(), 0.1);
    const SLResiduals r = sl_residuals(g, fill(g, half_r2), pb);
    CHECK(r.det_nodes > 0);
    CHECK(r.curl_nodes >= r.det_nodes);
    CHECK(r.det_sup < 1e-11);
    CHECK(r.curl_sup < 1e-9);
    CHECK(r.trace_margin == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("centered gradients have an exactly curl-free bulk") {
    // on an axis-aligned square every arm has length h, so the two mixed
    // second differences entering the curl are the same sum of nodal values
    const Grid g = build_grid(unit_square(), 0.1);
    const SLResiduals r = sl_residuals(g, fill(g, exp_half_r2), make_exp_problem());
    CHECK(r.curl_sup < 1e-11);
    CHECK(r.trace_margin > 2.0);
}

TEST_CASE("determinant residual of a smooth field converges at second order") {
    const DirichletProblem pb = make_exp_problem();
    const Grid g1 = build_grid(unit_square(), 0.1);
    const Grid g2 = build_grid(unit_square(), 0.05);
    const double d1 = sl_residuals(g1, fill(g1, exp_half_r2), pb).det_sup;
    const double d2 = sl_residuals(g2, fill(g2, exp_half_r2), pb).det_sup;
    CHECK(d1 > 0.0);
    CHECK(d1 / d2 > 2.5);
}

TEST_CASE("a single lattice row yields no interior statistics and no mesh") {
    const Grid g = build_grid(sliver(), 0.1);
    REQUIRE(g.node_count() >= 1);
    const DirichletProblem pb = make_quadratic_problem();
    const Field phi = fill(g, half_r2);

    const SLResiduals r = sl_residuals(g, phi, pb);
    CHECK(r.det_nodes == 0);
    CHECK(r.curl_nodes == 0);
    CHECK(r.det_sup == 0.0);
    CHECK(r.curl_sup == 0.0);
    CHECK(std::isinf(r.trace_margin));

    CHECK_THROWS_AS(build_graph_mesh(g, phi, pb), TriangulationFailed);

    const auto dev = boundary_affinity_check(g, phi, pb);
    REQUIRE(dev.size() == 3);
    for (double d : dev) CHECK(std::isnan(d));
}

TEST_CASE("lattice cells triangulate into oriented well-shaped pairs") {
    const Polygon small_square({{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}});
    const DirichletProblem pb = make_quadratic_problem();

    Mat2 reflect;
    reflect << 1.0, 0.0, 0.0, -1.0;
    for (const Mat2& frame : {Mat2(Mat2::Identity()), reflect}) {
        const Grid g = build_grid(small_square, 0.1, 3, frame);
        REQUIRE(g.node_count() == 16);
        const Field phi = fill(g, half_r2);
        const GraphMesh mesh = build_graph_mesh(g, phi, pb);

        CHECK(mesh.node_count() == 16);
        CHECK(mesh.triangle_count() == 18);    // 9 full cells, 2 triangles each
        for (int k = 0; k < mesh.node_count(); ++k) {
            CHECK(mesh.u[static_cast<size_t>(k)] == g.node(k));
            CHECK(mesh.phi[static_cast<size_t>(k)] == phi[k]);
            // lifting the quadratic recovers the identity
            CHECK((mesh.y[static_cast<size_t>(k)] - g.node(k)).norm() < 1e-9);
        }
        for (const auto& t : mesh.triangles) {
            const Vec2 a = mesh.u[static_cast<size_t>(t[0])];
            const Vec2 b = mesh.u[static_cast<size_t>(t[1])];
            const Vec2 c = mesh.u[static_cast<size_t>(t[2])];
            CHECK(cross2(b - a, c - a) > 0.0);
        }
        for (uint8_t q : mesh.quality) CHECK(q == 1);
    }
}

TEST_CASE("edge strip sampling recovers a logarithmic end") {
    // convex phi = u1 ln u1 - u1 falls with outward-normal derivative -ln u1:
    // a decay-rate-1 cylindrical end at u1 = 0
    const Polygon rect({{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.5}, {0.0, 0.5}});
    const Grid g = build_grid(rect, 1.0 / 32.0);
    DirichletProblem pb;
    pb.geometric = false;
    pb.V = [](const Vec2&) { return 1.0; };
    pb.boundary = [](int, double, const Vec2& p) {
        return p.x() > 0.0 ? p.x() * std::log(p.x()) - p.x() : 0.0;
    };
    Field phi(g.node_count());
    for (int k = 0; k < g.node_count(); ++k) {
        const double x = g.node(k).x();
        phi[k] = x * std::log(x) - x;
    }

    const EdgeFrame frame = edge_frame(rect, 3);
    CHECK(frame.length() == doctest::Approx(0.5));
    CHECK((frame.to_frame(Vec2(0.3, 0.2)) - Vec2(0.3, 0.2)).norm() < 1e-12);

    const EdgeSamples s = edge_samples(g, phi, pb, frame, 0.25, 12, 0.1, 0.6);
    CHECK(s.edge == 3);
    CHECK(s.size() == 12);
    CHECK(s.asymptotic);
    for (int k = 0; k + 1 < s.size(); ++k)
        CHECK(s.u1[static_cast<size_t>(k + 1)] < s.u1[static_cast<size_t>(k)]);
    for (int k = 0; k < s.size(); ++k) {
        CAPTURE(k);
        const double expect = -std::log(s.u1[static_cast<size_t>(k)]);
        CHECK(s.y1[static_cast<size_t>(k)] == doctest::Approx(expect).epsilon(0.02));
        CHECK(std::abs(s.y2[static_cast<size_t>(k)]) < 1e-10);
    }

    const DecayFit fit = fit_decay_rate(s);
    CHECK(fit.samples == 12);
    CHECK(fit.lambda == doctest::Approx(1.0).epsilon(0.03));
    CHECK(std::abs(fit.intercept) < 0.05);
    CHECK(fit.r2 > 0.995);
}

TEST_CASE("bounded gradients are not flagged as asymptotic ends") {
    const Grid g = build_grid(unit_square(), 1.0 / 64.0);
    const DirichletProblem pb = make_quadratic_problem();
    const Field phi = fill(g, half_r2);
    const EdgeFrame frame = edge_frame(unit_square(), 3);
    const EdgeSamples s = edge_samples(g, phi, pb, frame, 0.5, 8);    // default window
    REQUIRE(s.size() >= 4);
    CHECK_FALSE(s.asymptotic);
    // outward-normal component of grad(|u|^2/2) along the left edge is -u1
    for (int k = 0; k < s.size(); ++k)
        CHECK(s.y1[static_cast<size_t>(k)] ==
              doctest::Approx(-s.u1[static_cast<size_t>(k)]).epsilon(1e-9));
}

TEST_CASE("edge sampling validates its window and resolution") {
    const Grid g = build_grid(unit_square(), 1.0 / 16.0);
    const Field phi = fill(g, half_r2);
    const DirichletProblem pb = make_quadratic_problem();
    const EdgeFrame frame = edge_frame(unit_square(), 3);
    CHECK_THROWS_AS(edge_samples(g, phi, pb, frame, 0.5, 3), PreconditionViolated);
    CHECK_THROWS_AS(edge_samples(g, phi, pb, frame, 0.05, 8), PreconditionViolated);
    CHECK_THROWS_AS(edge_samples(g, phi, pb, frame, 0.5, 8, 0.5, 0.2), PreconditionViolated);
    CHECK_THROWS_AS(edge_samples(g, phi, pb, frame, 0.5, 8, 1.2, 1.5), InsufficientResolution);
}

TEST_CASE("boundary proximity of quadratic data is exactly the normal remainder") {
    // phi(p + delta n) - phi(p) = delta (p . n) + delta^2/2; the edges through
    // the origin leave only the delta^2/2 term
    const Grid g = build_grid(unit_square(), 0.125);
    const double delta = 2.0 * g.h();
    const auto dev = boundary_affinity_check(g, fill(g, half_r2), make_quadratic_problem());
    REQUIRE(dev.size() == 4);
    CHECK(dev[0] == doctest::Approx(0.5 * delta * delta).epsilon(1e-10));
    CHECK(dev[3] == doctest::Approx(0.5 * delta * delta).epsilon(1e-10));
    CHECK(dev[1] == doctest::Approx(delta - 0.5 * delta * delta).epsilon(1e-10));
    CHECK(dev[2] == doctest::Approx(delta - 0.5 * delta * delta).epsilon(1e-10));
}

TEST_CASE("boundary proximity of affine data measures the normal slope") {
    const Grid g = build_grid(unit_square(), 0.125);
    const double delta = 2.0 * g.h();
    const BoundaryTrace trace(unit_square(), {3.0, -2.0, -3.0, 2.0});    // data of 3u1 - 2u2
    Field phi(g.node_count());
    for (int k = 0; k < g.node_count(); ++k)
        phi[k] = 3.0 * g.node(k).x() - 2.0 * g.node(k).y();
    const auto dev = boundary_affinity_check(g, phi, trace);
    REQUIRE(dev.size() == 4);
    CHECK(dev[0] == doctest::Approx(2.0 * delta).epsilon(1e-10));
    CHECK(dev[1] == doctest::Approx(3.0 * delta).epsilon(1e-10));
    CHECK(dev[2] == doctest::Approx(2.0 * delta).epsilon(1e-10));
    CHECK(dev[3] == doctest::Approx(3.0 * delta).epsilon(1e-10));
}

TEST_CASE("boundary proximity of the monopole solution shrinks with the spacing") {
    const GHParams params{monopole_triangle(), 0.5};
    const BoundaryTrace trace(params.polygon, {0.0, 0.0, 0.0});
    SolveParams sp;
    sp.tol = 1e-10;

    double prev_max = 0.0;
    for (const double h : {1.0 / 16.0, 1.0 / 32.0}) {
        const Grid g = build_grid(params.polygon, h);
        const auto [phi, rep] = solve(g, params, trace, sp);
        REQUIRE(rep.converged);

        const SLResiduals r = sl_residuals(g, phi, params);
        CHECK(r.det_nodes > 0);
        CHECK(r.trace_margin > 0.0);

        const auto dev = boundary_affinity_check(g, phi, trace);
        double cur_max = 0.0;
        for (double d : dev) {
            CHECK(std::isfinite(d));
            cur_max = std::max(cur_max, d);
        }
        if (prev_max > 0.0) {
            for (size_t i = 0; i < dev.size(); ++i) CHECK(dev[i] < prev_max);
            CHECK(prev_max / cur_max > 1.4);
        }
        prev_max = cur_max;
    }
}

TEST_CASE("mesh formats parse by name only") {
    CHECK(parse_mesh_format("vtk") == MeshFormat::Vtk);
    CHECK(parse_mesh_format("obj") == MeshFormat::Obj);
    CHECK(parse_mesh_format("csv") == MeshFormat::Csv);
    try {
        parse_mesh_format("stl");
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(std::string(e.what()).find("outputs.mesh_format") != std::string::npos);
    }
}

TEST_CASE("mesh exports round-trip bit-identically") {
    const Polygon small_square({{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}});
    const Grid g = build_grid(small_square, 0.1);
    const DirichletProblem pb = make_exp_problem();
    const GraphMesh mesh = build_graph_mesh(g, fill(g, exp_half_r2), pb);

    SUBCASE("vtk") {
        export_mesh(mesh, MeshFormat::Vtk, "rt_mesh.vtk");
        const GraphMesh back = read_mesh_vtk("rt_mesh.vtk");
        REQUIRE(back.node_count() == mesh.node_count());
        REQUIRE(back.triangle_count() == mesh.triangle_count());
        for (int k = 0; k < mesh.node_count(); ++k) {
            const auto i = static_cast<size_t>(k);
            CHECK(back.u[i] == mesh.u[i]);
            CHECK(back.y[i] == mesh.y[i]);
            CHECK(back.phi[i] == mesh.phi[i]);
        }
        for (size_t t = 0; t < mesh.triangles.size(); ++t)
            CHECK(back.triangles[t] == mesh.triangles[t]);
    }
    SUBCASE("csv") {
        export_mesh(mesh, MeshFormat::Csv, "rt_mesh.csv");
        const GraphMesh back = read_mesh_csv("rt_mesh.csv");
        REQUIRE(back.node_count() == mesh.node_count());
        CHECK(back.triangle_count() == 0);    // nodal rows only
        for (int k = 0; k < mesh.node_count(); ++k) {
            const auto i = static_cast<size_t>(k);
            CHECK(back.u[i] == mesh.u[i]);
            CHECK(back.y[i] == mesh.y[i]);
            CHECK(back.phi[i] == mesh.phi[i]);
        }
    }
    SUBCASE("obj is write-only but well-formed") {
        export_mesh(mesh, MeshFormat::Obj, "rt_mesh.obj");
        std::ifstream in("rt_mesh.obj");
        REQUIRE(in.good());
        std::string first;
        std::getline(in, first);
        CHECK(first.rfind("v ", 0) == 0);
    }
}

TEST_CASE("exports reject empty meshes and bad paths") {
    GraphMesh empty;
    CHECK_THROWS_AS(export_mesh(empty, MeshFormat::Vtk, "x.vtk"), EmptyMesh);
    CHECK_THROWS_AS(export_mesh(empty, MeshFormat::Csv, "x.csv"), EmptyMesh);

    GraphMesh nodes_only;
    nodes_only.u = {{0.0, 0.0}, {1.0, 0.0}};
    nodes_only.y = {{0.0, 0.0}, {1.0, 0.0}};
    nodes_only.phi = {0.0, 0.5};
    CHECK_THROWS_AS(export_mesh(nodes_only, MeshFormat::Vtk, "x.vtk"), EmptyMesh);
    CHECK_THROWS_AS(export_mesh(nodes_only, MeshFormat::Obj, "x.obj"), EmptyMesh);
    CHECK_NOTHROW(export_mesh(nodes_only, MeshFormat::Csv, "rt_nodes_only.csv"));

    CHECK_THROWS_AS(export_mesh(nodes_only, MeshFormat::Csv, "/no_such_dir_7f3a/x.csv"),
                    IoFailure);
    CHECK_THROWS_AS(read_mesh_vtk("no_such_file_7f3a.vtk"), IoFailure);
    CHECK_THROWS_AS(read_mesh_csv("no_such_file_7f3a.csv"), IoFailure);

    std::ofstream bad("rt_bad.vtk");
    bad << "not a mesh at all\n";
    bad.close();
    CHECK_THROWS_AS(read_mesh_vtk("rt_bad.vtk"), IoFailure);
    std::ofstream badcsv("rt_bad.csv");
    badcsv << "a,b,c\n";
    badcsv.close();
    CHECK_THROWS_AS(read_mesh_csv("rt_bad.csv"), IoFailure);
}

TEST_CASE("solution snapshots round-trip bit-identically") {
    const Grid g = build_grid(monopole_triangle(), 0.1);
    const Field phi = fill(g, exp_half_r2);
    write_solution_csv(g, phi, "rt_solution.csv");
    const SolutionCsv back = read_solution_csv("rt_solution.csv");
    REQUIRE(static_cast<int>(back.u.size()) == g.node_count());
    for (int k = 0; k < g.node_count(); ++k) {
        const auto i = static_cast<size_t>(k);
        CHECK(back.u[i] == g.node(k));
        CHECK(back.phi[i] == phi[k]);
    }

    Field wrong(g.node_count() + 1);
    CHECK_THROWS_AS(write_solution_csv(g, wrong, "x.csv"), GridMismatch);
}
