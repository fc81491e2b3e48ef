#include <benchmark/benchmark.h>

#include <cmath>

#include "slpants/decay.hpp"
#include "slpants/reconstruction.hpp"
#include "slpants/solver.hpp"
#include "slpants/spectrum.hpp"

using namespace slpants;

namespace {

Polygon monopole_triangle() {
    const double s = std::sqrt(3.0) / 2.0;
    return Polygon({{1.0, 0.0}, {-0.5, s}, {-0.5, -s}});
}

// The inner loop of every Newton iteration: one full residual evaluation.
void bm_residual(benchmark::State& state) {
    const Polygon poly = monopole_triangle();
    const GHParams gh{poly, 0.0};
    const BoundaryTrace trace(poly, {0.0, 0.0, 0.0});
    const DirichletProblem pb = make_gh_problem(gh, trace);
    const Grid grid = build_grid(poly, 1.0 / static_cast<double>(state.range(0)));
    SolveParams sp;
    auto [phi, report] = solve(grid, pb, sp);
    for (auto _ : state) {
        Field r = ma_residual(grid, phi, pb, Scheme::MonotoneWideStencil);
        benchmark::DoNotOptimize(r.v.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.node_count());
}

// A complete cold solve at moderate resolution.
void bm_solve(benchmark::State& state) {
    const Polygon poly = monopole_triangle();
    const GHParams gh{poly, 0.0};
    const BoundaryTrace trace(poly, {0.0, 0.0, 0.0});
    const DirichletProblem pb = make_gh_problem(gh, trace);
    const Grid grid = build_grid(poly, 1.0 / static_cast<double>(state.range(0)));
    SolveParams sp;
    for (auto _ : state) {
        auto [phi, report] = solve(grid, pb, sp);
        benchmark::DoNotOptimize(phi.v.data());
    }
}

// The edge eigenvalue problem at production mesh size.
void bm_edge_eigen(benchmark::State& state) {
    const Polygon poly = monopole_triangle();
    const GHParams gh{poly, 0.0};
    for (auto _ : state) {
        EdgeSpectrum spectrum = edge_eigen(gh, 0, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(spectrum.lambda);
    }
}

// Gradient reconstruction and mesh assembly over the solved field.
void bm_graph_mesh(benchmark::State& state) {
    const Polygon poly = monopole_triangle();
    const GHParams gh{poly, 0.0};
    const BoundaryTrace trace(poly, {0.0, 0.0, 0.0});
    const DirichletProblem pb = make_gh_problem(gh, trace);
    const Grid grid = build_grid(poly, 1.0 / static_cast<double>(state.range(0)));
    SolveParams sp;
    auto [phi, report] = solve(grid, pb, sp);
    for (auto _ : state) {
        GraphMesh mesh = build_graph_mesh(grid, phi, pb);
        benchmark::DoNotOptimize(mesh.u.data());
    }
}

} // namespace

BENCHMARK(bm_residual)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_solve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_edge_eigen)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_graph_mesh)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
