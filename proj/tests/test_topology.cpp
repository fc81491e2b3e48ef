#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "slpants/errors.hpp"
#include "slpants/grid.hpp"
#include "slpants/reconstruction.hpp"
#include "slpants/topology.hpp"
#include "support.hpp"

using namespace slpants;

namespace {

GraphMesh mesh_of(std::vector<std::array<int, 3>> triangles) {
    GraphMesh m;
    m.triangles = std::move(triangles);
    return m;
}

} // namespace

TEST_CASE("classification descriptors follow the connected-sum count") {
    QuotientTopology t;
    t.g = 0;
    t.b = 0;
    t.n = 3;
    Classification c = classify_total_space(t);
    CHECK(c.descriptor == "S³ minus 3 points");
    CHECK(c.connected_sum == 0);
    CHECK(c.raymond_count == 0);

    t.g = 1;
    c = classify_total_space(t);
    CHECK(c.descriptor == "#₂(S²×S¹) minus 3 points");
    CHECK(c.connected_sum == 2);
    CHECK(c.raymond_count == 2);

    t.g = 0;
    t.b = 2;
    t.n = 4;
    c = classify_total_space(t);
    CHECK(c.descriptor == "#₂(S²×S¹) minus 4 points");
    CHECK(c.connected_sum == 2);

    t.b = 1;
    c = classify_total_space(t);
    CHECK(c.descriptor == "#₁(S²×S¹) minus 4 points");

    t.g = 2;
    t.b = 3;
    t.n = 5;
    c = classify_total_space(t);
    CHECK(c.descriptor == "#₇(S²×S¹) minus 5 points");

    // two-digit subscripts render digit by digit
    t.g = 5;
    t.b = 2;
    t.n = 12;
    c = classify_total_space(t);
    CHECK(c.descriptor == "#₁₂(S²×S¹) minus 12 points");
    CHECK(c.connected_sum == 12);
}

TEST_CASE("the handle count of the circle fibration matches the connected sum") {
    for (int g = 0; g <= 5; ++g) {
        for (int b = 0; b <= 5; ++b) {
            CAPTURE(g);
            CAPTURE(b);
            QuotientTopology t;
            t.g = g;
            t.b = b;
            t.n = 3;
            const Classification c = classify_total_space(t);
            CHECK(c.raymond_count == c.connected_sum);
            CHECK(c.connected_sum == 2 * g + b);
        }
    }
}

TEST_CASE("classification rejects invalid quotient data") {
    QuotientTopology t;
    t.g = -1;
    CHECK_THROWS_AS(classify_total_space(t), InvalidTopology);
    t.g = 0;
    t.b = -1;
    CHECK_THROWS_AS(classify_total_space(t), InvalidTopology);
    t.b = 0;
    t.n = 2;
    CHECK_THROWS_AS(classify_total_space(t), InvalidTopology);
    CHECK_THROWS_WITH_AS(classify_total_space(t),
                         "need g >= 0, b >= 0, n >= 3; got g=0 b=0 n=2", InvalidTopology);
}

TEST_CASE("a single triangle is a disk") {
    const GraphMesh m = mesh_of({{{0, 1, 2}}});
    const QuotientTopology t = measure_quotient(m, 3);
    CHECK(t.chi == 1);
    CHECK(t.boundary_cycles == 1);
    CHECK(t.g == 0);
    CHECK(t.b == 0);
    CHECK(t.n == 3);
}

TEST_CASE("two triangles across a diagonal are still a disk") {
    const GraphMesh m = mesh_of({{{0, 1, 2}}, {{0, 2, 3}}});
    const QuotientTopology t = measure_quotient(m, 4);
    CHECK(t.chi == 1);         // V=4, E=5, F=2
    CHECK(t.boundary_cycles == 1);
    CHECK(t.g == 0);
    CHECK(t.b == 0);
    CHECK(t.n == 4);
}

TEST_CASE("a triangulated ring has a second boundary cycle") {
    // outer square 0..3, inner square 4..7, eight strip triangles
    const GraphMesh m = mesh_of({{{0, 1, 5}},
                                 {{0, 5, 4}},
                                 {{1, 2, 6}},
                                 {{1, 6, 5}},
                                 {{2, 3, 7}},
                                 {{2, 7, 6}},
                                 {{3, 0, 4}},
                                 {{3, 4, 7}}});
    const QuotientTopology t = measure_quotient(m, 4);
    CHECK(t.chi == 0);         // V=8, E=16, F=8
    CHECK(t.boundary_cycles == 2);
    CHECK(t.g == 0);
    CHECK(t.b == 1);

    const Classification c = classify_total_space(t);
    CHECK(c.descriptor == "#₁(S²×S¹) minus 4 points");
    CHECK(c.connected_sum == 1);
}

TEST_CASE("a closed surface leaves no boundary cycle for the ends") {
    // two triangles glued along all three edges: a sphere, chi = 2
    const GraphMesh m = mesh_of({{{0, 1, 2}}, {{2, 1, 0}}});
    const QuotientTopology t = measure_quotient(m, 3);
    CHECK(t.chi == 2);
    CHECK(t.boundary_cycles == 0);
    CHECK(t.g == 0);
    CHECK(t.b == -1);
    // ... which the classifier rejects: the quotient of a graph cannot close up
    CHECK_THROWS_AS(classify_total_space(t), InvalidTopology);
}

TEST_CASE("non-manifold meshes are rejected with the failing feature named") {
    // triple edge
    CHECK_THROWS_WITH_AS(
        measure_quotient(mesh_of({{{0, 1, 2}}, {{0, 1, 3}}, {{0, 1, 4}}}), 3),
        "an edge carries more than two triangles", NonManifoldMesh);

    // two components
    CHECK_THROWS_WITH_AS(measure_quotient(mesh_of({{{0, 1, 2}}, {{3, 4, 5}}}), 3),
                         "triangulated surface is disconnected", NonManifoldMesh);

    // two fans meeting only at vertex 0, edge-connected through a bridge of
    // triangles that avoids 0: the link of 0 falls apart
    CHECK_THROWS_WITH_AS(measure_quotient(mesh_of({{{0, 1, 2}},
                                                   {{0, 2, 3}},
                                                   {{0, 4, 5}},
                                                   {{0, 5, 6}},
                                                   {{2, 3, 8}},
                                                   {{3, 8, 4}},
                                                   {{8, 4, 5}}}),
                                          3),
                         "vertex 0 has a pinched link", NonManifoldMesh);

    // Moebius band: chi = 0 with a single boundary cycle, so 2 - chi - cycles
    // is odd — no orientable quotient surface produces it
    CHECK_THROWS_WITH_AS(
        measure_quotient(
            mesh_of({{{0, 1, 2}}, {{1, 2, 3}}, {{2, 3, 4}}, {{3, 4, 0}}, {{4, 0, 1}}}), 3),
        "Euler characteristic and boundary cycles are inconsistent", NonManifoldMesh);

    CHECK_THROWS_AS(measure_quotient(GraphMesh{}, 3), EmptyMesh);
}

TEST_CASE("the graph mesh over the polygon interior is a disk") {
    const Grid g = build_grid(monopole_triangle(), 1.0 / 8.0);
    Field phi(g.node_count());
    for (int k = 0; k < g.node_count(); ++k) phi[k] = 0.5 * g.node(k).squaredNorm();
    const GraphMesh mesh = build_graph_mesh(g, phi, make_quadratic_problem());

    const QuotientTopology t = measure_quotient(mesh, 3);
    CHECK(t.chi == 1);
    CHECK(t.boundary_cycles == 1);
    CHECK(t.g == 0);
    CHECK(t.b == 0);

    const Classification c = classify_total_space(t);
    CHECK(c.descriptor == "S³ minus 3 points");
    CHECK(c.connected_sum == 0);
    CHECK(c.raymond_count == 0);
}
