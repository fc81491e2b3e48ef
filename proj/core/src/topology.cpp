#include "slpants/topology.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace slpants {

namespace {

std::string subscript(int k) {
    static const char* digits[10] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
    std::string out;
    for (char c : std::to_string(k))
        out += digits[c - '0'];
    return out;
}

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

} // namespace

Classification classify_total_space(const QuotientTopology& t) {
    if (t.g < 0 || t.b < 0 || t.n < 3)
        throw InvalidTopology("need g >= 0, b >= 0, n >= 3; got g=" + std::to_string(t.g) +
                              " b=" + std::to_string(t.b) + " n=" + std::to_string(t.n));
    Classification c;
    c.connected_sum = 2 * t.g + t.b;
    c.raymond_count = 2 * t.g + (1 + t.b) - 1;
    if (c.connected_sum == 0)
        c.descriptor = "S³ minus " + std::to_string(t.n) + " points";
    else
        c.descriptor = "#" + subscript(c.connected_sum) + "(S²×S¹) minus " +
                       std::to_string(t.n) + " points";
    return c;
}

QuotientTopology measure_quotient(const GraphMesh& mesh, int n_ends) {
    if (mesh.triangle_count() == 0) throw EmptyMesh("no triangles to measure");

    std::set<int> verts;
    std::unordered_map<uint64_t, int> edge_count;
    std::unordered_map<uint64_t, std::pair<int, int>> edge_tris;    // up to two incident triangles
    for (int tidx = 0; tidx < mesh.triangle_count(); ++tidx) {
        const auto& t = mesh.triangles[static_cast<size_t>(tidx)];
        for (int s = 0; s < 3; ++s) {
            verts.insert(t[static_cast<size_t>(s)]);
            const uint64_t key = edge_key(t[static_cast<size_t>(s)], t[static_cast<size_t>((s + 1) % 3)]);
            const int c = ++edge_count[key];
            if (c > 2) throw NonManifoldMesh("an edge carries more than two triangles");
            auto& et = edge_tris[key];
            (c == 1 ? et.first : et.second) = tidx;
        }
    }

    // connectivity of the surface through shared edges
    UnionFind uf(mesh.triangle_count());
    for (const auto& [key, c] : edge_count)
        if (c == 2) uf.unite(edge_tris[key].first, edge_tris[key].second);
    const int root = uf.find(0);
    for (int tidx = 1; tidx < mesh.triangle_count(); ++tidx)
        if (uf.find(tidx) != root) throw NonManifoldMesh("triangulated surface is disconnected");

    // a pinched vertex has a disconnected link: check the triangle fan around
    // every vertex is joined through edges at that vertex
    std::unordered_map<int, std::vector<int>> vert_tris;
    for (int tidx = 0; tidx < mesh.triangle_count(); ++tidx)
        for (int v : mesh.triangles[static_cast<size_t>(tidx)]) vert_tris[v].push_back(tidx);
    for (const auto& [v, tris] : vert_tris) {
        std::map<int, int> local;    // triangle -> local index
        for (size_t i = 0; i < tris.size(); ++i) local[tris[i]] = static_cast<int>(i);
        UnionFind fan(static_cast<int>(tris.size()));
        for (int tidx : tris) {
            const auto& t = mesh.triangles[static_cast<size_t>(tidx)];
            for (int s = 0; s < 3; ++s) {
                const int a = t[static_cast<size_t>(s)], b = t[static_cast<size_t>((s + 1) % 3)];
                if (a != v && b != v) continue;
                const auto& et = edge_tris[edge_key(a, b)];
                if (edge_count[edge_key(a, b)] == 2)
                    fan.unite(local[et.first], local[et.second]);
            }
        }
        const int fr = fan.find(0);
        for (size_t i = 1; i < tris.size(); ++i)
            if (fan.find(static_cast<int>(i)) != fr)
                throw NonManifoldMesh("vertex " + std::to_string(v) + " has a pinched link");
    }

    // boundary walk: vertices on the boundary must pair up exactly
    std::unordered_map<int, std::vector<int>> boundary_adj;
    for (const auto& [key, c] : edge_count) {
        if (c != 1) continue;
        const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
        boundary_adj[a].push_back(b);
        boundary_adj[b].push_back(a);
    }
    for (const auto& [v, adj] : boundary_adj)
        if (adj.size() != 2)
            throw NonManifoldMesh("boundary vertex " + std::to_string(v) +
                                  " does not lie on a single boundary path");
    int cycles = 0;
    std::set<int> seen;
    for (const auto& [start, adj] : boundary_adj) {
        if (seen.count(start)) continue;
        ++cycles;
        int prev = -1, cur = start;
        while (!seen.count(cur)) {
            seen.insert(cur);
            const auto& nb = boundary_adj[cur];
            const int nxt = nb[0] == prev ? nb[1] : nb[0];
            prev = cur;
            cur = nxt;
        }
    }

    const int V = static_cast<int>(verts.size());
    const int E = static_cast<int>(edge_count.size());
    const int F = mesh.triangle_count();

    QuotientTopology t;
    t.chi = V - E + F;
    t.boundary_cycles = cycles;
    t.n = n_ends;
    const int twice_g = 2 - t.chi - cycles;
    if (twice_g < 0 || twice_g % 2 != 0)
        throw NonManifoldMesh("Euler characteristic and boundary cycles are inconsistent");
    t.g = twice_g / 2;
    t.b = cycles - 1;
    return t;
}

} // namespace slpants
