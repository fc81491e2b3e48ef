#include "slpants/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace slpants {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open for writing: " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoFailure("write failed: " + path);
}

void write_vtk(const GraphMesh& m, const std::string& path) {
    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\n"
        << "gradient graph over the polygon interior\n"
        << "ASCII\n"
        << "DATASET POLYDATA\n"
        << "POINTS " << m.node_count() << " double\n";
    for (const Vec2& u : m.u) out << fmt(u.x()) << ' ' << fmt(u.y()) << " 0\n";
    out << "POLYGONS " << m.triangle_count() << ' ' << 4 * m.triangle_count() << '\n';
    for (const auto& t : m.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "POINT_DATA " << m.node_count() << '\n'
        << "SCALARS phi double 1\n"
        << "LOOKUP_TABLE default\n";
    for (double p : m.phi) out << fmt(p) << '\n';
    out << "VECTORS gradient double\n";
    for (const Vec2& y : m.y) out << fmt(y.x()) << ' ' << fmt(y.y()) << " 0\n";
    finish(out, path);
}

void write_obj(const GraphMesh& m, const std::string& path) {
    auto out = open_out(path);
    for (int k = 0; k < m.node_count(); ++k)
        out << "v " << fmt(m.u[static_cast<size_t>(k)].x()) << ' '
            << fmt(m.u[static_cast<size_t>(k)].y()) << ' '
            << fmt(m.phi[static_cast<size_t>(k)]) << '\n';
    for (const auto& t : m.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    finish(out, path);
}

void write_csv(const GraphMesh& m, const std::string& path) {
    auto out = open_out(path);
    out << "u1,u2,y1,y2,phi\n";
    for (int k = 0; k < m.node_count(); ++k) {
        const auto i = static_cast<size_t>(k);
        out << fmt(m.u[i].x()) << ',' << fmt(m.u[i].y()) << ',' << fmt(m.y[i].x()) << ','
            << fmt(m.y[i].y()) << ',' << fmt(m.phi[i]) << '\n';
    }
    finish(out, path);
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open for reading: " + path);
    return in;
}

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
    throw IoFailure("malformed " + path + ": " + what);
}

} // namespace

MeshFormat parse_mesh_format(const std::string& name) {
    if (name == "vtk") return MeshFormat::Vtk;
    if (name == "obj") return MeshFormat::Obj;
    if (name == "csv") return MeshFormat::Csv;
    throw ConfigInvalid("outputs.mesh_format: expected vtk, obj, or csv, got \"" + name + "\"");
}

void export_mesh(const GraphMesh& mesh, MeshFormat format, const std::string& path) {
    if (mesh.node_count() == 0) throw EmptyMesh("mesh has no nodes");
    if (format != MeshFormat::Csv && mesh.triangle_count() == 0)
        throw EmptyMesh("mesh has no triangles");
    switch (format) {
    case MeshFormat::Vtk: write_vtk(mesh, path); break;
    case MeshFormat::Obj: write_obj(mesh, path); break;
    case MeshFormat::Csv: write_csv(mesh, path); break;
    }
}

GraphMesh read_mesh_vtk(const std::string& path) {
    auto in = open_in(path);
    std::string line, word;
    std::getline(in, line);
    if (line.rfind("# vtk DataFile", 0) != 0) malformed(path, "missing VTK header");
    std::getline(in, line);                       // title
    in >> word;                                   // ASCII
    in >> word >> word;                           // DATASET POLYDATA

    GraphMesh m;
    int n = 0;
    in >> word >> n >> word;                      // POINTS n double
    if (word != "double" || n < 0) malformed(path, "POINTS record");
    m.u.resize(static_cast<size_t>(n));
    for (auto& u : m.u) {
        double z;
        in >> u.x() >> u.y() >> z;
    }
    int ntri = 0, total = 0;
    in >> word >> ntri >> total;                  // POLYGONS m 4m
    if (word != "POLYGONS" || total != 4 * ntri) malformed(path, "POLYGONS record");
    m.triangles.resize(static_cast<size_t>(ntri));
    for (auto& t : m.triangles) {
        int c;
        in >> c >> t[0] >> t[1] >> t[2];
        if (c != 3) malformed(path, "non-triangle polygon");
    }
    m.quality.assign(static_cast<size_t>(ntri), 1);
    int npd = 0;
    in >> word >> npd;                            // POINT_DATA n
    if (word != "POINT_DATA" || npd != n) malformed(path, "POINT_DATA record");
    in >> word >> word >> word >> word;           // SCALARS phi double 1
    in >> word >> word;                           // LOOKUP_TABLE default
    m.phi.resize(static_cast<size_t>(n));
    for (double& p : m.phi) in >> p;
    in >> word >> word >> word;                   // VECTORS gradient double
    m.y.resize(static_cast<size_t>(n));
    for (auto& y : m.y) {
        double z;
        in >> y.x() >> y.y() >> z;
    }
    if (!in) malformed(path, "truncated file");
    return m;
}

GraphMesh read_mesh_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != "u1,u2,y1,y2,phi") malformed(path, "CSV header");
    GraphMesh m;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double v[5];
        char comma;
        row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4];
        if (!row) malformed(path, "CSV row \"" + line + "\"");
        m.u.emplace_back(v[0], v[1]);
        m.y.emplace_back(v[2], v[3]);
        m.phi.push_back(v[4]);
    }
    return m;
}

void write_solution_csv(const Grid& grid, const Field& phi, const std::string& path) {
    if (phi.size() != grid.node_count()) throw GridMismatch("field size does not match the grid");
    auto out = open_out(path);
    out << "u1,u2,phi\n";
    for (int k = 0; k < grid.node_count(); ++k)
        out << fmt(grid.node(k).x()) << ',' << fmt(grid.node(k).y()) << ',' << fmt(phi[k]) << '\n';
    finish(out, path);
}

SolutionCsv read_solution_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != "u1,u2,phi") malformed(path, "CSV header");
    SolutionCsv s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double v[3];
        char comma;
        row >> v[0] >> comma >> v[1] >> comma >> v[2];
        if (!row) malformed(path, "CSV row \"" + line + "\"");
        s.u.emplace_back(v[0], v[1]);
        s.phi.push_back(v[2]);
    }
    return s;
}

} // namespace slpants
