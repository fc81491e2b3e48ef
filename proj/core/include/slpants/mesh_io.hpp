#pragma once

#include <string>

#include "slpants/reconstruction.hpp"

namespace slpants {

enum class MeshFormat { Vtk, Obj, Csv };

// "vtk" | "obj" | "csv" -> MeshFormat; throws ConfigInvalid otherwise.
MeshFormat parse_mesh_format(const std::string& name);

// Writes the graph mesh. VTK: legacy ASCII POLYDATA, points (u1,u2,0) with
// phi as point scalars and (y1,y2,0) as point vectors. OBJ: vertices
// (u1,u2,phi) for height-map inspection, write-only. CSV: header
// u1,u2,y1,y2,phi, one row per node. All reals carry 17 significant digits,
// which round-trips doubles bit-identically. Throws EmptyMesh when there is
// nothing to write, IoFailure on filesystem trouble.
void export_mesh(const GraphMesh& mesh, MeshFormat format, const std::string& path);

// Readers for the two formats this artifact writes with full data.
GraphMesh read_mesh_vtk(const std::string& path);
GraphMesh read_mesh_csv(const std::string& path);

// Solution snapshot: header u1,u2,phi, one row per interior node in grid
// order, 17 significant digits.
void write_solution_csv(const Grid& grid, const Field& phi, const std::string& path);
// Returns the nodes and values; the caller matches them against its grid.
struct SolutionCsv {
    std::vector<Vec2> u;
    std::vector<double> phi;
};
SolutionCsv read_solution_csv(const std::string& path);

} // namespace slpants
