#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slpants/mesh_io.hpp"
#include "slpants/solver.hpp"

namespace slpants {

// One run, fully described: the polygon problem, grid, solver knobs, the
// asymptotics study, output paths, and the manufactured-problem hooks. Loaded
// from a flat TOML-style text file; every precondition of the modules a run
// will touch is checked at load time, and violations throw ConfigInvalid
// naming the offending key.
struct RunConfig {
    // [polygon]
    std::vector<Vec2> points;
    double A = 0.0;
    std::vector<double> c;                 // edge offsets; defaults to zeros

    // [grid]
    double h = 0.0;                        // required, positive
    int stencil_width = 3;

    // [solver]
    Scheme scheme = Scheme::MonotoneWideStencil;
    double tol = 1e-8;
    int max_iter = 400;
    double damping = 1.0;
    SolveParams::Init init = SolveParams::Init::AffineFromTrace;

    // [asymptotics]
    int mesh_m = 512;
    std::optional<std::pair<double, double>> fit_window;   // u1 range; defaults per edge
    double threshold = 0.10;
    int samples = 20;

    // [family]
    std::vector<std::vector<double>> family_members;       // c vectors, one per run

    // [outputs]
    MeshFormat mesh_format = MeshFormat::Vtk;
    std::string solution_csv = "solution.csv";
    std::string mesh_path;                 // empty: "mesh." + format extension
    std::string report = "report.json";

    // [hooks] — manufactured problems; both leave the run non-geometric
    std::optional<double> constant_V;
    std::optional<std::string> exact_boundary;   // "quadratic" | "exp_r2"

    bool geometric() const { return !constant_V && !exact_boundary; }
};

// Parses and validates; throws ConfigInvalid with the offending key named.
RunConfig parse_config_text(const std::string& text);
// Reads the file (IoFailure when unreadable) and parses it.
RunConfig load_config(const std::string& path);

// Canonical spellings used by the config format and the report echo.
std::string scheme_name(Scheme scheme);
std::string init_name(SolveParams::Init init);
std::string format_name(MeshFormat format);

} // namespace slpants
