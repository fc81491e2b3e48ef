#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "slpants/config.hpp"
#include "slpants/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file")->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: current directory)");
    cmd->add_flag("--quiet", args.quiet, "suppress progress lines");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"construction and verification of the special Lagrangian pair of pants"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string format;

    CLI::App* solve = app.add_subcommand(
        "solve", "solve the Dirichlet problem; write solution CSV, mesh, and report");
    CLI::App* verify = app.add_subcommand(
        "verify", "recheck a stored solution against the configured thresholds");
    CLI::App* family = app.add_subcommand(
        "family", "solve a family of edge offsets and cross-check translation-related pairs");
    CLI::App* asymptotics = app.add_subcommand(
        "asymptotics", "compare fitted edge decay rates against the edge eigenvalue problem");
    CLI::App* classify =
        app.add_subcommand("classify", "solve and classify the total-space topology");
    CLI::App* export_cmd =
        app.add_subcommand("export", "solve and export the gradient-graph mesh");
    for (CLI::App* cmd : {solve, verify, family, asymptotics, classify, export_cmd})
        add_common(cmd, args);
    export_cmd->add_option("--format", format, "mesh format override: vtk|obj|csv");

    CLI11_PARSE(app, argc, argv);

    try {
        const slpants::RunConfig cfg = slpants::load_config(args.config_path);
        const slpants::RunOptions opt{args.out_dir, args.quiet};
        if (solve->parsed()) return slpants::cmd_solve(cfg, opt);
        if (verify->parsed()) return slpants::cmd_verify(cfg, opt);
        if (family->parsed()) return slpants::cmd_family(cfg, opt);
        if (asymptotics->parsed()) return slpants::cmd_asymptotics(cfg, opt);
        if (classify->parsed()) return slpants::cmd_classify(cfg, opt);
        if (export_cmd->parsed()) {
            std::optional<slpants::MeshFormat> fmt;
            if (!format.empty()) fmt = slpants::parse_mesh_format(format);
            return slpants::cmd_export(cfg, opt, fmt);
        }
    } catch (const slpants::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return slpants::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return slpants::kExitConfig;
    }
    return slpants::kExitConfig;
}
