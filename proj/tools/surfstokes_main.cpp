#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "surfstokes/solver.hpp"
#include "surfstokes/study.hpp"

namespace {

using namespace surfstokes;

// "a..b" inclusive level range
void parse_levels(const std::string& text, StudyConfig& config) {
  const auto pos = text.find("..");
  if (pos == std::string::npos)
    throw ConfigError("levels must be a range like 1..4");
  try {
    config.level_begin = std::stoi(text.substr(0, pos));
    config.level_end = std::stoi(text.substr(pos + 2));
  } catch (const std::exception&) {
    throw ConfigError("levels must be a range like 1..4");
  }
}

void print_summary(const ConvergenceReport& report) {
  std::printf(
      "%5s %10s %8s %8s %14s %14s %14s %6s\n", "level", "h", "n_u", "n_p",
      "energy_error", "pressure_l2", "velocity_l2", "iters");
  for (const auto& r : report.levels) {
    if (r.failed) {
      std::printf("%5d  FAILED: %s\n", r.level, r.error.c_str());
      continue;
    }
    std::printf("%5d %10.4e %8d %8d %14.6e %14.6e %14.6e %6d\n", r.level, r.h,
                r.n_u, r.n_p, r.energy_error, r.pressure_l2, r.velocity_l2,
                r.iterations);
  }
  if (!report.eoc.energy_error.empty()) {
    std::printf("eoc energy:  ");
    for (double v : report.eoc.energy_error) std::printf(" %6.3f", v);
    std::printf("\neoc pressure:");
    for (double v : report.eoc.pressure_l2) std::printf(" %6.3f", v);
    std::printf("\n");
  }
}

int run_study_command(const StudyConfig& config) {
  const ConvergenceReport report = run_study(config);
  if (!config.out_path.empty())
    emit_report(report,
                config.format == "json" ? ReportFormat::Json
                                        : ReportFormat::Csv,
                config.out_path);
  print_summary(report);
  for (const auto& r : report.levels)
    if (r.failed) return 1;
  return 0;
}

int run_mesh_export(const StudyConfig& config, int level,
                    const std::string& path) {
  const AnalyticSurface surface = surface_from_config(config);
  BaseMesh mesh = build_base_mesh(surface);
  for (int l = 0; l < level; ++l) mesh = refine(mesh, surface);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  write_off(mesh, out);
  const auto diag = validate(mesh, surface);
  std::printf("wrote %s: level %d, %d vertices, %d triangles, h_max %.4e, "
              "closed %d, oriented %d\n",
              path.c_str(), level, mesh.n_vertices(), mesh.n_triangles(),
              mesh.h_max, diag.closed, diag.oriented);
  return 0;
}

int run_assemble_export(const StudyConfig& config, int level,
                        const std::string& prefix) {
  const AnalyticSurface surface = surface_from_config(config);
  BaseMesh mesh = build_base_mesh(surface);
  for (int l = 0; l < level; ++l) mesh = refine(mesh, surface);
  AssemblyConfig asm_config;
  asm_config.geom_degree = config.geom_degree;
  asm_config.velocity_degree = config.velocity_degree;
  asm_config.penalty_normal = config.penalty_normal == "improved"
                                  ? PenaltyNormal::Improved
                                  : PenaltyNormal::Discrete;
  asm_config.penalty_exponent = config.penalty_exponent;
  const Discretization disc = build_discretization(mesh, surface, asm_config);
  const ManufacturedCase mms = make_case(surface, config.mms);
  const SaddleSystem system = assemble_system(disc, &mms);
  const std::pair<const char*, const SparseMat*> blocks[] = {
      {"A", &system.A}, {"B", &system.B}, {"Mu", &system.M_u},
      {"Mp", &system.M_p}};
  for (const auto& [name, matrix] : blocks) {
    const std::string path = prefix + name + ".mtx";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    write_matrix_market(*matrix, out);
    std::printf("wrote %s (%ld x %ld, %ld nnz)\n", path.c_str(),
                static_cast<long>(matrix->rows()),
                static_cast<long>(matrix->cols()),
                static_cast<long>(matrix->nonZeros()));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Taylor-Hood surface finite elements for the surface Stokes "
               "equation on closed analytic surfaces"};
  app.require_subcommand(1);

  StudyConfig config;
  std::string levels_text = "1..4";
  std::string spectra_text = "off";

  auto add_surface_options = [&](CLI::App* cmd) {
    cmd->add_option("--surface", config.surface, "sphere or torus");
    cmd->add_option("--radius", config.radius, "sphere radius");
    cmd->add_option("--major-radius", config.major_radius, "torus major radius");
    cmd->add_option("--minor-radius", config.minor_radius, "torus minor radius");
  };
  auto add_discretization_options = [&](CLI::App* cmd) {
    cmd->add_option("--geom-degree", config.geom_degree,
                    "geometry approximation degree k");
    cmd->add_option("--velocity-degree", config.velocity_degree,
                    "Taylor-Hood velocity degree m (pressure is m-1)");
    cmd->add_option("--mms", config.mms, "killing or polynomial");
    cmd->add_option("--penalty-exponent", config.penalty_exponent,
                    "eta = h^-exponent");
    cmd->add_option("--penalty-normal", config.penalty_normal,
                    "improved or discrete");
  };

  CLI::App* study = app.add_subcommand(
      "study", "refinement sweep with errors, orders and spectra");
  add_surface_options(study);
  add_discretization_options(study);
  study->add_option("--levels", levels_text, "inclusive range, e.g. 1..4");
  study->add_option("--solver", config.solver, "direct or minres");
  study->add_option("--tol", config.tol, "solver tolerance");
  study->add_option("--spectra", spectra_text, "on or off");
  study->add_option("--format", config.format, "json or csv");
  study->add_option("--out", config.out_path, "report path");

  int level = 2;
  std::string out_path = "mesh.off";
  CLI::App* mesh_cmd =
      app.add_subcommand("mesh-export", "write the base/refined mesh as OFF");
  add_surface_options(mesh_cmd);
  mesh_cmd->add_option("--level", level, "refinement level");
  mesh_cmd->add_option("--out", out_path, "OFF output path");

  std::string prefix = "system_";
  CLI::App* asm_cmd = app.add_subcommand(
      "assemble-export", "assemble one level and write A, B, Mu, Mp "
                         "in MatrixMarket format");
  add_surface_options(asm_cmd);
  add_discretization_options(asm_cmd);
  asm_cmd->add_option("--level", level, "refinement level");
  asm_cmd->add_option("--out-prefix", prefix, "output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (study->parsed()) {
      parse_levels(levels_text, config);
      if (spectra_text != "on" && spectra_text != "off")
        throw ConfigError("--spectra must be on or off");
      config.spectra = spectra_text == "on";
      validate_config(config);
      return run_study_command(config);
    }
    if (mesh_cmd->parsed()) return run_mesh_export(config, level, out_path);
    if (asm_cmd->parsed()) return run_assemble_export(config, level, prefix);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
