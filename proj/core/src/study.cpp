#include "surfstokes/study.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace surfstokes {

void validate_config(const StudyConfig& config) {
  if (config.surface != "sphere" && config.surface != "torus")
    throw ConfigError("surface must be sphere or torus");
  if (config.velocity_degree < 2)
    throw ConfigError("Taylor-Hood requires velocity degree >= 2");
  if (config.velocity_degree > 4)
    throw ConfigError("velocity degree is limited to 4");
  if (config.geom_degree < 1)
    throw ConfigError("geometry degree must be >= 1");
  if (config.penalty_normal != "improved" && config.penalty_normal != "discrete")
    throw ConfigError("penalty normal must be improved or discrete");
  if (config.penalty_normal == "improved" &&
      config.geom_degree > config.velocity_degree)
    throw ConfigError("the improved penalty normal requires k <= m");
  if (config.level_begin < 0 || config.level_end < config.level_begin)
    throw ConfigError("invalid level range");
  if (config.level_end - config.level_begin + 1 < 2)
    throw ConfigError("a study needs at least two levels for EOCs");
  if (config.mms != "killing" && config.mms != "polynomial")
    throw ConfigError("mms case must be killing or polynomial");
  if (config.solver != "direct" && config.solver != "minres")
    throw ConfigError("solver must be direct or minres");
  if (config.format != "json" && config.format != "csv")
    throw ConfigError("format must be json or csv");
  if (config.penalty_exponent < 1 || config.penalty_exponent > 2)
    throw ConfigError("penalty exponent must be 1 or 2");
  if (!(config.tol > 0.0)) throw ConfigError("tolerance must be positive");
}

AnalyticSurface surface_from_config(const StudyConfig& config) {
  return config.surface == "sphere"
             ? AnalyticSurface::sphere(config.radius)
             : AnalyticSurface::torus(config.major_radius,
                                      config.minor_radius);
}

ConvergenceReport run_study(const StudyConfig& config) {
  validate_config(config);
  ConvergenceReport report;
  report.config = config;

  const AnalyticSurface surface = surface_from_config(config);
  const ManufacturedCase mms = make_case(surface, config.mms);

  AssemblyConfig asm_config;
  asm_config.geom_degree = config.geom_degree;
  asm_config.velocity_degree = config.velocity_degree;
  asm_config.penalty_normal = config.penalty_normal == "improved"
                                  ? PenaltyNormal::Improved
                                  : PenaltyNormal::Discrete;
  asm_config.penalty_exponent = config.penalty_exponent;
  asm_config.threads = config.threads;

  BaseMesh mesh = build_base_mesh(surface);
  for (int level = 0; level < config.level_begin; ++level)
    mesh = refine(mesh, surface);

  for (int level = config.level_begin; level <= config.level_end; ++level) {
    if (level > config.level_begin) mesh = refine(mesh, surface);
    LevelRecord record;
    record.level = level;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    record.schur_min = record.schur_max = record.a_cond_ratio = nan;
    try {
      const Discretization disc =
          build_discretization(mesh, surface, asm_config);
      const SaddleSystem system = assemble_system(disc, &mms);
      SolveResult solution;
      if (config.solver == "direct") {
        solution = solve_direct(system);
      } else {
        MinresOptions options;
        options.tol = config.tol;
        solution = solve_minres(system, options);
      }
      const ErrorReport errors = eval_errors(solution, mms, disc);
      record.h = disc.h;
      record.n_u = disc.n_u();
      record.n_p = disc.n_p();
      record.energy_error = errors.energy_error;
      record.pressure_l2 = errors.pressure_l2;
      record.velocity_l2 = errors.velocity_l2;
      record.iterations = solution.iterations;
      record.wall_time_s = solution.wall_time_s;
      if (config.spectra) {
        const SpectrumEstimate schur = schur_spectrum(system);
        record.schur_min = schur.min;
        record.schur_max = schur.max;
        const SpectrumEstimate acond = a_condition(system);
        record.a_cond_ratio = acond.max / acond.min;
      }
    } catch (const Error& e) {
      record.failed = true;
      record.error = e.what();
      report.levels.push_back(record);
      break;  // the report is partial from here on
    }
    report.levels.push_back(record);
  }

  std::vector<double> hs, energy, pressure, velocity;
  for (const auto& r : report.levels) {
    if (r.failed) break;
    hs.push_back(r.h);
    energy.push_back(r.energy_error);
    pressure.push_back(r.pressure_l2);
    velocity.push_back(r.velocity_l2);
  }
  if (hs.size() >= 2) {
    report.eoc.energy_error = compute_eoc(energy, hs);
    report.eoc.pressure_l2 = compute_eoc(pressure, hs);
    report.eoc.velocity_l2 = compute_eoc(velocity, hs);
  }
  return report;
}

std::vector<double> compute_eoc(const std::vector<double>& errors,
                                const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw InvalidSequence("EOC needs matching sequences of length >= 2");
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0))
      throw InvalidSequence("EOC needs strictly positive errors");
    if (!(hs[i] > 0.0) || (i > 0 && hs[i] >= hs[i - 1]))
      throw InvalidSequence("EOC needs strictly decreasing positive hs");
  }
  std::vector<double> eoc(errors.size() - 1);
  for (size_t i = 0; i + 1 < errors.size(); ++i)
    eoc[i] = std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]);
  return eoc;
}

namespace {

nlohmann::json config_to_json(const StudyConfig& c) {
  return nlohmann::json{{"surface", c.surface},
                        {"radius", c.radius},
                        {"major_radius", c.major_radius},
                        {"minor_radius", c.minor_radius},
                        {"geom_degree", c.geom_degree},
                        {"velocity_degree", c.velocity_degree},
                        {"level_begin", c.level_begin},
                        {"level_end", c.level_end},
                        {"mms", c.mms},
                        {"penalty_exponent", c.penalty_exponent},
                        {"penalty_normal", c.penalty_normal},
                        {"solver", c.solver},
                        {"tol", c.tol},
                        {"spectra", c.spectra}};
}

nlohmann::json level_to_json(const LevelRecord& r) {
  nlohmann::json j{{"level", r.level},
                   {"h", r.h},
                   {"n_u", r.n_u},
                   {"n_p", r.n_p},
                   {"energy_error", r.energy_error},
                   {"pressure_l2", r.pressure_l2},
                   {"velocity_l2", r.velocity_l2},
                   {"iterations", r.iterations},
                   {"wall_time_s", r.wall_time_s}};
  auto set_or_null = [&](const char* key, double v) {
    if (std::isnan(v))
      j[key] = nullptr;
    else
      j[key] = v;
  };
  set_or_null("schur_min", r.schur_min);
  set_or_null("schur_max", r.schur_max);
  set_or_null("a_cond_ratio", r.a_cond_ratio);
  if (r.failed) {
    j["failed"] = true;
    j["error"] = r.error;
  }
  return j;
}

void write_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "level,h,n_u,n_p,energy_error,pressure_l2,velocity_l2,schur_min,"
         "schur_max,a_cond_ratio,iterations,wall_time_s\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : report.levels) {
    out << r.level << ',' << num(r.h) << ',' << r.n_u << ',' << r.n_p << ','
        << num(r.energy_error) << ',' << num(r.pressure_l2) << ','
        << num(r.velocity_l2) << ',' << num(r.schur_min) << ','
        << num(r.schur_max) << ',' << num(r.a_cond_ratio) << ','
        << r.iterations << ',' << num(r.wall_time_s) << '\n';
  }
}

}  // namespace

void emit_report(const ConvergenceReport& report, ReportFormat format,
                 const std::string& path) {
  if (report.levels.empty())
    throw InvalidSequence("refusing to emit a report without levels");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open report path: " + path);
  if (format == ReportFormat::Json) {
    nlohmann::json j;
    j["config"] = config_to_json(report.config);
    j["tool_version"] = report.tool_version;
    j["levels"] = nlohmann::json::array();
    for (const auto& r : report.levels) j["levels"].push_back(level_to_json(r));
    j["eoc"] = {{"energy_error", report.eoc.energy_error},
                {"pressure_l2", report.eoc.pressure_l2},
                {"velocity_l2", report.eoc.velocity_l2}};
    out << j.dump(2) << '\n';
  } else {
    write_csv(report, out);
  }
  if (!out) throw IoError("failed while writing report: " + path);
}

double dof_overhead(int m) {
  if (m < 2) throw ConfigError("Taylor-Hood requires m >= 2");
  return (2.0 * m + 3.0) / (1.5 * m + 2.0);
}

}  // namespace surfstokes
