#pragma once

#include <string>
#include <vector>

#include "surfstokes/error_eval.hpp"

namespace surfstokes {

inline constexpr const char* kToolVersion = "0.1.0";

struct StudyConfig {
  std::string surface = "sphere";  // sphere | torus
  double radius = 1.0;             // sphere
  double major_radius = 2.0;       // torus
  double minor_radius = 0.5;       // torus
  int geom_degree = 2;
  int velocity_degree = 2;
  int level_begin = 1;
  int level_end = 4;
  std::string mms = "killing";             // killing | polynomial
  int penalty_exponent = 2;
  std::string penalty_normal = "improved";  // improved | discrete
  std::string solver = "direct";            // direct | minres
  double tol = 1e-10;
  bool spectra = false;
  std::string format = "json";  // json | csv
  std::string out_path;
  int threads = 0;
};

struct LevelRecord {
  int level = 0;
  double h = 0.0;
  int n_u = 0;
  int n_p = 0;
  double energy_error = 0.0;
  double pressure_l2 = 0.0;
  double velocity_l2 = 0.0;
  double schur_min = 0.0;
  double schur_max = 0.0;
  double a_cond_ratio = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  bool failed = false;
  std::string error;
};

struct EocTable {
  std::vector<double> energy_error;
  std::vector<double> pressure_l2;
  std::vector<double> velocity_l2;
};

struct ConvergenceReport {
  StudyConfig config;
  std::vector<LevelRecord> levels;
  EocTable eoc;
  std::string tool_version = kToolVersion;
};

/// Throws ConfigError on invalid combinations (m < 2, k > m with the
/// improved penalty normal, fewer than two levels, unknown names).
void validate_config(const StudyConfig& config);

AnalyticSurface surface_from_config(const StudyConfig& config);

/// Refinement sweep: per level build/refine the mesh, assemble, solve,
/// evaluate errors and optionally spectra. On a level failure the report is
/// truncated there with the failure recorded on that level.
ConvergenceReport run_study(const StudyConfig& config);

/// EOC_i = log(e_i/e_{i+1}) / log(h_i/h_{i+1}); requires equal lengths >= 2,
/// positive entries, strictly decreasing hs.
std::vector<double> compute_eoc(const std::vector<double>& errors,
                                const std::vector<double>& hs);

enum class ReportFormat { Json, Csv };

void emit_report(const ConvergenceReport& report, ReportFormat format,
                 const std::string& path);

/// Velocity-dof overhead of three ambient components over a planar
/// Taylor-Hood pair: (2m+3)/(1.5m+2).
double dof_overhead(int m);

}  // namespace surfstokes
