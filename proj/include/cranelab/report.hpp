#pragma once

#include <complex>
#include <string>
#include <vector>

#include "cranelab/linalg.hpp"
#include "cranelab/ode.hpp"
#include "cranelab/scenario.hpp"

namespace cranelab {

// Writes "t,x1,x2,x3,x4,u,s1,s2,s3_or_S,status" plus one row per sample,
// numbers at 9 significant digits. Surface columns stay blank when the run
// recorded no surfaces (open-loop or plain state feedback); the control
// column stays blank when no controls were recorded. The file appears
// atomically (temp file + rename). Throws IoError on any filesystem failure.
void export_csv(const Trajectory& traj, const std::string& path);

enum class PlotLayout { FourPanel, SixPanel };

struct PlotBundle {
  std::vector<std::string> data_files;
  std::string script_file;
};

// One data file per subplot plus a gnuplot script referencing them, written
// under `dir` with the given stem. FourPanel: x, xdot, theta, thetadot.
// SixPanel adds the sub-surface pair and the aggregated surface (requires
// recorded surfaces). Empty trajectories are rejected with ConfigError.
PlotBundle emit_plot_data(const Trajectory& traj, PlotLayout layout,
                          const std::string& dir, const std::string& stem);

// Full corrected-design summary for desired characteristic coefficients
// (d1, d2, d3): solved surface parameters, the sliding-dynamics matrix, its
// eigenvalues, and the stability verdict of its characteristic polynomial.
struct DesignReport {
  SurfaceDesign design;
  Mat sliding_matrix;
  std::vector<std::complex<double>> eigenvalues;
  StabilityVerdict verdict = StabilityVerdict::Degenerate;
};

DesignReport design_report(const CraneParams& crane, double d1, double d2, double d3);

std::string to_text(const DesignReport& r);
std::string to_text(const MetricsReport& m);

}  // namespace cranelab
