#include "cranelab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cranelab/errors.hpp"

namespace cranelab {
namespace {

namespace fs = std::filesystem;

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_complex(const std::complex<double>& z) {
  if (z.imag() == 0.0) return fmt9(z.real());
  std::ostringstream out;
  out << fmt9(z.real()) << (z.imag() < 0.0 ? "-" : "+") << fmt9(std::abs(z.imag()))
      << "i";
  return out.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec && !fs::is_directory(path.parent_path()))
      throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
}

void require_four_state(const Trajectory& traj, const char* what) {
  for (const auto& st : traj.states) {
    if (st.size() != 4)
      throw ConfigError(std::string(what) + " expects 4-component states");
  }
}

}  // namespace

void export_csv(const Trajectory& traj, const std::string& path) {
  require_four_state(traj, "export_csv");
  const bool with_u = traj.controls.size() == traj.size() && !traj.empty();
  const bool with_s = traj.surfaces.size() == traj.size() && !traj.empty();
  const char* status = to_string(traj.status);

  std::ostringstream out;
  out << "t,x1,x2,x3,x4,u,s1,s2,s3_or_S,status\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& st = traj.states[i];
    out << fmt9(traj.times[i]) << ',' << fmt9(st[0]) << ',' << fmt9(st[1]) << ','
        << fmt9(st[2]) << ',' << fmt9(st[3]) << ',';
    if (with_u) out << fmt9(traj.controls[i]);
    out << ',';
    if (with_s)
      out << fmt9(traj.surfaces[i].s1) << ',' << fmt9(traj.surfaces[i].s2) << ','
          << fmt9(traj.surfaces[i].s_top);
    else
      out << ",,";
    out << ',' << status << '\n';
  }
  write_atomic(path, out.str());
}

PlotBundle emit_plot_data(const Trajectory& traj, PlotLayout layout,
                          const std::string& dir, const std::string& stem) {
  if (traj.empty()) throw ConfigError("cannot emit plot data for an empty trajectory");
  require_four_state(traj, "emit_plot_data");
  if (layout == PlotLayout::SixPanel && traj.surfaces.size() != traj.size())
    throw ConfigError("six-panel layout needs recorded surface values");

  struct Panel {
    std::string suffix;
    std::string title;
    std::vector<std::string> columns;  // header names; data appended per sample
  };
  std::vector<Panel> panels = {
      {"x", "cart position x", {"x1"}},
      {"xdot", "cart velocity xdot", {"x2"}},
      {"theta", "swing angle theta", {"x3"}},
      {"thetadot", "swing rate thetadot", {"x4"}},
  };
  if (layout == PlotLayout::SixPanel) {
    panels.push_back({"s1s2", "sub-surfaces s1, s2", {"s1", "s2"}});
    panels.push_back({"S", "aggregated surface", {"S"}});
  }

  auto sample_value = [&](const std::string& col, std::size_t i) -> double {
    if (col == "x1") return traj.states[i][0];
    if (col == "x2") return traj.states[i][1];
    if (col == "x3") return traj.states[i][2];
    if (col == "x4") return traj.states[i][3];
    if (col == "s1") return traj.surfaces[i].s1;
    if (col == "s2") return traj.surfaces[i].s2;
    return traj.surfaces[i].s_top;  // "S"
  };

  const fs::path base = fs::path(dir);
  PlotBundle bundle;
  for (const auto& panel : panels) {
    std::ostringstream data;
    data << "# t";
    for (const auto& c : panel.columns) data << ' ' << c;
    data << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
      data << fmt9(traj.times[i]);
      for (const auto& c : panel.columns) data << ' ' << fmt9(sample_value(c, i));
      data << '\n';
    }
    const fs::path file = base / (stem + "_" + panel.suffix + ".dat");
    write_atomic(file, data.str());
    bundle.data_files.push_back(file.string());
  }

  std::ostringstream script;
  const int rows = (layout == PlotLayout::SixPanel) ? 3 : 2;
  script << "# gnuplot script: render with `gnuplot " << stem << ".gp`\n"
         << "set terminal pngcairo size 1000," << rows * 350 << "\n"
         << "set output '" << stem << ".png'\n"
         << "set multiplot layout " << rows << ",2\n"
         << "set grid\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    script << "set title '" << panels[p].title << "'\n";
    script << "plot";
    for (std::size_t c = 0; c < panels[p].columns.size(); ++c) {
      if (c > 0) script << ',';
      script << " '" << fs::path(bundle.data_files[p]).filename().string() << "' using 1:"
             << c + 2 << " with lines title '" << panels[p].columns[c] << "'";
    }
    script << '\n';
  }
  script << "unset multiplot\n";
  const fs::path script_path = base / (stem + ".gp");
  write_atomic(script_path, script.str());
  bundle.script_file = script_path.string();
  return bundle;
}

DesignReport design_report(const CraneParams& crane, double d1, double d2, double d3) {
  DesignReport r;
  const auto lc = crane_linearization_constants(crane);
  r.design = solve_surface_params(lc, d1, d2, d3);
  r.sliding_matrix = sliding_linearization(lc, r.design.c1, r.design.c2, r.design.alpha1);
  r.eigenvalues = eigenvalues(r.sliding_matrix);
  r.verdict = hurwitz_check(char_poly(r.sliding_matrix));
  return r;
}

std::string to_text(const DesignReport& r) {
  std::ostringstream out;
  out << "desired characteristic coefficients: d1=" << fmt9(r.design.d1)
      << " d2=" << fmt9(r.design.d2) << " d3=" << fmt9(r.design.d3) << '\n'
      << "solved surface parameters: c1=" << fmt9(r.design.c1)
      << " c2=" << fmt9(r.design.c2) << " alpha1=" << fmt9(r.design.alpha1)
      << " (alpha2=1)\n"
      << "round-trip residual: " << fmt9(r.design.roundtrip_residual) << '\n'
      << "sliding-dynamics matrix:\n";
  for (int i = 0; i < r.sliding_matrix.rows(); ++i) {
    out << " ";
    for (int j = 0; j < r.sliding_matrix.cols(); ++j)
      out << ' ' << fmt9(r.sliding_matrix(i, j));
    out << '\n';
  }
  out << "eigenvalues:";
  for (const auto& z : r.eigenvalues) out << ' ' << fmt_complex(z);
  out << '\n' << "verdict: " << to_string(r.verdict) << '\n';
  return out.str();
}

std::string to_text(const MetricsReport& m) {
  std::ostringstream out;
  auto line = [&](const char* name, const std::optional<double>& v) {
    if (v) out << name << " = " << fmt9(*v) << '\n';
  };
  line("final_error", m.final_error);
  line("s1_settle_time", m.s1_settle_time);
  line("swing_amplitude_tail", m.swing_amplitude_tail);
  line("swing_nondecay_ratio", m.swing_nondecay_ratio);
  line("divergence_time", m.divergence_time);
  line("energy_drift", m.energy_drift);
  if (out.str().empty()) out << "(no metrics requested)\n";
  return out.str();
}

}  // namespace cranelab
