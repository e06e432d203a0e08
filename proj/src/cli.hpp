#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cases.hpp"
#include "diagnostics.hpp"

namespace tpmhd {

enum class Experiment { Converge, Spinodal, KelvinHelmholtz };
enum class DtRule { H2, H3, Fixed };

const char* to_string(Experiment e);
const char* to_string(DtRule r);

struct Config {
  Experiment experiment = Experiment::Converge;
  Pairing pairing = Pairing::I;
  std::vector<std::size_t> n_list;  // a single entry outside converge
  DtRule dt_rule = DtRule::Fixed;
  double dt = 0.0;  // used by DtRule::Fixed
  KhMode kh_mode = KhMode::Single;
  SchemeParams params;  // physical values, T_final, tolerances, seed
  std::filesystem::path output_dir = ".";
  std::size_t dump_every = 0;

  // Time step on a mesh with cells_per_side n.
  double step_for(std::size_t n) const;

  bool operator==(const Config&) const;
};

// Plain `key = value` lines; `#` starts a comment. Numbers may be written as
// fractions like 1/100. Throws ConfigError naming the line.
Config parse_config_text(std::string_view text);
Config parse_config(const std::filesystem::path& path);

// Inverse of parse_config_text; numbers are written in shortest round-trip form.
std::string format_config(const Config& config);

// Shortest decimal text that reads back to the same double, independent of locale.
std::string format_number(double v);

struct VtkField {
  std::string name;
  const FeSpace* space;
  std::span<const double> coeffs;
};

// Legacy ASCII unstructured grid. Fields are sampled at mesh vertices.
void write_vtk(const Mesh& mesh, std::span<const VtkField> fields, const std::filesystem::path& path);

// L2 projection of du_y/dx - du_x/dy onto the scalar space.
std::vector<double> vorticity(const FeSpace& scalar, const FeSpace& velocity, std::span<const double> u);

using LogFn = std::function<void(const std::string&)>;

struct SeriesRow {
  std::size_t step = 0;
  double t = 0.0;
  EnergyReport energy;
  double mass = 0.0;
  int newton_iterations = 0;
};

struct RunOutput {
  std::filesystem::path csv;
  std::vector<SeriesRow> series;
  std::vector<std::filesystem::path> dumps;
};

struct ConvergeOutput {
  std::filesystem::path csv;
  std::vector<RateRow> table;
};

// Each driver writes its CSV as it goes, so a failure leaves the rows computed so far.
ConvergeOutput cmd_converge(const Config& config, const LogFn& log = {});
RunOutput cmd_spinodal(const Config& config, const LogFn& log = {});
RunOutput cmd_kh(const Config& config, const LogFn& log = {});

std::string converge_csv_name(Pairing pairing);

}  // namespace tpmhd
