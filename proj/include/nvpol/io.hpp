#pragma once

#include "nvpol/dipole.hpp"
#include "nvpol/estimator.hpp"
#include "nvpol/odmr.hpp"
#include "nvpol/synthetic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace nvpol {

/// Lines starting with '#' are comments; the optional generation timestamp is
/// one of them and is suppressed by the CLI's --no-meta for byte-stable reruns.
struct CsvOptions {
  bool timestamp = true;
  std::vector<std::string> comments;
};

/// Sweep CSV: header `angle_deg,intensity,g2,g2_err`, one row per angle,
/// g2_err may be empty. This is also the ingestion format for measured data.
void write_sweep_csv(const std::string& path, const PolarizationSweep& sweep,
                     const CsvOptions& options = {});
PolarizationSweep read_sweep_csv(const std::string& path);

/// Matrix CSV: first cell `rows\cols`, first row the column coordinates,
/// first column the row coordinates.
void write_matrix_csv(const std::string& path, const std::string& row_label,
                      const std::string& col_label, const Eigen::VectorXd& row_coords,
                      const Eigen::VectorXd& col_coords, const Eigen::MatrixXd& values,
                      const CsvOptions& options = {});

/// Plain column table, e.g. ODMR spectra and model curves.
void write_table_csv(const std::string& path, const std::vector<std::string>& headers,
                     const std::vector<Eigen::VectorXd>& columns,
                     const CsvOptions& options = {});

/// Truth/optics configuration for sweep simulation and fitting commands.
/// JSON keys: orientations, ratio, background, acquisition_time, seed, na,
/// refractive_index. Unknown keys are rejected by name.
struct SweepSimConfig {
  std::vector<NvLabel> orientations;  // one or two
  double ratio = 1.0;                 // second:first brightness, in [0,1]
  double background = 0.0;
  double acquisition_time = 1000.0;
  std::uint64_t seed = 0;
  double na = 1.98;
  double refractive_index = 2.4;

  EmitterSystem to_system() const;
  OpticalSystem to_optics() const;
};

SweepSimConfig load_sweep_config(const std::string& path);

/// ODMR run configuration. JSON keys: orientations, weights, d_ghz,
/// gyromagnetic_ghz_per_t, b_field_mt, linewidth_mhz, contrast,
/// photons_per_point, f_min_ghz, f_max_ghz, n_points, seed.
struct OdmrRunConfig {
  std::vector<NvLabel> orientations{NvLabel::A};
  std::vector<double> weights;        // defaults to 1 per emitter
  OdmrConfig physics{};
  double photons_per_point = 0.0;     // 0 disables noise
  std::uint64_t seed = 0;

  std::vector<OdmrEmitter> to_emitters() const;
};

OdmrRunConfig load_odmr_config(const std::string& path);

/// Fit report (JSON, schema_version 1): verdict, recovered parameters,
/// per-pair fits and class grouping.
void write_fit_report(const std::string& path, const FitResult& result,
                      const FitOptions& options, const std::string& input_path,
                      bool timestamp);

}  // namespace nvpol
