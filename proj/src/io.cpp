#include "nvpol/io.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nvpol {

namespace {

using nlohmann::json;

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string timestamp_line() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return std::string("# generated: ") + buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

void write_preamble(std::ofstream& out, const CsvOptions& options) {
  if (options.timestamp) out << timestamp_line() << "\n";
  for (const auto& c : options.comments) out << "# " << c << "\n";
}

double parse_double(const std::string& field, int line, const std::string& what) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end)
    throw std::runtime_error("line " + std::to_string(line) + ": invalid " + what +
                             " '" + field + "'");
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

void write_sweep_csv(const std::string& path, const PolarizationSweep& sweep,
                     const CsvOptions& options) {
  auto out = open_output(path);
  write_preamble(out, options);
  if (sweep.acquisition_time > 0.0)
    out << "# acquisition_time: " << format_value(sweep.acquisition_time) << "\n";
  out << "angle_deg,intensity,g2,g2_err\n";
  for (Eigen::Index i = 0; i < sweep.angles_deg.size(); ++i) {
    out << format_value(sweep.angles_deg[i]) << ','
        << format_value(sweep.intensities[i]) << ','
        << format_value(sweep.g2_values[i]) << ',';
    if (sweep.g2_errors.size() == sweep.angles_deg.size() &&
        std::isfinite(sweep.g2_errors[i]))
      out << format_value(sweep.g2_errors[i]);
    out << '\n';
  }
}

PolarizationSweep read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep file: " + path);

  std::vector<double> angles, intensities, g2s, g2errs;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  double acquisition_time = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# acquisition_time:";
      if (line.rfind(key, 0) == 0)
        acquisition_time = parse_double(trim(line.substr(key.size())), line_no,
                                        "acquisition_time");
      continue;
    }
    if (!header_seen) {
      if (trim(line) != "angle_deg,intensity,g2,g2_err")
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": expected header 'angle_deg,intensity,g2,g2_err', got '" +
                                 line + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 4 && fields.size() != 3)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 4 columns, got " +
                               std::to_string(fields.size()));
    angles.push_back(parse_double(trim(fields[0]), line_no, "angle"));
    intensities.push_back(parse_double(trim(fields[1]), line_no, "intensity"));
    g2s.push_back(parse_double(trim(fields[2]), line_no, "g2"));
    if (fields.size() == 4 && !trim(fields[3]).empty())
      g2errs.push_back(parse_double(trim(fields[3]), line_no, "g2_err"));
    else
      g2errs.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  if (!header_seen) throw std::runtime_error(path + ": missing sweep header");
  if (angles.empty()) throw std::runtime_error(path + ": no data rows");

  PolarizationSweep sweep;
  sweep.acquisition_time = acquisition_time;
  const auto n = static_cast<Eigen::Index>(angles.size());
  sweep.angles_deg = Eigen::Map<Eigen::VectorXd>(angles.data(), n);
  sweep.intensities = Eigen::Map<Eigen::VectorXd>(intensities.data(), n);
  sweep.g2_values = Eigen::Map<Eigen::VectorXd>(g2s.data(), n);
  sweep.g2_errors = Eigen::Map<Eigen::VectorXd>(g2errs.data(), n);
  validate_sweep(sweep);
  return sweep;
}

void write_matrix_csv(const std::string& path, const std::string& row_label,
                      const std::string& col_label, const Eigen::VectorXd& row_coords,
                      const Eigen::VectorXd& col_coords, const Eigen::MatrixXd& values,
                      const CsvOptions& options) {
  if (values.rows() != row_coords.size() || values.cols() != col_coords.size())
    throw std::invalid_argument("write_matrix_csv: shape mismatch");
  auto out = open_output(path);
  write_preamble(out, options);
  out << row_label << '\\' << col_label;
  for (Eigen::Index j = 0; j < col_coords.size(); ++j)
    out << ',' << format_value(col_coords[j]);
  out << '\n';
  for (Eigen::Index i = 0; i < row_coords.size(); ++i) {
    out << format_value(row_coords[i]);
    for (Eigen::Index j = 0; j < col_coords.size(); ++j)
      out << ',' << format_value(values(i, j));
    out << '\n';
  }
}

void write_table_csv(const std::string& path, const std::vector<std::string>& headers,
                     const std::vector<Eigen::VectorXd>& columns,
                     const CsvOptions& options) {
  if (headers.size() != columns.size() || columns.empty())
    throw std::invalid_argument("write_table_csv: header/column mismatch");
  const Eigen::Index n = columns.front().size();
  for (const auto& c : columns)
    if (c.size() != n) throw std::invalid_argument("write_table_csv: ragged columns");
  auto out = open_output(path);
  write_preamble(out, options);
  for (std::size_t k = 0; k < headers.size(); ++k)
    out << headers[k] << (k + 1 < headers.size() ? ',' : '\n');
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t k = 0; k < columns.size(); ++k)
      out << format_value(columns[k][i]) << (k + 1 < columns.size() ? ',' : '\n');
}

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error(path + ": config must be a JSON object");
  return j;
}

std::vector<NvLabel> parse_orientations(const json& value) {
  std::vector<NvLabel> labels;
  if (!value.is_array() || value.empty())
    throw std::runtime_error("'orientations' must be a non-empty array");
  for (const auto& item : value) {
    const std::string s = item.get<std::string>();
    if (s.size() != 1)
      throw std::runtime_error("orientation entries must be single characters");
    labels.push_back(label_from_char(s[0]));
  }
  return labels;
}

}  // namespace

EmitterSystem SweepSimConfig::to_system() const {
  EmitterSystem system;
  system.emitters.push_back({orientation(orientations.at(0)), 0.0, 1.0});
  if (orientations.size() == 2)
    system.emitters.push_back({orientation(orientations.at(1)), 0.0, ratio});
  system.background = background;
  return system;
}

OpticalSystem SweepSimConfig::to_optics() const {
  OpticalSystem optics;
  optics.numerical_aperture = na;
  optics.relative_permittivity = refractive_index * refractive_index;
  return optics;
}

SweepSimConfig load_sweep_config(const std::string& path) {
  const json j = load_json(path);
  SweepSimConfig config;
  bool have_orientations = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "orientations") {
      config.orientations = parse_orientations(value);
      have_orientations = true;
    } else if (key == "ratio") {
      config.ratio = value.get<double>();
    } else if (key == "background") {
      config.background = value.get<double>();
    } else if (key == "acquisition_time") {
      config.acquisition_time = value.get<double>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else if (key == "na") {
      config.na = value.get<double>();
    } else if (key == "refractive_index") {
      config.refractive_index = value.get<double>();
    } else {
      throw std::runtime_error(path + ": unknown config key '" + key + "'");
    }
  }
  if (!have_orientations)
    throw std::runtime_error(path + ": missing required key 'orientations'");
  if (config.orientations.size() > 2)
    throw std::runtime_error(path + ": at most two orientations are supported here");
  if (config.ratio < 0.0 || config.ratio > 1.0)
    throw std::runtime_error(path + ": ratio must be within [0, 1]");
  if (config.background < 0.0)
    throw std::runtime_error(path + ": background must be >= 0");
  if (config.acquisition_time <= 0.0)
    throw std::runtime_error(path + ": acquisition_time must be > 0");
  return config;
}

std::vector<OdmrEmitter> OdmrRunConfig::to_emitters() const {
  std::vector<OdmrEmitter> emitters;
  for (std::size_t i = 0; i < orientations.size(); ++i) {
    const double w = i < weights.size() ? weights[i] : 1.0;
    emitters.push_back({orientation(orientations[i]).axis, w});
  }
  return emitters;
}

OdmrRunConfig load_odmr_config(const std::string& path) {
  const json j = load_json(path);
  OdmrRunConfig config;
  double f_min = 0.0, f_max = 0.0;
  int n_points = 0;
  for (const auto& [key, value] : j.items()) {
    if (key == "orientations") {
      config.orientations = parse_orientations(value);
    } else if (key == "weights") {
      config.weights = value.get<std::vector<double>>();
    } else if (key == "d_ghz") {
      config.physics.zero_field_splitting_ghz = value.get<double>();
    } else if (key == "gyromagnetic_ghz_per_t") {
      config.physics.gyromagnetic_ratio_ghz_per_t = value.get<double>();
    } else if (key == "b_field_mt") {
      const auto v = value.get<std::vector<double>>();
      if (v.size() != 3)
        throw std::runtime_error(path + ": b_field_mt must have 3 components");
      config.physics.b_field_mt = Vec3(v[0], v[1], v[2]);
    } else if (key == "linewidth_mhz") {
      config.physics.linewidth_mhz = value.get<double>();
    } else if (key == "contrast") {
      config.physics.contrast_per_nv = value.get<double>();
    } else if (key == "photons_per_point") {
      config.photons_per_point = value.get<double>();
    } else if (key == "f_min_ghz") {
      f_min = value.get<double>();
    } else if (key == "f_max_ghz") {
      f_max = value.get<double>();
    } else if (key == "n_points") {
      n_points = value.get<int>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else {
      throw std::runtime_error(path + ": unknown config key '" + key + "'");
    }
  }
  if (f_min > 0.0 || f_max > 0.0 || n_points > 0) {
    if (!(f_min > 0.0 && f_max > f_min && n_points >= 2))
      throw std::runtime_error(path +
                               ": f_min_ghz, f_max_ghz and n_points must be given together");
    config.physics.frequency_grid_ghz = Eigen::VectorXd::LinSpaced(n_points, f_min, f_max);
  }
  if (!config.weights.empty() && config.weights.size() != config.orientations.size())
    throw std::runtime_error(path + ": weights and orientations lengths differ");
  config.physics.validate();
  return config;
}

void write_fit_report(const std::string& path, const FitResult& result,
                      const FitOptions& options, const std::string& input_path,
                      bool timestamp) {
  json report;
  report["schema_version"] = 1;
  report["input"] = input_path;
  if (timestamp) report["generated"] = timestamp_line().substr(2);
  report["verdict"] = to_string(result.verdict);
  report["recovered_ratio"] = result.recovered_ratio;
  report["recovered_background"] = result.recovered_background;
  report["best_pair"] = result.best().hypothesis.pair.str();
  report["all_converged"] = result.all_converged;

  json per_pair = json::array();
  for (const auto& fit : result.per_pair) {
    json entry;
    entry["pair"] = fit.hypothesis.pair.str();
    entry["chi_squared"] = fit.chi_squared;
    entry["ratio"] = fit.hypothesis.ratio;
    entry["background"] = fit.hypothesis.background;
    entry["scale"] = fit.hypothesis.scale;
    entry["theta_offset_deg"] = fit.hypothesis.theta_offset * 180.0 / std::numbers::pi;
    entry["converged"] = fit.converged;
    per_pair.push_back(entry);
  }
  report["per_pair"] = per_pair;

  json classes = json::array();
  for (std::size_t c = 0; c < result.classes.size(); ++c) {
    json entry;
    entry["id"] = result.classes[c].id;
    std::vector<std::string> members;
    for (const auto& m : result.classes[c].members) members.push_back(m.str());
    entry["members"] = members;
    entry["chi_squared"] = result.class_chi_squared[c];
    entry["best"] = static_cast<int>(c) == result.best_class;
    classes.push_back(entry);
  }
  report["classes"] = classes;

  json opts;
  opts["g2_weight"] = options.g2_weight;
  opts["ratio_floor"] = options.ratio_floor;
  opts["rel_margin"] = options.rel_margin;
  report["options"] = opts;

  auto out = open_output(path);
  out << report.dump(2) << "\n";
}

}  // namespace nvpol
