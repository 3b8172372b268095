#pragma once

// Run configuration. On disk every physical quantity carries its unit in the
// key name (temperature_C, B_mT, length_cm, ...); in memory everything is SI.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbfilter/fit.hpp"
#include "rbfilter/optimize.hpp"
#include "rbfilter/photon_stats.hpp"

namespace rbf {

inline constexpr std::string_view tool_version = "1.0.0";

/// Temperature window accepted for any cell, in Celsius.
inline constexpr double min_cell_temperature_c = 20.0;
inline constexpr double max_cell_temperature_c = 140.0;

/// Temperature offset of the Faraday cell in the paper-optimum preset: the
/// declared calibration parameter between sensor and vapor temperature.
inline constexpr double optimum_faraday_offset_k = -3.75;

struct ChainElementSpec {
  enum class Kind { Polarizer, Cell, Rotator };
  Kind kind = Kind::Polarizer;
  double angle_rad = 0.0;
  double extinction = 0.0;
  std::string cell;  // cell name for Cell and Rotator

  bool operator==(const ChainElementSpec&) const = default;
};

struct ChainSpec {
  std::vector<ChainElementSpec> elements;
  double wollaston_extinction = 1e-5;
  double input_angle_rad = 0.0;

  bool operator==(const ChainSpec&) const = default;
};

struct PhotonSimOptions {
  std::int64_t frames = 20000;
  int modes = 8;
  double region_area_mrad2 = 0.02;
  int jackknife_blocks = 50;

  bool operator==(const PhotonSimOptions&) const = default;
};

struct FitConfig {
  std::string cell = "absorption";
  SpectrumModel model = SpectrumModel::Absorption;
  std::vector<FitParam> free{FitParam::Temperature, FitParam::Field};
  std::string data;  // measured CSV; may also come from the command line
  int max_evaluations = 3000;

  bool operator==(const FitConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  bool trace_csv = true;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  std::string preset = "default";
  std::vector<CellConfig> cells;
  ChainSpec chain;
  GridSpec grid;
  FomSpec fom;
  ParamBox param_box = ParamBox::filter_defaults();
  OptimizerOptions optimizer;
  NoiseModel noise;
  PhotonSimOptions photon_sim;
  FitConfig fit;
  OutputConfig output;
  std::uint64_t seed = 1;

  const CellConfig& cell(std::string_view name) const;
  FilterChain filter_chain() const;
  FilterHardware hardware() const;

  /// Throws ConfigError listing every problem found.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(std::string_view name);

/// Applies a JSON document on top of the preset it names (or `base_preset`).
/// Cells are matched by name; a cell with a new name starts from defaults.
RunConfig config_from_json(const nlohmann::json& j, std::string_view base_preset = "default");

/// Parses text; parse errors carry line and column.
RunConfig parse_config(std::string_view text, std::string_view base_preset = "default",
                       std::string_view source = "<config>");

RunConfig load_config(const std::filesystem::path& path, std::string_view base_preset = "default");

nlohmann::json to_json(const RunConfig& c);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace rbf
