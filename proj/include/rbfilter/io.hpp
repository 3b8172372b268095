#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbfilter/config.hpp"

namespace rbf {

/// CSV writers: header row, '.' decimal separator, 17 significant digits,
/// newline-terminated rows. Unwritable paths throw IoError.
void write_lines_csv(const LineTable& table, const std::filesystem::path& path);
void write_chi_csv(const ComplexSpectrum& chi, const std::filesystem::path& path);
void write_spectrum_csv(const TransmissionSpectrum& t, const std::filesystem::path& path);
void write_frames_csv(std::span<const CountsFrame> frames, const std::filesystem::path& path);
void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path);
void write_trace_csv(const OptimizeResult& r, std::span<const std::string> names,
                     const std::filesystem::path& path);

/// Whitespace-separated columns with a '#' header line, for gnuplot.
void write_columns(const std::filesystem::path& path, std::span<const std::string> names,
                   std::span<const Eigen::VectorXd> columns);

/// Parsed CSV: header plus numeric rows. Lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

TransmissionSpectrum read_spectrum_csv(const std::filesystem::path& path);
std::vector<CountsFrame> read_frames_csv(const std::filesystem::path& path);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// First column detuning in GHz, second transmission, optional third weight.
/// The result is validated (see MeasuredSpectrum::validate).
MeasuredSpectrum read_measured_csv(const std::filesystem::path& path);

/// Report skeleton: tool name and version, command, resolved config and its hash.
nlohmann::json make_report(const std::string& command, const RunConfig& config);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace rbf
