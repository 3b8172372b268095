#include "rbfilter/io.hpp"

#include <charconv>
#include <fstream>
#include <locale>
#include <sstream>

#include "rbfilter/error.hpp"

namespace rbf {

namespace {

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    out_.imbue(std::locale::classic());
    out_.precision(17);
  }
  std::ostream& os() { return out_; }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write to '" + path_.string() + "' failed");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& s, const std::filesystem::path& path, std::size_t row) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw DataError(path.string() + " row " + std::to_string(row) + ": '" + s +
                    "' is not a number");
  return v;
}

long long to_integer(const std::string& s, const std::filesystem::path& path, std::size_t row) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(path.string() + " row " + std::to_string(row) + ": '" + s +
                    "' is not an integer");
  return v;
}

void require_columns(const CsvTable& t, std::size_t n, const std::filesystem::path& path) {
  if (t.header.size() < n)
    throw DataError(path.string() + ": expected at least " + std::to_string(n) + " columns");
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.rows[i].size() != t.header.size())
      throw DataError(path.string() + " row " + std::to_string(i + 1) +
                      ": column count differs from the header");
}

}  // namespace

void write_lines_csv(const LineTable& table, const std::filesystem::path& path) {
  Writer w(path);
  w.os() << "offset_GHz,component,strength\n";
  for (const Line& l : table.lines)
    w.os() << l.offset_ghz << ',' << to_string(l.component) << ',' << l.strength << '\n';
  w.finish();
}

void write_chi_csv(const ComplexSpectrum& chi, const std::filesystem::path& path) {
  Writer w(path);
  w.os() << "Δ_GHz,mode,Re_chi,Im_chi\n";
  for (int k = 0; k < 2; ++k)
    for (Eigen::Index i = 0; i < chi.size(); ++i) {
      const auto v = chi.chi[static_cast<std::size_t>(k)](i);
      w.os() << chi.detuning_ghz(i) << ',' << chi.mode_name(k) << ',' << v.real() << ','
             << v.imag() << '\n';
    }
  w.finish();
}

void write_spectrum_csv(const TransmissionSpectrum& t, const std::filesystem::path& path) {
  Writer w(path);
  w.os() << "Δ_GHz,T,T_dB\n";
  for (Eigen::Index i = 0; i < t.size(); ++i)
    w.os() << t.detuning_ghz(i) << ',' << t.transmission(i) << ',' << to_db(t.transmission(i))
           << '\n';
  w.finish();
}

void write_frames_csv(std::span<const CountsFrame> frames, const std::filesystem::path& path) {
  Writer w(path);
  w.os() << "frame,region,n_S,n_AS\n";
  for (const auto& f : frames) {
    if (f.stokes.size() != f.anti_stokes.size())
      throw DataError("frame " + std::to_string(f.frame) + ": region counts differ");
    for (std::size_t r = 0; r < f.stokes.size(); ++r)
      w.os() << f.frame << ',' << r << ',' << f.stokes[r] << ',' << f.anti_stokes[r] << '\n';
  }
  w.finish();
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  Writer w(path);
  for (Eigen::Index j = 0; j < m.cols(); ++j) w.os() << (j ? "," : "") << "AS" << j;
  w.os() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.os() << (j ? "," : "") << m(i, j);
    w.os() << '\n';
  }
  w.finish();
}

void write_trace_csv(const OptimizeResult& r, std::span<const std::string> names,
                     const std::filesystem::path& path) {
  Writer w(path);
  w.os() << "evaluation,stage";
  for (const auto& n : names) w.os() << ',' << n;
  w.os() << ",objective\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& e = r.trace[i];
    w.os() << i << ',' << (e.stage == TraceStage::Grid ? "grid" : "simplex");
    for (Eigen::Index k = 0; k < e.x.size(); ++k) w.os() << ',' << e.x(k);
    w.os() << ',' << e.value << '\n';
  }
  w.finish();
}

void write_columns(const std::filesystem::path& path, std::span<const std::string> names,
                   std::span<const Eigen::VectorXd> columns) {
  if (names.size() != columns.size()) throw DataError("write_columns: names and columns differ");
  const Eigen::Index n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != n) throw DataError("write_columns: columns differ in length");
  Writer w(path);
  w.os() << '#';
  for (const auto& name : names) w.os() << ' ' << name;
  w.os() << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) w.os() << (k ? " " : "") << columns[k](i);
    w.os() << '\n';
  }
  w.finish();
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (!have_header) {
      t.header = split(s);
      have_header = true;
    } else {
      t.rows.push_back(split(s));
    }
  }
  if (!have_header) throw DataError(path.string() + ": no header row");
  return t;
}

TransmissionSpectrum read_spectrum_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  require_columns(t, 2, path);
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  TransmissionSpectrum s{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    s.detuning_ghz(i) = to_double(row[0], path, static_cast<std::size_t>(i + 1));
    s.transmission(i) = to_double(row[1], path, static_cast<std::size_t>(i + 1));
  }
  return s;
}

std::vector<CountsFrame> read_frames_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  require_columns(t, 4, path);
  std::vector<CountsFrame> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const long long frame = to_integer(row[0], path, i + 1);
    const long long region = to_integer(row[1], path, i + 1);
    const long long s = to_integer(row[2], path, i + 1);
    const long long a = to_integer(row[3], path, i + 1);
    if (frame < 0 || region < 0 || s < 0 || a < 0)
      throw DataError(path.string() + " row " + std::to_string(i + 1) + ": negative value");
    if (out.empty() || out.back().frame != static_cast<std::uint64_t>(frame))
      out.push_back({static_cast<std::uint64_t>(frame), {}, {}});
    CountsFrame& f = out.back();
    if (region != static_cast<long long>(f.stokes.size()))
      throw DataError(path.string() + " row " + std::to_string(i + 1) +
                      ": regions must be listed in order within a frame");
    f.stokes.push_back(static_cast<int>(s));
    f.anti_stokes.push_back(static_cast<int>(a));
  }
  return out;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  require_columns(t, 1, path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()),
                    static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.header.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          to_double(t.rows[i][j], path, i + 1);
  return m;
}

MeasuredSpectrum read_measured_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  require_columns(t, 2, path);
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  MeasuredSpectrum m{Eigen::VectorXd(n), Eigen::VectorXd(n), {}};
  const bool weighted = t.header.size() >= 3 && t.header[2] == "weight";
  if (weighted) m.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    m.detuning_ghz(i) = to_double(row[0], path, static_cast<std::size_t>(i + 1));
    m.transmission(i) = to_double(row[1], path, static_cast<std::size_t>(i + 1));
    if (weighted) m.weights(i) = to_double(row[2], path, static_cast<std::size_t>(i + 1));
  }
  m.validate();
  return m;
}

nlohmann::json make_report(const std::string& command, const RunConfig& config) {
  return {{"tool", "rbfilter"},
          {"version", std::string(tool_version)},
          {"command", command},
          {"config", to_json(config)},
          {"config_hash", config_hash(config)}};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  Writer w(path);
  w.os() << j.dump(2) << '\n';
  w.finish();
}

}  // namespace rbf
