// rbfilter: command-line front end.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rbfilter/config.hpp"
#include "rbfilter/error.hpp"
#include "rbfilter/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rbf;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::string preset;
  std::uint64_t seed = 0;
  int grid_points = 0;
  bool psi_sweep = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* preset_opt = nullptr;
};

double to_c(double k) { return k - constants::zero_celsius; }
double to_mt(double t) { return t * 1e3; }
double to_deg(double r) { return r * 180.0 / constants::pi; }

RunConfig resolve(const Globals& g) {
  const std::string base = *g.preset_opt ? g.preset : "default";
  RunConfig c;
  if (!g.config.empty()) {
    c = load_config(g.config, base);
    if (*g.preset_opt && c.preset != g.preset)
      throw ConfigError("preset: the command line asks for '" + g.preset + "' but " + g.config +
                        " names '" + c.preset + "'");
  } else {
    c = preset(base);
  }
  if (*g.seed_opt) c.seed = g.seed;
  if (*g.grid_opt) c.grid.points = g.grid_points;
  if (*g.out_opt) c.output.dir = g.out;
  c.optimizer.seed = c.seed;
  c.validate();
  return c;
}

fs::path prepare_out(const RunConfig& c) {
  const fs::path dir = c.output.dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

json cell_summary(const CellConfig& c) {
  return {{"name", c.name},
          {"geometry", std::string(to_string(c.geometry))},
          {"temperature_C", to_c(c.temperature_k)},
          {"effective_temperature_C", to_c(c.effective_temperature_k())},
          {"B_mT", to_mt(c.b_tesla)}};
}

Eigen::VectorXd named_grid(const FomSpec& f) {
  std::vector<double> v{f.stokes_ghz, f.anti_stokes_ghz, f.write_ghz, f.read_ghz};
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double at(const TransmissionSpectrum& t, double d) {
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (t.detuning_ghz(i) == d) return t.transmission(i);
  throw NumericalError("detuning not on grid");
}

json named_transmissions(const TransmissionSpectrum& t, const FomSpec& f) {
  return {{"T_stokes", at(t, f.stokes_ghz)},
          {"T_anti_stokes", at(t, f.anti_stokes_ghz)},
          {"T_write_dB", to_db(at(t, f.write_ghz))},
          {"T_read_dB", to_db(at(t, f.read_ghz))}};
}

json fom_json(const FigureOfMerit& m) {
  return {{"T_stokes", m.t_stokes},
          {"T_anti_stokes", m.t_anti_stokes},
          {"suppression_write_dB", m.suppression_write_db},
          {"suppression_read_dB", m.suppression_read_db},
          {"feasible", m.feasible},
          {"objective", m.objective}};
}

void finish(const fs::path& dir, const std::string& name, const json& report) {
  const fs::path p = dir / (name + ".json");
  write_json(report, p);
  std::cout << "report: " << p.string() << '\n';
}

// --- subcommands ------------------------------------------------------------

void run_constants(const RunConfig& cfg) {
  const fs::path dir = prepare_out(cfg);
  json iso = json::array();
  for (const IsotopeSpec& s : isotopes()) {
    iso.push_back({{"name", std::string(to_string(s.name))},
                   {"nuclear_spin", s.nuclear_spin},
                   {"mass_kg", s.mass_kg},
                   {"natural_abundance", s.natural_abundance},
                   {"A_ground_MHz", s.a_ground_hz * 1e-6},
                   {"A_excited_MHz", s.a_excited_hz * 1e-6},
                   {"isotope_shift_MHz", s.isotope_shift_hz * 1e-6},
                   {"line_center_Hz", s.line_center_hz},
                   {"g_J_ground", s.g_j_ground},
                   {"g_J_excited", s.g_j_excited},
                   {"g_I", s.g_i},
                   {"natural_linewidth_MHz", s.natural_linewidth_hz * 1e-6},
                   {"reduced_dipole_Cm", s.reduced_dipole_cm},
                   {"ground_splitting_GHz", s.ground_splitting_hz() * 1e-9},
                   {"excited_splitting_GHz", s.excited_splitting_hz() * 1e-9}});
  }
  const FrequencyConvention conv;
  const RamanDetunings raman;
  json report = make_report("constants", cfg);
  report["results"] = {
      {"physical_constants",
       {{"planck_Js", constants::planck},
        {"boltzmann_JK", constants::boltzmann},
        {"epsilon0_Fm", constants::epsilon0},
        {"speed_of_light_ms", constants::speed_of_light},
        {"bohr_magneton_Hz_per_T", constants::bohr_magneton_hz}}},
      {"isotopes", iso},
      {"frequency_convention",
       {{"reference", "Rb87 D1 F=2 -> F'=2"},
        {"reference_frequency_Hz", conv.reference_frequency_hz()}}},
      {"detunings_GHz",
       {{"stokes", raman.stokes_ghz},
        {"anti_stokes", raman.anti_stokes_ghz},
        {"write_laser", raman.write_ghz()},
        {"read_laser", raman.read_ghz()}}},
      {"vapor_pressure",
       {{"formula", "log10(P/torr) = 2.881 + 4.312 - 4040/T (liquid)"},
        {"valid_K", {250.0, 500.0}},
        {"source", "D. A. Steck, Rubidium 87 D Line Data, rev. 2.2.1"}}}};
  std::cout << report["results"].dump(2) << '\n';
  finish(dir, "constants", report);
}

void run_lines(const RunConfig& cfg, const std::string& cell_name, const std::string& iso_name) {
  const fs::path dir = prepare_out(cfg);
  const CellConfig& cell = cfg.cell(cell_name);
  json tables = json::array();
  for (const IsotopeSpec& s : isotopes()) {
    const std::string name(to_string(s.name));
    if (iso_name != "all" && iso_name != name) continue;
    const LineTable t = zeeman_lines(s, cell.b_tesla, cell.geometry);
    const fs::path p = dir / ("lines_" + cell.name + "_" + name + ".csv");
    write_lines_csv(t, p);
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < t.lines.size(); ++i) {
      lo = i ? std::min(lo, t.lines[i].offset_ghz) : t.lines[i].offset_ghz;
      hi = i ? std::max(hi, t.lines[i].offset_ghz) : t.lines[i].offset_ghz;
    }
    tables.push_back({{"isotope", name},
                      {"file", p.string()},
                      {"lines", t.lines.size()},
                      {"offset_spread_GHz", hi - lo},
                      {"strength_sigma_plus", t.total_strength(Component::SigmaPlus)},
                      {"strength_pi", t.total_strength(Component::Pi)},
                      {"strength_sigma_minus", t.total_strength(Component::SigmaMinus)}});
    std::cout << name << ": " << t.lines.size() << " lines -> " << p.string() << '\n';
  }
  if (tables.empty()) throw ConfigError("--isotope: expected Rb85, Rb87 or all");
  json report = make_report("lines", cfg);
  report["results"] = {{"cell", cell_summary(cell)}, {"tables", tables}};
  finish(dir, "lines", report);
}

json psi_sweep(const RunConfig& cfg, const CellConfig& cell, const fs::path& dir) {
  const Eigen::VectorXd named = named_grid(cfg.fom);
  const ComplexSpectrum chi = susceptibility(cell, named);
  std::vector<Eigen::VectorXd> cols(5, Eigen::VectorXd(19));
  double best = -1.0, worst = 2.0, best_psi = 0.0, worst_psi = 0.0;
  for (int k = 0; k <= 18; ++k) {
    const double psi = k * 5.0 * constants::pi / 180.0;
    const TransmissionSpectrum t = absorption_transmission(chi, psi);
    const double ts = at(t, cfg.fom.stokes_ghz), tas = at(t, cfg.fom.anti_stokes_ghz);
    cols[0](k) = k * 5.0;
    cols[1](k) = ts;
    cols[2](k) = tas;
    cols[3](k) = to_db(at(t, cfg.fom.write_ghz));
    cols[4](k) = to_db(at(t, cfg.fom.read_ghz));
    const double m = std::min(ts, tas);
    if (m > best) best = m, best_psi = k * 5.0;
    if (m < worst) worst = m, worst_psi = k * 5.0;
  }
  const std::vector<std::string> names{"psi_deg", "T_S", "T_AS", "T_write_dB", "T_read_dB"};
  const fs::path p = dir / ("psi_sweep_" + cell.name + ".dat");
  write_columns(p, names, cols);
  return {{"file", p.string()},
          {"best_psi_deg", best_psi},
          {"best_min_T", best},
          {"worst_psi_deg", worst_psi},
          {"worst_min_T", worst}};
}

void run_spectrum(const RunConfig& cfg, const std::string& only, bool sweep_psi) {
  const fs::path dir = prepare_out(cfg);
  const Eigen::VectorXd grid = cfg.grid.make();
  const Eigen::VectorXd named = named_grid(cfg.fom);
  json cells = json::array();
  for (const CellConfig& cell : cfg.cells) {
    if (!only.empty() && cell.name != only) continue;
    const ComplexSpectrum chi = susceptibility(cell, grid);
    write_chi_csv(chi, dir / ("chi_" + cell.name + ".csv"));
    const ComplexSpectrum chi_named = susceptibility(cell, named);
    json entry = {{"cell", cell_summary(cell)}};
    TransmissionSpectrum t;
    std::vector<std::string> names{"Delta_GHz", "T", "T_dB"};
    std::vector<Eigen::VectorXd> cols;
    if (cell.geometry == Geometry::Transverse) {
      t = absorption_transmission(chi, cell.psi_rad);
      const auto modes = mode_transmissions(chi, cell.length_m);
      names.insert(names.end(), {"T_pi", "T_sigma"});
      cols = {grid, t.transmission, t.db(), modes[0], modes[1]};
      entry["named"] = named_transmissions(absorption_transmission(chi_named, cell.psi_rad), cfg.fom);
      entry["opaque_width_GHz_at_0.5"] = opaque_extent_ghz(t, 0.5);
      entry["opaque_width_GHz_at_-50dB"] = opaque_extent_ghz(t, 1e-5);
      entry["psi_deg"] = to_deg(cell.psi_rad);
      if (sweep_psi) entry["psi_sweep"] = psi_sweep(cfg, cell, dir);
    } else {
      t = faraday_transmission(chi, cell.length_m, PolarizerOrientation::Crossed);
      const TransmissionSpectrum par =
          faraday_transmission(chi, cell.length_m, PolarizerOrientation::Parallel);
      const RotationSpectrum rot = faraday_rotation(chi, cell.length_m);
      names.insert(names.end(), {"T_parallel", "theta_rad", "t_rot"});
      cols = {grid, t.transmission, t.db(), par.transmission, rot.theta_rad, rot.t_rot};
      entry["named"] = named_transmissions(
          faraday_transmission(chi_named, cell.length_m, PolarizerOrientation::Crossed), cfg.fom);
      Eigen::Index imax = 0;
      t.transmission.maxCoeff(&imax);
      entry["peak_T"] = t.transmission(imax);
      entry["peak_Delta_GHz"] = grid(imax);
    }
    const fs::path csv = dir / ("spectrum_" + cell.name + ".csv");
    write_spectrum_csv(t, csv);
    write_columns(dir / ("spectrum_" + cell.name + ".dat"), names, cols);
    entry["file"] = csv.string();
    cells.push_back(entry);
    std::cout << cell.name << " -> " << csv.string() << '\n';
  }
  if (cells.empty()) throw ConfigError("--cell: no cell named '" + only + "'");
  json report = make_report("spectrum", cfg);
  report["results"] = {{"cells", cells}};
  finish(dir, "spectrum", report);
}

void run_cascade(const RunConfig& cfg, bool sweep_psi) {
  const fs::path dir = prepare_out(cfg);
  const Eigen::VectorXd grid = cfg.grid.make();
  const FilterChain chain = cfg.filter_chain();
  const auto transfers = element_transfers(chain, grid);
  const TransmissionSpectrum total = cascade(transfers, chain.input_angle_rad);
  const TransmissionSpectrum leak = drive_leakage(chain, total);
  write_spectrum_csv(total, dir / "cascade.csv");

  // Each element alone, preceded by an ideal polarizer along the input.
  std::vector<std::string> names{"Delta_GHz", "T_total", "T_total_dB", "leakage_dB"};
  std::vector<Eigen::VectorXd> cols{grid, total.transmission, total.db(), leak.db()};
  for (std::size_t i = 0; i < chain.elements.size(); ++i) {
    const ChainElement& e = chain.elements[i];
    if (std::holds_alternative<Polarizer>(e)) continue;
    std::vector<JonesTransfer> single{transfers[i]};
    if (std::holds_alternative<RotatorCell>(e))
      single.push_back(polarizer_transfer(Polarizer{chain.input_angle_rad + constants::pi / 2, 0.0}, grid));
    const std::string name = std::holds_alternative<AbsorptionCell>(e)
                                 ? std::get<AbsorptionCell>(e).cell.name
                                 : std::get<RotatorCell>(e).cell.name;
    names.push_back("T_" + name);
    cols.push_back(cascade(single, chain.input_angle_rad).transmission);
  }
  write_columns(dir / "cascade.dat", names, cols);

  const FigureOfMerit m = score(chain, cfg.fom);
  json results = {{"file", (dir / "cascade.csv").string()}, {"fom", fom_json(m)}};
  if (sweep_psi) {
    json sweep = json::array();
    for (int k = 0; k <= 18; ++k) {
      RunConfig c2 = cfg;
      for (auto& cell : c2.cells)
        if (cell.geometry == Geometry::Transverse) cell.psi_rad = k * 5.0 * constants::pi / 180.0;
      const FigureOfMerit mk = score(c2.filter_chain(), cfg.fom);
      sweep.push_back({{"psi_deg", k * 5.0}, {"fom", fom_json(mk)}});
    }
    results["psi_sweep"] = sweep;
  }
  json report = make_report("cascade", cfg);
  report["results"] = results;
  std::cout << "T(stokes)=" << m.t_stokes << " T(anti-stokes)=" << m.t_anti_stokes
            << " suppression write/read=" << m.suppression_write_db << "/"
            << m.suppression_read_db << " dB\n";
  finish(dir, "cascade", report);
}

void run_optimize(const RunConfig& cfg) {
  const fs::path dir = prepare_out(cfg);
  const FilterHardware hw = cfg.hardware();
  const FilterSettings start = hw.settings();
  const FigureOfMerit at_config = score(hw, start, cfg.fom);
  const OptimizeResult r = optimize_filters(hw, cfg.param_box, cfg.fom, cfg.optimizer);
  const FilterSettings best = FilterSettings::from_vector(r.best);
  const FigureOfMerit m = score(hw, best, cfg.fom);
  const std::vector<std::string> names{"T_abs_K", "T_faraday_K", "B_abs_T", "B_faraday_T"};
  if (cfg.output.trace_csv) write_trace_csv(r, names, dir / "optimize_trace.csv");
  json report = make_report("optimize", cfg);
  report["results"] = {
      {"best",
       {{"T_abs_C", to_c(best.t_abs_k)},
        {"T_faraday_C", to_c(best.t_far_k)},
        {"B_abs_mT", to_mt(best.b_abs_t)},
        {"B_faraday_mT", to_mt(best.b_far_t)}}},
      {"score", fom_json(m)},
      {"objective", r.best_value},
      {"config_point_objective", at_config.objective},
      {"trace_length", r.trace.size()},
      {"wall_time_s", r.wall_seconds}};
  std::cout << "best objective " << r.best_value << " at T_abs=" << to_c(best.t_abs_k)
            << " C, T_far=" << to_c(best.t_far_k) << " C, B_abs=" << to_mt(best.b_abs_t)
            << " mT, B_far=" << to_mt(best.b_far_t) << " mT (" << r.trace.size()
            << " evaluations)\n";
  finish(dir, "optimize", report);
}

void run_photon_sim(RunConfig cfg, const std::string& noise_preset, std::int64_t frames) {
  if (noise_preset == "filtered") cfg.noise = NoiseModel::filtered();
  else if (noise_preset == "unfiltered") cfg.noise = NoiseModel::unfiltered();
  else if (!noise_preset.empty()) throw ConfigError("--noise: expected filtered or unfiltered");
  if (frames > 0) cfg.photon_sim.frames = frames;
  cfg.validate();
  const fs::path dir = prepare_out(cfg);
  const auto& ps = cfg.photon_sim;
  const auto data = simulate_frames(ps.modes, ps.frames, cfg.noise, cfg.seed);
  write_frames_csv(data, dir / "frames.csv");
  std::vector<int> regions(static_cast<std::size_t>(ps.modes));
  for (int k = 0; k < ps.modes; ++k) regions[static_cast<std::size_t>(k)] = k;
  const Eigen::MatrixXd map = correlation_map(data, regions, regions);
  write_matrix_csv(map, dir / "correlation_map.csv");
  const int r0 = ps.modes / 2;
  const RegionGeometry geom{ps.modes, ps.region_area_mrad2};
  write_matrix_csv(joint_histogram(data, r0, geom.partner(r0)), dir / "joint_histogram.csv");
  const CorrelationSummary s = summarize(data, map, ps.jackknife_blocks);
  json centers = json::array();
  for (int k = 0; k < ps.modes; ++k) centers.push_back(geom.center_mrad(k));
  json report = make_report("photon-sim", cfg);
  report["results"] = {{"frames", ps.frames},
                       {"modes", ps.modes},
                       {"region_radius_mrad", geom.radius_mrad()},
                       {"region_centers_mrad", centers},
                       {"C_paired_mean", s.paired_mean},
                       {"C_paired_standard_error", s.paired_standard_error},
                       {"C_unpaired_mean", s.unpaired_mean},
                       {"C_unpaired_abs_mean", s.unpaired_abs_mean},
                       {"ridge_contrast", s.ridge_contrast},
                       {"mean_counts_stokes", s.mean_counts_stokes},
                       {"mean_counts_anti_stokes", s.mean_counts_anti_stokes}};
  std::cout << "C paired = " << s.paired_mean << " +/- " << s.paired_standard_error
            << ", unpaired mean |C| = " << s.unpaired_abs_mean << '\n';
  finish(dir, "photon-sim", report);
}

void run_fit(RunConfig cfg, const std::string& data, const std::string& cell_name,
             const std::string& free) {
  if (!data.empty()) cfg.fit.data = data;
  if (!cell_name.empty()) cfg.fit.cell = cell_name;
  if (!free.empty()) {
    cfg.fit.free.clear();
    std::stringstream ss(free);
    for (std::string item; std::getline(ss, item, ',');) cfg.fit.free.push_back(fit_param_from_string(item));
  }
  if (cfg.fit.data.empty()) throw ConfigError("fit: no measured spectrum (use --data or fit.data)");
  const CellConfig& cell = cfg.cell(cfg.fit.cell);
  if (cfg.fit.model == SpectrumModel::Absorption && cell.geometry == Geometry::Longitudinal)
    cfg.fit.model = SpectrumModel::FaradayCrossed;
  cfg.validate();
  const fs::path dir = prepare_out(cfg);
  const MeasuredSpectrum m = read_measured_csv(cfg.fit.data);
  const FitResult r = fit_spectrum(m, cell, {cfg.fit.free, cfg.fit.model, cfg.fit.max_evaluations});

  const Eigen::VectorXd model = model_transmission(r.cell, cfg.fit.model, m.detuning_ghz);
  const std::vector<std::string> names{"Delta_GHz", "T_measured", "T_model"};
  const std::vector<Eigen::VectorXd> cols{m.detuning_ghz, m.transmission, model};
  write_columns(dir / "fit.dat", names, cols);

  json params = json::object();
  for (std::size_t i = 0; i < r.free.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    double v = r.values(idx), se = r.standard_errors(idx);
    std::string key(to_string(r.free[i]));
    switch (r.free[i]) {
      case FitParam::Temperature: v = to_c(v), key = "temperature_C"; break;
      case FitParam::Field: v = to_mt(v), se = to_mt(se), key = "B_mT"; break;
      case FitParam::FractionRb87: key = "fraction_Rb87"; break;
      case FitParam::Length: v *= 100.0, se *= 100.0, key = "length_cm"; break;
    }
    params[key] = {{"value", v}, {"standard_error", se}};
  }
  json cov = json::array();
  for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.covariance.cols(); ++j) row.push_back(r.covariance(i, j));
    cov.push_back(row);
  }
  json report = make_report("fit", cfg);
  report["results"] = {{"parameters", params},
                       {"covariance_SI", cov},
                       {"rms_residual", r.rms_residual},
                       {"evaluations", r.evaluations},
                       {"converged", r.converged},
                       {"degenerate", r.degenerate},
                       {"warning", r.warning}};
  std::cout << "rms residual " << r.rms_residual << (r.degenerate ? " (degenerate)" : "") << '\n';
  if (!r.warning.empty()) std::cerr << "warning: " << r.warning << '\n';
  finish(dir, "fit", report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magneto-optical rubidium filter simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(tool_version));

  Globals g;
  app.add_option("--config", g.config, "JSON run configuration");
  g.seed_opt = app.add_option("--seed", g.seed, "random seed");
  g.out_opt = app.add_option("--out", g.out, "output directory");
  g.grid_opt = app.add_option("--grid-points", g.grid_points, "detuning grid points");
  app.add_flag("--psi-sweep", g.psi_sweep, "sweep the absorption-cell polarization angle");
  g.preset_opt = app.add_option("--preset", g.preset, "named preset (default, paper-optimum, low-field)");

  auto* constants_cmd = app.add_subcommand("constants", "dump the atomic data registry");

  std::string lines_cell = "absorption", lines_iso = "all";
  auto* lines_cmd = app.add_subcommand("lines", "Zeeman-resolved line table of a cell");
  lines_cmd->add_option("--cell", lines_cell, "cell name");
  lines_cmd->add_option("--isotope", lines_iso, "Rb85, Rb87 or all");

  std::string spectrum_cell;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "susceptibility and transmission per cell");
  spectrum_cmd->add_option("--cell", spectrum_cell, "only this cell");

  auto* cascade_cmd = app.add_subcommand("cascade", "transmission through the filter chain");
  auto* optimize_cmd = app.add_subcommand("optimize", "search the operating parameters");

  std::string noise_preset;
  std::int64_t frames = 0;
  auto* photon_cmd = app.add_subcommand("photon-sim", "Monte Carlo photon counts and correlations");
  photon_cmd->add_option("--noise", noise_preset, "filtered or unfiltered");
  photon_cmd->add_option("--frames", frames, "number of frames");

  std::string fit_data, fit_cell, fit_free;
  auto* fit_cmd = app.add_subcommand("fit", "fit a cell to a measured spectrum");
  fit_cmd->add_option("--data", fit_data, "measured CSV (Delta_GHz, T[, weight])");
  fit_cmd->add_option("--cell", fit_cell, "cell to fit");
  fit_cmd->add_option("--free", fit_free, "comma-separated subset of T,B,f87,L");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig cfg = resolve(g);
    if (*constants_cmd) run_constants(cfg);
    else if (*lines_cmd) run_lines(cfg, lines_cell, lines_iso);
    else if (*spectrum_cmd) run_spectrum(cfg, spectrum_cell, g.psi_sweep);
    else if (*cascade_cmd) run_cascade(cfg, g.psi_sweep);
    else if (*optimize_cmd) run_optimize(cfg);
    else if (*photon_cmd) run_photon_sim(cfg, noise_preset, frames);
    else if (*fit_cmd) run_fit(cfg, fit_data, fit_cell, fit_free);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& issue : e.issues()) std::cerr << "  " << issue << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
