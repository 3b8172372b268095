#include "rbfilter/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "rbfilter/error.hpp"

namespace rbf {

using nlohmann::json;

namespace {

// Unit conversions at the file boundary. `to_si` is the only direction that
// is computed; the reverse searches the neighbouring doubles so that saving
// and reloading reproduces the SI value bit for bit.
struct Unit {
  double (*to_si)(double);
  double (*guess)(double);

  double from_si(double si) const {
    const double g = guess(si);
    if (!std::isfinite(g) || to_si(g) == si) return g;
    double lo = g, hi = g;
    for (int i = 0; i < 64; ++i) {
      lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
      if (to_si(lo) == si) return lo;
      hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
      if (to_si(hi) == si) return hi;
    }
    return g;
  }
};

constexpr double c0 = constants::zero_celsius;
const Unit celsius{[](double c) { return c + c0; }, [](double k) { return k - c0; }};
const Unit kelvin_diff{[](double c) { return c; }, [](double k) { return k; }};
const Unit centimetre{[](double v) { return v / 100.0; }, [](double m) { return m * 100.0; }};
const Unit millitesla{[](double v) { return v / 1000.0; }, [](double t) { return t * 1000.0; }};
const Unit degree{[](double v) { return v * constants::pi / 180.0; },
                  [](double r) { return r * 180.0 / constants::pi; }};
const Unit mhz{[](double v) { return v * 1e6; }, [](double hz) { return hz / 1e6; }};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

class Reader {
 public:
  std::vector<std::string> issues;

  bool object(const json& j, const std::string& path,
              std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
      issues.push_back(path + ": expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      bool ok = false;
      for (std::string_view a : allowed) ok = ok || a == key;
      if (!ok) issues.push_back(join(path, key) + ": unknown key");
    }
    return true;
  }

  std::optional<double> number(const json& j, std::string_view key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (!it->is_number()) {
      issues.push_back(join(path, key) + ": expected a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  void number(const json& j, std::string_view key, const std::string& path, double& out,
              const Unit* unit = nullptr) {
    if (auto v = number(j, key, path)) out = unit ? unit->to_si(*v) : *v;
  }

  template <class Int>
  void integer(const json& j, std::string_view key, const std::string& path, Int& out) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number_integer()) {
      issues.push_back(join(path, key) + ": expected an integer");
      return;
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (it->is_number_unsigned()) out = it->get<Int>();
      else issues.push_back(join(path, key) + ": expected a non-negative integer");
    } else {
      const auto v = it->get<std::int64_t>();
      if (v < std::numeric_limits<Int>::min() || v > std::numeric_limits<Int>::max())
        issues.push_back(join(path, key) + ": integer out of range");
      else out = static_cast<Int>(v);
    }
  }

  void boolean(const json& j, std::string_view key, const std::string& path, bool& out) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_boolean()) issues.push_back(join(path, key) + ": expected true or false");
    else out = it->get<bool>();
  }

  std::optional<std::string> string(const json& j, std::string_view key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (!it->is_string()) {
      issues.push_back(join(path, key) + ": expected a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  void range(const json& j, std::string_view key, const std::string& path, double& lo, double& hi,
             const Unit& unit) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      issues.push_back(join(path, key) + ": expected [lower, upper]");
      return;
    }
    lo = unit.to_si((*it)[0].get<double>());
    hi = unit.to_si((*it)[1].get<double>());
  }

  template <class F>
  void guarded(const std::string& where, F&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      issues.push_back(where + ": " + e.what());
    }
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }
};

CellConfig base_cell(std::string_view name) {
  if (name == "absorption") return FilterHardware::default_absorption_cell();
  if (name == "faraday") return FilterHardware::default_faraday_cell();
  CellConfig c;
  c.name = std::string(name);
  return c;
}

ChainSpec default_chain_spec() {
  using K = ChainElementSpec::Kind;
  ChainSpec s;
  s.elements = {{K::Polarizer, 0.0, 0.0, ""},
                {K::Cell, 0.0, 0.0, "absorption"},
                {K::Polarizer, 0.0, 1e-5, ""},
                {K::Rotator, 0.0, 0.0, "faraday"},
                {K::Polarizer, constants::pi / 2.0, 1e-5, ""}};
  return s;
}

std::string_view kind_name(ChainElementSpec::Kind k) {
  switch (k) {
    case ChainElementSpec::Kind::Polarizer: return "polarizer";
    case ChainElementSpec::Kind::Cell: return "cell";
    case ChainElementSpec::Kind::Rotator: return "rotator";
  }
  return "?";
}

void read_cell(Reader& r, const json& j, const std::string& path, CellConfig& c) {
  r.number(j, "length_cm", path, c.length_m, &centimetre);
  r.number(j, "temperature_C", path, c.temperature_k, &celsius);
  r.number(j, "temperature_offset_C", path, c.temperature_offset_k, &kelvin_diff);
  r.number(j, "B_mT", path, c.b_tesla, &millitesla);
  if (auto g = r.string(j, "geometry", path))
    r.guarded(Reader::join(path, "geometry"), [&] { c.geometry = geometry_from_string(*g); });
  r.number(j, "fraction_Rb85", path, c.fraction_rb85);
  r.number(j, "fraction_Rb87", path, c.fraction_rb87);
  r.number(j, "buffer_pressure_Pa", path, c.buffer_pressure_pa);
  r.number(j, "pressure_broadening_MHz_per_Pa", path, c.pressure_broadening_hz_per_pa, &mhz);
  r.number(j, "psi_deg", path, c.psi_rad, &degree);
}

json cell_json(const CellConfig& c) {
  return {{"name", c.name},
          {"length_cm", centimetre.from_si(c.length_m)},
          {"temperature_C", celsius.from_si(c.temperature_k)},
          {"temperature_offset_C", kelvin_diff.from_si(c.temperature_offset_k)},
          {"B_mT", millitesla.from_si(c.b_tesla)},
          {"geometry", std::string(to_string(c.geometry))},
          {"fraction_Rb85", c.fraction_rb85},
          {"fraction_Rb87", c.fraction_rb87},
          {"buffer_pressure_Pa", c.buffer_pressure_pa},
          {"pressure_broadening_MHz_per_Pa", mhz.from_si(c.pressure_broadening_hz_per_pa)},
          {"psi_deg", degree.from_si(c.psi_rad)}};
}

}  // namespace

const CellConfig& RunConfig::cell(std::string_view name) const {
  for (const auto& c : cells)
    if (c.name == name) return c;
  throw ConfigError("no cell named '" + std::string(name) + "'");
}

FilterChain RunConfig::filter_chain() const {
  FilterChain out;
  out.wollaston_extinction = chain.wollaston_extinction;
  out.input_angle_rad = chain.input_angle_rad;
  for (const auto& e : chain.elements) {
    switch (e.kind) {
      case ChainElementSpec::Kind::Polarizer:
        out.elements.emplace_back(Polarizer{e.angle_rad, e.extinction});
        break;
      case ChainElementSpec::Kind::Cell:
        out.elements.emplace_back(AbsorptionCell{cell(e.cell)});
        break;
      case ChainElementSpec::Kind::Rotator:
        out.elements.emplace_back(RotatorCell{cell(e.cell)});
        break;
    }
  }
  return out;
}

FilterHardware RunConfig::hardware() const {
  FilterHardware hw;
  hw.chain_template = filter_chain();
  return hw;
}

void RunConfig::validate() const {
  Reader r;
  auto& issues = r.issues;
  const auto temp_range = [&](const std::string& path, double k) {
    const double c = k - c0;
    if (!(c >= min_cell_temperature_c && c <= max_cell_temperature_c))
      issues.push_back(path + ": " + fmt(c) + " C is outside the valid range [" +
                       fmt(min_cell_temperature_c) + ", " + fmt(max_cell_temperature_c) + "] C");
  };

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellConfig& c = cells[i];
    const std::string path = "cells[" + std::to_string(i) + "]";
    if (c.name.empty()) issues.push_back(path + ".name: must not be empty");
    for (std::size_t k = 0; k < i; ++k)
      if (cells[k].name == c.name) issues.push_back(path + ".name: duplicate cell '" + c.name + "'");
    temp_range(path + ".temperature_C", c.temperature_k);
    if (!(std::abs(c.temperature_offset_k) <= 20.0))
      issues.push_back(path + ".temperature_offset_C: must lie in [-20, 20] C");
    if (!(std::abs(c.b_tesla) <= 1.0)) issues.push_back(path + ".B_mT: must lie in [-1000, 1000] mT");
    if (!(c.length_m > 0.0 && c.length_m <= 10.0))
      issues.push_back(path + ".length_cm: must lie in (0, 1000] cm");
    if (!(c.psi_rad >= -2.0 * constants::pi && c.psi_rad <= 2.0 * constants::pi))
      issues.push_back(path + ".psi_deg: must lie in [-360, 360] deg");
    r.guarded(path, [&] { c.validate(); });
  }

  const auto has_cell = [&](const std::string& n) {
    for (const auto& c : cells)
      if (c.name == n) return true;
    return false;
  };
  if (chain.elements.empty()) issues.push_back("chain.elements: must not be empty");
  for (std::size_t i = 0; i < chain.elements.size(); ++i) {
    const auto& e = chain.elements[i];
    const std::string path = "chain.elements[" + std::to_string(i) + "]";
    if (e.kind == ChainElementSpec::Kind::Polarizer) {
      if (!(e.extinction >= 0.0 && e.extinction <= 1.0))
        issues.push_back(path + ".extinction: must lie in [0, 1]");
      if (!std::isfinite(e.angle_rad)) issues.push_back(path + ".angle_deg: must be finite");
      continue;
    }
    if (!has_cell(e.cell)) {
      issues.push_back(path + ".cell: no cell named '" + e.cell + "'");
      continue;
    }
    const Geometry need = e.kind == ChainElementSpec::Kind::Cell ? Geometry::Transverse
                                                                  : Geometry::Longitudinal;
    if (cell(e.cell).geometry != need)
      issues.push_back(path + ": a " + std::string(kind_name(e.kind)) + " element needs a " +
                       std::string(to_string(need)) + " cell, '" + e.cell + "' is " +
                       std::string(to_string(cell(e.cell).geometry)));
  }
  if (!(chain.wollaston_extinction >= 0.0 && chain.wollaston_extinction <= 1.0))
    issues.push_back("chain.wollaston_extinction: must lie in [0, 1]");
  if (!std::isfinite(chain.input_angle_rad)) issues.push_back("chain.input_angle_deg: must be finite");

  if (!(grid.points >= 2 && grid.points <= 2000000))
    issues.push_back("grid.points: must lie in [2, 2000000]");
  if (!std::isfinite(grid.min_ghz) || !std::isfinite(grid.max_ghz) || !(grid.max_ghz > grid.min_ghz))
    issues.push_back("grid: need finite min_GHz < max_GHz");

  r.guarded("fom", [&] { fom.validate(); });

  if (param_box.dims() != 4) {
    issues.push_back("param_box: needs four ranges");
  } else {
    const char* names[] = {"param_box.T_abs_C", "param_box.T_faraday_C", "param_box.B_abs_mT",
                           "param_box.B_faraday_mT"};
    for (int k = 0; k < 4; ++k) {
      const double lo = param_box.lower(k), hi = param_box.upper(k);
      if (!(lo <= hi)) issues.push_back(std::string(names[k]) + ": empty range (lower > upper)");
      if (k < 2) {
        temp_range(std::string(names[k]) + "[0]", lo);
        temp_range(std::string(names[k]) + "[1]", hi);
      } else if (!(std::abs(lo) <= 1.0 && std::abs(hi) <= 1.0)) {
        issues.push_back(std::string(names[k]) + ": must lie in [-1000, 1000] mT");
      }
    }
  }
  r.guarded("optimizer", [&] { optimizer.validate(4); });
  r.guarded("noise", [&] { noise.validate(); });

  if (!(photon_sim.frames >= 1 && photon_sim.frames <= 100000000))
    issues.push_back("photon_sim.frames: must lie in [1, 1e8]");
  if (!(photon_sim.modes >= 1 && photon_sim.modes <= 1000))
    issues.push_back("photon_sim.modes: must lie in [1, 1000]");
  if (!(photon_sim.region_area_mrad2 > 0.0) || !std::isfinite(photon_sim.region_area_mrad2))
    issues.push_back("photon_sim.region_area_mrad2: must be > 0");
  if (photon_sim.jackknife_blocks < 2) issues.push_back("photon_sim.jackknife_blocks: must be >= 2");
  else if (photon_sim.frames < 2 * photon_sim.jackknife_blocks)
    issues.push_back("photon_sim.frames: need at least two frames per jackknife block");

  if (!has_cell(fit.cell)) {
    issues.push_back("fit.cell: no cell named '" + fit.cell + "'");
  } else if ((fit.model == SpectrumModel::Absorption) !=
             (cell(fit.cell).geometry == Geometry::Transverse)) {
    issues.push_back("fit.model: '" + std::string(to_string(fit.model)) +
                     "' does not match the geometry of cell '" + fit.cell + "'");
  }
  if (fit.free.empty()) issues.push_back("fit.free: must name at least one parameter");
  if (fit.max_evaluations < 10) issues.push_back("fit.max_evaluations: must be >= 10");
  if (output.dir.empty()) issues.push_back("output.dir: must not be empty");

  if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::vector<std::string> preset_names() { return {"default", "paper-optimum", "low-field"}; }

RunConfig preset(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  c.cells = {FilterHardware::default_absorption_cell(), FilterHardware::default_faraday_cell()};
  c.chain = default_chain_spec();
  if (name == "default") return c;
  if (name == "paper-optimum") {
    // Absorption 100 C at 10 mT, Faraday 102 C at 10 mT along the beam.
    c.cells[1].temperature_offset_k = optimum_faraday_offset_k;
    return c;
  }
  if (name == "low-field") {
    c.cells[1].b_tesla = 1e-3;
    return c;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

RunConfig config_from_json(const json& j, std::string_view base_preset) {
  Reader r;
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  r.object(j, "", {"preset", "seed", "cells", "chain", "grid", "fom", "param_box", "optimizer",
                   "noise", "photon_sim", "fit", "output"});

  std::string name(base_preset);
  if (auto p = r.string(j, "preset", "")) name = *p;
  RunConfig c;
  try {
    c = preset(name);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("preset: ") + e.what());
  }

  r.integer(j, "seed", "", c.seed);

  if (const auto it = j.find("cells"); it != j.end()) {
    if (!it->is_array()) {
      r.issues.push_back("cells: expected an array of cell objects");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const json& cj = (*it)[i];
        const std::string path = "cells[" + std::to_string(i) + "]";
        if (!r.object(cj, path,
                      {"name", "length_cm", "temperature_C", "temperature_offset_C", "B_mT",
                       "geometry", "fraction_Rb85", "fraction_Rb87", "buffer_pressure_Pa",
                       "pressure_broadening_MHz_per_Pa", "psi_deg"}))
          continue;
        const auto cname = r.string(cj, "name", path);
        if (!cname) {
          if (!cj.contains("name")) r.issues.push_back(path + ".name: required");
          continue;
        }
        CellConfig* target = nullptr;
        for (auto& existing : c.cells)
          if (existing.name == *cname) target = &existing;
        if (!target) {
          c.cells.push_back(base_cell(*cname));
          target = &c.cells.back();
        }
        read_cell(r, cj, path, *target);
      }
    }
  }

  if (const auto it = j.find("chain"); it != j.end() &&
      r.object(*it, "chain", {"elements", "wollaston_extinction", "input_angle_deg"})) {
    r.number(*it, "wollaston_extinction", "chain", c.chain.wollaston_extinction);
    r.number(*it, "input_angle_deg", "chain", c.chain.input_angle_rad, &degree);
    if (const auto el = it->find("elements"); el != it->end()) {
      if (!el->is_array()) {
        r.issues.push_back("chain.elements: expected an array");
      } else {
        c.chain.elements.clear();
        for (std::size_t i = 0; i < el->size(); ++i) {
          const json& ej = (*el)[i];
          const std::string path = "chain.elements[" + std::to_string(i) + "]";
          if (!r.object(ej, path, {"type", "angle_deg", "extinction", "cell"})) continue;
          ChainElementSpec e;
          const auto type = r.string(ej, "type", path);
          if (!type) {
            if (!ej.contains("type")) r.issues.push_back(path + ".type: required");
            continue;
          }
          if (*type == "polarizer") {
            e.kind = ChainElementSpec::Kind::Polarizer;
            r.number(ej, "angle_deg", path, e.angle_rad, &degree);
            r.number(ej, "extinction", path, e.extinction);
            if (ej.contains("cell")) r.issues.push_back(path + ".cell: not used by a polarizer");
          } else if (*type == "cell" || *type == "rotator") {
            e.kind = *type == "cell" ? ChainElementSpec::Kind::Cell : ChainElementSpec::Kind::Rotator;
            if (auto cn = r.string(ej, "cell", path)) e.cell = *cn;
            else if (!ej.contains("cell")) r.issues.push_back(path + ".cell: required");
            if (ej.contains("angle_deg") || ej.contains("extinction"))
              r.issues.push_back(path + ": angle_deg and extinction belong to polarizers");
          } else {
            r.issues.push_back(path + ".type: expected polarizer, cell or rotator");
            continue;
          }
          c.chain.elements.push_back(e);
        }
      }
    }
  }

  if (const auto it = j.find("grid");
      it != j.end() && r.object(*it, "grid", {"min_GHz", "max_GHz", "points"})) {
    r.number(*it, "min_GHz", "grid", c.grid.min_ghz);
    r.number(*it, "max_GHz", "grid", c.grid.max_ghz);
    r.integer(*it, "points", "grid", c.grid.points);
  }

  if (const auto it = j.find("fom");
      it != j.end() && r.object(*it, "fom", {"stokes_GHz", "anti_stokes_GHz", "write_GHz",
                                             "read_GHz", "min_suppression_dB"})) {
    r.number(*it, "stokes_GHz", "fom", c.fom.stokes_ghz);
    r.number(*it, "anti_stokes_GHz", "fom", c.fom.anti_stokes_ghz);
    r.number(*it, "write_GHz", "fom", c.fom.write_ghz);
    r.number(*it, "read_GHz", "fom", c.fom.read_ghz);
    r.number(*it, "min_suppression_dB", "fom", c.fom.min_suppression_db);
  }

  if (const auto it = j.find("param_box");
      it != j.end() && r.object(*it, "param_box", {"T_abs_C", "T_faraday_C", "B_abs_mT",
                                                   "B_faraday_mT"})) {
    auto& b = c.param_box;
    r.range(*it, "T_abs_C", "param_box", b.lower(0), b.upper(0), celsius);
    r.range(*it, "T_faraday_C", "param_box", b.lower(1), b.upper(1), celsius);
    r.range(*it, "B_abs_mT", "param_box", b.lower(2), b.upper(2), millitesla);
    r.range(*it, "B_faraday_mT", "param_box", b.lower(3), b.upper(3), millitesla);
  }

  if (const auto it = j.find("optimizer");
      it != j.end() && r.object(*it, "optimizer", {"budget", "grid_resolution", "restarts"})) {
    r.integer(*it, "budget", "optimizer", c.optimizer.budget);
    r.integer(*it, "restarts", "optimizer", c.optimizer.restarts);
    if (const auto g = it->find("grid_resolution"); g != it->end()) {
      if (!g->is_array()) {
        r.issues.push_back("optimizer.grid_resolution: expected an array of integers");
      } else {
        c.optimizer.grid_resolution.clear();
        for (const auto& v : *g) {
          if (!v.is_number_integer()) {
            r.issues.push_back("optimizer.grid_resolution: expected integers");
            break;
          }
          c.optimizer.grid_resolution.push_back(v.get<int>());
        }
      }
    }
  }

  if (const auto it = j.find("noise");
      it != j.end() && r.object(*it, "noise", {"preset", "mean_signal", "eta_S", "eta_AS",
                                               "fluorescence", "leakage", "four_wave_mixing",
                                               "intensifier"})) {
    if (auto p = r.string(*it, "preset", "noise")) {
      if (*p == "filtered") c.noise = NoiseModel::filtered();
      else if (*p == "unfiltered") c.noise = NoiseModel::unfiltered();
      else r.issues.push_back("noise.preset: expected filtered or unfiltered");
    }
    r.number(*it, "mean_signal", "noise", c.noise.mean_signal);
    r.number(*it, "eta_S", "noise", c.noise.eta_stokes);
    r.number(*it, "eta_AS", "noise", c.noise.eta_anti_stokes);
    r.number(*it, "fluorescence", "noise", c.noise.fluorescence);
    r.number(*it, "leakage", "noise", c.noise.leakage);
    r.number(*it, "four_wave_mixing", "noise", c.noise.four_wave_mixing);
    r.number(*it, "intensifier", "noise", c.noise.intensifier);
  }

  if (const auto it = j.find("photon_sim");
      it != j.end() && r.object(*it, "photon_sim", {"frames", "modes", "region_area_mrad2",
                                                    "jackknife_blocks"})) {
    r.integer(*it, "frames", "photon_sim", c.photon_sim.frames);
    r.integer(*it, "modes", "photon_sim", c.photon_sim.modes);
    r.number(*it, "region_area_mrad2", "photon_sim", c.photon_sim.region_area_mrad2);
    r.integer(*it, "jackknife_blocks", "photon_sim", c.photon_sim.jackknife_blocks);
  }

  if (const auto it = j.find("fit");
      it != j.end() && r.object(*it, "fit", {"cell", "model", "free", "data", "max_evaluations"})) {
    if (auto s = r.string(*it, "cell", "fit")) c.fit.cell = *s;
    if (auto s = r.string(*it, "model", "fit"))
      r.guarded("fit.model", [&] { c.fit.model = spectrum_model_from_string(*s); });
    if (auto s = r.string(*it, "data", "fit")) c.fit.data = *s;
    r.integer(*it, "max_evaluations", "fit", c.fit.max_evaluations);
    if (const auto f = it->find("free"); f != it->end()) {
      if (!f->is_array()) {
        r.issues.push_back("fit.free: expected an array of parameter names");
      } else {
        c.fit.free.clear();
        for (const auto& v : *f) {
          if (!v.is_string()) {
            r.issues.push_back("fit.free: expected parameter names (T, B, f87, L)");
            break;
          }
          r.guarded("fit.free", [&] { c.fit.free.push_back(fit_param_from_string(v.get<std::string>())); });
        }
      }
    }
  }

  if (const auto it = j.find("output");
      it != j.end() && r.object(*it, "output", {"dir", "trace_csv"})) {
    if (auto s = r.string(*it, "dir", "output")) c.output.dir = *s;
    r.boolean(*it, "trace_csv", "output", c.output.trace_csv);
  }

  // Structural problems first; range checks only on a fully read config.
  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  c.validate();
  return c;
}

RunConfig parse_config(std::string_view text, std::string_view base_preset, std::string_view source) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(std::string(source) + ": parse error at line " + std::to_string(line) +
                      ", column " + std::to_string(col) + ": " + e.what());
  }
  return config_from_json(j, base_preset);
}

RunConfig load_config(const std::filesystem::path& path, std::string_view base_preset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base_preset, path.string());
}

json to_json(const RunConfig& c) {
  json cells = json::array();
  for (const auto& cell : c.cells) cells.push_back(cell_json(cell));

  json elements = json::array();
  for (const auto& e : c.chain.elements) {
    if (e.kind == ChainElementSpec::Kind::Polarizer)
      elements.push_back({{"type", "polarizer"},
                          {"angle_deg", degree.from_si(e.angle_rad)},
                          {"extinction", e.extinction}});
    else
      elements.push_back({{"type", std::string(kind_name(e.kind))}, {"cell", e.cell}});
  }

  const auto& b = c.param_box;
  const auto pair = [](double lo, double hi, const Unit& u) {
    return json::array({u.from_si(lo), u.from_si(hi)});
  };
  json box = json::object();
  if (b.dims() == 4) {
    box = {{"T_abs_C", pair(b.lower(0), b.upper(0), celsius)},
           {"T_faraday_C", pair(b.lower(1), b.upper(1), celsius)},
           {"B_abs_mT", pair(b.lower(2), b.upper(2), millitesla)},
           {"B_faraday_mT", pair(b.lower(3), b.upper(3), millitesla)}};
  }

  json free = json::array();
  for (FitParam p : c.fit.free) free.push_back(std::string(to_string(p)));

  return {
      {"preset", c.preset},
      {"seed", c.seed},
      {"cells", cells},
      {"chain",
       {{"elements", elements},
        {"wollaston_extinction", c.chain.wollaston_extinction},
        {"input_angle_deg", degree.from_si(c.chain.input_angle_rad)}}},
      {"grid", {{"min_GHz", c.grid.min_ghz}, {"max_GHz", c.grid.max_ghz}, {"points", c.grid.points}}},
      {"fom",
       {{"stokes_GHz", c.fom.stokes_ghz},
        {"anti_stokes_GHz", c.fom.anti_stokes_ghz},
        {"write_GHz", c.fom.write_ghz},
        {"read_GHz", c.fom.read_ghz},
        {"min_suppression_dB", c.fom.min_suppression_db}}},
      {"param_box", box},
      {"optimizer",
       {{"budget", c.optimizer.budget},
        {"grid_resolution", c.optimizer.grid_resolution},
        {"restarts", c.optimizer.restarts}}},
      {"noise",
       {{"mean_signal", c.noise.mean_signal},
        {"eta_S", c.noise.eta_stokes},
        {"eta_AS", c.noise.eta_anti_stokes},
        {"fluorescence", c.noise.fluorescence},
        {"leakage", c.noise.leakage},
        {"four_wave_mixing", c.noise.four_wave_mixing},
        {"intensifier", c.noise.intensifier}}},
      {"photon_sim",
       {{"frames", c.photon_sim.frames},
        {"modes", c.photon_sim.modes},
        {"region_area_mrad2", c.photon_sim.region_area_mrad2},
        {"jackknife_blocks", c.photon_sim.jackknife_blocks}}},
      {"fit",
       {{"cell", c.fit.cell},
        {"model", std::string(to_string(c.fit.model))},
        {"free", free},
        {"data", c.fit.data},
        {"max_evaluations", c.fit.max_evaluations}}},
      {"output", {{"dir", c.output.dir}, {"trace_csv", c.output.trace_csv}}},
  };
}

std::string config_hash(const RunConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rbf
