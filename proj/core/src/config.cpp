#include "donorspin/config.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "donorspin/energetics.hpp"
#include "donorspin/errors.hpp"

namespace donorspin {

namespace {

using nlohmann::ordered_json;

std::string type_name(const ordered_json& j) {
  if (j.is_number()) return "number";
  return j.type_name();
}

/// Tracks which keys of one JSON object were consumed; everything else is an
/// unknown field.
class Cursor {
 public:
  Cursor(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const ordered_json* take(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const ordered_json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(key, *v, "a number");
    return v->get<double>();
  }

  int integer(const std::string& key, int fallback) {
    const ordered_json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(key, *v, "an integer");
    return v->get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const ordered_json* v = take(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(key, *v, "a boolean");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const ordered_json* v = take(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(key, *v, "a string");
    return v->get<std::string>();
  }

  std::string member_path(const std::string& key) const { return path_ + "." + key; }

  /// Call after all expected keys were taken.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ValidationError(member_path(it.key()) + ": unknown field");
  }

 private:
  [[noreturn]] void fail(const std::string& key, const ordered_json& v,
                         const std::string& expected) const {
    throw ValidationError(member_path(key) + ": expected " + expected + ", got " + type_name(v));
  }

  const ordered_json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Branch parse_branch(const std::string& s, const std::string& path) {
  if (s == "up") return Branch::UpElectron;
  if (s == "down") return Branch::DownElectron;
  throw ValidationError(path + ": expected \"up\" or \"down\", got \"" + s + "\"");
}

std::string branch_name(Branch b) { return b == Branch::UpElectron ? "up" : "down"; }

std::string resolve_path(const std::string& raw, const std::filesystem::path& base_dir) {
  if (raw.empty()) return raw;
  std::filesystem::path p(raw);
  if (!p.is_absolute()) p = base_dir / p;
  return p.lexically_normal().generic_string();
}

void parse_system(Cursor& root, SpinSystemConfig& sys, double& temperature_k) {
  if (const ordered_json* j = root.take("system")) {
    Cursor c(*j, root.member_path("system"));
    sys.g_electron = c.number("g_electron", sys.g_electron);
    sys.g_nuclear = c.number("g_nuclear", sys.g_nuclear);
    sys.a_hyperfine_hz = c.number("a_hyperfine_hz", sys.a_hyperfine_hz);
    sys.g_excited = c.number("g_excited", sys.g_excited);
    sys.b_field_t = c.number("b_field_t", sys.b_field_t);
    sys.excited_splitting_hz = c.number("excited_splitting_hz", sys.excited_splitting_hz);
    sys.secular_only = c.boolean("secular_only", sys.secular_only);
    temperature_k = c.number("temperature_k", temperature_k);
    c.finish();
  }
}

void parse_sweep_sections(Cursor& root, RunConfig& cfg) {
  parse_system(root, cfg.sweep.system, cfg.temperature_k);
  if (const ordered_json* j = root.take("pump")) {
    Cursor c(*j, root.member_path("pump"));
    cfg.sweep.pump.branch =
        parse_branch(c.text("branch", branch_name(cfg.sweep.pump.branch)),
                     c.member_path("branch"));
    cfg.sweep.pump.rabi_hz = c.number("rabi_hz", cfg.sweep.pump.rabi_hz);
    cfg.sweep.pump.detuning_hz = c.number("detuning_hz", cfg.sweep.pump.detuning_hz);
    c.finish();
  }
  if (const ordered_json* j = root.take("probe")) {
    Cursor c(*j, root.member_path("probe"));
    cfg.sweep.probe_rabi_hz = c.number("rabi_hz", cfg.sweep.probe_rabi_hz);
    c.finish();
  }
  if (const ordered_json* j = root.take("grid")) {
    Cursor c(*j, root.member_path("grid"));
    cfg.sweep.grid.start_hz = c.number("start_hz", cfg.sweep.grid.start_hz);
    cfg.sweep.grid.stop_hz = c.number("stop_hz", cfg.sweep.grid.stop_hz);
    cfg.sweep.grid.points = c.integer("points", cfg.sweep.grid.points);
    c.finish();
  }
  if (const ordered_json* j = root.take("rates")) {
    Cursor c(*j, root.member_path("rates"));
    DissipatorSpec& r = cfg.sweep.rates;
    r.gamma_rad_hz = c.number("gamma_rad_hz", r.gamma_rad_hz);
    r.branching_up = c.number("branching_up", r.branching_up);
    r.gamma_deph_opt_hz = c.number("gamma_deph_opt_hz", r.gamma_deph_opt_hz);
    r.gamma_e_relax_hz = c.number("gamma_e_relax_hz", r.gamma_e_relax_hz);
    r.w_flipflop_down_hz = c.number("w_flipflop_down_hz", r.w_flipflop_down_hz);
    r.w_flipflop_up_hz = c.number("w_flipflop_up_hz", r.w_flipflop_up_hz);
    r.w_nuc_flip_hz = c.number("w_nuc_flip_hz", r.w_nuc_flip_hz);
    c.finish();
  }
  if (const ordered_json* j = root.take("ensemble")) {
    Cursor c(*j, root.member_path("ensemble"));
    cfg.sweep.ensemble.fwhm_hz =
        c.number("inhomogeneous_fwhm_hz", cfg.sweep.ensemble.fwhm_hz);
    cfg.sweep.ensemble.nodes = c.integer("nodes", cfg.sweep.ensemble.nodes);
    c.finish();
  }
}

void parse_power_series(Cursor& root, RunConfig& cfg) {
  if (const ordered_json* j = root.take("power_series")) {
    Cursor c(*j, root.member_path("power_series"));
    if (const ordered_json* arr = c.take("pump_rabi_hz")) {
      if (!arr->is_array())
        throw ValidationError(c.member_path("pump_rabi_hz") + ": expected an array of numbers");
      cfg.power_rabi_hz.clear();
      for (const auto& v : *arr) {
        if (!v.is_number())
          throw ValidationError(c.member_path("pump_rabi_hz") + ": expected an array of numbers");
        cfg.power_rabi_hz.push_back(v.get<double>());
      }
    }
    c.finish();
  }
}

void parse_energetics(Cursor& root, RunConfig& cfg, const std::filesystem::path& base_dir) {
  if (const ordered_json* j = root.take("energetics")) {
    Cursor c(*j, root.member_path("energetics"));
    EnergeticsConfig& e = cfg.energetics;
    e.defect_table = resolve_path(c.text("defect_table", e.defect_table), base_dir);
    e.chemical_potentials =
        resolve_path(c.text("chemical_potentials", e.chemical_potentials), base_dir);
    e.gap_ev = c.number("gap_ev", e.gap_ev);
    e.ef_grid_points = c.integer("ef_grid_points", e.ef_grid_points);
    if (const ordered_json* jb = c.take("binding")) {
      Cursor cb(*jb, c.member_path("binding"));
      BindingSpec b;
      b.complex_name = cb.text("complex", "");
      if (b.complex_name.empty())
        throw ValidationError(cb.member_path("complex") + ": must name the complex defect");
      b.complex_q = cb.integer("complex_q", 0);
      const ordered_json* parts = cb.take("parts");
      if (!parts || !parts->is_array() || parts->empty())
        throw ValidationError(cb.member_path("parts") + ": expected a non-empty array");
      for (size_t i = 0; i < parts->size(); ++i) {
        Cursor cp((*parts)[i], cb.member_path("parts") + "[" + std::to_string(i) + "]");
        BindingPartRef ref;
        ref.defect = cp.text("defect", "");
        if (ref.defect.empty())
          throw ValidationError(cp.member_path("defect") + ": must name a defect");
        ref.q = cp.integer("q", 0);
        cp.finish();
        b.parts.push_back(std::move(ref));
      }
      cb.finish();
      e.binding = std::move(b);
    }
    c.finish();
  }
}

void parse_extrapolate(Cursor& root, RunConfig& cfg, const std::filesystem::path& base_dir) {
  if (const ordered_json* j = root.take("extrapolate")) {
    Cursor c(*j, root.member_path("extrapolate"));
    ExtrapolateConfig& e = cfg.extrapolate;
    e.points_table = resolve_path(c.text("points_table", e.points_table), base_dir);
    e.n_min = c.integer("n_min", e.n_min);
    if (const ordered_json* ja = c.take("anchor")) {
      Cursor ca(*ja, c.member_path("anchor"));
      HyperfinePoint a;
      a.n_atoms = ca.integer("n_atoms", 0);
      a.a_mhz = ca.number("a_mhz", 0.0);
      a.method = ca.text("method", "hybrid");
      ca.finish();
      e.anchor = std::move(a);
    }
    c.finish();
  }
}

void require_table(const std::string& path, const std::string& field) {
  if (path.empty()) throw ValidationError(field + ": required for this subcommand");
  if (!std::filesystem::exists(path))
    throw ValidationError(field + ": file '" + path + "' does not exist");
}

void validate_run(const RunConfig& cfg) {
  if (cfg.threads < 1) throw ValidationError("threads: must be >= 1");
  if (!(cfg.temperature_k > 0.0)) throw ValidationError("system.temperature_k: must be > 0");

  switch (cfg.subcommand) {
    case Subcommand::CptSweep:
      cfg.sweep.validate();
      break;
    case Subcommand::PowerSeries:
      cfg.sweep.validate();
      if (cfg.power_rabi_hz.size() < 2)
        throw ValidationError("power_series.pump_rabi_hz: need at least two values");
      for (double r : cfg.power_rabi_hz)
        if (!std::isfinite(r) || r < 0.0)
          throw ValidationError("power_series.pump_rabi_hz: entries must be finite and >= 0");
      break;
    case Subcommand::Energetics: {
      require_table(cfg.energetics.defect_table, "energetics.defect_table");
      require_table(cfg.energetics.chemical_potentials, "energetics.chemical_potentials");
      HostBand band{cfg.energetics.gap_ev};
      band.validate();
      if (cfg.energetics.ef_grid_points < 2)
        throw ValidationError("energetics.ef_grid_points: must be >= 2");
      break;
    }
    case Subcommand::Extrapolate:
      require_table(cfg.extrapolate.points_table, "extrapolate.points_table");
      if (cfg.extrapolate.n_min < 16)
        throw ValidationError("extrapolate.n_min: must be >= 16");
      if (cfg.extrapolate.anchor) cfg.extrapolate.anchor->validate();
      break;
    case Subcommand::Levels:
      cfg.sweep.system.validate();
      break;
  }
}

ordered_json echo_json(const RunConfig& cfg) {
  ordered_json j;
  j["subcommand"] = subcommand_name(cfg.subcommand);
  j["output_dir"] = cfg.output_dir;
  j["threads"] = cfg.threads;

  const SpinSystemConfig& s = cfg.sweep.system;
  j["system"] = {{"g_electron", s.g_electron},
                 {"g_nuclear", s.g_nuclear},
                 {"a_hyperfine_hz", s.a_hyperfine_hz},
                 {"g_excited", s.g_excited},
                 {"b_field_t", s.b_field_t},
                 {"excited_splitting_hz", s.excited_splitting_hz},
                 {"secular_only", s.secular_only},
                 {"temperature_k", cfg.temperature_k}};
  j["pump"] = {{"branch", branch_name(cfg.sweep.pump.branch)},
               {"rabi_hz", cfg.sweep.pump.rabi_hz},
               {"detuning_hz", cfg.sweep.pump.detuning_hz}};
  j["probe"] = {{"rabi_hz", cfg.sweep.probe_rabi_hz}};
  j["grid"] = {{"start_hz", cfg.sweep.grid.start_hz},
               {"stop_hz", cfg.sweep.grid.stop_hz},
               {"points", cfg.sweep.grid.points}};
  const DissipatorSpec& r = cfg.sweep.rates;
  j["rates"] = {{"gamma_rad_hz", r.gamma_rad_hz},
                {"branching_up", r.branching_up},
                {"gamma_deph_opt_hz", r.gamma_deph_opt_hz},
                {"gamma_e_relax_hz", r.gamma_e_relax_hz},
                {"w_flipflop_down_hz", r.w_flipflop_down_hz},
                {"w_flipflop_up_hz", r.w_flipflop_up_hz},
                {"w_nuc_flip_hz", r.w_nuc_flip_hz}};
  j["ensemble"] = {{"inhomogeneous_fwhm_hz", cfg.sweep.ensemble.fwhm_hz},
                   {"nodes", cfg.sweep.ensemble.nodes}};
  j["power_series"] = {{"pump_rabi_hz", cfg.power_rabi_hz}};

  ordered_json je = {{"defect_table", cfg.energetics.defect_table},
                     {"chemical_potentials", cfg.energetics.chemical_potentials},
                     {"gap_ev", cfg.energetics.gap_ev},
                     {"ef_grid_points", cfg.energetics.ef_grid_points}};
  if (cfg.energetics.binding) {
    ordered_json parts = ordered_json::array();
    for (const BindingPartRef& p : cfg.energetics.binding->parts)
      parts.push_back({{"defect", p.defect}, {"q", p.q}});
    je["binding"] = {{"complex", cfg.energetics.binding->complex_name},
                     {"complex_q", cfg.energetics.binding->complex_q},
                     {"parts", parts}};
  }
  j["energetics"] = je;

  ordered_json jx = {{"points_table", cfg.extrapolate.points_table},
                     {"n_min", cfg.extrapolate.n_min}};
  if (cfg.extrapolate.anchor)
    jx["anchor"] = {{"n_atoms", cfg.extrapolate.anchor->n_atoms},
                    {"a_mhz", cfg.extrapolate.anchor->a_mhz},
                    {"method", cfg.extrapolate.anchor->method}};
  j["extrapolate"] = jx;
  return j;
}

}  // namespace

std::string subcommand_name(Subcommand sc) {
  switch (sc) {
    case Subcommand::CptSweep: return "cpt-sweep";
    case Subcommand::PowerSeries: return "power-series";
    case Subcommand::Energetics: return "energetics";
    case Subcommand::Extrapolate: return "extrapolate";
    case Subcommand::Levels: return "levels";
  }
  throw ValidationError("unreachable subcommand value");
}

Subcommand subcommand_from(const std::string& name) {
  for (Subcommand sc : {Subcommand::CptSweep, Subcommand::PowerSeries, Subcommand::Energetics,
                        Subcommand::Extrapolate, Subcommand::Levels})
    if (subcommand_name(sc) == name) return sc;
  throw ValidationError("unknown subcommand '" + name +
                        "' (expected cpt-sweep, power-series, energetics, extrapolate or levels)");
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");

  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }

  const std::filesystem::path base_dir = std::filesystem::path(path).parent_path();
  RunConfig cfg;
  Cursor root(doc, "config");

  const ordered_json* sub = root.take("subcommand");
  if (!sub || !sub->is_string())
    throw ValidationError("config.subcommand: required (cpt-sweep, power-series, energetics, "
                          "extrapolate or levels)");
  cfg.subcommand = subcommand_from(sub->get<std::string>());

  cfg.output_dir = root.text("output_dir", cfg.output_dir);
  cfg.threads = root.integer("threads", cfg.threads);
  parse_sweep_sections(root, cfg);
  parse_power_series(root, cfg);
  parse_energetics(root, cfg, base_dir);
  parse_extrapolate(root, cfg, base_dir);
  root.finish();

  validate_run(cfg);
  return cfg;
}

std::string resolved_config_text(const RunConfig& cfg) {
  return echo_json(cfg).dump(2) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
  ordered_json j = echo_json(cfg);
  j.erase("output_dir");
  j.erase("threads");
  const std::string dump = j.dump();

  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace donorspin
