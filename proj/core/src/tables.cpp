#include "donorspin/tables.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "donorspin/errors.hpp"

namespace donorspin {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // line number, cells
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw ValidationError(path + ":" + std::to_string(line) + ": " + msg);
}

CsvTable read_csv(const std::string& path, const std::vector<std::string>& required_columns) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open table '" + path + "'");

  CsvTable table;
  table.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (table.header.empty()) {
      table.header = split(t, ',');
      for (const std::string& col : required_columns)
        if (std::find(table.header.begin(), table.header.end(), col) == table.header.end())
          fail(path, lineno, "missing column '" + col + "'");
      for (const std::string& col : table.header)
        if (std::find(required_columns.begin(), required_columns.end(), col) ==
            required_columns.end())
          fail(path, lineno, "unknown column '" + col + "'");
      continue;
    }
    auto cells = split(t, ',');
    if (cells.size() != table.header.size())
      fail(path, lineno,
           "expected " + std::to_string(table.header.size()) + " cells, found " +
               std::to_string(cells.size()));
    table.rows.emplace_back(lineno, std::move(cells));
  }
  if (table.header.empty()) throw ValidationError("table '" + path + "' has no header row");
  return table;
}

int column_index(const CsvTable& t, const std::string& name) {
  return static_cast<int>(std::find(t.header.begin(), t.header.end(), name) - t.header.begin());
}

double parse_double(const CsvTable& t, int line, const std::string& col, const std::string& cell) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    fail(t.path, line, "column '" + col + "': cannot parse '" + cell + "' as a number");
  return v;
}

int parse_int(const CsvTable& t, int line, const std::string& col, const std::string& cell) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    fail(t.path, line, "column '" + col + "': cannot parse '" + cell + "' as an integer");
  return v;
}

std::vector<std::string> parse_species_list(const std::string& cell) {
  std::vector<std::string> out;
  for (const std::string& s : split(cell, ';'))
    if (!s.empty()) out.push_back(s);
  return out;
}

}  // namespace

std::vector<DefectEnergyRecord> load_defect_energies(const std::string& path) {
  const CsvTable t = read_csv(path, {"defect", "q", "e_tot_defect_ev", "e_tot_bulk_ev",
                                     "species_added", "species_removed", "correction_ev"});
  const int c_def = column_index(t, "defect");
  const int c_q = column_index(t, "q");
  const int c_ed = column_index(t, "e_tot_defect_ev");
  const int c_eb = column_index(t, "e_tot_bulk_ev");
  const int c_add = column_index(t, "species_added");
  const int c_rem = column_index(t, "species_removed");
  const int c_corr = column_index(t, "correction_ev");

  std::vector<DefectEnergyRecord> out;
  for (const auto& [line, cells] : t.rows) {
    DefectEnergyRecord rec;
    rec.defect = cells[c_def];
    if (rec.defect.empty()) fail(t.path, line, "column 'defect': name must be non-empty");
    rec.q = parse_int(t, line, "q", cells[c_q]);
    rec.e_tot_defect_ev = parse_double(t, line, "e_tot_defect_ev", cells[c_ed]);
    rec.e_tot_bulk_ev = parse_double(t, line, "e_tot_bulk_ev", cells[c_eb]);
    rec.species_added = parse_species_list(cells[c_add]);
    rec.species_removed = parse_species_list(cells[c_rem]);
    if (cells[c_corr].empty()) {
      if (rec.q != 0)
        fail(t.path, line, "column 'correction_ev': must be explicit for charged states");
      rec.correction_ev = 0.0;
    } else {
      rec.correction_ev = parse_double(t, line, "correction_ev", cells[c_corr]);
    }
    rec.validate();
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw ValidationError("table '" + path + "' contains no records");
  return out;
}

std::vector<ChemicalPotentialSet> load_chemical_potentials(const std::string& path) {
  const CsvTable t = read_csv(path, {"condition", "species", "mu_ev"});
  const int c_cond = column_index(t, "condition");
  const int c_sp = column_index(t, "species");
  const int c_mu = column_index(t, "mu_ev");

  std::map<std::string, ChemicalPotentialSet> sets;
  std::vector<std::string> order;
  for (const auto& [line, cells] : t.rows) {
    const std::string cond = cells[c_cond];
    const std::string species = cells[c_sp];
    if (cond.empty() || species.empty())
      fail(t.path, line, "condition and species must be non-empty");
    auto [it, inserted] = sets.try_emplace(cond);
    if (inserted) {
      it->second.condition = cond;
      order.push_back(cond);
    }
    if (!it->second.mu_ev.emplace(species, parse_double(t, line, "mu_ev", cells[c_mu])).second)
      fail(t.path, line, "duplicate species '" + species + "' in condition '" + cond + "'");
  }
  if (sets.empty()) throw ValidationError("table '" + path + "' contains no records");

  std::vector<ChemicalPotentialSet> out;
  for (const std::string& cond : order) out.push_back(sets[cond]);
  return out;
}

std::vector<HyperfinePoint> load_hyperfine_points(const std::string& path) {
  const CsvTable t = read_csv(path, {"n_atoms", "a_mhz", "method"});
  const int c_n = column_index(t, "n_atoms");
  const int c_a = column_index(t, "a_mhz");
  const int c_m = column_index(t, "method");

  std::vector<HyperfinePoint> out;
  for (const auto& [line, cells] : t.rows) {
    HyperfinePoint p;
    p.n_atoms = parse_int(t, line, "n_atoms", cells[c_n]);
    p.a_mhz = parse_double(t, line, "a_mhz", cells[c_a]);
    p.method = cells[c_m];
    try {
      p.validate();
    } catch (const ValidationError& e) {
      fail(t.path, line, e.what());
    }
    out.push_back(std::move(p));
  }
  if (out.empty()) throw ValidationError("table '" + path + "' contains no records");
  return out;
}

}  // namespace donorspin
