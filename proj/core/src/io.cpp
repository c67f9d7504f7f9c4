#include "cep/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cep {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& source, const std::string& message) {
  throw InputError(source + ": " + message);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << text;
}

// Typed member access with a path in the error message.
class Reader {
 public:
  Reader(const json& node, std::string source, std::string where)
      : node_(node), source_(std::move(source)), where_(std::move(where)) {}

  bool has(const char* key) const { return node_.contains(key); }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(source_, where_ + "." + key + " must be a number");
    return v.get<double>();
  }

  double number_or(const char* key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::string text(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(source_, where_ + "." + key + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(source_, where_ + "." + key + " must be an array");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) {
        fail(source_, where_ + "." + key + " must contain only numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json& array(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(source_, where_ + "." + key + " must be an array");
    return v;
  }

 private:
  const json& at(const char* key) const {
    if (!node_.is_object()) fail(source_, where_ + " must be an object");
    auto it = node_.find(key);
    if (it == node_.end()) fail(source_, where_ + ": missing field '" + key + "'");
    return *it;
  }

  const json& node_;
  std::string source_;
  std::string where_;
};

std::string kind_name(UnitKind kind) {
  return kind == UnitKind::kCandidate ? "candidate" : "existing";
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

SystemInstance parse_instance_json(std::string_view text,
                                   const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source, std::string("malformed JSON: ") + e.what());
  }
  const Reader root(doc, source, "instance");
  SystemInstance inst;

  if (root.has("time_grid")) {
    const Reader grid(doc["time_grid"], source, "time_grid");
    inst.time_grid.block_duration = grid.numbers("block_duration");
    if (grid.has("block_count") &&
        grid.number("block_count") != inst.time_grid.block_count()) {
      fail(source, "time_grid.block_count does not match block_duration");
    }
  }
  int k = 0;
  for (const json& z : root.array("zones")) {
    const Reader r(z, source, "zones[" + std::to_string(k++) + "]");
    inst.zones.push_back({r.text("id"), r.number_or("eens_limit", 0.0)});
  }
  k = 0;
  if (root.has("thermal")) {
    for (const json& u : root.array("thermal")) {
      const Reader r(u, source, "thermal[" + std::to_string(k++) + "]");
      ThermalUnit unit;
      unit.name = r.text("name");
      unit.zone = r.text("zone");
      const std::string kind = r.text("kind");
      if (kind == "candidate") {
        unit.kind = UnitKind::kCandidate;
      } else if (kind == "existing") {
        unit.kind = UnitKind::kExisting;
      } else {
        fail(source, "thermal unit '" + unit.name + "': kind must be "
                     "'existing' or 'candidate'");
      }
      unit.investment_cost = r.number_or("investment_cost", 0.0);
      unit.fom = r.number_or("fom", 0.0);
      unit.marginal_cost = r.number("marginal_cost");
      unit.cap_upper = r.number("cap_upper");
      if (!unit.is_candidate()) {
        unit.p_max = r.numbers("p_max");
        unit.p_min = r.has("p_min") ? r.numbers("p_min")
                                    : std::vector<double>(unit.p_max.size(), 0.0);
      }
      inst.thermal.push_back(std::move(unit));
    }
  }
  k = 0;
  if (root.has("lines")) {
    for (const json& l : root.array("lines")) {
      const Reader r(l, source, "lines[" + std::to_string(k++) + "]");
      inst.lines.push_back({r.text("name"), r.text("from_zone"),
                            r.text("to_zone"), r.number("l_max"),
                            r.number("l_min"),
                            r.number_or("wheeling_cost", 0.0)});
    }
  }
  k = 0;
  if (root.has("batteries")) {
    for (const json& b : root.array("batteries")) {
      const Reader r(b, source, "batteries[" + std::to_string(k++) + "]");
      inst.batteries.push_back(
          {r.text("zone"), r.number("energy_capacity"),
           r.number("charge_capacity"), r.number("discharge_capacity"),
           r.number_or("charge_efficiency", 1.0),
           r.number_or("discharge_efficiency", 1.0)});
    }
  }
  k = 0;
  if (root.has("hydro")) {
    for (const json& h : root.array("hydro")) {
      const Reader r(h, source, "hydro[" + std::to_string(k++) + "]");
      HydroUnit unit;
      unit.zone = r.text("zone");
      const std::string tech = r.text("technology");
      const auto parsed =
          tech.size() == 1 ? parse_hydro_tech(tech[0]) : std::nullopt;
      if (!parsed) {
        fail(source, "hydro unit in zone '" + unit.zone +
                         "': technology must be one of R, S, O, C");
      }
      unit.technology = *parsed;
      unit.volume = r.number_or("volume", 0.0);
      unit.turbine_capacity = r.number_or("turbine_capacity", 0.0);
      unit.pump_capacity = r.number_or("pump_capacity", 0.0);
      unit.pump_efficiency = r.number_or("pump_efficiency", 1.0);
      unit.spill_cost = r.number_or("spill_cost", 0.0);
      if (unit.technology == HydroTech::kReservoir) {
        r.number("volume");
        r.number("turbine_capacity");
      } else if (unit.technology != HydroTech::kRunOfRiver) {
        r.number("volume");
        r.number("turbine_capacity");
        r.number("pump_capacity");
      }
      inst.hydro.push_back(unit);
    }
  }
  return inst;
}

std::string emit_instance_json(const SystemInstance& inst) {
  json doc = json::object();
  doc["time_grid"] = {{"block_count", inst.time_grid.block_count()},
                      {"block_duration", inst.time_grid.block_duration}};
  doc["zones"] = json::array();
  for (const Zone& z : inst.zones) {
    doc["zones"].push_back({{"id", z.id}, {"eens_limit", z.eens_limit}});
  }
  doc["thermal"] = json::array();
  for (const ThermalUnit& u : inst.thermal) {
    json j = {{"name", u.name},
              {"zone", u.zone},
              {"kind", kind_name(u.kind)},
              {"investment_cost", u.investment_cost},
              {"fom", u.fom},
              {"marginal_cost", u.marginal_cost},
              {"cap_upper", u.cap_upper}};
    if (!u.is_candidate()) {
      j["p_max"] = u.p_max;
      j["p_min"] = u.p_min;
    }
    doc["thermal"].push_back(std::move(j));
  }
  doc["lines"] = json::array();
  for (const Line& l : inst.lines) {
    doc["lines"].push_back({{"name", l.name},
                            {"from_zone", l.from_zone},
                            {"to_zone", l.to_zone},
                            {"l_max", l.l_max},
                            {"l_min", l.l_min},
                            {"wheeling_cost", l.wheeling_cost}});
  }
  doc["batteries"] = json::array();
  for (const Battery& b : inst.batteries) {
    doc["batteries"].push_back(
        {{"zone", b.zone},
         {"energy_capacity", b.energy_capacity},
         {"charge_capacity", b.charge_capacity},
         {"discharge_capacity", b.discharge_capacity},
         {"charge_efficiency", b.charge_efficiency},
         {"discharge_efficiency", b.discharge_efficiency}});
  }
  doc["hydro"] = json::array();
  for (const HydroUnit& h : inst.hydro) {
    doc["hydro"].push_back({{"zone", h.zone},
                            {"technology", std::string(1, hydro_tech_code(h.technology))},
                            {"volume", h.volume},
                            {"turbine_capacity", h.turbine_capacity},
                            {"pump_capacity", h.pump_capacity},
                            {"pump_efficiency", h.pump_efficiency},
                            {"spill_cost", h.spill_cost}});
  }
  return doc.dump(2) + "\n";
}

SystemInstance read_instance(const fs::path& path) {
  return parse_instance_json(read_file(path), path.string());
}

void write_instance(const fs::path& path, const SystemInstance& instance) {
  write_file(path, emit_instance_json(instance));
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
      cell.remove_prefix(1);
    }
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' ||
                             cell.back() == '\r')) {
      cell.remove_suffix(1);
    }
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct SeriesTarget {
  const SystemInstance* instance;
  std::map<std::string, int> scenario_index;
};

// Reads `scenario,zone[,technology],t,value` rows, calling put(w, n, h, t, v).
template <typename Put>
void read_series_csv(const fs::path& path, const SeriesTarget& target,
                     bool with_technology, Put&& put) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  const std::string src = path.string();
  const std::vector<std::string_view> expected =
      with_technology
          ? std::vector<std::string_view>{"scenario", "zone", "technology", "t",
                                          "value"}
          : std::vector<std::string_view>{"scenario", "zone", "t", "value"};
  std::string line;
  int line_no = 0;
  bool header = false;
  const int blocks = target.instance->num_blocks();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const std::string where = src + ":" + std::to_string(line_no);
    const auto cells = split_csv(line);
    if (!header) {
      if (cells != expected) {
        std::string want;
        for (auto c : expected) want += (want.empty() ? "" : ",") + std::string(c);
        throw InputError(where + ": header must be '" + want + "'");
      }
      header = true;
      continue;
    }
    if (cells.size() != expected.size()) {
      throw InputError(where + ": expected " + std::to_string(expected.size()) +
                       " fields, found " + std::to_string(cells.size()));
    }
    const auto sit = target.scenario_index.find(std::string(cells[0]));
    if (sit == target.scenario_index.end()) {
      throw InputError(where + ": unknown scenario '" + std::string(cells[0]) + "'");
    }
    const int n = target.instance->zone_index(std::string(cells[1]));
    if (n < 0) {
      throw InputError(where + ": unknown zone '" + std::string(cells[1]) + "'");
    }
    int h = 0;
    std::size_t c = 2;
    if (with_technology) {
      const auto tech = cells[2].size() == 1 ? parse_hydro_tech(cells[2][0])
                                             : std::nullopt;
      if (!tech) {
        throw InputError(where + ": technology must be one of R, S, O, C");
      }
      h = static_cast<int>(*tech);
      c = 3;
    }
    int t = 0;
    double value = 0.0;
    if (!parse_number(cells[c], t) || t < 0 || t >= blocks) {
      throw InputError(where + ": block index must be an integer in [0, " +
                       std::to_string(blocks) + ")");
    }
    if (!parse_number(cells[c + 1], value)) {
      throw InputError(where + ": value '" + std::string(cells[c + 1]) +
                       "' is not a number");
    }
    put(sit->second, n, h, t, value, where);
  }
  if (!header) throw InputError(src + ": empty file");
}

}  // namespace

ScenarioSet read_scenarios(const fs::path& manifest_path,
                           SystemInstance& instance) {
  const std::string src = manifest_path.string();
  json doc;
  try {
    doc = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    fail(src, std::string("malformed JSON: ") + e.what());
  }
  const Reader root(doc, src, "manifest");

  std::vector<double> durations;
  if (doc.contains("block_duration") && doc["block_duration"].is_array()) {
    durations = root.numbers("block_duration");
  } else {
    const double dt = root.number("block_duration");
    const double count = root.number("block_count");
    if (count < 1 || count != static_cast<int>(count)) {
      fail(src, "block_count must be a positive integer");
    }
    durations.assign(static_cast<std::size_t>(count), dt);
  }
  if (root.has("block_count") &&
      root.number("block_count") != static_cast<double>(durations.size())) {
    fail(src, "block_count does not match block_duration");
  }
  if (instance.time_grid.block_duration.empty()) {
    instance.time_grid.block_duration = durations;
  } else if (instance.time_grid.block_duration != durations) {
    fail(src, "time grid differs from the instance's time_grid");
  }

  ScenarioSet scenarios;
  SeriesTarget target{&instance, {}};
  int k = 0;
  bool any_probability = false;
  bool all_probability = true;
  for (const json& s : root.array("scenarios")) {
    const Reader r(s, src, "scenarios[" + std::to_string(k) + "]");
    const std::string id = r.text("id");
    if (!target.scenario_index.emplace(id, k).second) {
      fail(src, "duplicate scenario id '" + id + "'");
    }
    const bool has_p = r.has("probability");
    any_probability |= has_p;
    all_probability &= has_p;
    scenarios.push_back(
        make_empty_scenario(instance, id, has_p ? r.number("probability") : 0.0));
    ++k;
  }
  if (scenarios.empty()) fail(src, "no scenarios listed");
  if (any_probability && !all_probability) {
    fail(src, "either every scenario or none must carry a probability");
  }
  if (!any_probability) {
    for (Scenario& s : scenarios) s.probability = 1.0 / scenarios.size();
  }

  const fs::path base = manifest_path.parent_path();
  auto file_of = [&](const char* key) -> std::optional<fs::path> {
    if (!root.has(key)) return std::nullopt;
    return base / root.text(key);
  };

  const auto demand_file = file_of("demand");
  if (!demand_file) fail(src, "missing field 'demand'");
  std::vector<std::vector<std::vector<char>>> seen(
      scenarios.size(),
      std::vector<std::vector<char>>(instance.zones.size(),
                                     std::vector<char>(instance.num_blocks(), 0)));
  read_series_csv(*demand_file, target, false,
                  [&](int w, int n, int, int t, double v, const std::string& where) {
                    if (seen[w][n][t]) throw InputError(where + ": duplicate entry");
                    seen[w][n][t] = 1;
                    scenarios[w].demand[n][t] = v;
                  });
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    for (std::size_t n = 0; n < instance.zones.size(); ++n) {
      for (int t = 0; t < instance.num_blocks(); ++t) {
        if (!seen[w][n][t]) {
          throw InputError(demand_file->string() + ": missing demand for scenario '" +
                           scenarios[w].id + "', zone '" + instance.zones[n].id +
                           "', t=" + std::to_string(t));
        }
      }
    }
  }
  for (const char* key : {"pv", "wind"}) {
    const auto file = file_of(key);
    if (!file) continue;
    const bool pv = std::string_view(key) == "pv";
    read_series_csv(*file, target, false,
                    [&](int w, int n, int, int t, double v, const std::string&) {
                      (pv ? scenarios[w].pv : scenarios[w].wind)[n][t] = v;
                    });
  }
  if (const auto file = file_of("inflow")) {
    read_series_csv(*file, target, true,
                    [&](int w, int n, int h, int t, double v, const std::string&) {
                      scenarios[w].inflow[n][h][t] = v;
                    });
  }
  return scenarios;
}

void write_scenarios(const fs::path& directory, const SystemInstance& instance,
                     const ScenarioSet& scenarios) {
  fs::create_directories(directory);
  json manifest = {{"block_count", instance.num_blocks()},
                   {"block_duration", instance.time_grid.block_duration},
                   {"demand", "demand.csv"},
                   {"pv", "pv.csv"},
                   {"wind", "wind.csv"},
                   {"inflow", "inflow.csv"}};
  manifest["scenarios"] = json::array();
  for (const Scenario& s : scenarios) {
    manifest["scenarios"].push_back({{"id", s.id}, {"probability", s.probability}});
  }
  write_file(directory / "manifest.json", manifest.dump(2) + "\n");

  auto write_series = [&](const char* file, auto&& get) {
    std::string out = "scenario,zone,t,value\n";
    for (const Scenario& s : scenarios) {
      for (int n = 0; n < instance.num_zones(); ++n) {
        for (int t = 0; t < instance.num_blocks(); ++t) {
          out += s.id + "," + instance.zones[n].id + "," + std::to_string(t) +
                 "," + format_double(get(s)[n][t]) + "\n";
        }
      }
    }
    write_file(directory / file, out);
  };
  write_series("demand.csv", [](const Scenario& s) -> const ZoneSeries& { return s.demand; });
  write_series("pv.csv", [](const Scenario& s) -> const ZoneSeries& { return s.pv; });
  write_series("wind.csv", [](const Scenario& s) -> const ZoneSeries& { return s.wind; });

  std::string out = "scenario,zone,technology,t,value\n";
  for (const Scenario& s : scenarios) {
    for (int n = 0; n < instance.num_zones(); ++n) {
      for (int h = 0; h < kHydroTechCount; ++h) {
        for (int t = 0; t < instance.num_blocks(); ++t) {
          const double v = s.inflow[n][h][t];
          if (v == 0.0) continue;
          out += s.id + "," + instance.zones[n].id + "," +
                 hydro_tech_code(static_cast<HydroTech>(h)) + "," +
                 std::to_string(t) + "," + format_double(v) + "\n";
        }
      }
    }
  }
  write_file(directory / "inflow.csv", out);
}

}  // namespace cep
