// SPDX-License-Identifier: MIT
#include <gridlab/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace gridlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw NumericalError("format_double: to_chars failed");
  return std::string(buf, ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const json& j) {
  const std::uint64_t h = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

void require_keys(const json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional,
                  const std::string& where) {
  if (!j.is_object())
    throw SchemaError(where + ": expected a JSON object");
  for (const auto& k : required)
    if (!j.contains(k))
      throw SchemaError(where + ": missing required key \"" + k + "\"");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::find(required.begin(), required.end(), k) == required.end() &&
        std::find(optional.begin(), optional.end(), k) == optional.end())
      throw SchemaError(where + ": unknown key \"" + k + "\"");
  }
}

namespace {

double as_number(const json& j, const std::string& where) {
  if (!j.is_number())
    throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer())
    throw SchemaError(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace

CircuitParams circuit_params_from_json(const json& j) {
  require_keys(j, {"family", "energies"}, {"asym"}, "model");
  if (!j["family"].is_string())
    throw SchemaError("model.family: expected a string");
  CircuitParams p;
  p.family = family_from_string(j["family"].get<std::string>());
  if (!j["energies"].is_object())
    throw SchemaError("model.energies: expected an object");
  for (const auto& [name, v] : j["energies"].items())
    p.energies[name] = as_number(v, "model.energies." + name);
  if (j.contains("asym")) {
    require_keys(j["asym"], {}, {"eps_J", "eps_LK"}, "model.asym");
    if (j["asym"].contains("eps_J"))
      p.eps_J = as_number(j["asym"]["eps_J"], "model.asym.eps_J");
    if (j["asym"].contains("eps_LK"))
      p.eps_LK = as_number(j["asym"]["eps_LK"], "model.asym.eps_LK");
  }
  p.validate();
  return p;
}

json circuit_params_to_json(const CircuitParams& p) {
  json j;
  j["family"] = family_name(p.family);
  j["energies"] = json::object();
  for (const auto& [name, v] : p.energies) j["energies"][name] = v;
  if (p.eps_J != 0.0 || p.eps_LK != 0.0)
    j["asym"] = {{"eps_J", p.eps_J}, {"eps_LK", p.eps_LK}};
  return j;
}

Controls controls_from_json(const json& j) {
  require_keys(j, {}, {"phi_ext", "theta_ext", "n_g"}, "controls");
  Controls c;
  if (j.contains("phi_ext"))
    c.phi_ext = as_number(j["phi_ext"], "controls.phi_ext");
  if (j.contains("theta_ext"))
    c.theta_ext = as_number(j["theta_ext"], "controls.theta_ext");
  if (j.contains("n_g")) c.ng = as_number(j["n_g"], "controls.n_g");
  return c;
}

json controls_to_json(const Controls& c) {
  return {{"phi_ext", c.phi_ext}, {"theta_ext", c.theta_ext}, {"n_g", c.ng}};
}

BasisSpec basis_from_json(const json& j) {
  require_keys(j, {}, {"dim", "n_max", "osc_dim", "dims"}, "basis");
  BasisSpec b;
  if (j.contains("dim")) b.dim = as_int(j["dim"], "basis.dim");
  if (j.contains("n_max")) b.n_max = as_int(j["n_max"], "basis.n_max");
  if (j.contains("osc_dim")) b.osc_dim = as_int(j["osc_dim"], "basis.osc_dim");
  if (j.contains("dims")) {
    if (!j["dims"].is_array())
      throw SchemaError("basis.dims: expected an array of integers");
    for (const auto& v : j["dims"])
      b.dims.push_back(as_int(v, "basis.dims[]"));
  }
  if (b.dim < 2 || b.n_max < 1 || b.osc_dim < 2)
    throw SchemaError("basis: truncations too small");
  return b;
}

json basis_to_json(const BasisSpec& b) {
  json j = {{"dim", b.dim}, {"n_max", b.n_max}, {"osc_dim", b.osc_dim}};
  if (!b.dims.empty()) j["dims"] = b.dims;
  return j;
}

std::string csv_to_string(const CsvTable& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out << ',';
    out << t.header[i];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size())
      throw SchemaError("csv: ragged row");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot open for writing: " + path.string());
  f << csv_to_string(t);
  if (!f) throw SchemaError("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot open: " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(f, line))
    throw SchemaError("csv: empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  if (t.header.empty()) throw SchemaError("csv: empty header");
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string field =
          line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      double v = 0;
      const char* b = field.data();
      const char* e = b + field.size();
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc{} || ptr != e)
        throw SchemaError("csv: bad number \"" + field + "\" at line " +
                          std::to_string(lineno) + " of " + path.string());
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (row.size() != t.header.size())
      throw SchemaError("csv: row width mismatch at line " +
                        std::to_string(lineno) + " of " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw SchemaError("write failed: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot open: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError("json parse error in " + path.string() + ": " +
                      e.what());
  }
  return j;
}

json make_manifest(const json& config, std::uint64_t seed,
                   const std::string& tool, double elapsed_seconds) {
  return {{"tool", tool},
          {"config_hash", config_hash(config)},
          {"seed", seed},
          {"elapsed_seconds", elapsed_seconds},
          {"version", "0.1.0"}};
}

}  // namespace gridlab
