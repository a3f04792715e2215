// SPDX-License-Identifier: MIT
#pragma once

#include <gridlab/common.hpp>
#include <gridlab/models.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gridlab {

using json = nlohmann::json;

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

// Stable 16-hex-digit hash of a JSON document.  Object keys are serialized in
// sorted order, so semantically identical configs hash identically.
std::string config_hash(const json& j);

// Throws SchemaError naming `where` when j is not an object, misses a
// required key, or carries a key outside required+optional.
void require_keys(const json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional,
                  const std::string& where);

// --- model document (de)serialization --------------------------------------
// {"family": str, "energies": {name: number, ...},
//  "asym": {"eps_J": x, "eps_LK": y}?}  -- validated on ingestion.
CircuitParams circuit_params_from_json(const json& j);
json circuit_params_to_json(const CircuitParams& p);

// {"phi_ext"?: rad, "theta_ext"?: rad, "n_g"?: dimensionless}
Controls controls_from_json(const json& j);
json controls_to_json(const Controls& c);

// {"dim"?: int, "n_max"?: int, "osc_dim"?: int, "dims"?: [int...]}
BasisSpec basis_from_json(const json& j);
json basis_to_json(const BasisSpec& b);

// --- tabular artifacts ------------------------------------------------------
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // rectangular, header-sized
};

// Deterministic, locale-independent serialization (shortest-roundtrip floats).
std::string csv_to_string(const CsvTable& t);
void write_csv(const std::filesystem::path& path, const CsvTable& t);
CsvTable read_csv(const std::filesystem::path& path);

// --- JSON artifacts ---------------------------------------------------------
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

// Run manifest: config hash, seed, tool id, timing; written next to outputs.
json make_manifest(const json& config, std::uint64_t seed,
                   const std::string& tool, double elapsed_seconds);

}  // namespace gridlab
