// SPDX-License-Identifier: MIT
#include <gridlab/io.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace gridlab;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("gridlab_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("format_double is shortest-roundtrip and locale independent") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(0.1) == "0.1");
  // round-trip exactness on awkward values
  for (double v : {1.0 / 3.0, 3.141592653589793, 1e-17, 6.02e23, -0.49999999}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config hash is stable under key order") {
  json a = json::parse(R"({"x": 1, "y": [1, 2], "z": {"k": true}})");
  json b = json::parse(R"({"z": {"k": true}, "y": [1, 2], "x": 1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  json c = a;
  c["x"] = 2;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("require_keys enforces the declared schema") {
  json j = json::parse(R"({"family": "Fluxonium", "energies": {}})");
  CHECK_NOTHROW(require_keys(j, {"family"}, {"energies"}, "doc"));
  CHECK_THROWS_AS(require_keys(j, {"missing"}, {}, "doc"), SchemaError);
  CHECK_THROWS_AS(require_keys(j, {"family"}, {}, "doc"), SchemaError);
  CHECK_THROWS_AS(require_keys(json::array(), {}, {}, "doc"), SchemaError);
}

TEST_CASE("circuit params ingestion") {
  SECTION("valid fluxonium document round-trips") {
    json j = json::parse(R"({
      "family": "Fluxonium",
      "energies": {"E_C": 1.0, "E_J": 4.0, "E_L": 0.5}
    })");
    CircuitParams p = circuit_params_from_json(j);
    CHECK(p.family == Family::Fluxonium);
    CHECK(p.energy("E_J") == 4.0);
    CHECK(circuit_params_from_json(circuit_params_to_json(p)).energies ==
          p.energies);
  }
  SECTION("unknown top-level key rejected") {
    json j = json::parse(
        R"({"family": "Fluxonium", "energies": {"E_C": 1, "E_J": 4, "E_L": 0.5},
            "extra": 1})");
    CHECK_THROWS_AS(circuit_params_from_json(j), SchemaError);
  }
  SECTION("unknown energy name rejected") {
    json j = json::parse(
        R"({"family": "Fluxonium",
            "energies": {"E_C": 1, "E_J": 4, "E_L": 0.5, "E_X": 2}})");
    CHECK_THROWS_AS(circuit_params_from_json(j), SchemaError);
  }
  SECTION("missing required energy rejected") {
    json j = json::parse(
        R"({"family": "Fluxonium", "energies": {"E_C": 1, "E_J": 4}})");
    CHECK_THROWS_AS(circuit_params_from_json(j), SchemaError);
  }
  SECTION("non-positive energy rejected") {
    json j = json::parse(
        R"({"family": "Fluxonium",
            "energies": {"E_C": 1, "E_J": -4, "E_L": 0.5}})");
    CHECK_THROWS_AS(circuit_params_from_json(j), SchemaError);
  }
  SECTION("asymmetry bounds enforced") {
    json j = json::parse(
        R"({"family": "Gridium3",
            "energies": {"E_J": 5, "E_C": 0.5, "E_L": 1, "E_LK": 1,
                         "E_JS": 4, "E_CS": 8},
            "asym": {"eps_J": 1.5}})");
    CHECK_THROWS_AS(circuit_params_from_json(j), SchemaError);
    j["asym"]["eps_J"] = 0.05;
    CHECK(circuit_params_from_json(j).eps_J == 0.05);
  }
}

TEST_CASE("controls ingestion uses the documented field names") {
  json j = json::parse(R"({"phi_ext": 1.5, "theta_ext": 3.0, "n_g": 0.25})");
  Controls c = controls_from_json(j);
  CHECK(c.phi_ext == 1.5);
  CHECK(c.theta_ext == 3.0);
  CHECK(c.ng == 0.25);
  CHECK(controls_from_json(json::object()).phi_ext == 0.0);
  CHECK_THROWS_AS(controls_from_json(json::parse(R"({"ng": 0.1})")),
                  SchemaError);
}

TEST_CASE("basis ingestion") {
  BasisSpec b = basis_from_json(json::parse(R"({"dim": 300})"));
  CHECK(b.dim == 300);
  CHECK(b.n_max == 12);
  b = basis_from_json(json::parse(R"({"dims": [17, 40, 22]})"));
  CHECK(b.dims == std::vector<int>{17, 40, 22});
  CHECK_THROWS_AS(basis_from_json(json::parse(R"({"dim": 1})")), SchemaError);
  CHECK_THROWS_AS(basis_from_json(json::parse(R"({"bogus": 1})")),
                  SchemaError);
}

TEST_CASE("csv round trip is byte-stable") {
  TempDir tmp;
  CsvTable t;
  t.header = {"phi_over_pi", "f_0_1_GHz"};
  t.rows = {{0.0, 4.25}, {0.5, 1.0 / 3.0}, {1.0, 6.02e23}};
  const auto p = tmp.path / "t.csv";
  write_csv(p, t);
  const std::string first = csv_to_string(read_csv(p));
  CHECK(first == csv_to_string(t));
  write_csv(p, read_csv(p));
  CHECK(csv_to_string(read_csv(p)) == first);

  SECTION("malformed body rejected") {
    std::ofstream f(p, std::ios::binary);
    f << "a,b\n1,oops\n";
    f.close();
    CHECK_THROWS_AS(read_csv(p), SchemaError);
  }
  SECTION("ragged row rejected") {
    std::ofstream f(p, std::ios::binary);
    f << "a,b\n1\n";
    f.close();
    CHECK_THROWS_AS(read_csv(p), SchemaError);
  }
}

TEST_CASE("manifest carries hash, seed and tool id") {
  json cfg = {{"model", {{"family", "Fluxonium"}}}};
  json m = make_manifest(cfg, 42, "spectrum", 1.25);
  CHECK(m["config_hash"] == config_hash(cfg));
  CHECK(m["seed"] == 42);
  CHECK(m["tool"] == "spectrum");
}
