#include "doctest.h"
#include "examples.hpp"
#include "generators.hpp"
#include "polydiv/cli.hpp"
#include "polydiv/io.hpp"
#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace polydiv;
using namespace polydiv::examples;
using polydiv::testing::Gen;
using io::Json;

namespace {

const std::string fixtures = FIXTURE_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// parse the payload into its object and serialize it again
Json canonical_payload(const io::Loaded& in) {
  io::Node p = in.payload();
  const std::string& k = in.doc.kind;
  if (k == "pdivisor") return io::to_json(io::pdivisor_from(p));
  if (k == "invariant_pdivisor") return io::to_json(io::invariant_pdivisor_from(p));
  if (k == "invariant_divisor") return io::to_json(io::invariant_divisor_from(p));
  if (k == "deformation") return io::to_json(io::deformation_from(p));
  if (k == "downgrade_input") return io::to_json(io::downgrade_input_from(p));
  if (k == "toric_downgrade_input") return io::to_json(io::toric_downgrade_input_from(p));
  if (k == "cox_input") return io::to_json(io::cox_input_from(p));
  if (k == "complexes") {
    Json out = Json::array();
    for (const auto& c : p["complexes"].items()) out.push_back(io::to_json(io::complex_from(c)));
    return Json{{"complexes", out}};
  }
  if (k == "report") return in.doc.payload;
  FAIL("unknown kind " << k);
  return Json();
}

std::string canonical(const std::string& text) {
  io::Loaded in = io::load(text);
  return io::emit(io::Document{in.doc.kind, canonical_payload(in), in.doc.provenance});
}

ErrorCode code_of(const std::string& text) {
  try {
    canonical(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

std::string message_of(const std::string& text) {
  try {
    canonical(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string document(const std::string& kind, const std::string& payload) {
  return "{\"schema_version\": \"1\", \"kind\": \"" + kind + "\", \"payload\": " + payload + "}";
}

PolyhedralDivisor random_line_pdivisor(Gen& g, int n) {
  static BasePtr p1 = make_base(BaseVariety::projective_line());
  Cone tail = g.pointed_cone(n, static_cast<int>(g.integer(1, n + 1)));
  std::map<std::string, Coefficient> coeffs;
  for (const auto& p : {"0", "1", "inf", "-1/2"}) {
    long c = g.integer(0, 3);
    if (c == 0) coeffs[p] = std::nullopt;
    if (c == 1) coeffs[p] = minkowski_sum(g.polytope(n, static_cast<int>(g.integer(1, 3)), -2, 2, 3), tail.polyhedron());
  }
  return PolyhedralDivisor(p1, tail, coeffs);
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("every fixture survives emit after parse") {
    int seen = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(fixtures)) {
      if (entry.path().extension() != ".json") continue;
      std::string name = entry.path().filename().string();
      if (name == "bad_rational.json" || name == "wrong_version.json") continue;
      CAPTURE(name);
      std::string text = slurp(entry.path().string());
      io::Loaded in = io::load(text, name);
      CHECK(in.doc.provenance.is_object());
      std::string once = canonical(text);
      CHECK(canonical(once) == once);
      ++seen;
    }
    CHECK(seen >= 12);
    // written in canonical form
    for (const auto& name : {"a1_upgraded.json", "expected/eval_threefold.json"}) {
      std::string text = slurp(fixtures + "/" + name);
      CHECK(canonical(text) == text);
    }
  }

  TEST_CASE("the downgrade fixture is the documented divisor") {
    io::Loaded in = io::load_file(fixtures + "/difficulties_pdivisor.json");
    PolyhedralDivisor d = io::pdivisor_from(in.payload());
    Fan f;
    f.rank = 2;
    f.rays = {zv({1, 0}), zv({0, 1})};
    f.cones = {{0, 1}};
    BasePtr a2 = make_base(BaseVariety::toric(f, {"Dx", "Dy"}));
    PolyhedralDivisor expected(a2, Cone::zero(2),
                               {{"Dx", Polyhedron::hull(2, {qvec({0, 0}), qvec({0, 1})})},
                                {"Dy", Polyhedron::hull(2, {qvec({0, 0}), qvec({1, 1})})}});
    CHECK(d == expected);
    CHECK(is_proper(d).proper());
  }

  TEST_CASE("schema errors are located") {
    std::string bad = slurp(fixtures + "/bad_rational.json");
    CHECK(code_of(bad) == ErrorCode::SchemaError);
    CHECK(message_of(bad).find("<input>:7:41") != std::string::npos);
    CHECK(code_of(slurp(fixtures + "/wrong_version.json")) == ErrorCode::VersionMismatch);

    const std::string p1 = "{\"type\": \"projective_line\"}";
    // syntax error on the second line
    CHECK(message_of("{\"schema_version\": \"1\",\n  \"kind\": pdivisor}").find(":2:11") != std::string::npos);
    CHECK(code_of("[1, 2") == ErrorCode::SchemaError);
    CHECK(message_of(document("pdivisor", "{\"base\": " + p1 + ", \"tail\": {\"ambient\": 1}, \"extra\": 1}"))
              .find("unknown key 'extra'") != std::string::npos);
    CHECK(message_of(document("pdivisor", "{\"base\": " + p1 + "}")).find("missing key 'tail'") != std::string::npos);
    CHECK(message_of(document("pdivisor", "{\"base\": " + p1 + ", \"tail\": {\"ambient\": 1, \"rays\": [[\"1\", \"2\"]]}}"))
              .find("/payload/tail/rays/0") != std::string::npos);
    CHECK(code_of(document("pdivisor", "{\"base\": " + p1 + ", \"tail\": {\"ambient\": 1, \"rays\": [[0.5]]}}")) ==
          ErrorCode::SchemaError);
    // a coefficient whose tail is not the tail cone
    std::string wrong_tail = document(
        "pdivisor", "{\"base\": " + p1 +
                        ", \"tail\": {\"ambient\": 1}, \"coefficients\": {\"0\": {\"ambient\": 1, \"vertices\": [[\"0\"]], \"rays\": [[\"1\"]]}}}");
    CHECK(code_of(wrong_tail) == ErrorCode::SchemaError);
    CHECK(message_of(wrong_tail).find(":1:") != std::string::npos);
    CHECK(code_of(document("pdivisor", "{\"base\": {\"type\": \"sphere\"}, \"tail\": {\"ambient\": 1}}")) == ErrorCode::SchemaError);
    CHECK(code_of("{\"kind\": \"pdivisor\", \"payload\": {}}") == ErrorCode::SchemaError);
  }

  TEST_CASE("position index agrees with the text") {
    std::string text = "{\n  \"a\": [1, {\"b/c\": \"x\"}],\n  \"d~\": {}\n}";
    io::Positions pos = io::index_positions(text);
    CHECK(pos.at("") == std::make_pair(1, 1));
    CHECK(pos.at("/a") == std::make_pair(2, 8));
    CHECK(pos.at("/a/0") == std::make_pair(2, 9));
    CHECK(pos.at("/a/1") == std::make_pair(2, 12));
    CHECK(pos.at("/a/1/b~1c") == std::make_pair(2, 20));
    CHECK(pos.at("/d~0") == std::make_pair(3, 9));
  }

  TEST_CASE("random divisors round trip") {
    Gen g(77);
    for (int t = 0; t < 40; ++t) {
      PolyhedralDivisor d = random_line_pdivisor(g, static_cast<int>(g.integer(1, 3)));
      std::string text = io::emit(io::Document{"pdivisor", io::to_json(d), Json()});
      io::Loaded in = io::load(text);
      CHECK(io::pdivisor_from(in.payload()) == d);
      CHECK(canonical(text) == text);
    }
    for (int t = 0; t < 15; ++t) {
      RandomCurveFan f = random_curve_fan(g, g.coin());
      TInvariantDivisor d = Rational(1) * random_invariant_divisor(g, f);
      std::string text = io::emit(io::Document{"invariant_divisor", io::to_json(d), Json()});
      io::Loaded in = io::load(text);
      TInvariantDivisor back = io::invariant_divisor_from(in.payload());
      CHECK(back == d);
      CHECK(canonical(text) == text);
    }
    for (int t = 0; t < 15; ++t) {
      int n = static_cast<int>(g.integer(1, 3));
      Polyhedron p = g.polytope(n, static_cast<int>(g.integer(1, 4)));
      if (g.coin()) p = p + g.pointed_cone(n, 1).polyhedron();
      io::Positions none;
      Json j = io::to_json(p);
      CHECK(io::polyhedron_from(io::Node(j, "", &none, "x")) == p);
    }
  }

  TEST_CASE("runs are deterministic and honour the exit codes") {
    auto run = [](cli::RunOptions o, int& rc) {
      std::ostringstream out, err;
      rc = cli::run(o, out, err);
      return out.str() + err.str();
    };
    cli::RunOptions o;
    o.command = "deform-upgrade";
    o.input = fixtures + "/a1_deformation.json";
    int rc1 = -1, rc2 = -1;
    std::string a = run(o, rc1), b = run(o, rc2);
    CHECK(rc1 == cli::Computed);
    CHECK(a == b);
    CHECK(a == slurp(fixtures + "/a1_upgraded.json"));

    o.command = "upgrade";
    o.input = fixtures + "/plane_with_contraction.json";
    run(o, rc1);
    CHECK(rc1 == cli::HypothesisViolated);
    o.command = "proper";
    o.input = fixtures + "/bad_rational.json";
    run(o, rc1);
    CHECK(rc1 == cli::InputError);
    o.command = "bpf";
    o.input = fixtures + "/hirzebruch_divisor.json";
    run(o, rc1);
    CHECK(rc1 == cli::Inconclusive);
    o.command = "frobnicate";
    run(o, rc1);
    CHECK(rc1 == cli::InputError);
    CHECK(cli::commands().size() == 11);
  }

  TEST_CASE("an inadmissible decomposition is reported, not emitted") {
    std::string text = document(
        "deformation",
        "{\"delta\": {\"ambient\": 2, \"rays\": [[\"1\", \"1\"]]}, \"r\": [\"0\", \"1\"], \"parts\": ["
        "{\"ambient\": 1, \"vertices\": [[\"1/2\"]]}, {\"ambient\": 1, \"vertices\": [[\"1/2\"]]}]}");
    std::string path = (std::filesystem::temp_directory_path() / "polydiv_inadmissible.json").string();
    std::ofstream(path) << text;
    cli::RunOptions o;
    o.command = "deform-upgrade";
    o.input = path;
    std::ostringstream out, err;
    CHECK(cli::run(o, out, err) == cli::HypothesisViolated);
    Json report = Json::parse(out.str());
    CHECK(report["kind"] == "report");
    CHECK(report["payload"]["result"]["admissible"] == false);
    CHECK(report["payload"]["result"]["lattice_free"] == Json::array({0, 1}));
    std::filesystem::remove(path);
  }
}
