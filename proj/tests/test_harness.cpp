#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mwhardy/error.hpp"
#include "mwhardy/harness.hpp"
#include "mwhardy/oracle.hpp"
#include "mwhardy/parallel.hpp"

using namespace mwhardy;
using nlohmann::json;

namespace {

json base_config() {
    return json::parse(R"({
        "schema": 1,
        "grid": {"n": 1, "L": 2.0, "h": 0.03125},
        "weight": {"family": "rotating-2x2", "alpha1": -0.25, "alpha2": 0.5, "theta": "linear"},
        "function": {"function": "mean-zero-bump", "center": 0.1, "width": 0.2, "components": [1, [0, -1]]},
        "atoms": 3,
        "seed": 11
    })");
}

std::vector<std::string> csvs(const Report& r) {
    std::vector<std::string> out;
    for (const auto& t : r.tables) out.push_back(t.name + "\n" + to_csv(t));
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MWHARDY_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mwhardy_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_json(const std::filesystem::path& p, const json& j) { std::ofstream(p) << j.dump(); }

} // namespace

TEST_CASE("number format") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5e-300) == "-2.5e-300");
    CHECK(format_number(1e21) == "1e+21");
    CHECK(format_number(1.0 / 0.0) == "inf");
    for (double v : {std::acos(-1.0), 1.0 / 3.0, 6.02214076e23, 5e-324})
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    Table t{"t", {"a", "b,c"}, {{1.5, std::int64_t{3}}, {std::string("x\"y"), -0.0}}};
    CHECK(to_csv(t) == "a,\"b,c\"\n1.5,3\n\"x\"\"y\",-0\n");
}

TEST_CASE("schema validation") {
    const auto rejects = [](json doc, const std::string& command = "maximal") {
        CHECK_THROWS_AS(parse_config(doc, command), SchemaError);
    };
    CHECK_NOTHROW(parse_config(base_config(), "verify"));
    rejects(base_config(), "frobnicate");
    {
        auto d = base_config();
        d.erase("schema");
        rejects(d);
        d["schema"] = 2;
        rejects(d);
    }
    {
        auto d = base_config();
        d["colour"] = "blue";
        rejects(d);
    }
    {
        auto d = base_config();
        d["grid"]["h"] = 0.3; // 2L/h not an integer
        rejects(d);
    }
    {
        auto d = base_config();
        d["weight"]["family"] = "mystery";
        rejects(d);
    }
    {
        auto d = base_config();
        d["weight"] = json{{"family", "constant"}, {"value", json::array({json::array({1, 2}), json::array({0, 1})})}};
        rejects(d); // not Hermitian
    }
    {
        auto d = base_config();
        d["function"]["components"] = json::array({1});
        rejects(d); // m = 2 weight
    }
    {
        auto d = base_config();
        d["p"] = -1;
        rejects(d);
    }
    {
        auto d = base_config();
        d["kernel"] = "riesz2d"; // n = 1 grid
        rejects(d, "czo");
    }
    {
        auto d = base_config();
        d["eta"] = 0.03125;
        rejects(d);
    }
    {
        auto d = base_config();
        d["alpha"] = 1.0;
        d["alpha_fraction"] = 0.5;
        rejects(d);
    }
    {
        auto d = base_config();
        d["b"] = 0.3;
        rejects(d);
    }
}

TEST_CASE("weight and function documents") {
    const auto g = Grid::make(1, 4.0, 1.0 / 64);
    const auto w = weight_from_json(g, json::parse(R"({"family": "rotating-2x2", "alpha1": -0.25, "alpha2": 0.5,
                                                      "theta": "linear", "L": 4.0, "h": 0.015625})"));
    const auto ref = MatrixWeight::rotating(g, -0.25, 0.5, ThetaProfile::Linear);
    for (double x : {-3.3, -0.01, 0.7, 2.9})
        CHECK((w.at({x, 0.0}).matrix() - ref.at({x, 0.0}).matrix()).norm() == 0.0);

    const auto spec = function_from_json(json::parse(R"({"function": "mean-zero-bump", "center": 0.0, "width": 1.0,
                                                         "components": [1, -1]})"),
                                         1, 2);
    CHECK(spec.profile == FunctionSpec::Profile::Hat);
    CHECK(spec.radius == 1.0);
    CHECK(spec.vector[1] == cplx(-1.0, 0.0));

    // user-grid weights reproduce their table
    MatrixField table;
    table.m = 1;
    json values = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        values.push_back(1.0 + 0.01 * static_cast<double>(i % 7));
        table.data.push_back(values.back().get<double>());
    }
    const auto u = weight_from_json(g, json{{"family", "user-grid"}, {"values", values}});
    for (std::size_t i = 0; i < g.size(); i += 37) CHECK(u.at(g.point(i)).matrix()(0, 0).real() == table.data[i].real());
}

TEST_CASE("user kernel template") {
    // (1/2pi) u / |u|^2 is half the Hilbert kernel
    const auto k = kernel_from_json(json::parse(R"({"template": "rational", "terms": [{"coef": 0.15915494309189535,
                                                    "powers": [1]}], "radial_power": 2})"),
                                    1);
    const auto hk = Kernel::hilbert();
    for (double u : {-3.0, -0.2, 1e-2, 0.7, 40.0}) CHECK(k.at_offset({u, 0.0}) == doctest::Approx(0.5 * hk.at_offset({u, 0.0})).epsilon(1e-14));
    CHECK_THROWS_AS(kernel_from_json(json("sobolev"), 1), SchemaError);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"template": "rational", "terms": []})"), 1), SchemaError);
}

TEST_CASE("two-value weight characteristic") {
    auto doc = json::parse(R"({"schema": 1, "grid": {"n": 1, "L": 2.0, "h": 0.015625},
        "weight": {"family": "step", "center": 1.0, "edge": 2.0, "inside": 2.0, "outside": 1.0},
        "cube_family": {"min_edge": 0.0625, "max_edge": 1.0, "all_offsets": true}, "p": 1})");
    const auto cfg = parse_config(doc, "characteristic");
    const auto r = run(cfg);
    CHECK(r.passed());
    // independent scalar sup over the same cubes
    const auto w = weight_from_json(cfg.grid, cfg.weight);
    const auto samples = oracle::sample_weight(w);
    double sup = 0.0;
    for (const auto& q : grid_cube_family(cfg.grid, 0.0625, 1.0, true).cubes)
        sup = std::max(sup, oracle::ap(cfg.grid, samples, q, 1.0));
    CHECK(r.constants["ap"].get<double>() == doctest::Approx(sup).epsilon(1e-12));
    CHECK(sup == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("reports are deterministic and thread-count independent") {
    const unsigned saved = thread_count();
    for (const char* command : {"characteristic", "reduce", "maximal", "czd", "atoms", "czo"}) {
        CAPTURE(command);
        const auto cfg = parse_config(base_config(), command);
        set_thread_count(1);
        const auto one = csvs(run(cfg));
        const auto again = csvs(run(cfg));
        set_thread_count(4);
        const auto four = csvs(run(cfg));
        CHECK(one == again);
        CHECK(one == four);
        CHECK(!one.empty());
    }
    set_thread_count(saved);
}

TEST_CASE("verify on the identity weight passes everything") {
    auto doc = base_config();
    doc["weight"] = json{{"family", "identity"}, {"m", 1}};
    doc["function"].erase("components");
    const auto r = run(parse_config(doc, "verify"));
    for (const auto& a : r.assertions) {
        CAPTURE(a.name);
        CAPTURE(a.detail);
        CHECK(a.passed);
    }
    bool has_oracle = false;
    for (const auto& t : r.tables) has_oracle = has_oracle || t.name == "oracle";
    CHECK(has_oracle);
}

TEST_CASE("czo reports a finite family maximum for the hilbert kernel") {
    auto doc = base_config();
    doc["weight"] = json{{"family", "identity"}, {"m", 1}};
    doc["function"].erase("components");
    doc["grid"]["L"] = 4.0;
    doc["atoms"] = 6;
    const auto r = run(parse_config(doc, "czo"));
    CHECK(r.passed());
    const Table* fam = nullptr;
    for (const auto& t : r.tables)
        if (t.name == "czo_family") fam = &t;
    REQUIRE(fam);
    REQUIRE(fam->rows.size() == 1);
    CHECK(std::isfinite(std::get<double>(fam->rows[0][1])));
    CHECK(std::get<double>(fam->rows[0][1]) > 0.0);
}

TEST_CASE("oracle command needs m = 1") {
    CHECK_THROWS_AS(oracle_scalar(parse_config(base_config(), "oracle")), PreconditionError);
}

TEST_CASE("command line") {
    const auto dir = scratch("cli");
    const auto cfg = dir / "config.json";
    write_json(cfg, base_config());

    SUBCASE("byte-identical outputs across runs and thread counts") {
        REQUIRE(run_cli("atoms --config " + cfg.string() + " --out " + (dir / "a").string() + " --threads 1") == 0);
        REQUIRE(run_cli("atoms --config " + cfg.string() + " --out " + (dir / "b").string() + " --threads 4") == 0);
        setenv("MWHARDY_THREADS", "3", 1);
        REQUIRE(run_cli("atoms --config " + cfg.string() + " --out " + (dir / "c").string()) == 0);
        unsetenv("MWHARDY_THREADS");
        for (const char* f : {"atoms.csv", "atoms_pairing.csv", "atoms.json", "atoms.bin"}) {
            CAPTURE(f);
            const auto a = slurp(dir / "a" / f);
            CHECK(!a.empty());
            CHECK(a == slurp(dir / "b" / f));
            CHECK(a == slurp(dir / "c" / f));
        }
        const auto summary = json::parse(slurp(dir / "a" / "summary.json"));
        CHECK(summary["seed"] == 11);
        CHECK(summary["passed"] == true);
        CHECK(slurp(dir / "a" / "atoms.csv").find('\r') == std::string::npos);
    }
    SUBCASE("seed override is recorded") {
        REQUIRE(run_cli("czo --config " + cfg.string() + " --out " + (dir / "s").string() + " --seed 5") == 0);
        CHECK(json::parse(slurp(dir / "s" / "summary.json"))["seed"] == 5);
    }
    SUBCASE("schema violations exit with 2") {
        auto bad = base_config();
        bad["schema"] = 9;
        write_json(dir / "bad.json", bad);
        CHECK(run_cli("maximal --config " + (dir / "bad.json").string() + " --out " + (dir / "x").string()) == 2);
        std::ofstream(dir / "broken.json") << "{\"schema\": 1,";
        CHECK(run_cli("maximal --config " + (dir / "broken.json").string()) == 2);
        CHECK(run_cli("maximal --config " + (dir / "missing.json").string()) == 2);
        CHECK(run_cli("czo --config " + cfg.string() + " --kernel user-json") == 2);
        CHECK(run_cli("oracle --config " + cfg.string() + " --out " + (dir / "x").string()) == 2);
    }
    SUBCASE("assertion failures exit with 1 and dump a witness") {
        auto doc = base_config();
        doc["weight"] = json{{"family", "identity"}, {"m", 2}};
        // K = 1 is not a standard kernel
        doc["kernel"] = json::parse(R"({"template": "rational", "terms": [{"coef": 1.0, "powers": [0]}], "radial_power": 0})");
        write_json(dir / "fail.json", doc);
        CHECK(run_cli("czo --config " + (dir / "fail.json").string() + " --out " + (dir / "f").string() +
                      " --kernel user-json") == 1);
        const auto witness = json::parse(slurp(dir / "f" / "witness.json"));
        REQUIRE(witness.is_array());
        CHECK(witness[0]["name"] == "kernel conditions finite");
        CHECK(!witness[0]["witness"].empty());
    }
    std::filesystem::remove_all(dir);
}
