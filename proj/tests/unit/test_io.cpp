#include "support.hpp"

#include "mtphase/commands.hpp"
#include "mtphase/config.hpp"
#include "mtphase/errors.hpp"
#include "mtphase/output.hpp"
#include "mtphase/sweep.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

using namespace mtphase;

namespace {

const char* kMinimal = R"(# canonical point
[model]
k1 = 1
k3 = 1
k5 = 1   ; rescue
k7 = 2
C1 = 1
E = 1
d1 = 0.2
d2 = 0.2
d3 = 0.2

[domain]
ell = pi
bc = dirichlet
)";

std::string without_line(const std::string& text, const std::string& prefix) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) != 0) out += line + "\n";
    return out;
}

Error parse_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an error");
    return Error(ErrorCode::Io, "");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& p) {
    std::map<std::string, std::string> kv;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mtphase_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    const RunConfig c = parse_config_text(kMinimal);
    CHECK(c.model.k7 == 2.0);
    CHECK(c.model.ell == doctest::Approx(3.141592653589793));
    CHECK(c.model.bc == BoundaryCondition::Dirichlet);
    CHECK(c.simulate == SimulateConfig{});
    CHECK(c.analysis == AnalysisConfig{});
}

TEST_CASE("missing required key names the field") {
    const Error e = parse_error(without_line(kMinimal, "k7"));
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(e.detail() == "k7");
}

TEST_CASE("unknown key is rejected") {
    const Error e = parse_error(std::string(kMinimal) + "[model]\nk5_rescue = 1\n");
    CHECK(e.code() == ErrorCode::UnknownKey);
    CHECK(e.detail() == "model.k5_rescue");
    CHECK(parse_error(std::string(kMinimal) + "[plotting]\ncolor = red\n").code() == ErrorCode::UnknownKey);
}

TEST_CASE("syntax errors carry a position") {
    const Error dup = parse_error(std::string(kMinimal) + "[model]\nk1 = 2\n");
    CHECK(dup.code() == ErrorCode::ParseError);
    const Error bad = parse_error("[model]\nk1 = 1x\n");
    CHECK(bad.code() == ErrorCode::ParseError);
    CHECK(std::string(bad.what()).find("line 2") != std::string::npos);
    CHECK(parse_error("[model\n").code() == ErrorCode::ParseError);
    CHECK(parse_error("[model]\njust text\n").code() == ErrorCode::ParseError);
}

TEST_CASE("range validation") {
    std::string text = kMinimal;
    CHECK(parse_error(text + "[simulate]\nN = 8\n").code() == ErrorCode::ValidationError);
    CHECK(parse_error(text + "[simulate]\nic = sideways\n").code() == ErrorCode::ValidationError);
    const Error neg = parse_error(without_line(text, "d2") + "[model]\nd2 = -0.1\n");
    CHECK(neg.code() == ErrorCode::ValidationError);
    CHECK(neg.detail() == "d2");
}

TEST_CASE("serialize then parse is the identity") {
    RunConfig c = parse_config_text(kMinimal);
    c.model.d2 = 0.1 + 0.2;  // not exactly representable in short decimal
    c.model.bc = BoundaryCondition::NeumannZeroAverage;
    c.simulate.seed = 18446744073709551615ull;
    c.simulate.ic = "random";
    c.sweep.y_axis = "d2";
    c.verify.criteria = {1, 4, 12};
    c.output.directory = "some dir/out";
    const RunConfig back = parse_config_text(serialize_config(c));
    CHECK(back == c);
    CHECK(serialize_config(back) == serialize_config(c));
}

TEST_CASE("shipped configs parse") {
    for (const char* name : {"canonical_dirichlet.ini", "canonical_neumann.ini", "phase_diagram.ini", "verify.ini"}) {
        CAPTURE(name);
        CHECK_NOTHROW(parse_config(std::filesystem::path(MTPHASE_SOURCE_DIR) / "configs" / name));
    }
    CHECK_THROWS_AS(parse_config("/nonexistent/config.ini"), Error);
}

TEST_CASE("number formatting round-trips") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, i % 40 - 20);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("sha256 test vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("CSV quoting") {
    CsvTable t({"a", "b"});
    t.add_row({"1", "x,y"});
    t.add_row({"say \"hi\"", ""});
    CHECK(t.str() == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
    CHECK_THROWS(t.add_row({"only one"}));
}

TEST_CASE("run writer manifest lists file checksums") {
    const auto dir = scratch_dir("writer");
    RunWriter w(dir);
    w.write("b.csv", "x\n2\n");
    w.write("a.csv", "x\n1\n");
    w.add_manifest_entry("note", "hello");
    w.write_manifest("steady-state", "[model]\n", 42);
    const auto kv = read_manifest(dir / "manifest.txt");
    CHECK(kv.at("subcommand") == "steady-state");
    CHECK(kv.at("seed") == "42");
    CHECK(kv.at("note") == "hello");
    CHECK(kv.at("config_sha256") == sha256_hex("[model]\n"));
    for (const char* name : {"a.csv", "b.csv"}) {
        CHECK(kv.at(std::string("output.") + name + ".sha256") == sha256_hex(slurp(dir / name)));
    }
    const std::string text = slurp(dir / "manifest.txt");
    CHECK(text.find("output.a.csv") < text.find("output.b.csv"));
}

TEST_CASE("worker resolution") {
    CHECK(resolve_workers(3) == 3);
    ::setenv("MTPHASE_WORKERS", "5", 1);
    CHECK(resolve_workers(std::nullopt) == 5);
    CHECK(resolve_workers(2) == 2);
    ::unsetenv("MTPHASE_WORKERS");
    CHECK(resolve_workers(std::nullopt) >= 1);
}

TEST_CASE("parallel_map keeps index order and propagates errors") {
    const auto out = parallel_map<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
    CHECK_THROWS_AS(parallel_map<int>(10, 3,
                                      [](std::size_t i) -> int {
                                          if (i == 7) throw std::runtime_error("boom");
                                          return 0;
                                      }),
                    std::runtime_error);
}

TEST_CASE("sweep is independent of the worker count") {
    const ModelParams base = testing::canonical(0.2);
    SweepSpec spec{ParameterPlane::from_names(base, "d", 0.02, 0.5, "k7", 0.5, 4.0), 12, 9};
    const auto one = sweep_regions(spec, 1);
    const auto many = sweep_regions(spec, 4);
    REQUIRE(one.size() == 108);
    REQUIRE(many.size() == one.size());
    bool some_error = false;
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].ix == static_cast<int>(i % 12));
        CHECK(one[i].iy == static_cast<int>(i / 12));
        CHECK(one[i].x == many[i].x);
        CHECK(one[i].y == many[i].y);
        CHECK(one[i].error == many[i].error);
        CHECK(one[i].region.has_value() == many[i].region.has_value());
        if (one[i].region) {
            CHECK(one[i].region->region == many[i].region->region);
            CHECK(one[i].region->sigma11 == many[i].region->sigma11);
        }
        some_error = some_error || !one[i].error.empty();
    }
    // k7 = 0.5 makes K1 = C1 k1 k7 - k3 k5 E negative: those cells record an error.
    CHECK(some_error);
}

TEST_CASE("single-cell sweep equals a direct call") {
    const ModelParams base = testing::canonical(0.2);
    SweepSpec spec{ParameterPlane::from_names(base, "d", 0.13, 0.5, "k7", 2.0, 4.0), 1, 1};
    const auto cells = sweep_regions(spec, 2);
    REQUIRE(cells.size() == 1);
    REQUIRE(cells[0].region.has_value());
    const RegionReport direct = classify_region(testing::canonical(0.13));
    CHECK(cells[0].region->region == direct.region);
    CHECK(cells[0].region->sigma11 == direct.sigma11);
}

TEST_CASE("exit code mapping") {
    CHECK(exit_code_for(ErrorCode::ParseError) == kExitConfig);
    CHECK(exit_code_for(ErrorCode::ValidationError) == kExitConfig);
    CHECK(exit_code_for(ErrorCode::UnknownKey) == kExitConfig);
    CHECK(exit_code_for(ErrorCode::NoSignChange) == kExitNumerical);
    CHECK(exit_code_for(ErrorCode::StepUnstable) == kExitNumerical);
    CHECK(exit_code_for(ErrorCode::Io) == kExitInternal);
}

TEST_CASE("steady-state subcommand writes checksummed outputs") {
    const auto dir = scratch_dir("steady");
    CommandOptions opts;
    opts.out_dir = dir;
    std::ostringstream log;
    const RunConfig c = parse_config_text(kMinimal);
    REQUIRE(run_subcommand("steady-state", c, opts, log) == kExitOk);
    const auto kv = read_manifest(dir / "manifest.txt");
    CHECK(kv.at("output.steady_state.csv.sha256") == sha256_hex(slurp(dir / "steady_state.csv")));
    CHECK(parse_config(dir / "config.ini") == c);
}

TEST_CASE("threshold subcommand reports NoSignChange as a numerical failure") {
    const auto dir = scratch_dir("nosign");
    CommandOptions opts;
    opts.out_dir = dir;
    std::ostringstream log;
    RunConfig c = parse_config_text(kMinimal);
    c.analysis.ray_lo = 0.5;
    c.analysis.ray_hi = 1.0;
    CHECK(run_subcommand("threshold", c, opts, log) == kExitNumerical);
    CHECK(log.str().find("NoSignChange") != std::string::npos);
}
