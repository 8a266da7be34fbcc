#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fdplens/commands.hpp"
#include "fdplens/config.hpp"
#include "fdplens/input.hpp"
#include "fdplens/selection.hpp"
#include "fdplens/service.hpp"

using namespace fdplens;
namespace fs = std::filesystem;

namespace {

const fs::path kData = FDPLENS_TEST_DATA_DIR;

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name, const std::string& contents) {
    const fs::path dir = fs::temp_directory_path() / "fdplens-tests";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream(path, std::ios::binary) << contents;
    return path;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run analyze(const fs::path& file, const std::string& set, double alpha = 0.05, const std::string& format = "json") {
    std::ostringstream out, err;
    const int code = run_analyze(AnalyzeOptions{file, alpha, set, format}, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("table parsing: delimiters, headers, comments and notation") {
    const auto csv = parse_table("A,0.5\nB,1e-3\n");
    CHECK(csv.ids() == std::vector<std::string>{"A", "B"});
    CHECK(csv.p() == std::vector<double>{0.5, 0.001});

    const auto tsv = parse_table("# comment\nname\tp\textra\n\"x 1\"\t0.25\tfoo\n\ny\t+1.0E-2\tbar\n");
    CHECK(tsv.ids() == std::vector<std::string>{"x 1", "y"});
    CHECK(tsv.p() == std::vector<double>{0.25, 0.01});

    const auto crlf = parse_table("id,p\r\nA,0\r\nB,1\r\n");
    CHECK(crlf.p() == std::vector<double>{0.0, 1.0});
}

TEST_CASE("table parsing errors carry line numbers") {
    const auto line_of = [](const std::string& text) {
        try {
            parse_table(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{999};
    };
    CHECK(line_of("id,p\nA,0.1\nB,zero\n") == 3);
    CHECK(line_of("A,0.1\nB,1.5\n") == 2);
    CHECK(line_of("A,0.1\nA,0.2\n") == 2);
    CHECK(line_of("A,0.1\nB\n") == 2);
    CHECK(line_of("A,0,5\nB,0.2\n") == 999);   // extra column ignored
    CHECK(line_of("A,0.1\n,0.2\n") == 2);
    CHECK(line_of("A,0.1\nB,nan\n") == 2);
    CHECK(line_of("# nothing\n\n") == 0);
    CHECK_THROWS_AS(read_table_file(kData / "missing.csv"), ParseError);
}

TEST_CASE("set specification syntax") {
    CHECK(parse_set_spec("all").kind == SetSpec::Kind::All);
    CHECK(parse_set_spec("").kind == SetSpec::Kind::None);
    CHECK(parse_set_spec("top:3").last_rank == 3);
    const auto r = parse_set_spec("ranks:2-4");
    CHECK((r.first_rank == 2 && r.last_rank == 4));
    CHECK(parse_set_spec("p<=0.05").threshold == 0.05);
    CHECK(parse_set_spec("ids:A, B").ids == std::vector<std::string>{"A", "B"});
    CHECK(parse_set_spec("A,C").ids == std::vector<std::string>{"A", "C"});
    CHECK_THROWS_AS(parse_set_spec("top:x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_set_spec("ranks:3-1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_set_spec("p<=abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_set_spec("A,,B"), std::invalid_argument);
}

TEST_CASE("set resolution") {
    const auto study = read_table_file(kData / "example.csv");
    CHECK(resolve(parse_set_spec("top:3"), study) == SubsetSelection::from_indices({0, 1, 2}, 4));
    CHECK(resolve(parse_set_spec("ranks:2-3"), study) == SubsetSelection::from_indices({1, 2}, 4));
    CHECK(resolve(parse_set_spec("p<=0.031"), study) == SubsetSelection::from_indices({0, 1}, 4));
    CHECK(resolve(parse_set_spec("D,A"), study) == SubsetSelection::from_indices({0, 3}, 4));
    CHECK_THROWS_AS(resolve(parse_set_spec("top:5"), study), ResolutionError);
    CHECK_THROWS_AS(resolve(parse_set_spec("ranks:3-5"), study), ResolutionError);
    CHECK_THROWS_AS(resolve(parse_set_spec("A,Z"), study), ResolutionError);
    CHECK_THROWS_AS(resolve(parse_set_spec("A,A"), study), ResolutionError);
}

TEST_CASE("analyze matches the golden report") {
    const auto run = analyze(kData / "example.csv", "top:3");
    CHECK(run.code == kExitOk);
    CHECK(run.out == slurp(kData.parent_path() / "golden" / "analyze_top3.json"));
    // Same bytes from the TSV rendering of the table.
    CHECK(analyze(kData / "example.tsv", "top:3").out == run.out);
}

TEST_CASE("analyze output fields") {
    const auto empty = nlohmann::json::parse(analyze(kData / "example.csv", "none").out);
    CHECK(empty["set"]["size"] == 0);
    CHECK(empty["set"]["q"] == "0");

    const auto full = nlohmann::json::parse(analyze(kData / "example.csv", "p<=1").out);
    CHECK(full["set"]["t"] == full["h"]);
    CHECK(full["set"]["d"] == 4 - full["h"].get<int>());

    const auto pair = nlohmann::json::parse(analyze(kData / "example.csv", "A,C").out);
    CHECK(pair["set"]["t"] == 1);

    const auto csv = analyze(kData / "example.csv", "top:3", 0.05, "csv");
    CHECK(csv.out == "alpha,m,h,z,pi_hat,r_size,b,size,d,t,q\n0.05,4,2,3,0.5,0,3,3,2,1,0.333333333333\n");
}

TEST_CASE("concentration matches the golden report") {
    std::ostringstream out, err;
    CHECK(run_concentration(ConcentrationOptions{kData / "example.csv", 0.05, "json"}, out, err) == kExitOk);
    CHECK(out.str() == slurp(kData.parent_path() / "golden" / "concentration.json"));

    const auto none = scratch("null.csv", "a,0.5\nb,0.7\nc,0.9\n");
    std::ostringstream out2;
    run_concentration(ConcentrationOptions{none, 0.05, "json"}, out2, err);
    const auto doc = nlohmann::json::parse(out2.str());
    CHECK(doc["h"] == 3);
    CHECK(doc["z"] == 0);
    CHECK(doc["concentration_ids"].empty());
}

TEST_CASE("exit codes") {
    const auto bad = scratch("bad.csv", "id,p\nA,0.1\nB,oops\n");
    const auto parse = analyze(bad, "all");
    CHECK(parse.code == kExitParse);
    CHECK(parse.err.find("line 3") != std::string::npos);

    CHECK(analyze(kData / "example.csv", "ids:A,NOPE").code == kExitResolution);
    CHECK(analyze(kData / "example.csv", "top:9").code == kExitResolution);
    CHECK(analyze(kData / "example.csv", "top:").code == kExitParse);
    CHECK(analyze(kData / "example.csv", "all", 1.5).code == kExitParse);
    CHECK(analyze(kData / "example.csv", "all", 0.05, "xml").code == kExitParse);
    CHECK(analyze(kData / "nope.csv", "all").code == kExitParse);

    std::ostringstream out, err;
    const auto cfg = scratch("bad.toml", "gamma = 2.0\n");
    CHECK(run_simulate(SimulateOptions{"coverage", cfg}, out, err) == kExitParse);
    CHECK(run_simulate(SimulateOptions{"bogus", cfg}, out, err) == kExitParse);
}

TEST_CASE("serve reports a busy port as an environment error") {
    service::Service svc;
    service::Server holder(svc);
    REQUIRE(holder.bind("127.0.0.1", 0));
    std::ostringstream out, err;
    ServeOptions opts;
    opts.port = holder.port();
    CHECK(run_serve(opts, out, err) == kExitEnvironment);
    CHECK(err.str().find("cannot bind") != std::string::npos);
}

TEST_CASE("flat TOML and JSON configs") {
    const auto doc = parse_flat_toml("# experiment\ngamma = 0.8\nm = 1_000\nseed = 42 # fixed\nm_grid = [100, 200]\n"
                                     "mu_grid = [1, 2.5]\nname = \"x # y\"\n");
    CHECK(doc["gamma"] == 0.8);
    CHECK(doc["m"] == 1000);
    CHECK(doc["m_grid"] == nlohmann::json::array({100, 200}));
    CHECK(doc["name"] == "x # y");
    CHECK_THROWS_AS(parse_flat_toml("[table]\n"), ConfigError);
    CHECK_THROWS_AS(parse_flat_toml("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_flat_toml("a = \n"), ConfigError);
    CHECK_THROWS_AS(parse_flat_toml("a = 1x\n"), ConfigError);

    const auto toml = scratch("sim.toml", "gamma = 0.8\nmu = 2\nm = 1000\nreps = 7\nalpha = 0.05\n");
    const auto spec = load_simulation_spec(toml);
    CHECK(spec.mixture.gamma == 0.8);
    CHECK(spec.mixture.reps == 7);
    CHECK(spec.m_grid == std::vector<std::size_t>{1000});
    CHECK(spec.mu_grid == std::vector<double>{2.0});

    const auto json = scratch("sim.json", R"({"gamma": 0.5, "m_grid": [10, 20], "subset_fraction": 0.25})");
    const auto spec2 = load_simulation_spec(json);
    CHECK(spec2.m_grid == std::vector<std::size_t>{10, 20});
    CHECK(spec2.subset_fraction == 0.25);

    CHECK_THROWS_AS(load_simulation_spec(scratch("typo.toml", "gama = 0.5\n")), ConfigError);
    CHECK_THROWS_AS(load_simulation_spec(scratch("neg.json", R"({"m": -4})")), ConfigError);
    CHECK_THROWS_AS(load_simulation_spec(scratch("broken.json", "{\"m\": ")), ConfigError);
}

TEST_CASE("simulate writes json and csv and is reproducible") {
    const auto cfg = scratch("cov.toml", "gamma = 0.8\nmu = 2\nm = 200\nreps = 30\nalpha = 0.05\nseed = 9\n");
    const auto prefix = (fs::temp_directory_path() / "fdplens-tests" / "cov").string();
    std::ostringstream out, err;
    SimulateOptions opts{"coverage", cfg};
    opts.out = prefix;
    REQUIRE(run_simulate(opts, out, err) == kExitOk);
    CHECK(out.str().rfind("coverage PASS", 0) == 0);
    const auto first_csv = slurp(prefix + ".csv");
    const auto doc = nlohmann::json::parse(slurp(prefix + ".json"));
    CHECK(doc["config"]["seed"] == 9);
    CHECK(first_csv.rfind("cell,m,mu,rep,", 0) == 0);

    opts.threads = 1;
    std::ostringstream out2;
    REQUIRE(run_simulate(opts, out2, err) == kExitOk);
    CHECK(slurp(prefix + ".csv") == first_csv);

    opts.seed = 10;
    std::ostringstream out3;
    REQUIRE(run_simulate(opts, out3, err) == kExitOk);
    CHECK(slurp(prefix + ".csv") != first_csv);
}
