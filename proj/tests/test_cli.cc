#include "support.hh"

#include <farsight/cli.hh>
#include <farsight/dynamics.hh>
#include <farsight/experiment.hh>
#include <farsight/json.hh>

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <algorithm>
#include <fstream>
#include <sstream>

using namespace farsight;
using namespace farsight::test;

namespace
{
    struct Run
    {
        int code;
        std::string out;
        std::string err;
    };

    auto run(std::vector<std::string> args) -> Run
    {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return { code, out.str(), err.str() };
    }

    const std::string ex1 = data_path("ex1.json");
    const std::string ex2 = data_path("ex2.json");
    const std::string mu_t = R"({"i1":"s3","i2":"s1","i3":"s2"})";
    const std::string mu_0 = R"({"i1":"s1","i2":"s2","i3":"s3"})";
}

TEST_CASE("solve")
{
    auto ttc = run({ "solve", "--mechanism", "ttc", ex1 });
    CHECK(ttc.code == kExitOk);
    CHECK(ttc.out.find("{i1->s3, i2->s1, i3->s2}") != std::string::npos);
    CHECK(ttc.out.find("2") != std::string::npos);

    Example1 ex;
    auto json = run({ "--json", "solve", "--mechanism", "ttc", ex1 });
    REQUIRE(json.code == kExitOk);
    auto doc = Json::parse(json.out);
    CHECK(matching_from_json(ex.problem, doc["matching"]) == ex.mu_t);
    CHECK(doc["gamma"] == 2);
    CHECK(doc["trace"]["rounds"][0]["cycles"][0] == Json::parse(R"(["s:s1","i:i3","s:s2","i:i2"])"));

    auto da = Json::parse(run({ "--json", "solve", "--mechanism", "da", ex1 }).out);
    CHECK(matching_from_json(ex.problem, da["matching"]) == ex.mu_d);
    auto ia = Json::parse(run({ "--json", "solve", "--mechanism", "ia", ex1 }).out);
    CHECK(matching_from_json(ex.problem, ia["matching"]) == ex.mu_b);

    CHECK(run({ "solve", "--mechanism", "da", ex2 }).code == kExitDomainError);
}

TEST_CASE("audit")
{
    auto doc = Json::parse(run({ "--json", "audit", "--matching", mu_t, ex1 }).out);
    CHECK(doc["audit"]["stable"] == false);
    CHECK(doc["audit"]["justified_envy"][0] == Json::parse(R"(["i1","i2","s1"])"));
    CHECK(doc["pareto_efficient"] == true);
}

TEST_CASE("paths")
{
    Example1 ex;
    auto text = run({ "paths", "--from", mu_0, "--to", mu_t, "--k", "5", ex1 });
    CHECK(text.code == kExitOk);
    CHECK(text.out.find("valid") != std::string::npos);

    auto json = run({ "--json", "paths", "--from", mu_0, "--to", mu_t, "--k", "5", ex1 });
    REQUIRE(json.code == kExitOk);
    auto doc = Json::parse(json.out);
    CHECK(doc["status"] == "found");
    auto path = path_from_json(ex.problem, doc["path"]);
    CHECK(path.states.front() == ex.mu_0);
    CHECK(path.states.back() == ex.mu_t);
    CHECK(validate_path(ex.problem, path).valid);

    auto file = std::filesystem::temp_directory_path() / "farsight_cli_path.json";
    {
        std::ofstream out(file);
        out << dump(doc["path"]);
    }
    auto check = run({ "paths", "--check", file.string(), ex1 });
    CHECK(check.code == kExitOk);
    CHECK(check.out.find("valid") != std::string::npos);
    std::filesystem::remove(file);

    auto none = run({ "paths", "--from", R"({"i1":"s3","i2":"s2","i3":"s1"})", "--to", mu_t, "--k", "2", ex1 });
    CHECK(none.out.find("not_found") != std::string::npos);
}

TEST_CASE("phi")
{
    Example1 ex;
    auto doc = Json::parse(run({ "--json", "phi", "--from", R"({"i1":"s3","i2":"s2","i3":"s1"})", "--variant", "phi_infinity", ex1 }).out);
    bool found = false;
    for (auto & member : doc["members"])
        found |= matching_from_json(ex.problem, member) == ex.mu_t;
    CHECK(found);

    auto owned = Json::parse(run({ "--json", "phi", "--from", R"({"i1":"s1","i2":"s3","i3":"s2"})", "--variant", "phi_tilde_k", "--k", "5", ex2 }).out);
    CHECK(owned["members"].empty());
}

TEST_CASE("construct")
{
    Example1 ex;
    auto text = run({ "construct", "--from", mu_0, ex1 });
    CHECK(text.code == kExitOk);
    auto doc = Json::parse(run({ "--json", "construct", "--from", mu_0, ex1 }).out);
    auto path = path_from_json(ex.problem, doc["path"]);
    CHECK(path.states.back() == ex.mu_t);
    CHECK(run({ "--json", "construct", "--tight", "--from", mu_0, ex1 }).code == kExitOk);
}

TEST_CASE("stable sets and set checks")
{
    Example1 ex;
    auto doc = Json::parse(run({ "--json", "stable-sets", "--k", "1", ex1 }).out);
    REQUIRE(doc["sets"].size() == 1);
    REQUIRE(doc["sets"][0].size() == 1);
    CHECK(matching_from_json(ex.problem, doc["sets"][0][0]) == ex.mu_d);
    CHECK(doc["complete"] == true);

    auto verdict = Json::parse(run({ "--json", "verify-set", "--set", "[" + mu_t + "]", "--k", "5", ex1 }).out);
    CHECK(verdict["verdict"] == true);

    auto farsighted = Json::parse(run({ "--json", "farsighted-set", "--set", "[" + mu_t + "]", "--L", "6", ex1 }).out);
    CHECK(farsighted["verdict"] == true);
}

TEST_CASE("experiment output")
{
    auto csv = run({ "experiment", "--seeds", "1..5", "--n", "2", "--m", "2" });
    CHECK(csv.code == kExitOk);
    CHECK(csv.out.starts_with(std::string(kCsvHeader) + "\n"));
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 6);
    CHECK(! csv.err.empty());

    auto doc = Json::parse(run({ "--json", "experiment", "--seeds", "1..5", "--n", "2", "--m", "2" }).out);
    CHECK(doc.size() == 5);
    CHECK(doc[0]["seed"] == 1);
}

TEST_CASE("exit codes")
{
    CHECK(run({ "bogus" }).code == kExitUsageError);
    CHECK(run({ "solve", "--nonsense", ex1 }).code == kExitUsageError);
    CHECK(run({ "solve", "--mechanism", "ttc", "/nonexistent/problem.json" }).code == kExitDomainError);
    CHECK(run({ "audit", "--matching", R"({"i1":"s9"})", ex1 }).code == kExitDomainError);
}

TEST_CASE("binary experiment runs are byte identical")
{
    auto dir = std::filesystem::temp_directory_path();
    auto first = dir / "farsight_cli_a.csv", second = dir / "farsight_cli_b.csv";
    std::string base = std::string("\"") + FARSIGHT_BINARY + "\" experiment --seeds 1..20 --n 3 --m 3 2>/dev/null > ";
    REQUIRE(std::system((base + "\"" + first.string() + "\"").c_str()) == 0);
    REQUIRE(std::system((base + "\"" + second.string() + "\"").c_str()) == 0);
    auto a = read_file(first.string()), b = read_file(second.string());
    CHECK(! a.empty());
    CHECK(a == b);
    std::filesystem::remove(first);
    std::filesystem::remove(second);
}
