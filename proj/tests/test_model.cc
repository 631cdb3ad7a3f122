#include "support.hh"

#include <farsight/json.hh>
#include <farsight/model.hh>

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace farsight;
using namespace farsight::test;

namespace
{
    /// Counts injective partial maps by trying every function I -> S ∪ {self}.
    auto brute_force_count(int n, int m) -> std::size_t
    {
        std::size_t total = 1, count = 0;
        for (int i = 0 ; i < n ; ++i)
            total *= static_cast<std::size_t>(m + 1);
        for (std::size_t code = 0 ; code < total ; ++code) {
            std::vector<bool> used(m, false);
            bool ok = true;
            auto rest = code;
            for (int i = 0 ; i < n && ok ; ++i) {
                auto choice = static_cast<int>(rest % (m + 1)) - 1;
                rest /= m + 1;
                if (choice >= 0) {
                    ok = ! used[choice];
                    used[choice] = true;
                }
            }
            count += ok;
        }
        return count;
    }

    auto random_problem(std::mt19937 & rng, int n, int m) -> Problem
    {
        std::vector<std::string> agents, objects;
        for (int i = 0 ; i < n ; ++i)
            agents.push_back("a" + std::to_string(i));
        for (int s = 0 ; s < m ; ++s)
            objects.push_back("o" + std::to_string(s));
        std::vector<std::vector<int>> prefs(n), prios(m);
        for (auto & list : prefs) {
            for (int s = 0 ; s < m ; ++s)
                if (rng() % 3 != 0)
                    list.push_back(s);
            std::shuffle(list.begin(), list.end(), rng);
        }
        for (auto & list : prios) {
            for (int i = 0 ; i < n ; ++i)
                list.push_back(i);
            std::shuffle(list.begin(), list.end(), rng);
        }
        return Problem(agents, objects, prefs, prios);
    }
}

TEST_CASE("parse example 1")
{
    auto problem = load("ex1.json");
    CHECK(problem.n() == 3);
    CHECK(problem.m() == 3);
    CHECK(! problem.has_owners());
    CHECK(problem.priority_rank(*problem.find_object("s1"), *problem.find_agent("i3")) == 1);
    CHECK(problem.prefers(*problem.find_agent("i3"), *problem.find_object("s2"), *problem.find_object("s1")));
}

TEST_CASE("empty preference lists are valid")
{
    auto problem = parse_problem(R"({"agents":["i1","i2"],"objects":["s1"],
        "preferences":{"i1":[],"i2":[]},"priorities":{"s1":["i1","i2"]}})");
    CHECK(problem.preferences(0).empty());
    CHECK(! problem.acceptable(0, 0));
    CHECK(! problem.acceptable(1, 0));
}

TEST_CASE("duplicate preference entry names agent and object")
{
    try {
        (void) parse_problem(R"({"agents":["i1"],"objects":["s1"],
            "preferences":{"i1":["s1","s1"]},"priorities":{"s1":["i1"]}})");
        FAIL("expected ParseError");
    }
    catch (const ParseError & error) {
        std::string text = error.what();
        CHECK(text.find("i1") != std::string::npos);
        CHECK(text.find("s1") != std::string::npos);
    }
}

TEST_CASE("malformed documents are rejected")
{
    CHECK_THROWS_AS((void) parse_problem("{"), ParseError);
    CHECK_THROWS_AS((void) parse_problem(R"({"agents":["i1"],"objects":["s1"],
        "preferences":{"i1":["s9"]},"priorities":{"s1":["i1"]}})"), ParseError);
    CHECK_THROWS_AS((void) parse_problem(R"({"agents":["i1"],"objects":["s1"],
        "preferences":{"i1":[]},"priorities":{"s1":["i1","i1"]}})"), ParseError);
    CHECK_THROWS_AS((void) parse_problem(R"({"agents":["x"],"objects":["x"],
        "preferences":{"x":[]},"priorities":{"x":[]}})"), ParseError);
    CHECK_THROWS_AS((void) parse_problem(R"({"agents":["i1","i2"],"objects":["s1","s2"],
        "preferences":{"i1":[],"i2":[]},"priorities":{"s1":["i1"],"s2":["i1"]},
        "owners":{"s1":"i1","s2":"i1"}})"), ParseError);
}

TEST_CASE("enumerate_matchings counts")
{
    CHECK(enumerate_matchings(parse_problem(R"({"agents":["i1"],"objects":["s1"],
        "preferences":{"i1":["s1"]},"priorities":{"s1":["i1"]}})")).size() == 2);
    CHECK(enumerate_matchings(load("ex1.json")).size() == 34);
    CHECK(brute_force_count(3, 3) == 34);
    CHECK(brute_force_count(2, 1) == 3);

    std::mt19937 rng(7);
    for (int n = 1 ; n <= 4 ; ++n)
        for (int m = 1 ; m <= 4 ; ++m) {
            CAPTURE(n);
            CAPTURE(m);
            auto all = enumerate_matchings(random_problem(rng, n, m));
            CHECK(all.size() == brute_force_count(n, m));
            CHECK(all.size() == count_matchings(n, m));
            CHECK(std::set<Matching>(all.begin(), all.end()).size() == all.size());
            CHECK(std::is_sorted(all.begin(), all.end()));
        }
}

TEST_CASE("enumeration cap")
{
    CHECK_THROWS_AS((void) enumerate_matchings(load("ex1.json"), 10), CapExceeded);
}

TEST_CASE("legal_moves on example 1")
{
    Example1 ex;
    auto & p = ex.problem;
    int i1 = *p.find_agent("i1"), i2 = *p.find_agent("i2");
    int s1 = *p.find_object("s1");

    auto has = [&] (const Matching & mu, const Move & move) {
        auto moves = legal_moves(p, mu);
        return std::find(moves.begin(), moves.end(), move) != moves.end();
    };

    CHECK(p.priority_rank(s1, i1) == 2);
    CHECK(p.priority_rank(s1, i2) == 3);
    CHECK(has(ex.mu_t, make_add(ex.mu_t, i1, s1)));
    CHECK(! is_legal(p, ex.mu_d, make_add(ex.mu_d, i2, s1)));
    for (auto & [agent, object] : ex.mu_d.pairs())
        CHECK(has(ex.mu_d, make_remove(agent, object)));
}

TEST_CASE("apply_move walkthrough")
{
    Example1 ex;
    auto & p = ex.problem;
    int i1 = *p.find_agent("i1"), i3 = *p.find_agent("i3");
    int s1 = *p.find_object("s1"), s3 = *p.find_object("s3");

    auto add = make_add(ex.mu_0, i3, s1);
    CHECK(add.displaced == i1);
    CHECK(add.vacated == s3);
    auto mu_1 = apply_move(ex.mu_0, add);
    CHECK(mu_1 == named(p, { { "i2", "s2" }, { "i3", "s1" } }));
    CHECK(apply_move(mu_1, make_remove(i3, s1)) == named(p, { { "i2", "s2" } }));
    CHECK(apply_move(Matching(), make_add(Matching(), i1, s1)) == named(p, { { "i1", "s1" } }));
    CHECK_THROWS_AS((void) apply_move(Matching(), make_remove(i1, s1)), ContractViolation);
}

TEST_CASE("move properties on random instances")
{
    std::mt19937 rng(11);
    for (int trial = 0 ; trial < 40 ; ++trial) {
        auto problem = random_problem(rng, 1 + rng() % 4, 1 + rng() % 4);
        for (auto mode : { Mode::standard }) {
            Rules rules;
            rules.mode = mode;
            for (auto & mu : enumerate_matchings(problem))
                for (auto & move : legal_moves(problem, mu, rules)) {
                    auto out = apply_move(mu, move);
                    CHECK_NOTHROW(check_matching(problem, out));
                    CHECK(out != mu);
                    auto diff = static_cast<long>(out.size()) - static_cast<long>(mu.size());
                    CHECK(diff >= -1);
                    CHECK(diff <= 1);
                    std::set<int> objects;
                    for (auto & pair : out.pairs())
                        CHECK(objects.insert(pair.second).second);
                }
        }
    }
}

TEST_CASE("problem and matching round trip")
{
    for (auto name : { "ex1.json", "ex2.json" }) {
        auto text = read_file(data_path(name));
        auto problem = parse_problem(text);
        auto again = parse_problem(serialize_problem(problem));
        CHECK(serialize_problem(again) == serialize_problem(problem));
        CHECK(problem_to_json(again) == problem_to_json(problem));
        for (auto & mu : enumerate_matchings(problem))
            CHECK(parse_matching(problem, serialize_matching(problem, mu)) == mu);
    }
}

TEST_CASE("matching rejects shared objects")
{
    CHECK_THROWS_AS(Matching({ { 0, 1 }, { 1, 1 } }), ContractViolation);
    CHECK_THROWS_AS(Matching({ { 0, 1 }, { 0, 2 } }), ContractViolation);
}
