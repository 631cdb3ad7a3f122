#ifndef FARSIGHT_TESTS_SUPPORT_HH
#define FARSIGHT_TESTS_SUPPORT_HH

#include <farsight/model.hh>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

namespace farsight::test
{
    inline auto read_file(const std::string & path) -> std::string
    {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        return text.str();
    }

    inline auto data_path(const std::string & name) -> std::string
    {
        return std::string(FARSIGHT_DATA_DIR) + "/" + name;
    }

    inline auto load(const std::string & name) -> Problem
    {
        return parse_problem(read_file(data_path(name)));
    }

    /// Matching from agent/object names; agents left out are unmatched.
    inline auto named(const Problem & problem, std::initializer_list<std::pair<const char *, const char *>> pairs) -> Matching
    {
        std::vector<std::pair<int, int>> indices;
        for (auto & [agent, object] : pairs)
            indices.emplace_back(*problem.find_agent(agent), *problem.find_object(object));
        return Matching(std::move(indices));
    }

    /// The matchings Example 1 names.
    struct Example1
    {
        Problem problem = load("ex1.json");
        Matching mu_t = named(problem, { { "i1", "s3" }, { "i2", "s1" }, { "i3", "s2" } });
        Matching mu_d = named(problem, { { "i1", "s3" }, { "i2", "s2" }, { "i3", "s1" } });
        Matching mu_b = named(problem, { { "i1", "s1" }, { "i2", "s3" }, { "i3", "s2" } });
        Matching mu_0 = named(problem, { { "i1", "s1" }, { "i2", "s2" }, { "i3", "s3" } });
        Matching mu_1 = named(problem, { { "i1", "s1" }, { "i3", "s2" } });
        Matching mu_2 = mu_b;
        Matching mu_3 = named(problem, { { "i1", "s1" }, { "i2", "s2" } });
        Matching mu_4 = mu_0;
        Matching mu_5 = named(problem, { { "i2", "s2" }, { "i3", "s1" } });
    };
}

#endif
