// Runs the eleven acceptance criteria and prints one line per criterion.
// Exits non-zero when any criterion fails.

#include "support.hh"

#include <farsight/constructive.hh>
#include <farsight/experiment.hh>
#include <farsight/stable_sets.hh>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace farsight;
using namespace farsight::test;

namespace
{
    struct Outcome
    {
        std::vector<std::string> failures;

        auto expect(bool ok, const std::string & what) -> void
        {
            if (! ok)
                failures.push_back(what);
        }
    };

    auto names(const StateSpace & space, const std::vector<int> & members) -> std::string
    {
        std::string text = "{";
        for (std::size_t x = 0 ; x < members.size() ; ++x)
            text += (x ? ", " : "") + describe(space.problem(), space.matching(members[x]));
        return text + "}";
    }

    auto names(const StateSpace & space, const std::vector<std::vector<int>> & sets) -> std::string
    {
        std::string text = "[";
        for (std::size_t x = 0 ; x < sets.size() ; ++x)
            text += (x ? ", " : "") + names(space, sets[x]);
        return text + "]";
    }

    auto indices(const StateSpace & space, std::initializer_list<Matching> matchings) -> std::vector<int>
    {
        std::vector<int> result;
        for (auto & mu : matchings)
            result.push_back(space.index_of(mu));
        std::sort(result.begin(), result.end());
        return result;
    }

    auto stable(const Problem & p, const Matching & mu) -> bool
    {
        for (int i = 0 ; i < p.n() ; ++i) {
            int own = mu.object_of(i);
            if (own != kUnmatched && ! p.acceptable(i, own))
                return false;
            for (int s = 0 ; s < p.m() ; ++s)
                if (p.prefers(i, s, own)) {
                    int holder = mu.holder_of(s);
                    if (holder == kUnmatched || p.priority_rank(s, i) < p.priority_rank(s, holder))
                        return false;
                }
        }
        return true;
    }

    auto dominates(const Problem & p, const Matching & a, const Matching & b) -> bool
    {
        bool strict = false;
        for (int i = 0 ; i < p.n() ; ++i) {
            int x = p.preference_rank(i, a.object_of(i)), y = p.preference_rank(i, b.object_of(i));
            if (x > y)
                return false;
            strict |= x < y;
        }
        return strict;
    }

    auto ac1() -> Outcome
    {
        Outcome o;
        Example1 ex;
        auto trace = run_ttc(ex.problem);
        o.expect(trace.matching == ex.mu_t, "TTC gave " + describe(ex.problem, trace.matching));
        o.expect(trace.gamma == 2, "gamma " + std::to_string(trace.gamma));
        bool cycle = ! trace.rounds.empty() && trace.rounds[0].cycles.size() == 1
            && trace.rounds[0].cycles[0].objects == std::vector<int>{ 0, 1 }
            && trace.rounds[0].cycles[0].agents == std::vector<int>{ 2, 1 };
        o.expect(cycle, "round-1 cycle is not (s1,i3,s2,i2)");
        auto da = run_da(ex.problem), ia = run_ia(ex.problem);
        o.expect(da == ex.mu_d, "DA gave " + describe(ex.problem, da));
        o.expect(ia == ex.mu_b, "IA gave " + describe(ex.problem, ia));
        return o;
    }

    auto ac2() -> Outcome
    {
        Outcome o;
        Example1 ex;
        StateSpace space(ex.problem);
        int t = space.index_of(ex.mu_t), d = space.index_of(ex.mu_d);
        auto phi = [&] (int source, int k) {
            auto set = phi_k(space, source, Horizon(k));
            o.expect(set.exact(), "phi_" + std::to_string(k) + " search ran out of budget");
            return set;
        };

        auto listed = indices(space, { ex.mu_1, ex.mu_2, ex.mu_3, ex.mu_4 });
        for (int k : { 5, 6 }) {
            auto set = phi(t, k);
            o.expect(set.members == listed, "phi_" + std::to_string(k) + "(mu^T) has " + std::to_string(set.members.size())
                + " members, expected " + names(space, listed));
        }
        auto four = phi(t, 4);
        o.expect(four.contains(space.index_of(ex.mu_5)) && four.contains(d), "phi_4(mu^T) misses mu^5 or mu^D");
        for (int k : { 1, 2 }) {
            auto set = phi(d, k);
            o.expect(set.members.empty(), "phi_" + std::to_string(k) + "(mu^D) = " + names(space, set.members));
        }
        for (int k : { 3, 4, 5 }) {
            auto set = phi(d, k);
            o.expect(set.members == std::vector<int>{ t }, "phi_" + std::to_string(k) + "(mu^D) has "
                + std::to_string(set.members.size()) + " members, expected {mu^T}");
        }
        return o;
    }

    auto ac3() -> Outcome
    {
        Outcome o;
        Example1 ex;
        StateSpace space(ex.problem);
        int t = space.index_of(ex.mu_t), d = space.index_of(ex.mu_d);
        std::vector<std::vector<int>> only_t{ { t } }, only_d{ { d } }, both{ { d }, { t } };
        std::sort(both.begin(), both.end());
        for (auto [k, expected] : { std::pair{ 5, only_t }, std::pair{ 3, both }, std::pair{ 4, both }, std::pair{ 1, only_d }, std::pair{ 2, only_d } }) {
            auto relation = build_relation(space, Variant::phi_k, k);
            if (! relation.exact()) {
                o.expect(false, "k=" + std::to_string(k) + " relation ran out of budget");
                continue;
            }
            auto sets = enumerate_vnm_sets(relation);
            std::string found = sets.sets.size() <= 3 ? names(space, sets.sets) : std::to_string(sets.sets.size()) + " sets";
            o.expect(sets.complete && sets.sets == expected, "k=" + std::to_string(k) + " gave " + found);
        }
        return o;
    }

    auto constructive_suite(bool tight) -> Outcome
    {
        Outcome o;
        std::mt19937_64 rng(4);
        for (std::uint64_t seed = 1 ; seed <= 200 ; ++seed) {
            int n = 2 + static_cast<int>(seed % 3), m = 2 + static_cast<int>(seed / 3 % 3);
            auto p = gen_random_problem(seed, n, m);
            auto trace = run_ttc(p);
            auto bounds = bounds_from_trace(trace);
            auto all = enumerate_matchings(p);
            int k = std::max(1, tight ? bounds.tight_bound : bounds.theorem1_bound);
            for (int start = 0 ; start < 3 ; ++start) {
                Matching from;
                do
                    from = all[rng() % all.size()];
                while (from == trace.matching);
                auto built = tight ? build_tight_path(p, from) : build_canonical_path(p, from);
                built.path.horizon = Horizon(k);
                auto verdict = validate_path(p, built.path);
                bool ends = built.path.states.back() == trace.matching;
                o.expect(verdict.valid && ends, "seed " + std::to_string(seed) + " from " + describe(p, from)
                    + (ends ? "" : " misses mu^T") + (verdict.valid ? "" : " fails at k=" + std::to_string(k)));
            }
        }
        return o;
    }

    auto ac6() -> Outcome
    {
        Outcome o;
        Example1 ex;
        StateSpace space(ex.problem);
        for (int L : { 6, 8 })
            o.expect(check_horizon_L_farsighted_set(space, { space.index_of(ex.mu_t) }, L).verdict,
                "{mu^T} is not a horizon-" + std::to_string(L) + " farsighted set");
        return o;
    }

    auto ac7() -> Outcome
    {
        Outcome o;
        auto p = load("ex2.json");
        Rules rules;
        rules.mode = Mode::owned;
        StateSpace space(p, rules);
        int t = space.index_of(run_ttc(p).matching);
        auto tilde = phi_k(space, t, Horizon(5));
        o.expect(tilde.exact() && tilde.members.empty(), "phi~_5(mu^T) = " + names(space, tilde.members));
        for (int k : { 5, space.size() - 1 }) {
            auto relation = build_relation(space, Variant::phi_k, k);
            if (! relation.exact()) {
                o.expect(false, "k=" + std::to_string(k) + " relation ran out of budget");
                continue;
            }
            auto sets = enumerate_vnm_sets(relation);
            o.expect(sets.complete && sets.sets == std::vector<std::vector<int>>{ { t } }, "k=" + std::to_string(k) + " gave " + names(space, sets.sets));
        }
        return o;
    }

    auto ac8() -> Outcome
    {
        Outcome o;
        auto check = [&] (const Problem & p, const std::string & label) {
            StateSpace space(p);
            for (int x = 0 ; x < space.size() ; ++x) {
                auto finite = phi_k(space, x, Horizon(space.size() - 1));
                o.expect(finite.exact() && finite.members == phi_infinity(space, x).members,
                    label + " differs at " + describe(p, space.matching(x)));
            }
        };
        check(load("ex1.json"), "example 1");
        for (std::uint64_t seed = 1 ; seed <= 20 ; ++seed)
            check(gen_random_problem(seed, 3, 3), "seed " + std::to_string(seed));
        return o;
    }

    auto ac9() -> Outcome
    {
        Outcome o;
        int found = 0;
        auto paths = [&] (const StateSpace & space, int k, const std::string & label) {
            std::vector<int> all(space.size());
            for (int x = 0 ; x < space.size() ; ++x)
                all[x] = x;
            for (int x = 0 ; x < space.size() ; ++x) {
                auto targets = all;
                targets.erase(targets.begin() + x);
                auto outcomes = find_horizon_k_paths(space, x, targets, Horizon(k));
                for (auto & outcome : outcomes)
                    if (outcome.status == SearchStatus::found) {
                        ++found;
                        o.expect(validate_path(space.problem(), *outcome.path).valid, label + " produced an invalid path");
                    }
            }
        };
        StateSpace ex1(load("ex1.json"));
        for (int k = 1 ; k <= 5 ; ++k)
            paths(ex1, k, "example 1 k=" + std::to_string(k));
        for (std::uint64_t seed = 1 ; seed <= 5 ; ++seed) {
            StateSpace space(gen_random_problem(seed, 3, 3));
            for (int k = 2 ; k <= 4 ; ++k)
                paths(space, k, "seed " + std::to_string(seed));
        }
        o.expect(found > 0, "no paths found at all");

        for (std::uint64_t seed = 1 ; seed <= 50 ; ++seed) {
            auto p = gen_random_problem(seed, 4, 4);
            auto all = enumerate_matchings(p);
            std::vector<int> best(p.n(), -1);
            for (auto & mu : all)
                if (stable(p, mu))
                    for (int i = 0 ; i < p.n() ; ++i)
                        if (best[i] == -1 || p.prefers(i, mu.object_of(i), best[i] == -2 ? kUnmatched : best[i]))
                            best[i] = mu.object_of(i) == kUnmatched ? -2 : mu.object_of(i);
            std::vector<std::pair<int, int>> pairs;
            for (int i = 0 ; i < p.n() ; ++i)
                if (best[i] >= 0)
                    pairs.emplace_back(i, best[i]);
            auto da = run_da(p);
            o.expect(da == Matching(pairs), "seed " + std::to_string(seed) + ": DA is not agent-optimal");

            auto ttc = run_ttc(p).matching;
            bool efficient = std::none_of(all.begin(), all.end(), [&] (auto & mu) { return dominates(p, mu, ttc); });
            o.expect(efficient && is_pareto_efficient(p, ttc).efficient, "seed " + std::to_string(seed) + ": TTC is dominated");
        }
        return o;
    }

    auto ac10() -> Outcome
    {
        Outcome o;
        auto subset = [] (const std::vector<int> & a, const std::vector<int> & b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); };
        for (std::uint64_t seed = 1 ; seed <= 20 ; ++seed) {
            StateSpace space(gen_random_problem(seed, 3, 3));
            for (int x = 0 ; x < space.size() ; ++x)
                for (int L = 0 ; L <= 6 ; ++L) {
                    o.expect(subset(hat_phi_L(space, x, L).members, hat_phi_L(space, x, L + 1).members),
                        "seed " + std::to_string(seed) + ": hat phi not monotone at L=" + std::to_string(L));
                    o.expect(subset(hat_phi_L_closure(space, x, L).members, hat_phi_L_closure(space, x, L + 1).members),
                        "seed " + std::to_string(seed) + ": closure not monotone at L=" + std::to_string(L));
                }
        }

        Example1 ex;
        StateSpace space(ex.problem);
        int t = space.index_of(ex.mu_t), d = space.index_of(ex.mu_d);
        auto four = phi_k(space, t, Horizon(4)), five = phi_k(space, t, Horizon(5));
        o.expect(four.exact() && four.contains(d), "mu^D not in phi_4(mu^T)");
        o.expect(five.exact() && ! five.contains(d), "mu^D in phi_5(mu^T)");
        return o;
    }

    auto ac11() -> Outcome
    {
        Outcome o;
        auto dir = std::filesystem::temp_directory_path();
        auto first = dir / "farsight_acceptance_a.csv", second = dir / "farsight_acceptance_b.csv";
        std::string base = std::string("\"") + FARSIGHT_BINARY + "\" experiment --seeds 1..50 --n 3 --m 3 2>/dev/null > ";
        bool ran = std::system((base + "\"" + first.string() + "\"").c_str()) == 0
            && std::system((base + "\"" + second.string() + "\"").c_str()) == 0;
        o.expect(ran, "experiment command failed");
        auto a = read_file(first.string()), b = read_file(second.string());
        o.expect(! a.empty() && a == b, "the two CSV files differ");

        std::istringstream lines(a);
        std::string line;
        std::getline(lines, line);
        o.expect(line == kCsvHeader, "unexpected header");
        int rows = 0;
        while (std::getline(lines, line)) {
            ++rows;
            std::vector<std::string> cells;
            std::istringstream row(line);
            for (std::string cell ; std::getline(row, cell, ',') ; )
                cells.push_back(cell);
            if (cells.size() != 9) {
                o.expect(false, "malformed row " + line);
                continue;
            }
            int bound = std::max(1, std::stoi(cells[4]));
            bool ok = ! cells[6].empty() && std::isdigit(static_cast<unsigned char>(cells[6][0])) && std::stoi(cells[6]) <= bound;
            o.expect(ok, "seed " + cells[0] + ": minimal_k " + cells[6] + " against 3g-1 = " + cells[4]);
        }
        o.expect(rows == 50, "expected 50 rows, got " + std::to_string(rows));
        std::filesystem::remove(first);
        std::filesystem::remove(second);
        return o;
    }
}

auto main() -> int
{
    struct Criterion
    {
        const char * title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        { "example 1 mechanisms", ac1 },
        { "example 1 reachability", ac2 },
        { "example 1 stable sets", ac3 },
        { "canonical paths validate at 3g-1", [] { return constructive_suite(false); } },
        { "tight paths validate at 2g+1", [] { return constructive_suite(true); } },
        { "{mu^T} is a horizon-L farsighted set at L = 6, 8", ac6 },
        { "owned mode example 2", ac7 },
        { "saturation at |M|-1", ac8 },
        { "oracle cross-checks", ac9 },
        { "monotonicity and the non-monotone witness", ac10 },
        { "experiment determinism", ac11 },
    };

    int failed = 0;
    for (std::size_t x = 0 ; x < criteria.size() ; ++x) {
        Outcome outcome;
        try {
            outcome = criteria[x].run();
        }
        catch (const std::exception & e) {
            outcome.failures.push_back(std::string("exception: ") + e.what());
        }
        bool pass = outcome.failures.empty();
        failed += ! pass;
        std::cout << "AC" << x + 1 << ' ' << (pass ? "PASS" : "FAIL") << "  " << criteria[x].title << '\n';
        for (std::size_t f = 0 ; f < outcome.failures.size() && f < 8 ; ++f)
            std::cout << "    " << outcome.failures[f] << '\n';
        if (outcome.failures.size() > 8)
            std::cout << "    ... " << outcome.failures.size() - 8 << " more\n";
        std::cout.flush();
    }
    std::cout << (criteria.size() - failed) << " of " << criteria.size() << " criteria pass\n";
    return failed == 0 ? 0 : 1;
}
