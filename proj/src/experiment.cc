#include <farsight/experiment.hh>

#include <algorithm>
#include <charconv>
#include <random>
#include <sstream>

namespace farsight
{
    namespace
    {
        /// Uniform in [0, bound). Spelled out so that instances do not depend
        /// on the standard library's distribution code.
        auto draw(std::mt19937_64 & rng, std::uint64_t bound) -> std::uint64_t
        {
            const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
            while (true) {
                auto value = rng();
                if (value < limit)
                    return value % bound;
            }
        }

        auto shuffled(std::mt19937_64 & rng, int count) -> std::vector<int>
        {
            std::vector<int> result(count);
            for (int x = 0 ; x < count ; ++x)
                result[x] = x;
            for (int x = count - 1 ; x > 0 ; --x)
                std::swap(result[x], result[draw(rng, static_cast<std::uint64_t>(x) + 1)]);
            return result;
        }

        auto names(char prefix, int count) -> std::vector<std::string>
        {
            std::vector<std::string> result;
            for (int x = 1 ; x <= count ; ++x)
                result.push_back(prefix + std::to_string(x));
            return result;
        }
    }

    auto gen_random_problem(std::uint64_t seed, int n, int m, Mode mode, bool allow_unacceptable) -> Problem
    {
        if (n < 1 || m < 1)
            throw ContractViolation("random problems need at least one agent and one object");
        if (mode == Mode::owned && n != m)
            throw ContractViolation("owned random problems need n == m");

        std::mt19937_64 rng(seed);
        std::vector<std::vector<int>> preferences(n), priorities(m);
        for (int i = 0 ; i < n ; ++i) {
            for (int s : shuffled(rng, m))
                if ((mode == Mode::owned && ! allow_unacceptable) || draw(rng, 2) == 1)
                    preferences[i].push_back(s);
        }

        std::optional<std::vector<int>> owners;
        if (mode == Mode::owned) {
            owners.emplace(m);
            for (int s = 0 ; s < m ; ++s) {
                (*owners)[s] = s;
                priorities[s] = { s };
            }
        }
        else
            for (int s = 0 ; s < m ; ++s)
                priorities[s] = shuffled(rng, n);

        return Problem(names('i', n), names('s', m), std::move(preferences), std::move(priorities), std::move(owners));
    }

    auto minimal_stabilizing_k(const StateSpace & space, const SearchLimits & limits) -> MinimalK
    {
        const auto trace = run_ttc(space.problem());
        const int target = space.index_of(trace.matching);
        const int bound = std::max(1, bounds_from_trace(trace).theorem1_bound);

        MinimalK result;
        for (int k = 1 ; k <= bound ; ++k) {
            auto relation = build_relation(space, Variant::phi_k, k, limits, std::vector<int>{ target });
            try {
                if (check_vnm_set(relation, { target }).verdict) {
                    result.k = k;
                    return result;
                }
            }
            catch (const Indeterminate &) {
                result.exact = false;
            }
        }
        return result;
    }

    auto run_experiment_row(std::uint64_t seed, const ExperimentConfig & config) -> ExperimentRow
    {
        ExperimentRow row;
        row.seed = seed;
        row.n = config.n;
        row.m = config.m;

        auto problem = gen_random_problem(seed, config.n, config.m, config.mode, config.allow_unacceptable);
        Rules rules;
        rules.mode = config.mode;
        StateSpace space(problem, rules, config.cap);

        auto trace = run_ttc(problem);
        row.bounds = bounds_from_trace(trace);
        row.minimal = minimal_stabilizing_k(space, config.limits);
        row.ttc_stable = audit_matching(problem, trace.matching).stable;

        row.da_applicable = config.mode == Mode::standard && problem.has_complete_priorities();
        if (row.da_applicable && row.minimal.k) {
            auto da = space.index_of(run_da(problem));
            if (space.matching(da) == trace.matching)
                row.da_in_some_stable_set = true;
            else if (static_cast<std::size_t>(space.size()) <= config.da_max_matchings) {
                auto limits = config.limits;
                limits.node_budget = config.da_node_budget;
                auto relation = build_relation(space, Variant::phi_k, *row.minimal.k, limits);
                if (relation.exact()) {
                    auto sets = enumerate_vnm_sets(relation);
                    bool found = std::any_of(sets.sets.begin(), sets.sets.end(), [&] (auto & set) {
                        return std::binary_search(set.begin(), set.end(), da);
                    });
                    if (found || sets.complete)
                        row.da_in_some_stable_set = found;
                }
            }
        }
        return row;
    }

    auto run_experiment(const ExperimentConfig & config) -> std::vector<ExperimentRow>
    {
        std::vector<ExperimentRow> rows;
        for (auto seed : config.seeds)
            rows.push_back(run_experiment_row(seed, config));
        return rows;
    }

    auto to_csv(const std::vector<ExperimentRow> & rows) -> std::string
    {
        std::ostringstream out;
        out << kCsvHeader << '\n';
        for (auto & row : rows) {
            out << row.seed << ',' << row.n << ',' << row.m << ',' << row.bounds.gamma << ','
                << row.bounds.theorem1_bound << ',' << row.bounds.tight_bound << ',';
            if (! row.minimal.k)
                out << "none";
            else if (! row.minimal.exact)
                out << "<=" << *row.minimal.k;
            else
                out << *row.minimal.k;
            out << ',' << (row.ttc_stable ? "true" : "false") << ',';
            if (! row.da_applicable)
                out << "na";
            else if (! row.da_in_some_stable_set)
                out << "indeterminate";
            else
                out << (*row.da_in_some_stable_set ? "true" : "false");
            out << '\n';
        }
        return out.str();
    }

    auto summarize(const std::vector<ExperimentRow> & rows) -> std::string
    {
        int max_k = 0, max_gamma = 0, over_tight = 0, violations = 0, unresolved = 0, da_in = 0, da_known = 0;
        for (auto & row : rows) {
            max_gamma = std::max(max_gamma, row.bounds.gamma);
            if (! row.minimal.k || ! row.minimal.exact)
                ++unresolved;
            if (row.minimal.k) {
                max_k = std::max(max_k, *row.minimal.k);
                if (*row.minimal.k > std::max(1, row.bounds.tight_bound))
                    ++over_tight;
            }
            if (row.minimal.exact && ! row.minimal.k)
                ++violations;
            if (row.da_in_some_stable_set) {
                ++da_known;
                if (*row.da_in_some_stable_set)
                    ++da_in;
            }
        }

        std::ostringstream out;
        out << rows.size() << " rows; max minimal_k " << max_k << "; max gamma " << max_gamma
            << " (3g-1 = " << 3 * max_gamma - 1 << ", 2g+1 = " << 2 * max_gamma + 1 << "); "
            << violations << " rows over 3g-1; " << over_tight << " rows over 2g+1; "
            << unresolved << " inexact; DA in some stable set " << da_in << "/" << da_known;
        return out.str();
    }

    auto parse_seeds(const std::string & text) -> std::vector<std::uint64_t>
    {
        auto number = [&] (std::string_view part) {
            std::uint64_t value = 0;
            auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
            if (ec != std::errc() || end != part.data() + part.size() || part.empty())
                throw ContractViolation("bad seed '" + std::string(part) + "'");
            return value;
        };

        std::vector<std::uint64_t> result;
        std::string_view rest = text;
        while (! rest.empty()) {
            auto comma = rest.find(',');
            auto part = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);

            if (auto dots = part.find(".."); dots != std::string_view::npos) {
                auto first = number(part.substr(0, dots)), last = number(part.substr(dots + 2));
                if (first > last)
                    throw ContractViolation("empty seed range '" + std::string(part) + "'");
                for (auto seed = first ; ; ++seed) {
                    result.push_back(seed);
                    if (seed == last)
                        break;
                }
            }
            else
                result.push_back(number(part));
        }
        return result;
    }
}
