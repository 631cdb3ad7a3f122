#include <farsight/mechanisms.hh>

#include <algorithm>
#include <deque>

namespace farsight
{
    auto TtcCycle::matches() const -> std::vector<std::pair<int, int>>
    {
        std::vector<std::pair<int, int>> result;
        for (std::size_t x = 0 ; x < objects.size() ; ++x)
            result.emplace_back(agents[x], assigned_to(x));
        return result;
    }

    auto run_ttc(const Problem & problem) -> TtcTrace
    {
        const int n = problem.n(), m = problem.m();
        std::vector<bool> agent_left(n, true), object_left(m, true);
        int agents_left = n;
        TtcTrace trace;
        std::vector<std::pair<int, int>> assignment;

        while (agents_left > 0) {
            // An object none of whose ranked agents remain can never be pointed
            // back to; take it off the market so agents look past it.
            for (int s = 0 ; s < m ; ++s)
                if (object_left[s] && std::none_of(problem.priorities(s).begin(), problem.priorities(s).end(),
                            [&] (int i) { return agent_left[i]; }))
                    object_left[s] = false;

            std::vector<int> agent_points(n, kUnmatched), object_points(m, kUnmatched);
            for (int i = 0 ; i < n ; ++i)
                if (agent_left[i])
                    for (int s : problem.preferences(i))
                        if (object_left[s]) {
                            agent_points[i] = s;
                            break;
                        }
            for (int s = 0 ; s < m ; ++s)
                if (object_left[s])
                    for (int i : problem.priorities(s))
                        if (agent_left[i]) {
                            object_points[s] = i;
                            break;
                        }

            TtcRound round;
            // Walk the agent -> object -> agent functional graph from every
            // remaining agent; colour 1 = on the current walk, 2 = finished.
            std::vector<int> colour(n, 0);
            for (int start = 0 ; start < n ; ++start) {
                if (! agent_left[start] || colour[start] != 0)
                    continue;
                std::vector<int> walk;
                int at = start;
                while (true) {
                    if (agent_points[at] == kUnmatched) {
                        round.cycles.push_back(TtcCycle{ {}, { at } });
                        colour[at] = 2;
                        break;
                    }
                    colour[at] = 1;
                    walk.push_back(at);
                    int next = object_points[agent_points[at]];
                    if (colour[next] == 1) {
                        auto first = std::find(walk.begin(), walk.end(), next);
                        std::vector<int> members(first, walk.end());
                        // Rotate so the lowest-index agent closes the cycle.
                        auto lowest = std::min_element(members.begin(), members.end());
                        std::rotate(members.begin(), lowest + 1, members.end());
                        TtcCycle cycle;
                        for (int i : members) {
                            int owner_of_claim = kUnmatched;
                            for (int j : members)
                                if (object_points[agent_points[j]] == i)
                                    owner_of_claim = agent_points[j];
                            cycle.objects.push_back(owner_of_claim);
                            cycle.agents.push_back(i);
                        }
                        round.cycles.push_back(std::move(cycle));
                        break;
                    }
                    if (colour[next] == 2 || agent_points[next] == kUnmatched)
                        break;
                    at = next;
                }
                for (int i : walk)
                    colour[i] = 2;
            }

            std::sort(round.cycles.begin(), round.cycles.end(), [] (const TtcCycle & a, const TtcCycle & b) {
                return *std::min_element(a.agents.begin(), a.agents.end()) < *std::min_element(b.agents.begin(), b.agents.end());
            });

            for (auto & cycle : round.cycles) {
                round.max_cycle_agents = std::max(round.max_cycle_agents, cycle.agent_count());
                if (! cycle.is_self_cycle())
                    trace.gamma = std::max(trace.gamma, cycle.agent_count());
                for (int i : cycle.agents) {
                    agent_left[i] = false;
                    --agents_left;
                    round.removed_agents.push_back(i);
                }
                for (int s : cycle.objects) {
                    object_left[s] = false;
                    round.removed_objects.push_back(s);
                }
                for (auto & p : cycle.matches()) {
                    round.matches.push_back(p);
                    assignment.push_back(p);
                }
            }
            std::sort(round.removed_agents.begin(), round.removed_agents.end());
            std::sort(round.removed_objects.begin(), round.removed_objects.end());
            std::sort(round.matches.begin(), round.matches.end());
            trace.rounds.push_back(std::move(round));
        }

        trace.final_round = static_cast<int>(trace.rounds.size());
        trace.matching = Matching(std::move(assignment));
        return trace;
    }

    namespace
    {
        auto require_priority_mechanism(const Problem & problem, const char * name) -> void
        {
            if (problem.has_owners())
                throw UnsupportedMode(std::string(name) + " is not defined for owned-object problems");
            if (! problem.has_complete_priorities())
                throw UnsupportedMode(std::string(name) + " needs a complete priority list for every object");
        }
    }

    auto run_da(const Problem & problem) -> Matching
    {
        require_priority_mechanism(problem, "deferred acceptance");

        const int n = problem.n(), m = problem.m();
        std::vector<std::size_t> next_choice(n, 0);
        std::vector<int> held_by(m, kUnmatched);
        std::deque<int> free;
        for (int i = 0 ; i < n ; ++i)
            free.push_back(i);

        while (! free.empty()) {
            int i = free.front();
            free.pop_front();
            auto prefs = problem.preferences(i);
            if (next_choice[i] >= prefs.size())
                continue;
            int s = prefs[next_choice[i]++];
            int current = held_by[s];
            if (current == kUnmatched)
                held_by[s] = i;
            else if (problem.priority_rank(s, i) < problem.priority_rank(s, current)) {
                held_by[s] = i;
                free.push_front(current);
            }
            else
                free.push_front(i);
        }

        std::vector<std::pair<int, int>> pairs;
        for (int s = 0 ; s < m ; ++s)
            if (held_by[s] != kUnmatched)
                pairs.emplace_back(held_by[s], s);
        return Matching(std::move(pairs));
    }

    auto run_ia(const Problem & problem) -> Matching
    {
        require_priority_mechanism(problem, "immediate acceptance");

        const int n = problem.n(), m = problem.m();
        std::vector<int> assigned(n, kUnmatched), filled_by(m, kUnmatched);
        std::size_t longest = 0;
        for (int i = 0 ; i < n ; ++i)
            longest = std::max(longest, problem.preferences(i).size());

        for (std::size_t round = 0 ; round < longest ; ++round) {
            std::vector<int> best(m, kUnmatched);
            for (int i = 0 ; i < n ; ++i) {
                if (assigned[i] != kUnmatched || round >= problem.preferences(i).size())
                    continue;
                int s = problem.preferences(i)[round];
                if (filled_by[s] != kUnmatched)
                    continue;
                if (best[s] == kUnmatched || problem.priority_rank(s, i) < problem.priority_rank(s, best[s]))
                    best[s] = i;
            }
            for (int s = 0 ; s < m ; ++s)
                if (best[s] != kUnmatched) {
                    filled_by[s] = best[s];
                    assigned[best[s]] = s;
                }
        }

        std::vector<std::pair<int, int>> pairs;
        for (int i = 0 ; i < n ; ++i)
            if (assigned[i] != kUnmatched)
                pairs.emplace_back(i, assigned[i]);
        return Matching(std::move(pairs));
    }

    auto audit_matching(const Problem & problem, const Matching & matching) -> StabilityAudit
    {
        check_matching(problem, matching);
        StabilityAudit audit;
        for (int i = 0 ; i < problem.n() ; ++i) {
            int own = matching.object_of(i);
            if (own != kUnmatched && ! problem.acceptable(i, own))
                audit.individually_rational = false;
            for (int s = 0 ; s < problem.m() ; ++s) {
                if (! problem.prefers(i, s, own))
                    continue;
                int j = matching.holder_of(s);
                if (j == kUnmatched)
                    audit.non_wasteful = false;
                else if (problem.priority_rank(s, i) < problem.priority_rank(s, j))
                    audit.justified_envy.push_back({ i, j, s });
            }
        }
        audit.stable = audit.individually_rational && audit.non_wasteful && audit.justified_envy.empty();
        return audit;
    }

    auto pareto_dominates(const Problem & problem, const Matching & a, const Matching & b) -> bool
    {
        bool strict = false;
        for (int i = 0 ; i < problem.n() ; ++i) {
            int x = a.object_of(i), y = b.object_of(i);
            if (problem.prefers(i, y, x))
                return false;
            if (problem.prefers(i, x, y))
                strict = true;
        }
        return strict;
    }

    auto is_pareto_efficient(const Problem & problem, const Matching & matching, std::size_t cap) -> EfficiencyVerdict
    {
        check_matching(problem, matching);
        for (auto & other : enumerate_matchings(problem, cap))
            if (pareto_dominates(problem, other, matching))
                return { false, other };
        return {};
    }

    auto trace_to_json(const Problem & problem, const TtcTrace & trace) -> Json
    {
        Json rounds = Json::array();
        for (auto & round : trace.rounds) {
            Json cycles = Json::array();
            for (auto & cycle : round.cycles) {
                Json c = Json::array();
                if (cycle.is_self_cycle())
                    c.push_back("i:" + problem.agent_name(cycle.agents.front()));
                else
                    for (std::size_t x = 0 ; x < cycle.agents.size() ; ++x) {
                        c.push_back("s:" + problem.object_name(cycle.objects[x]));
                        c.push_back("i:" + problem.agent_name(cycle.agents[x]));
                    }
                cycles.push_back(std::move(c));
            }
            Json r = Json::object();
            r["cycles"] = std::move(cycles);
            r["max_cycle_agents"] = round.max_cycle_agents;
            rounds.push_back(std::move(r));
        }
        Json doc = Json::object();
        doc["rounds"] = std::move(rounds);
        doc["final_round"] = trace.final_round;
        doc["gamma"] = trace.gamma;
        doc["matching"] = matching_to_json(problem, trace.matching);
        return doc;
    }

    auto audit_to_json(const Problem & problem, const StabilityAudit & audit) -> Json
    {
        Json doc = Json::object();
        doc["individually_rational"] = audit.individually_rational;
        doc["non_wasteful"] = audit.non_wasteful;
        Json witnesses = Json::array();
        for (auto & w : audit.justified_envy)
            witnesses.push_back(Json::array({ problem.agent_name(w.envious), problem.agent_name(w.holder), problem.object_name(w.object) }));
        doc["justified_envy"] = std::move(witnesses);
        doc["stable"] = audit.stable;
        return doc;
    }
}
