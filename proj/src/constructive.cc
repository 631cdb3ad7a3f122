#include <farsight/constructive.hh>

#include <algorithm>

namespace farsight
{
    auto bounds_from_gamma(int gamma) -> HorizonBounds
    {
        return { gamma, 3 * gamma - 1, 2 * gamma + 1 };
    }

    auto bounds_from_trace(const TtcTrace & trace) -> HorizonBounds
    {
        return bounds_from_gamma(trace.gamma);
    }

    namespace
    {
        enum class Order
        {
            by_index,
            by_arrival
        };

        class Builder
        {
        public:
            Builder(const Problem & problem, const Matching & from, const Rules & rules) :
                _problem(problem),
                _rules(rules)
            {
                check_matching(problem, from);
                _path.states.push_back(from);
                _path.rules = rules;
            }

            auto build(const TtcTrace & trace, Order order) -> ConstructedPath
            {
                for (std::size_t r = 0 ; r < trace.rounds.size() ; ++r)
                    for (std::size_t c = 0 ; c < trace.rounds[r].cycles.size() ; ++c) {
                        const auto & cycle = trace.rounds[r].cycles[c];
                        _segments.push_back({ static_cast<int>(r) + 1, static_cast<int>(c) + 1, cycle.agent_count(), 0 });
                        if (cycle.is_self_cycle())
                            release(cycle.agents.front());
                        else
                            trade(cycle, order);
                    }

                if (current() != trace.matching)
                    throw ContractViolation("constructed path does not end at the TTC matching");
                for (int s : _segment_of)
                    ++_segments[s].length;
                return { std::move(_path), std::move(_segments) };
            }

        private:
            auto current() const -> const Matching & { return _path.states.back(); }

            /// Appends a move; a state seen before cuts the path back to it.
            auto push(const Move & move) -> void
            {
                Matching next = apply_move(current(), move);
                auto seen = std::find(_path.states.begin(), _path.states.end(), next);
                if (seen != _path.states.end()) {
                    auto keep = static_cast<std::size_t>(seen - _path.states.begin());
                    _path.states.resize(keep + 1);
                    _path.steps.resize(keep);
                    _segment_of.resize(keep);
                    return;
                }
                _path.states.push_back(std::move(next));
                _path.steps.push_back(move);
                _segment_of.push_back(static_cast<int>(_segments.size()) - 1);
            }

            auto release(int agent) -> void
            {
                int held = current().object_of(agent);
                if (held == kUnmatched)
                    return;
                if (_problem.acceptable(agent, held))
                    throw ContractViolation("agent " + _problem.agent_name(agent) + " ends unmatched but holds an acceptable object");
                push(make_remove(agent, held));
            }

            auto trade(const TtcCycle & cycle, Order order) -> void
            {
                const std::size_t size = cycle.agents.size();
                std::vector<std::size_t> by_index(size);
                for (std::size_t x = 0 ; x < size ; ++x)
                    by_index[x] = x;
                std::sort(by_index.begin(), by_index.end(), [&] (auto a, auto b) { return cycle.agents[a] < cycle.agents[b]; });

                auto holds = [&] (std::size_t x, int object) { return current().object_of(cycle.agents[x]) == object; };

                if (std::all_of(by_index.begin(), by_index.end(), [&] (auto x) { return holds(x, cycle.assigned_to(x)); }))
                    return;

                std::vector<std::size_t> sequence;
                for (auto x : by_index)
                    if (holds(x, cycle.claimed_by(x)))
                        sequence.push_back(x);

                // Claims: the lowest-index agent holding neither her claim nor
                // her TTC object moves next; unseated agents rejoin the queue.
                while (true) {
                    auto next = std::find_if(by_index.begin(), by_index.end(), [&] (auto x) {
                        return ! holds(x, cycle.claimed_by(x)) && ! holds(x, cycle.assigned_to(x));
                    });
                    if (next == by_index.end())
                        break;
                    push(make_add(current(), cycle.agents[*next], cycle.claimed_by(*next)));
                    std::erase(sequence, *next);
                    sequence.push_back(*next);
                }
                if (size == 1)
                    return;
                if (order == Order::by_index)
                    sequence = by_index;

                const auto last = sequence.back();
                sequence.pop_back();
                for (auto x : sequence)
                    push(make_remove(cycle.agents[x], cycle.claimed_by(x)));
                push(make_add(current(), cycle.agents[last], cycle.assigned_to(last)));
                for (auto x : sequence)
                    push(make_add(current(), cycle.agents[x], cycle.assigned_to(x)));
            }

            const Problem & _problem;
            Rules _rules;
            ImprovingPath _path;
            std::vector<CycleSegment> _segments;
            std::vector<int> _segment_of;
        };

        auto build(const Problem & problem, const Matching & from, const Rules & rules, Order order) -> ConstructedPath
        {
            auto trace = run_ttc(problem);
            if (from == trace.matching)
                throw ContractViolation("the path must start away from the TTC matching");
            auto bounds = bounds_from_trace(trace);
            auto result = Builder(problem, from, rules).build(trace, order);
            result.path.horizon = Horizon(std::max(1, order == Order::by_index ? bounds.theorem1_bound : bounds.tight_bound));
            return result;
        }
    }

    auto build_canonical_path(const Problem & problem, const Matching & from, const Rules & rules) -> ConstructedPath
    {
        return build(problem, from, rules, Order::by_index);
    }

    auto build_tight_path(const Problem & problem, const Matching & from, const Rules & rules) -> ConstructedPath
    {
        return build(problem, from, rules, Order::by_arrival);
    }

    auto constructed_to_json(const Problem & problem, const ConstructedPath & constructed) -> Json
    {
        Json doc = Json::object();
        doc["path"] = path_to_json(problem, constructed.path);
        Json segments = Json::array();
        for (auto & s : constructed.segments) {
            Json item = Json::object();
            item["round"] = s.round;
            item["cycle"] = s.cycle;
            item["agents"] = s.agents;
            item["length"] = s.length;
            segments.push_back(std::move(item));
        }
        doc["segments"] = std::move(segments);
        return doc;
    }
}
