#include <farsight/stable_sets.hh>

#include <algorithm>
#include <deque>

namespace farsight
{
    ReachabilityRelation::ReachabilityRelation(Variant variant, std::optional<int> parameter, int size) :
        _variant(variant),
        _parameter(parameter),
        _size(size),
        _edges(static_cast<std::size_t>(size) * size, false),
        _unknown(static_cast<std::size_t>(size) * size, false)
    {
    }

    auto ReachabilityRelation::exact() const -> bool
    {
        return std::none_of(_unknown.begin(), _unknown.end(), [] (bool u) { return u; });
    }

    auto ReachabilityRelation::successors(int a) const -> std::vector<int>
    {
        std::vector<int> result;
        for (int b = 0 ; b < _size ; ++b)
            if (edge(a, b))
                result.push_back(b);
        return result;
    }

    auto ReachabilityRelation::set(int a, int b, bool edge, bool unknown) -> void
    {
        if (a == b && (edge || unknown))
            throw ContractViolation("a matching never reaches itself");
        _edges[at(a, b)] = edge;
        _unknown[at(a, b)] = unknown;
    }

    auto build_relation(const StateSpace & space, Variant variant, std::optional<int> parameter, const SearchLimits & limits,
            const std::optional<std::vector<int>> & targets) -> ReachabilityRelation
    {
        const int size = space.size();
        if (variant == Variant::phi_k || variant == Variant::phi_tilde_k) {
            variant = space.rules().mode == Mode::owned ? Variant::phi_tilde_k : Variant::phi_k;
            if (! parameter)
                variant = Variant::phi_infinity;
        }
        if ((variant == Variant::phi_hat_L || variant == Variant::phi_hat_L_closure) && ! parameter)
            throw ContractViolation("the length-bounded relations need L");

        ReachabilityRelation relation(variant, variant == Variant::phi_infinity ? std::nullopt : parameter, size);

        if (variant == Variant::phi_k || variant == Variant::phi_tilde_k) {
            Horizon horizon(*parameter);
            for (int a = 0 ; a < size ; ++a) {
                auto row = phi_k(space, a, horizon, limits, targets);
                if (targets) {
                    std::vector<bool> wanted(size, false);
                    for (int t : *targets)
                        wanted.at(t) = true;
                    for (int b = 0 ; b < size ; ++b)
                        if (b != a && ! wanted[b])
                            relation.set(a, b, false, true);
                }
                for (int b : row.members)
                    relation.set(a, b, true);
                for (int b : row.unknown)
                    relation.set(a, b, false, true);
            }
            return relation;
        }

        for (int a = 0 ; a < size ; ++a) {
            ReachabilitySet row;
            switch (variant) {
                case Variant::phi_infinity: row = phi_infinity(space, a); break;
                case Variant::phi_hat_L: row = hat_phi_L(space, a, *parameter); break;
                default: row = hat_phi_L_closure(space, a, *parameter); break;
            }
            for (int b : row.members)
                relation.set(a, b, true);
        }
        return relation;
    }

    auto check_vnm_set(const ReachabilityRelation & relation, const std::vector<int> & members) -> StableSetVerdict
    {
        const int size = relation.size();
        std::vector<bool> in(size, false);
        for (int v : members)
            in.at(v) = true;

        StableSetVerdict verdict;
        bool internal_open = false, external_open = false;

        for (int a : members)
            for (int b : members) {
                if (a == b)
                    continue;
                if (relation.edge(a, b)) {
                    if (verdict.internal_stable)
                        verdict.internal_violation = std::pair{ a, b };
                    verdict.internal_stable = false;
                }
                else if (relation.unknown(a, b))
                    internal_open = true;
            }

        for (int x = 0 ; x < size ; ++x) {
            if (in[x])
                continue;
            bool absorbed = false, open = false;
            for (int v : members) {
                absorbed = absorbed || relation.edge(x, v);
                open = open || relation.unknown(x, v);
            }
            if (absorbed)
                continue;
            if (open)
                external_open = true;
            else if (verdict.external_stable) {
                verdict.external_stable = false;
                verdict.orphan = x;
            }
        }

        if ((internal_open && verdict.internal_stable) || (external_open && verdict.external_stable))
            throw Indeterminate("the stability verdict depends on reachability entries that were not decided");
        verdict.verdict = verdict.internal_stable && verdict.external_stable;
        return verdict;
    }

    namespace
    {
        enum class Choice : std::int8_t
        {
            open,
            in,
            out
        };

        /// Kernel backtracking. A member forces its neighbours out; an outsider
        /// with no member successor and one open successor forces that one in;
        /// a vertex without successors can only be absorbed by joining.
        class KernelSearch
        {
        public:
            KernelSearch(const ReachabilityRelation & relation, std::size_t max_count) :
                _max_count(max_count),
                _succ(relation.size()),
                _nbr(relation.size())
            {
                for (int a = 0 ; a < relation.size() ; ++a)
                    for (int b = 0 ; b < relation.size() ; ++b)
                        if (relation.edge(a, b)) {
                            _succ[a].push_back(b);
                            _nbr[a].push_back(b);
                            _nbr[b].push_back(a);
                        }
            }

            auto run() -> VnmEnumeration
            {
                std::vector<Choice> state(_succ.size(), Choice::open);
                branch(state);
                std::sort(_result.sets.begin(), _result.sets.end());
                return std::move(_result);
            }

        private:
            auto propagate(std::vector<Choice> & state) const -> bool
            {
                const int size = static_cast<int>(state.size());
                for (bool changed = true ; changed ; ) {
                    changed = false;
                    for (int v = 0 ; v < size ; ++v) {
                        if (state[v] == Choice::in) {
                            for (int u : _nbr[v]) {
                                if (state[u] == Choice::in)
                                    return false;
                                if (state[u] == Choice::open) {
                                    state[u] = Choice::out;
                                    changed = true;
                                }
                            }
                        }
                        else if (state[v] == Choice::out) {
                            int open = 0, last = -1;
                            bool absorbed = false;
                            for (int u : _succ[v]) {
                                absorbed = absorbed || state[u] == Choice::in;
                                if (state[u] == Choice::open) {
                                    ++open;
                                    last = u;
                                }
                            }
                            if (absorbed)
                                continue;
                            if (open == 0)
                                return false;
                            if (open == 1) {
                                state[last] = Choice::in;
                                changed = true;
                            }
                        }
                        else if (_succ[v].empty()) {
                            state[v] = Choice::in;
                            changed = true;
                        }
                    }
                }
                return true;
            }

            auto branch(std::vector<Choice> state) -> void
            {
                if (! _result.complete || ! propagate(state))
                    return;
                auto open = std::find(state.begin(), state.end(), Choice::open);
                if (open == state.end()) {
                    if (_result.sets.size() == _max_count) {
                        _result.complete = false;
                        return;
                    }
                    std::vector<int> members;
                    for (std::size_t v = 0 ; v < state.size() ; ++v)
                        if (state[v] == Choice::in)
                            members.push_back(static_cast<int>(v));
                    _result.sets.push_back(std::move(members));
                    return;
                }
                *open = Choice::in;
                branch(state);
                *open = Choice::out;
                branch(std::move(state));
            }

            std::size_t _max_count;
            std::vector<std::vector<int>> _succ, _nbr;
            VnmEnumeration _result;
        };
    }

    auto enumerate_vnm_sets(const ReachabilityRelation & relation, std::size_t max_count) -> VnmEnumeration
    {
        if (! relation.exact())
            throw Indeterminate("stable sets cannot be enumerated over a relation with undecided entries");
        return KernelSearch(relation, max_count).run();
    }

    auto check_deterrence(const StateSpace & space, const std::vector<int> & members, int L) -> DeterrenceVerdict
    {
        if (L < 1)
            throw ContractViolation("deterrence needs L >= 1");
        const auto & problem = space.problem();
        std::vector<bool> in(space.size(), false);
        for (int v : members)
            in.at(v) = true;

        // Threat set [hat_phi_{L-2} ∩ V] ∪ [hat_phi_{L-1} \ hat_phi_{L-2}], with
        // hat_phi_{-1} and hat_phi_0 empty.
        auto threatened = [&] (int deviation, int agent, int baseline) {
            for (int t = 0 ; t < space.size() ; ++t) {
                if (t == deviation)
                    continue;
                int d = space.distances_to(t)[deviation];
                bool credible = (d <= L - 2 && in[t]) || d == L - 1;
                if (credible && space.rank(baseline, agent) <= space.rank(t, agent))
                    return true;
            }
            return false;
        };

        DeterrenceVerdict verdict;
        for (int v : members) {
            const auto & mu = space.matching(v);
            std::vector<Move> deviations;
            for (auto & [i, s] : mu.pairs())
                deviations.push_back(make_remove(i, s));
            for (int i = 0 ; i < problem.n() ; ++i)
                for (int s = 0 ; s < problem.m() ; ++s)
                    if (! mu.contains(i, s))
                        deviations.push_back(make_add(mu, i, s));

            for (auto & move : deviations) {
                int to = space.index_of(apply_move(mu, move));
                if (in[to])
                    continue;
                if (move.displaced && problem.priority_rank(move.object, move.agent) > problem.priority_rank(move.object, *move.displaced))
                    continue;
                if (threatened(to, move.agent, v))
                    continue;
                verdict.deterred = false;
                verdict.undeterred.push_back({ v, move, to });
            }
        }
        return verdict;
    }

    auto check_horizon_L_external_stability(const StateSpace & space, const std::vector<int> & members, int L) -> ExternalStabilityVerdict
    {
        std::vector<bool> in(space.size(), false);
        for (int v : members)
            in.at(v) = true;
        ExternalStabilityVerdict verdict;
        for (int x = 0 ; x < space.size() ; ++x) {
            if (in[x])
                continue;
            auto closure = hat_phi_L_closure(space, x, L);
            if (std::none_of(closure.members.begin(), closure.members.end(), [&] (int y) { return in[y]; })) {
                verdict.holds = false;
                verdict.orphan = x;
                return verdict;
            }
        }
        return verdict;
    }

    auto check_horizon_L_farsighted_set(const StateSpace & space, const std::vector<int> & members, int L) -> FarsightedSetVerdict
    {
        if (members.size() > kMinimalityGuard)
            throw CapExceeded("minimality check is limited to sets of at most " + std::to_string(kMinimalityGuard) + " matchings");

        FarsightedSetVerdict verdict;
        verdict.deterrence = check_deterrence(space, members, L);
        verdict.external = check_horizon_L_external_stability(space, members, L);

        const std::size_t full = (std::size_t{ 1 } << members.size()) - 1;
        for (std::size_t mask = 0 ; mask < full ; ++mask) {
            std::vector<int> subset;
            for (std::size_t b = 0 ; b < members.size() ; ++b)
                if (mask & (std::size_t{ 1 } << b))
                    subset.push_back(members[b]);
            if (check_horizon_L_external_stability(space, subset, L).holds && check_deterrence(space, subset, L).deterred) {
                verdict.minimal = false;
                verdict.smaller = subset;
                break;
            }
        }
        verdict.verdict = verdict.deterrence.deterred && verdict.external.holds && verdict.minimal;
        return verdict;
    }

    namespace
    {
        auto matching_json(const StateSpace & space, int x) -> Json
        {
            return matching_to_json(space.problem(), space.matching(x));
        }

        auto set_json(const StateSpace & space, const std::vector<int> & members) -> Json
        {
            Json result = Json::array();
            for (int x : members)
                result.push_back(matching_json(space, x));
            return result;
        }
    }

    auto relation_to_json(const StateSpace & space, const ReachabilityRelation & relation) -> Json
    {
        Json doc = Json::object();
        doc["variant"] = std::string(to_string(relation.variant()));
        if (relation.parameter())
            doc["parameter"] = *relation.parameter();
        else
            doc["parameter"] = nullptr;
        doc["exact"] = relation.exact();
        Json adjacency = Json::object();
        Json unknown = Json::object();
        for (int a = 0 ; a < relation.size() ; ++a) {
            auto key = describe(space.problem(), space.matching(a));
            Json row = Json::array();
            Json open = Json::array();
            for (int b = 0 ; b < relation.size() ; ++b) {
                if (relation.edge(a, b))
                    row.push_back(describe(space.problem(), space.matching(b)));
                if (relation.unknown(a, b))
                    open.push_back(describe(space.problem(), space.matching(b)));
            }
            adjacency[key] = std::move(row);
            if (! open.empty())
                unknown[key] = std::move(open);
        }
        doc["adjacency"] = std::move(adjacency);
        doc["unknown"] = std::move(unknown);
        return doc;
    }

    auto vnm_verdict_to_json(const StateSpace & space, const StableSetVerdict & verdict) -> Json
    {
        Json doc = Json::object();
        doc["internal_stable"] = verdict.internal_stable;
        if (verdict.internal_violation)
            doc["internal_violation"] = Json::array({ matching_json(space, verdict.internal_violation->first),
                    matching_json(space, verdict.internal_violation->second) });
        else
            doc["internal_violation"] = nullptr;
        doc["external_stable"] = verdict.external_stable;
        if (verdict.orphan)
            doc["orphan"] = matching_json(space, *verdict.orphan);
        else
            doc["orphan"] = nullptr;
        doc["verdict"] = verdict.verdict;
        return doc;
    }

    auto enumeration_to_json(const StateSpace & space, const VnmEnumeration & enumeration) -> Json
    {
        Json doc = Json::object();
        Json sets = Json::array();
        for (auto & set : enumeration.sets)
            sets.push_back(set_json(space, set));
        doc["sets"] = std::move(sets);
        doc["complete"] = enumeration.complete;
        return doc;
    }

    auto farsighted_verdict_to_json(const StateSpace & space, const FarsightedSetVerdict & verdict) -> Json
    {
        Json doc = Json::object();
        Json deterrence = Json::object();
        deterrence["holds"] = verdict.deterrence.deterred;
        Json undeterred = Json::array();
        for (auto & d : verdict.deterrence.undeterred) {
            Json item = Json::object();
            item["from"] = matching_json(space, d.from);
            item["move"] = move_to_json(space.problem(), d.move);
            item["to"] = matching_json(space, d.to);
            undeterred.push_back(std::move(item));
        }
        deterrence["undeterred"] = std::move(undeterred);
        doc["deterrence"] = std::move(deterrence);

        Json external = Json::object();
        external["holds"] = verdict.external.holds;
        if (verdict.external.orphan)
            external["orphan"] = matching_json(space, *verdict.external.orphan);
        else
            external["orphan"] = nullptr;
        doc["external_stability"] = std::move(external);
        doc["minimal"] = verdict.minimal;
        if (verdict.smaller)
            doc["smaller"] = set_json(space, *verdict.smaller);
        else
            doc["smaller"] = nullptr;
        doc["verdict"] = verdict.verdict;
        return doc;
    }
}
