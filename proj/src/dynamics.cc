#include <farsight/dynamics.hh>

#include <algorithm>
#include <array>
#include <deque>
#include <memory>
#include <unordered_set>

namespace farsight
{
    Horizon::Horizon(int k) :
        _k(k)
    {
        if (k < 1)
            throw ContractViolation("horizon must be at least 1, got " + std::to_string(k));
    }

    auto Horizon::infinite() -> Horizon
    {
        return Horizon{};
    }

    auto Horizon::k() const -> int
    {
        if (! _k)
            throw ContractViolation("the infinite horizon has no finite k");
        return *_k;
    }

    auto Horizon::lookahead(int l, int length) const -> int
    {
        if (! _k || *_k >= length - l)
            return length;
        return l + *_k;
    }

    auto to_string(const Horizon & horizon) -> std::string
    {
        return horizon.is_infinite() ? "infinite" : std::to_string(horizon.k());
    }

    namespace
    {
        /// Owner-consent strictness for an Add in owned mode, or nullopt when
        /// no owner condition applies (standard mode, Removes, or the mover
        /// owns the object).
        auto owner_condition(const Problem & problem, const Rules & rules, const Move & move) -> std::optional<std::pair<int, bool>>
        {
            if (rules.mode != Mode::owned || move.kind != MoveKind::add)
                return std::nullopt;
            int owner = problem.owner_of(move.object);
            if (owner == kUnmatched || owner == move.agent)
                return std::nullopt;
            bool strict = rules.consent == OwnerConsent::strict || move.displaced.has_value();
            return std::pair{ owner, strict };
        }

        auto compare(int later, int baseline, bool strict) -> bool
        {
            return strict ? later < baseline : later <= baseline;
        }
    }

    auto validate_path(const Problem & problem, const ImprovingPath & path) -> PathVerdict
    {
        PathVerdict verdict;
        auto fail = [&] (int step, std::string clause) {
            verdict.valid = false;
            verdict.violations.push_back({ step, std::move(clause) });
        };

        const int length = path.length();
        if (length < 1)
            fail(-1, "a path needs at least one step");
        if (path.states.size() != path.steps.size() + 1) {
            fail(-1, "expected one more state than steps");
            return verdict;
        }
        if (path.rules.mode == Mode::owned && ! problem.has_owners()) {
            fail(-1, "owned-mode path on a problem without owners");
            return verdict;
        }
        for (auto & state : path.states)
            check_matching(problem, state);

        for (int l = 0 ; l <= length ; ++l)
            for (int j = 0 ; j < l ; ++j)
                if (path.states[l] == path.states[j])
                    fail(l, "state " + std::to_string(l) + " repeats state " + std::to_string(j));

        for (int l = 0 ; l < length ; ++l) {
            const auto & before = path.states[l];
            const auto & move = path.steps[l];
            if (! is_legal(problem, before, move, path.rules)) {
                fail(l, "move " + describe(problem, move) + " is not legal at this state");
                continue;
            }
            try {
                if (apply_move(before, move) != path.states[l + 1])
                    fail(l, "next state does not follow from the move");
            }
            catch (const ContractViolation & e) {
                fail(l, e.what());
                continue;
            }

            const auto & ahead = path.states[path.horizon.lookahead(l, length)];
            auto rank = [&] (const Matching & m, int i) { return problem.preference_rank(i, m.object_of(i)); };
            if (! compare(rank(ahead, move.agent), rank(before, move.agent), true))
                fail(l, "mover " + problem.agent_name(move.agent) + " does not strictly gain by the lookahead state");
            if (auto owner = owner_condition(problem, path.rules, move))
                if (! compare(rank(ahead, owner->first), rank(before, owner->first), owner->second))
                    fail(l, "owner " + problem.agent_name(owner->first) + " does not consent");
        }
        return verdict;
    }

    StateSpace::StateSpace(Problem problem, Rules rules, std::size_t cap) :
        _problem(std::move(problem)),
        _rules(rules),
        _n(static_cast<std::size_t>(_problem.n())),
        _matchings(enumerate_matchings(_problem, cap))
    {
        const int size = this->size();
        for (int x = 0 ; x < size ; ++x)
            _index.emplace(_matchings[x], x);

        _rank.resize(static_cast<std::size_t>(size) * _n);
        for (int x = 0 ; x < size ; ++x)
            for (int i = 0 ; i < _problem.n() ; ++i)
                _rank[static_cast<std::size_t>(x) * _n + i] = _problem.preference_rank(i, _matchings[x].object_of(i));

        _transitions.resize(size);
        _predecessors.resize(size);
        for (int x = 0 ; x < size ; ++x)
            for (auto & move : legal_moves(_problem, _matchings[x], _rules)) {
                int y = _index.at(apply_move(_matchings[x], move));
                _predecessors[y].emplace_back(x, static_cast<int>(_transitions[x].size()));
                _transitions[x].push_back({ move, y });
            }
        _distances.resize(size);
    }

    auto StateSpace::index_of(const Matching & matching) const -> int
    {
        auto it = _index.find(matching);
        if (it == _index.end())
            throw ContractViolation("matching does not belong to this problem");
        return it->second;
    }

    auto StateSpace::move_improves(int from, const Move & move, int against) const -> bool
    {
        if (! compare(rank(against, move.agent), rank(from, move.agent), true))
            return false;
        if (auto owner = owner_condition(_problem, _rules, move))
            return compare(rank(against, owner->first), rank(from, owner->first), owner->second);
        return true;
    }

    auto StateSpace::distances_to(int target) const -> const std::vector<int> &
    {
        auto & dist = _distances.at(target);
        if (! dist.empty())
            return dist;

        dist.assign(size(), kUnreachable);
        dist[target] = 0;
        std::deque<int> queue{ target };
        while (! queue.empty()) {
            int y = queue.front();
            queue.pop_front();
            for (auto [x, t] : _predecessors[y])
                if (dist[x] == kUnreachable && move_improves(x, _transitions[x][t].move, target)) {
                    dist[x] = dist[y] + 1;
                    queue.push_back(x);
                }
        }
        return dist;
    }

    namespace
    {
        auto default_max_len(const StateSpace & space, const SearchLimits & limits) -> int
        {
            int bound = space.size() - 1;
            return limits.max_len ? std::min(*limits.max_len, bound) : bound;
        }

        auto make_path(const StateSpace & space, const std::vector<int> & states, const std::vector<const Transition *> & moves,
                const Horizon & horizon) -> ImprovingPath
        {
            ImprovingPath path;
            for (int x : states)
                path.states.push_back(space.matching(x));
            for (auto * t : moves)
                path.steps.push_back(t->move);
            path.horizon = horizon;
            path.rules = space.rules();
            return path;
        }

        /// Walks the shortest farsighted path using the distance table.
        auto farsighted_path(const StateSpace & space, int from, int to) -> std::pair<std::vector<int>, std::vector<const Transition *>>
        {
            const auto & dist = space.distances_to(to);
            std::vector<int> states{ from };
            std::vector<const Transition *> moves;
            int at = from;
            while (at != to) {
                for (auto & t : space.transitions(at))
                    if (dist[t.to] == dist[at] - 1 && space.move_improves(at, t.move, to)) {
                        moves.push_back(&t);
                        at = t.to;
                        states.push_back(at);
                        break;
                    }
            }
            return { states, moves };
        }

        /// With k = 1 every move is judged against the very next state, so
        /// the relation is plain reachability and a shortest path suffices.
        auto myopic_path(const StateSpace & space, int from, int to, int max_len)
            -> std::optional<std::pair<std::vector<int>, std::vector<const Transition *>>>
        {
            std::vector<const Transition *> via(space.size(), nullptr);
            std::vector<int> parent(space.size(), -1), depth(space.size(), -1);
            std::deque<int> queue{ from };
            depth[from] = 0;
            while (! queue.empty() && depth[to] < 0) {
                int x = queue.front();
                queue.pop_front();
                if (depth[x] == max_len)
                    continue;
                for (auto & t : space.transitions(x))
                    if (depth[t.to] < 0 && space.move_improves(x, t.move, t.to)) {
                        depth[t.to] = depth[x] + 1;
                        parent[t.to] = x;
                        via[t.to] = &t;
                        queue.push_back(t.to);
                    }
            }
            if (depth[to] < 0)
                return std::nullopt;
            std::vector<int> states;
            std::vector<const Transition *> moves;
            for (int at = to ; at != from ; at = parent[at]) {
                states.push_back(at);
                moves.push_back(via[at]);
            }
            states.push_back(from);
            std::reverse(states.begin(), states.end());
            std::reverse(moves.begin(), moves.end());
            return std::pair{ std::move(states), std::move(moves) };
        }

        struct Obligation
        {
            int agent = 0;
            int baseline = 0;
            bool strict = true;
        };

        /// Depth-first horizon-k search towards a single target. Each step
        /// leaves up to two pending obligations (mover, and owner in owned
        /// mode) that are settled against the state k steps later, or against
        /// the target if the path ends first.
        class Search
        {
        public:
            Search(const StateSpace & space, int target, int k, int max_len, std::uint64_t budget) :
                _space(space),
                _target(target),
                _k(k),
                _max_len(max_len),
                _budget(budget),
                _dist(space.distances_to(target)),
                _visited(space.size(), false)
            {
            }

            auto run(int from) -> SearchStatus
            {
                _states.push_back(from);
                _visited[from] = true;
                bool found = extend(from);
                if (found)
                    return SearchStatus::found;
                return _exhausted ? SearchStatus::budget_exhausted : SearchStatus::not_found;
            }

            std::vector<int> _states;
            std::vector<const Transition *> _moves;
            std::uint64_t _nodes = 0;

        private:
            auto holds(const Obligation & o, int state) const -> bool
            {
                return compare(_space.rank(state, o.agent), o.baseline, o.strict);
            }

            auto extend(int x) -> bool
            {
                const int len = static_cast<int>(_moves.size());
                if (len == _max_len)
                    return false;
                const int p = len + 1;
                const bool final_window = p + _k >= _max_len;

                for (auto & t : _space.transitions(x)) {
                    const int y = t.to;
                    if (_visited[y])
                        continue;
                    if (++_nodes > _budget) {
                        _exhausted = true;
                        return false;
                    }
                    if (final_window && (_dist[y] == kUnreachable || _dist[y] > _max_len - p))
                        continue;

                    std::array<Obligation, 2> fresh{};
                    int count = 0;
                    fresh[count++] = { t.move.agent, _space.rank(x, t.move.agent), true };
                    if (auto owner = owner_condition(_space.problem(), _space.rules(), t.move))
                        fresh[count++] = { owner->first, _space.rank(x, owner->first), owner->second };

                    bool viable = true;
                    for (int c = 0 ; c < count && viable ; ++c) {
                        // Nothing beats a top choice; a failure against the target
                        // means the path must outlive this obligation's window.
                        if (fresh[c].strict && fresh[c].baseline == 0)
                            viable = false;
                        else if (! holds(fresh[c], _target) && len + _k + 1 > _max_len)
                            viable = false;
                    }
                    if (! viable)
                        continue;

                    _pending.push_back({ fresh, count });
                    _moves.push_back(&t);
                    _states.push_back(y);

                    bool ok = true;
                    if (int settle = p - _k ; settle >= 0) {
                        auto & [obs, n] = _pending[settle];
                        for (int c = 0 ; c < n && ok ; ++c)
                            ok = holds(obs[c], y);
                    }

                    if (ok && y == _target) {
                        for (int l = std::max(0, p - _k + 1) ; l < p && ok ; ++l) {
                            auto & [obs, n] = _pending[l];
                            for (int c = 0 ; c < n && ok ; ++c)
                                ok = holds(obs[c], y);
                        }
                        if (ok)
                            return true;
                    }
                    else if (ok) {
                        _visited[y] = true;
                        if (extend(y))
                            return true;
                        _visited[y] = false;
                    }

                    _states.pop_back();
                    _moves.pop_back();
                    _pending.pop_back();
                    if (_exhausted)
                        return false;
                }
                return false;
            }

            const StateSpace & _space;
            int _target;
            int _k;
            int _max_len;
            std::uint64_t _budget;
            const std::vector<int> & _dist;
            std::vector<bool> _visited;
            std::vector<std::pair<std::array<Obligation, 2>, int>> _pending;
            bool _exhausted = false;
        };
    }

    namespace detail
    {
        /// The horizon-k conditions without the distinct-states requirement,
        /// as a graph over (matching, obligations left by the last k - 1
        /// moves). Every improving path is a walk in it, so a target it cannot
        /// reach is out of reach, and the exact search only enters states that
        /// can still get there.
        class WindowGraph
        {
        public:
            WindowGraph(const StateSpace & space, int k, std::size_t cap) :
                _space(space),
                _k(k),
                _slots(static_cast<std::size_t>(k) - 1),
                _words((static_cast<std::size_t>(space.size()) + 63) / 64),
                _ids(64, Hash{ this }, Equal{ this })
            {
                if (space.problem().n() > 62 || space.problem().m() > 61)
                    return;
                // State x is matching x with nothing pending.
                _scratch.assign(_slots, 0);
                for (int x = 0 ; x < space.size() ; ++x)
                    intern(x);
                for (std::size_t s = 0 ; s < _matching.size() ; ++s) {
                    if (_matching.size() > cap)
                        return;
                    _edge_start.push_back(_edge_to.size());
                    expand(s);
                }
                _edge_start.push_back(_edge_to.size());
                condense();
                _complete = true;
            }

            [[nodiscard]] auto k() const -> int { return _k; }
            [[nodiscard]] auto space() const -> const StateSpace & { return _space; }
            [[nodiscard]] auto complete() const -> bool { return _complete; }

            /// Depth-first search over real paths, trying successors closest
            /// to the target first. A state that fails records which visited
            /// matchings blocked it; meeting the state again with all of those
            /// still visited fails the same way. That bookkeeping assumes no
            /// length cap below |𝓜| - 1, which distinctness already implies.
            auto search(int source, int target, int max_len, std::uint64_t budget, SearchOutcome & outcome) const -> void
            {
                const auto start = static_cast<std::size_t>(source);
                if (! live(start, target))
                    return;

                const bool learn = max_len >= _space.size() - 1;
                const std::size_t words = _words;
                const auto & dist = _space.distances_to(target);
                auto bit = [] (int y) { return std::uint64_t{ 1 } << (y % 64); };

                std::vector<std::uint64_t> visited(words, 0);
                visited[source / 64] |= bit(source);
                std::unordered_map<std::size_t, std::vector<std::vector<std::uint64_t>>> failed;

                struct Frame
                {
                    std::size_t state, via;
                    std::vector<std::size_t> order;
                    std::size_t next = 0;
                };
                auto frame_for = [&] (std::size_t state, std::size_t via) {
                    Frame frame{ state, via, {} };
                    for (auto e = _edge_start[state] ; e < _edge_start[state + 1] ; ++e)
                        frame.order.push_back(e);
                    auto key = [&] (std::size_t e) {
                        auto to = _edge_to[e];
                        if (_matching[to] == target)
                            return accepting(to) ? -1 : kUnreachable;
                        return dist[_matching[to]];
                    };
                    std::stable_sort(frame.order.begin(), frame.order.end(), [&] (auto a, auto b) { return key(a) < key(b); });
                    return frame;
                };
                std::vector<Frame> stack;
                stack.push_back(frame_for(start, 0));
                // Frame f owns blocked[f * words, (f + 1) * words): visited
                // matchings that cut off part of its subtree.
                std::vector<std::uint64_t> blocked(words, 0);

                auto blocks = [&] (const std::vector<std::uint64_t> & nogood, int y) {
                    for (std::size_t w = 0 ; w < words ; ++w) {
                        auto have = visited[w] | (static_cast<std::size_t>(y / 64) == w ? bit(y) : 0);
                        if (nogood[w] & ~have)
                            return false;
                    }
                    return true;
                };

                std::vector<bool> alive;
                auto usable = [&] (std::size_t state) { return alive.empty() ? live(state, target) : alive[state]; };

                while (! stack.empty()) {
                    if (alive.empty() && outcome.nodes >= kRefineAfter) {
                        alive = refined_live(source, target);
                        if (! alive[start])
                            return;
                    }
                    const std::size_t f = stack.size() - 1;
                    if (stack[f].next == stack[f].order.size()) {
                        const std::size_t state = stack[f].state;
                        const int x = _matching[state];
                        visited[x / 64] &= ~bit(x);
                        std::vector<std::uint64_t> nogood(blocked.begin() + f * words, blocked.end());
                        blocked.resize(f * words);
                        if (learn) {
                            auto & list = failed[state];
                            if (list.size() == kNogoodsPerState)
                                list.erase(list.begin());
                            list.push_back(nogood);
                            nogood[x / 64] &= ~bit(x);
                            if (f > 0)
                                for (std::size_t w = 0 ; w < words ; ++w)
                                    blocked[(f - 1) * words + w] |= nogood[w];
                        }
                        stack.pop_back();
                        continue;
                    }

                    const std::size_t e = stack[f].order[stack[f].next++];
                    const std::size_t to = _edge_to[e];
                    const int y = _matching[to];
                    if (! usable(to))
                        continue;
                    if (visited[y / 64] & bit(y)) {
                        blocked[f * words + y / 64] |= bit(y);
                        continue;
                    }
                    if (y == target && ! accepting(to))
                        continue;
                    if (learn)
                        if (auto it = failed.find(to) ; it != failed.end()) {
                            auto hit = std::find_if(it->second.begin(), it->second.end(), [&] (auto & nogood) { return blocks(nogood, y); });
                            if (hit != it->second.end()) {
                                for (std::size_t w = 0 ; w < words ; ++w)
                                    blocked[f * words + w] |= (*hit)[w];
                                blocked[f * words + y / 64] &= ~bit(y);
                                continue;
                            }
                        }
                    if (++outcome.nodes > budget) {
                        outcome.status = SearchStatus::budget_exhausted;
                        return;
                    }
                    if (y == target) {
                        std::vector<int> states;
                        std::vector<const Transition *> moves;
                        for (std::size_t g = 0 ; g < stack.size() ; ++g) {
                            states.push_back(_matching[stack[g].state]);
                            if (g > 0)
                                moves.push_back(_edge_move[stack[g].via]);
                        }
                        states.push_back(y);
                        moves.push_back(_edge_move[e]);
                        outcome.status = SearchStatus::found;
                        outcome.path = make_path(_space, states, moves, Horizon(_k));
                        return;
                    }
                    if (static_cast<int>(stack.size()) >= max_len)
                        continue;
                    visited[y / 64] |= bit(y);
                    blocked.resize(blocked.size() + words, 0);
                    stack.push_back(frame_for(to, e));
                }
            }

        private:
            struct Hash
            {
                const WindowGraph * graph;
                auto operator()(std::size_t s) const -> std::size_t
                {
                    std::size_t h = static_cast<std::size_t>(graph->_matching[s]) * 0x9e3779b97f4a7c15ULL;
                    for (std::size_t j = 0 ; j < graph->_slots ; ++j)
                        h = (h ^ graph->_windows[s * graph->_slots + j]) * 0x100000001b3ULL;
                    return h;
                }
            };

            struct Equal
            {
                const WindowGraph * graph;
                auto operator()(std::size_t a, std::size_t b) const -> bool
                {
                    return graph->_matching[a] == graph->_matching[b] && std::equal(
                            graph->_windows.begin() + a * graph->_slots, graph->_windows.begin() + (a + 1) * graph->_slots,
                            graph->_windows.begin() + b * graph->_slots);
                }
            };

            static constexpr std::uint32_t kPresent = 1u << 31;
            static constexpr std::size_t kNogoodsPerState = 4;
            static constexpr std::uint64_t kRefineAfter = 2'000;

            /// Liveness for one pair, where neither the source nor the target
            /// may appear mid-path.
            auto refined_live(int source, int target) const -> std::vector<bool>
            {
                if (_reverse_start.empty()) {
                    const std::size_t size = _matching.size();
                    _reverse_start.assign(size + 1, 0);
                    for (auto to : _edge_to)
                        ++_reverse_start[to + 1];
                    for (std::size_t s = 0 ; s < size ; ++s)
                        _reverse_start[s + 1] += _reverse_start[s];
                    _reverse_from.resize(_edge_to.size());
                    auto fill = _reverse_start;
                    for (std::size_t s = 0 ; s < size ; ++s)
                        for (auto e = _edge_start[s] ; e < _edge_start[s + 1] ; ++e)
                            _reverse_from[fill[_edge_to[e]]++] = s;
                }

                std::vector<bool> alive(_matching.size(), false);
                std::deque<std::size_t> queue;
                for (std::size_t s = _space.size() ; s < _matching.size() ; ++s)
                    if (_matching[s] == target && accepting(s)) {
                        alive[s] = true;
                        queue.push_back(s);
                    }
                const auto start = static_cast<std::size_t>(source);
                while (! queue.empty()) {
                    auto s = queue.front();
                    queue.pop_front();
                    for (auto r = _reverse_start[s] ; r < _reverse_start[s + 1] ; ++r) {
                        auto p = _reverse_from[r];
                        if (alive[p] || _matching[p] == target || (_matching[p] == source && p != start))
                            continue;
                        alive[p] = true;
                        queue.push_back(p);
                    }
                }
                return alive;
            }

            /// 0 when no later state can satisfy the obligation.
            auto encode(int x, const Move & move) const -> std::uint32_t
            {
                auto base = static_cast<std::uint32_t>(_space.rank(x, move.agent));
                if (base == 0)
                    return 0;
                std::uint32_t code = kPresent | static_cast<std::uint32_t>(move.agent) | base << 6;
                if (auto owner = owner_condition(_space.problem(), _space.rules(), move)) {
                    auto owner_base = static_cast<std::uint32_t>(_space.rank(x, owner->first));
                    if (owner->second && owner_base == 0)
                        return 0;
                    code |= static_cast<std::uint32_t>(owner->first + 1) << 12 | owner_base << 18 | static_cast<std::uint32_t>(owner->second) << 24;
                }
                return code;
            }

            auto holds(std::uint32_t code, int y) const -> bool
            {
                if (! code)
                    return true;
                int agent = static_cast<int>(code & 63), base = static_cast<int>(code >> 6 & 63);
                if (_space.rank(y, agent) >= base)
                    return false;
                int owner = static_cast<int>(code >> 12 & 63) - 1;
                return owner < 0 || compare(_space.rank(y, owner), static_cast<int>(code >> 18 & 63), code >> 24 & 1);
            }

            auto accepting(std::size_t s) const -> bool
            {
                if (s < static_cast<std::size_t>(_space.size()))
                    return false;
                for (std::size_t j = 0 ; j < _slots ; ++j)
                    if (! holds(_windows[s * _slots + j], _matching[s]))
                        return false;
                return true;
            }

            auto live(std::size_t s, int target) const -> bool
            {
                return _reach[static_cast<std::size_t>(_comp[s]) * _words + static_cast<std::size_t>(target) / 64] >> (target % 64) & 1;
            }

            /// Looks up (y, _scratch), adding it if new.
            auto intern(int y) -> std::size_t
            {
                const std::size_t id = _matching.size();
                _matching.push_back(y);
                _windows.insert(_windows.end(), _scratch.begin(), _scratch.end());
                auto [it, inserted] = _ids.insert(id);
                if (! inserted) {
                    _matching.pop_back();
                    _windows.resize(_windows.size() - _slots);
                }
                return *it;
            }

            auto expand(std::size_t s) -> void
            {
                const int x = _matching[s];
                std::vector<std::uint32_t> window(_windows.begin() + s * _slots, _windows.begin() + (s + 1) * _slots);
                for (auto & t : _space.transitions(x)) {
                    auto code = encode(x, t.move);
                    if (! code || ! holds(window.back(), t.to))
                        continue;
                    _scratch[0] = code;
                    std::copy(window.begin(), window.end() - 1, _scratch.begin() + 1);
                    _edge_to.push_back(intern(t.to));
                    _edge_move.push_back(&t);
                }
            }

            /// Tarjan's algorithm; each component's reach set is complete by
            /// the time it is emitted, since its successors come out first.
            auto condense() -> void
            {
                const std::size_t size = _matching.size();
                constexpr int kNone = -1;
                std::vector<int> index(size, kNone), low(size, 0);
                std::vector<bool> on_stack(size, false);
                std::vector<std::size_t> members;
                std::vector<std::pair<std::size_t, std::size_t>> calls;
                _comp.assign(size, kNone);
                int counter = 0, components = 0;

                for (std::size_t root = 0 ; root < size ; ++root) {
                    if (index[root] != kNone)
                        continue;
                    calls.emplace_back(root, _edge_start[root]);
                    index[root] = low[root] = counter++;
                    members.push_back(root);
                    on_stack[root] = true;

                    while (! calls.empty()) {
                        auto & [s, e] = calls.back();
                        if (e < _edge_start[s + 1]) {
                            std::size_t to = _edge_to[e++];
                            if (index[to] == kNone) {
                                index[to] = low[to] = counter++;
                                members.push_back(to);
                                on_stack[to] = true;
                                calls.emplace_back(to, _edge_start[to]);
                            }
                            else if (on_stack[to])
                                low[s] = std::min(low[s], index[to]);
                            continue;
                        }

                        const std::size_t done = s;
                        calls.pop_back();
                        if (! calls.empty())
                            low[calls.back().first] = std::min(low[calls.back().first], low[done]);
                        if (low[done] != index[done])
                            continue;

                        const int c = components++;
                        auto first = std::find(members.rbegin(), members.rend(), done).base() - 1;
                        for (auto it = first ; it != members.end() ; ++it) {
                            _comp[*it] = c;
                            on_stack[*it] = false;
                        }
                        _reach.resize(_reach.size() + _words, 0);
                        auto * bits = &_reach[static_cast<std::size_t>(c) * _words];
                        for (auto it = first ; it != members.end() ; ++it) {
                            if (accepting(*it))
                                bits[_matching[*it] / 64] |= std::uint64_t{ 1 } << (_matching[*it] % 64);
                            for (auto e2 = _edge_start[*it] ; e2 < _edge_start[*it + 1] ; ++e2)
                                if (int d = _comp[_edge_to[e2]] ; d != c)
                                    for (std::size_t w = 0 ; w < _words ; ++w)
                                        bits[w] |= _reach[static_cast<std::size_t>(d) * _words + w];
                        }
                        members.erase(first, members.end());
                    }
                }
            }

            const StateSpace & _space;
            int _k;
            std::size_t _slots;
            std::size_t _words;
            bool _complete = false;
            std::vector<int> _matching;
            std::vector<std::uint32_t> _windows;
            std::vector<std::uint32_t> _scratch;
            std::unordered_set<std::size_t, Hash, Equal> _ids;
            std::vector<std::size_t> _edge_start;
            std::vector<std::size_t> _edge_to;
            std::vector<const Transition *> _edge_move;
            std::vector<int> _comp;
            std::vector<std::uint64_t> _reach;
            mutable std::vector<std::size_t> _reverse_start;
            mutable std::vector<std::size_t> _reverse_from;
        };
    }

    auto StateSpace::window_graph(int k, std::size_t cap) const -> const detail::WindowGraph &
    {
        if (! _window || &_window->space() != this || _window->k() != k || _window_cap != cap) {
            _window.reset();
            _window = std::make_shared<const detail::WindowGraph>(*this, k, cap);
            _window_cap = cap;
        }
        return *_window;
    }

    auto find_horizon_k_paths(const StateSpace & space, int from, const std::vector<int> & targets, const Horizon & horizon,
            const SearchLimits & limits) -> std::vector<SearchOutcome>
    {
        for (int to : targets) {
            if (to == from)
                throw ContractViolation("an improving path must end at a different matching");
            static_cast<void>(space.matching(to));
        }
        const int max_len = default_max_len(space, limits);
        std::vector<SearchOutcome> outcomes(targets.size());
        if (targets.empty())
            return outcomes;

        // Once every lookahead reaches past max_len the path is judged against
        // its endpoint throughout, which is exactly the farsighted relation.
        if (horizon.is_infinite() || horizon.k() >= max_len) {
            for (std::size_t x = 0 ; x < targets.size() ; ++x) {
                int d = space.distances_to(targets[x])[from];
                if (d != kUnreachable && d <= max_len) {
                    auto [states, moves] = farsighted_path(space, from, targets[x]);
                    outcomes[x].status = SearchStatus::found;
                    outcomes[x].path = make_path(space, states, moves, horizon);
                }
            }
            return outcomes;
        }

        if (horizon.k() == 1) {
            for (std::size_t x = 0 ; x < targets.size() ; ++x)
                if (auto found = myopic_path(space, from, targets[x], max_len)) {
                    outcomes[x].status = SearchStatus::found;
                    outcomes[x].path = make_path(space, found->first, found->second, horizon);
                }
            return outcomes;
        }

        const auto & graph = space.window_graph(horizon.k(), limits.window_states);
        for (std::size_t x = 0 ; x < targets.size() ; ++x) {
            if (graph.complete()) {
                graph.search(from, targets[x], max_len, limits.node_budget, outcomes[x]);
                continue;
            }
            Search search(space, targets[x], horizon.k(), max_len, limits.node_budget);
            outcomes[x].status = search.run(from);
            outcomes[x].nodes = search._nodes;
            if (outcomes[x].status == SearchStatus::found)
                outcomes[x].path = make_path(space, search._states, search._moves, horizon);
        }
        return outcomes;
    }

    auto find_horizon_k_path(const StateSpace & space, int from, int to, const Horizon & horizon, const SearchLimits & limits) -> SearchOutcome
    {
        return std::move(find_horizon_k_paths(space, from, { to }, horizon, limits).front());
    }

    auto find_horizon_k_path(const StateSpace & space, const Matching & from, const Matching & to, const Horizon & horizon,
            const SearchLimits & limits) -> SearchOutcome
    {
        return find_horizon_k_path(space, space.index_of(from), space.index_of(to), horizon, limits);
    }

    auto to_string(Variant variant) -> std::string_view
    {
        switch (variant) {
            case Variant::phi_k: return "phi_k";
            case Variant::phi_tilde_k: return "phi_tilde_k";
            case Variant::phi_hat_L: return "phi_hat_L";
            case Variant::phi_hat_L_closure: return "phi_hat_L_closure";
            case Variant::phi_infinity: return "phi_infinity";
        }
        return "?";
    }

    auto ReachabilitySet::contains(int x) const -> bool
    {
        return std::binary_search(members.begin(), members.end(), x);
    }

    auto phi_k(const StateSpace & space, int source, const Horizon & horizon, const SearchLimits & limits,
            const std::optional<std::vector<int>> & targets) -> ReachabilitySet
    {
        ReachabilitySet result;
        result.source = source;
        result.variant = space.rules().mode == Mode::owned ? Variant::phi_tilde_k : Variant::phi_k;
        if (! horizon.is_infinite())
            result.parameter = horizon.k();

        std::vector<int> wanted;
        if (targets) {
            for (int t : *targets)
                if (t != source)
                    wanted.push_back(t);
            std::sort(wanted.begin(), wanted.end());
            wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
        }
        else
            for (int t = 0 ; t < space.size() ; ++t)
                if (t != source)
                    wanted.push_back(t);

        auto outcomes = find_horizon_k_paths(space, source, wanted, horizon, limits);
        for (std::size_t x = 0 ; x < wanted.size() ; ++x)
            switch (outcomes[x].status) {
                case SearchStatus::found: result.members.push_back(wanted[x]); break;
                case SearchStatus::budget_exhausted: result.unknown.push_back(wanted[x]); break;
                case SearchStatus::not_found: break;
            }
        return result;
    }

    auto phi_infinity(const StateSpace & space, int source) -> ReachabilitySet
    {
        ReachabilitySet result;
        result.source = source;
        result.variant = Variant::phi_infinity;
        for (int t = 0 ; t < space.size() ; ++t)
            if (t != source && space.distances_to(t)[source] != kUnreachable)
                result.members.push_back(t);
        return result;
    }

    auto hat_phi_L(const StateSpace & space, int source, int L) -> ReachabilitySet
    {
        ReachabilitySet result;
        result.source = source;
        result.variant = Variant::phi_hat_L;
        result.parameter = L;
        for (int t = 0 ; t < space.size() ; ++t)
            if (t != source && space.distances_to(t)[source] <= L)
                result.members.push_back(t);
        return result;
    }

    auto hat_phi_L_closure(const StateSpace & space, int source, int L) -> ReachabilitySet
    {
        ReachabilitySet result;
        result.source = source;
        result.variant = Variant::phi_hat_L_closure;
        result.parameter = L;

        std::vector<bool> seen(space.size(), false);
        std::deque<int> queue{ source };
        seen[source] = true;
        while (! queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            for (int t : hat_phi_L(space, x, L).members) {
                if (t != source && ! seen[t])
                    result.members.push_back(t);
                if (! seen[t]) {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        std::sort(result.members.begin(), result.members.end());
        return result;
    }

    auto saturation_k(const StateSpace & space, const SearchLimits & limits, std::optional<int> sweep_limit) -> Saturation
    {
        Saturation result;
        result.analytic = std::max(1, space.size() - 1);
        const int last = sweep_limit ? std::min(*sweep_limit, result.analytic) : result.analytic;
        for (int k = 1 ; k <= last ; ++k) {
            bool equal = true;
            for (int x = 0 ; x < space.size() && equal ; ++x) {
                auto finite = phi_k(space, x, Horizon(k), limits);
                if (! finite.exact())
                    return result;
                equal = finite.members == phi_infinity(space, x).members;
            }
            if (equal) {
                result.empirical = k;
                break;
            }
        }
        return result;
    }

    auto path_to_json(const Problem & problem, const ImprovingPath & path) -> Json
    {
        Json doc = Json::object();
        if (path.horizon.is_infinite())
            doc["horizon"] = "infinite";
        else
            doc["horizon"] = path.horizon.k();
        doc["mode"] = std::string(to_string(path.rules.mode));
        Json states = Json::array();
        for (auto & state : path.states)
            states.push_back(matching_to_json(problem, state));
        doc["states"] = std::move(states);
        Json moves = Json::array();
        for (auto & move : path.steps)
            moves.push_back(move_to_json(problem, move));
        doc["moves"] = std::move(moves);
        return doc;
    }

    auto path_from_json(const Problem & problem, const Json & doc) -> ImprovingPath
    {
        if (! doc.is_object())
            throw ParseError("", "path must be a JSON object");
        ImprovingPath path;
        if (! doc.contains("states") || ! doc.at("states").is_array())
            throw ParseError("/states", "expected an array of matchings");
        if (! doc.contains("moves") || ! doc.at("moves").is_array())
            throw ParseError("/moves", "expected an array of moves");

        const auto & states = doc.at("states");
        for (std::size_t l = 0 ; l < states.size() ; ++l)
            path.states.push_back(matching_from_json(problem, states[l], "/states/" + std::to_string(l)));
        const auto & moves = doc.at("moves");
        for (std::size_t l = 0 ; l < moves.size() ; ++l)
            path.steps.push_back(move_from_json(problem, moves[l], "/moves/" + std::to_string(l)));

        if (doc.contains("horizon")) {
            const auto & h = doc.at("horizon");
            if (h.is_string() && h.get<std::string>() == "infinite")
                path.horizon = Horizon::infinite();
            else if (h.is_number_integer() && h.get<int>() >= 1)
                path.horizon = Horizon(h.get<int>());
            else
                throw ParseError("/horizon", "expected a positive integer or \"infinite\"");
        }
        if (doc.contains("mode")) {
            if (! doc.at("mode").is_string())
                throw ParseError("/mode", "expected standard or owned");
            try {
                path.rules.mode = parse_mode(doc.at("mode").get<std::string>());
            }
            catch (const Error & e) {
                throw ParseError("/mode", e.what());
            }
        }
        return path;
    }

    auto verdict_to_json(const PathVerdict & verdict) -> Json
    {
        Json doc = Json::object();
        doc["valid"] = verdict.valid;
        Json violations = Json::array();
        for (auto & v : verdict.violations) {
            Json item = Json::object();
            item["step"] = v.step;
            item["clause"] = v.clause;
            violations.push_back(std::move(item));
        }
        doc["violations"] = std::move(violations);
        return doc;
    }

    auto reachability_to_json(const StateSpace & space, const ReachabilitySet & set) -> Json
    {
        const auto & problem = space.problem();
        Json doc = Json::object();
        doc["source"] = matching_to_json(problem, space.matching(set.source));
        doc["variant"] = std::string(to_string(set.variant));
        if (set.parameter)
            doc["parameter"] = *set.parameter;
        else
            doc["parameter"] = nullptr;
        Json members = Json::array();
        for (int x : set.members)
            members.push_back(matching_to_json(problem, space.matching(x)));
        doc["members"] = std::move(members);
        Json unknown = Json::array();
        for (int x : set.unknown)
            unknown.push_back(matching_to_json(problem, space.matching(x)));
        doc["unknown"] = std::move(unknown);
        doc["exact"] = set.exact();
        return doc;
    }
}
