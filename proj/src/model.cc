#include <farsight/json.hh>
#include <farsight/model.hh>

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace farsight
{
    ParseError::ParseError(std::string location, const std::string & message) :
        Error(location.empty() ? message : location + ": " + message),
        _location(std::move(location))
    {
    }

    auto to_string(Mode mode) -> std::string_view
    {
        return mode == Mode::owned ? "owned" : "standard";
    }

    auto parse_mode(std::string_view text) -> Mode
    {
        if (text == "standard")
            return Mode::standard;
        if (text == "owned")
            return Mode::owned;
        throw Error("unknown mode '" + std::string(text) + "' (expected standard or owned)");
    }

    Problem::Problem(std::vector<std::string> agents, std::vector<std::string> objects,
            std::vector<std::vector<int>> preferences, std::vector<std::vector<int>> priorities,
            std::optional<std::vector<int>> owners) :
        _agents(std::move(agents)),
        _objects(std::move(objects)),
        _preferences(std::move(preferences)),
        _priorities(std::move(priorities)),
        _owners(std::move(owners))
    {
        std::unordered_set<std::string> seen;
        for (auto & a : _agents)
            if (! seen.insert(a).second)
                throw ParseError("/agents", "duplicate agent '" + a + "'");
        for (auto & s : _objects)
            if (! seen.insert(s).second)
                throw ParseError("/objects", "identifier '" + s + "' is not unique across agents and objects");

        const int n = this->n(), m = this->m();
        _preferences.resize(n);
        _priorities.resize(m);

        for (int i = 0 ; i < n ; ++i) {
            std::vector<bool> used(m, false);
            for (std::size_t pos = 0 ; pos < _preferences[i].size() ; ++pos) {
                int s = _preferences[i][pos];
                auto where = "/preferences/" + _agents[i] + "/" + std::to_string(pos);
                if (s < 0 || s >= m)
                    throw ParseError(where, "unknown object");
                if (used[s])
                    throw ParseError(where, "duplicate entry '" + _objects[s] + "' in preferences of '" + _agents[i] + "'");
                used[s] = true;
            }
        }

        if (_owners) {
            if (static_cast<int>(_owners->size()) != m || n != m)
                throw ParseError("/owners", "owned mode needs exactly one owned object per agent");
            std::vector<bool> owns(n, false);
            for (int s = 0 ; s < m ; ++s) {
                int o = (*_owners)[s];
                if (o < 0 || o >= n)
                    throw ParseError("/owners/" + _objects[s], "unknown or missing owner");
                if (owns[o])
                    throw ParseError("/owners/" + _objects[s], "agent '" + _agents[o] + "' owns more than one object");
                owns[o] = true;
            }
            for (int s = 0 ; s < m ; ++s) {
                int o = (*_owners)[s];
                if (_priorities[s].empty())
                    _priorities[s] = { o };
                else if (_priorities[s] != std::vector<int>{ o })
                    throw ParseError("/priorities/" + _objects[s], "in owned mode a priority list may rank only the owner");
            }
        }

        for (int s = 0 ; s < m ; ++s) {
            std::vector<bool> used(n, false);
            for (std::size_t pos = 0 ; pos < _priorities[s].size() ; ++pos) {
                int i = _priorities[s][pos];
                auto where = "/priorities/" + _objects[s] + "/" + std::to_string(pos);
                if (i < 0 || i >= n)
                    throw ParseError(where, "unknown agent");
                if (used[i])
                    throw ParseError(where, "duplicate entry '" + _agents[i] + "' in priorities of '" + _objects[s] + "'");
                used[i] = true;
            }
        }

        _pref_rank.assign(static_cast<std::size_t>(n) * (m + 1), 0);
        for (int i = 0 ; i < n ; ++i) {
            int len = static_cast<int>(_preferences[i].size());
            auto row = _pref_rank.begin() + static_cast<std::ptrdiff_t>(i) * (m + 1);
            std::fill(row, row + m + 1, len + 1);
            row[0] = len;
            for (int pos = 0 ; pos < len ; ++pos)
                row[_preferences[i][pos] + 1] = pos;
        }

        _prio_rank.assign(static_cast<std::size_t>(m) * n, kUnranked);
        for (int s = 0 ; s < m ; ++s)
            for (std::size_t pos = 0 ; pos < _priorities[s].size() ; ++pos)
                _prio_rank[static_cast<std::size_t>(s) * n + _priorities[s][pos]] = static_cast<int>(pos) + 1;
    }

    auto Problem::find_agent(std::string_view name) const -> std::optional<int>
    {
        auto it = std::find(_agents.begin(), _agents.end(), name);
        if (it == _agents.end())
            return std::nullopt;
        return static_cast<int>(it - _agents.begin());
    }

    auto Problem::find_object(std::string_view name) const -> std::optional<int>
    {
        auto it = std::find(_objects.begin(), _objects.end(), name);
        if (it == _objects.end())
            return std::nullopt;
        return static_cast<int>(it - _objects.begin());
    }

    auto Problem::has_complete_priorities() const -> bool
    {
        return std::all_of(_priorities.begin(), _priorities.end(), [&] (auto & l) { return static_cast<int>(l.size()) == n(); });
    }

    Matching::Matching(std::vector<std::pair<int, int>> pairs) :
        _pairs(std::move(pairs))
    {
        std::sort(_pairs.begin(), _pairs.end());
        for (std::size_t x = 0 ; x < _pairs.size() ; ++x) {
            if (_pairs[x].first < 0 || _pairs[x].second < 0)
                throw ContractViolation("matching pairs must use non-negative indices");
            for (std::size_t y = x + 1 ; y < _pairs.size() ; ++y)
                if (_pairs[x].first == _pairs[y].first || _pairs[x].second == _pairs[y].second)
                    throw ContractViolation("matching is not injective");
        }
    }

    auto Matching::object_of(int agent) const -> int
    {
        for (auto & [i, s] : _pairs)
            if (i == agent)
                return s;
        return kUnmatched;
    }

    auto Matching::holder_of(int object) const -> int
    {
        for (auto & [i, s] : _pairs)
            if (s == object)
                return i;
        return kUnmatched;
    }

    auto Matching::unassign(int agent) -> void
    {
        std::erase_if(_pairs, [&] (auto & p) { return p.first == agent; });
    }

    auto Matching::assign(int agent, int object) -> void
    {
        std::erase_if(_pairs, [&] (auto & p) { return p.first == agent || p.second == object; });
        auto pos = std::lower_bound(_pairs.begin(), _pairs.end(), std::pair{ agent, object });
        _pairs.insert(pos, { agent, object });
    }

    auto MatchingHash::operator()(const Matching & m) const noexcept -> std::size_t
    {
        std::size_t h = 1469598103934665603ULL;
        for (auto & [i, s] : m.pairs()) {
            h = (h ^ static_cast<std::size_t>(i + 1)) * 1099511628211ULL;
            h = (h ^ static_cast<std::size_t>(s + 1)) * 1099511628211ULL;
        }
        return h;
    }

    auto check_matching(const Problem & problem, const Matching & matching) -> void
    {
        for (auto & [i, s] : matching.pairs())
            if (i >= problem.n() || s >= problem.m())
                throw ContractViolation("matching refers to an agent or object outside the problem");
    }

    auto make_add(const Matching & matching, int agent, int object) -> Move
    {
        Move move{ MoveKind::add, agent, object, std::nullopt, std::nullopt };
        if (int h = matching.holder_of(object) ; h != kUnmatched)
            move.displaced = h;
        if (int v = matching.object_of(agent) ; v != kUnmatched)
            move.vacated = v;
        return move;
    }

    auto make_remove(int agent, int object) -> Move
    {
        return Move{ MoveKind::remove, agent, object, std::nullopt, std::nullopt };
    }

    namespace
    {
        auto add_is_feasible(const Problem & problem, const Matching & matching, int i, int s, const Rules & rules) -> bool
        {
            if (matching.object_of(i) == s)
                return false;
            if (rules.acceptable_only && ! problem.acceptable(i, s))
                return false;
            if (rules.mode == Mode::owned)
                return true;
            int holder = matching.holder_of(s);
            return holder == kUnmatched || problem.priority_rank(s, i) < problem.priority_rank(s, holder);
        }
    }

    auto legal_moves(const Problem & problem, const Matching & matching, const Rules & rules) -> std::vector<Move>
    {
        if (rules.mode == Mode::owned && ! problem.has_owners())
            throw UnsupportedMode("owned-mode moves need an ownership map");

        std::vector<Move> result;
        for (auto & [i, s] : matching.pairs())
            result.push_back(make_remove(i, s));
        for (int i = 0 ; i < problem.n() ; ++i)
            for (int s = 0 ; s < problem.m() ; ++s)
                if (add_is_feasible(problem, matching, i, s, rules))
                    result.push_back(make_add(matching, i, s));
        return result;
    }

    auto is_legal(const Problem & problem, const Matching & matching, const Move & move, const Rules & rules) -> bool
    {
        if (move.agent < 0 || move.agent >= problem.n() || move.object < 0 || move.object >= problem.m())
            return false;
        if (move.kind == MoveKind::remove)
            return matching.contains(move.agent, move.object);
        return add_is_feasible(problem, matching, move.agent, move.object, rules);
    }

    auto apply_move(const Matching & matching, const Move & move) -> Matching
    {
        Matching result = matching;
        if (move.kind == MoveKind::remove) {
            if (! matching.contains(move.agent, move.object))
                throw ContractViolation("Remove of a pair that is not in the matching");
            result.unassign(move.agent);
            return result;
        }

        if (matching.object_of(move.agent) == move.object)
            throw ContractViolation("Add of a pair that is already in the matching");
        int holder = matching.holder_of(move.object);
        int held = matching.object_of(move.agent);
        if (move.displaced.value_or(kUnmatched) != holder || move.vacated.value_or(kUnmatched) != held)
            throw ContractViolation("Add annotations do not match the matching");
        result.assign(move.agent, move.object);
        return result;
    }

    auto count_matchings(int n, int m) -> std::size_t
    {
        // term_k = C(n,k) C(m,k) k!, built incrementally as a falling-factorial ratio.
        long double total = 0, term = 1;
        for (int k = 0 ; k <= std::min(n, m) ; ++k) {
            total += term;
            term = term * (n - k) * (m - k) / (k + 1);
        }
        if (total >= static_cast<long double>(std::numeric_limits<std::size_t>::max()))
            return std::numeric_limits<std::size_t>::max();
        return static_cast<std::size_t>(total + 0.5L);
    }

    auto enumerate_matchings(const Problem & problem, std::size_t cap) -> std::vector<Matching>
    {
        auto expected = count_matchings(problem.n(), problem.m());
        if (expected > cap)
            throw CapExceeded("instance has " + std::to_string(expected) + " matchings, above the cap of " + std::to_string(cap));

        std::vector<Matching> result;
        result.reserve(expected);
        std::vector<std::pair<int, int>> current;
        std::vector<bool> used(problem.m(), false);

        std::function<void (int)> extend = [&] (int agent) {
            if (agent == problem.n()) {
                result.emplace_back(current);
                return;
            }
            extend(agent + 1);
            for (int s = 0 ; s < problem.m() ; ++s) {
                if (used[s])
                    continue;
                used[s] = true;
                current.emplace_back(agent, s);
                extend(agent + 1);
                current.pop_back();
                used[s] = false;
            }
        };
        extend(0);

        std::sort(result.begin(), result.end());
        return result;
    }

    auto problem_to_json(const Problem & problem) -> Json
    {
        Json doc = Json::object();
        doc["agents"] = problem.agents();
        doc["objects"] = problem.objects();
        Json prefs = Json::object();
        for (int i = 0 ; i < problem.n() ; ++i) {
            Json list = Json::array();
            for (int s : problem.preferences(i))
                list.push_back(problem.object_name(s));
            prefs[problem.agent_name(i)] = std::move(list);
        }
        doc["preferences"] = std::move(prefs);
        Json prios = Json::object();
        for (int s = 0 ; s < problem.m() ; ++s) {
            Json list = Json::array();
            for (int i : problem.priorities(s))
                list.push_back(problem.agent_name(i));
            prios[problem.object_name(s)] = std::move(list);
        }
        doc["priorities"] = std::move(prios);
        if (problem.has_owners()) {
            Json owners = Json::object();
            for (int s = 0 ; s < problem.m() ; ++s)
                owners[problem.object_name(s)] = problem.agent_name(problem.owner_of(s));
            doc["owners"] = std::move(owners);
        }
        return doc;
    }

    namespace
    {
        auto names(const Json & doc, const char * key) -> std::vector<std::string>
        {
            auto where = std::string("/") + key;
            if (! doc.contains(key))
                throw ParseError(where, "missing field");
            const auto & list = doc.at(key);
            if (! list.is_array())
                throw ParseError(where, "expected an array of strings");
            std::vector<std::string> result;
            for (std::size_t x = 0 ; x < list.size() ; ++x) {
                if (! list[x].is_string())
                    throw ParseError(where + "/" + std::to_string(x), "expected a string");
                result.push_back(list[x].get<std::string>());
            }
            return result;
        }

        auto lookup(const std::vector<std::string> & table, const std::string & name) -> int
        {
            auto it = std::find(table.begin(), table.end(), name);
            return it == table.end() ? kUnmatched : static_cast<int>(it - table.begin());
        }

        auto ranked_lists(const Json & doc, const char * key, const std::vector<std::string> & owners_of_list,
                const std::vector<std::string> & entries, const char * entry_kind) -> std::vector<std::vector<int>>
        {
            std::vector<std::vector<int>> result(owners_of_list.size());
            if (! doc.contains(key))
                return result;
            const auto & map = doc.at(key);
            auto where = std::string("/") + key;
            if (! map.is_object())
                throw ParseError(where, "expected an object");
            for (auto & [name, list] : map.items()) {
                int owner = lookup(owners_of_list, name);
                if (owner == kUnmatched)
                    throw ParseError(where + "/" + name, "unknown identifier '" + name + "'");
                if (! list.is_array())
                    throw ParseError(where + "/" + name, "expected an array");
                for (std::size_t pos = 0 ; pos < list.size() ; ++pos) {
                    auto here = where + "/" + name + "/" + std::to_string(pos);
                    if (! list[pos].is_string())
                        throw ParseError(here, "expected a string");
                    auto entry = list[pos].get<std::string>();
                    int idx = lookup(entries, entry);
                    if (idx == kUnmatched)
                        throw ParseError(here, std::string("unknown ") + entry_kind + " '" + entry + "'");
                    result[owner].push_back(idx);
                }
            }
            return result;
        }
    }

    auto problem_from_json(const Json & doc) -> Problem
    {
        if (! doc.is_object())
            throw ParseError("", "problem document must be a JSON object");
        auto agents = names(doc, "agents");
        auto objects = names(doc, "objects");
        auto prefs = ranked_lists(doc, "preferences", agents, objects, "object");
        auto prios = ranked_lists(doc, "priorities", objects, agents, "agent");

        std::optional<std::vector<int>> owners;
        if (doc.contains("owners")) {
            const auto & map = doc.at("owners");
            if (! map.is_object())
                throw ParseError("/owners", "expected an object");
            owners.emplace(objects.size(), kUnmatched);
            for (auto & [name, owner] : map.items()) {
                int s = lookup(objects, name);
                if (s == kUnmatched)
                    throw ParseError("/owners/" + name, "unknown object '" + name + "'");
                if (! owner.is_string())
                    throw ParseError("/owners/" + name, "expected a string");
                int i = lookup(agents, owner.get<std::string>());
                if (i == kUnmatched)
                    throw ParseError("/owners/" + name, "unknown agent '" + owner.get<std::string>() + "'");
                (*owners)[s] = i;
            }
        }

        return Problem(std::move(agents), std::move(objects), std::move(prefs), std::move(prios), std::move(owners));
    }

    auto dump(const Json & doc) -> std::string
    {
        return doc.dump(2) + "\n";
    }

    auto parse_problem(std::string_view text) -> Problem
    {
        Json doc;
        try {
            doc = Json::parse(text);
        }
        catch (const nlohmann::json::parse_error & e) {
            throw ParseError("byte " + std::to_string(e.byte), "syntax error");
        }
        return problem_from_json(doc);
    }

    auto serialize_problem(const Problem & problem) -> std::string
    {
        return dump(problem_to_json(problem));
    }

    auto matching_to_json(const Problem & problem, const Matching & matching) -> Json
    {
        Json doc = Json::object();
        for (auto & [i, s] : matching.pairs())
            doc[problem.agent_name(i)] = problem.object_name(s);
        return doc;
    }

    auto matching_from_json(const Problem & problem, const Json & doc, const std::string & where) -> Matching
    {
        if (! doc.is_object())
            throw ParseError(where, "matching must be a JSON object");
        std::vector<std::pair<int, int>> pairs;
        std::vector<bool> used(problem.m(), false);
        for (auto & [agent, object] : doc.items()) {
            auto here = where + "/" + agent;
            auto i = problem.find_agent(agent);
            if (! i)
                throw ParseError(here, "unknown agent '" + agent + "'");
            if (! object.is_string())
                throw ParseError(here, "expected an object identifier");
            auto s = problem.find_object(object.get<std::string>());
            if (! s)
                throw ParseError(here, "unknown object '" + object.get<std::string>() + "'");
            if (used[*s])
                throw ParseError(here, "object '" + object.get<std::string>() + "' assigned twice");
            used[*s] = true;
            pairs.emplace_back(*i, *s);
        }
        return Matching(std::move(pairs));
    }

    auto parse_matching(const Problem & problem, std::string_view text) -> Matching
    {
        Json doc;
        try {
            doc = Json::parse(text);
        }
        catch (const nlohmann::json::parse_error & e) {
            throw ParseError("byte " + std::to_string(e.byte), "syntax error");
        }
        return matching_from_json(problem, doc);
    }

    auto serialize_matching(const Problem & problem, const Matching & matching) -> std::string
    {
        return dump(matching_to_json(problem, matching));
    }

    auto move_to_json(const Problem & problem, const Move & move) -> Json
    {
        Json doc = Json::object();
        doc["kind"] = move.kind == MoveKind::add ? "add" : "remove";
        doc["agent"] = problem.agent_name(move.agent);
        doc["object"] = problem.object_name(move.object);
        if (move.displaced)
            doc["displaced"] = problem.agent_name(*move.displaced);
        if (move.vacated)
            doc["vacated"] = problem.object_name(*move.vacated);
        return doc;
    }

    auto move_from_json(const Problem & problem, const Json & doc, const std::string & where) -> Move
    {
        auto field = [&] (const char * key) -> std::string {
            if (! doc.contains(key) || ! doc.at(key).is_string())
                throw ParseError(where + "/" + key, "expected a string");
            return doc.at(key).get<std::string>();
        };
        auto agent = [&] (const char * key) {
            auto i = problem.find_agent(field(key));
            if (! i)
                throw ParseError(where + "/" + key, "unknown agent");
            return *i;
        };
        auto object = [&] (const char * key) {
            auto s = problem.find_object(field(key));
            if (! s)
                throw ParseError(where + "/" + key, "unknown object");
            return *s;
        };

        if (! doc.is_object())
            throw ParseError(where, "move must be a JSON object");
        Move move;
        auto kind = field("kind");
        if (kind == "add")
            move.kind = MoveKind::add;
        else if (kind == "remove")
            move.kind = MoveKind::remove;
        else
            throw ParseError(where + "/kind", "expected add or remove");
        move.agent = agent("agent");
        move.object = object("object");
        if (doc.contains("displaced"))
            move.displaced = agent("displaced");
        if (doc.contains("vacated"))
            move.vacated = object("vacated");
        return move;
    }

    auto describe(const Problem & problem, const Matching & matching) -> std::string
    {
        std::ostringstream out;
        out << "{";
        bool first = true;
        for (auto & [i, s] : matching.pairs()) {
            out << (first ? "" : ", ") << problem.agent_name(i) << "->" << problem.object_name(s);
            first = false;
        }
        out << "}";
        return out.str();
    }

    auto describe(const Problem & problem, const Move & move) -> std::string
    {
        std::string text = (move.kind == MoveKind::add ? "Add(" : "Remove(") + problem.agent_name(move.agent) + ", " + problem.object_name(move.object) + ")";
        if (move.displaced)
            text += " displacing " + problem.agent_name(*move.displaced);
        return text;
    }
}
