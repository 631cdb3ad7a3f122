#ifndef FARSIGHT_DYNAMICS_HH
#define FARSIGHT_DYNAMICS_HH

#include <farsight/json.hh>
#include <farsight/model.hh>

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace farsight
{
    /// Lookahead k of a limited-farsighted agent, or unbounded.
    class Horizon
    {
    public:
        /// Throws ContractViolation unless k >= 1.
        explicit Horizon(int k);
        [[nodiscard]] static auto infinite() -> Horizon;

        [[nodiscard]] auto is_infinite() const -> bool { return ! _k; }
        /// Throws ContractViolation for the infinite horizon.
        [[nodiscard]] auto k() const -> int;
        /// Index of the state a mover at step l compares against on a path of
        /// length L, i.e. min(l + k, L).
        [[nodiscard]] auto lookahead(int l, int length) const -> int;

        auto operator==(const Horizon &) const -> bool = default;

    private:
        Horizon() = default;
        std::optional<int> _k;
    };

    [[nodiscard]] auto to_string(const Horizon &) -> std::string;

    struct ImprovingPath
    {
        std::vector<Matching> states;
        std::vector<Move> steps;
        Horizon horizon = Horizon::infinite();
        Rules rules;

        [[nodiscard]] auto length() const -> int { return static_cast<int>(steps.size()); }
    };

    struct Violation
    {
        /// Step index l, or -1 for whole-path problems.
        int step = -1;
        std::string clause;
    };

    struct PathVerdict
    {
        bool valid = true;
        std::vector<Violation> violations;
    };

    /// Checks every structural, distinctness and lookahead condition and
    /// reports each failure rather than stopping at the first.
    [[nodiscard]] auto validate_path(const Problem &, const ImprovingPath &) -> PathVerdict;

    struct Transition
    {
        Move move;
        int to = 0;
    };

    namespace detail
    {
        class WindowGraph;
    }

    inline constexpr int kUnreachable = std::numeric_limits<int>::max();

    /// 𝓜 with its single-move transitions under one set of rules, indexed in
    /// canonical order. Farsighted distances are computed on demand and
    /// cached, so a StateSpace must not be shared between threads.
    class StateSpace
    {
    public:
        StateSpace(Problem problem, Rules rules = {}, std::size_t cap = kDefaultMatchingCap);

        [[nodiscard]] auto problem() const -> const Problem & { return _problem; }
        [[nodiscard]] auto rules() const -> const Rules & { return _rules; }
        [[nodiscard]] auto size() const -> int { return static_cast<int>(_matchings.size()); }
        [[nodiscard]] auto matchings() const -> const std::vector<Matching> & { return _matchings; }
        [[nodiscard]] auto matching(int x) const -> const Matching & { return _matchings.at(x); }
        /// Throws ContractViolation for a matching that is not in 𝓜.
        [[nodiscard]] auto index_of(const Matching &) const -> int;
        [[nodiscard]] auto transitions(int x) const -> const std::vector<Transition> & { return _transitions.at(x); }

        /// Preference rank of agent i's match at state x.
        [[nodiscard]] auto rank(int x, int i) const -> int { return _rank[static_cast<std::size_t>(x) * _n + i]; }

        /// Does the move's lookahead condition hold when everyone involved
        /// compares state `from` with state `against`?
        [[nodiscard]] auto move_improves(int from, const Move &, int against) const -> bool;

        /// Shortest farsighted improving path length from every state to
        /// `target` (0 at the target, kUnreachable when none exists).
        [[nodiscard]] auto distances_to(int target) const -> const std::vector<int> &;

        /// Search support; the last graph built is kept.
        [[nodiscard]] auto window_graph(int k, std::size_t cap) const -> const detail::WindowGraph &;

    private:
        Problem _problem;
        Rules _rules;
        std::size_t _n;
        std::vector<Matching> _matchings;
        std::unordered_map<Matching, int, MatchingHash> _index;
        std::vector<std::vector<Transition>> _transitions;
        std::vector<std::vector<std::pair<int, int>>> _predecessors;
        std::vector<int> _rank;
        mutable std::vector<std::vector<int>> _distances;
        mutable std::shared_ptr<const detail::WindowGraph> _window;
        mutable std::size_t _window_cap = 0;
    };

    struct SearchLimits
    {
        /// Longest path considered; defaults to |𝓜| - 1.
        std::optional<int> max_len;
        /// Search nodes per target.
        std::uint64_t node_budget = 10'000'000;
        /// Size limit for the per-source window graph that prunes the search;
        /// past it the search runs unpruned.
        std::size_t window_states = 2'000'000;
    };

    enum class SearchStatus
    {
        found,
        not_found,
        budget_exhausted
    };

    struct SearchOutcome
    {
        SearchStatus status = SearchStatus::not_found;
        std::optional<ImprovingPath> path;
        std::uint64_t nodes = 0;
    };

    /// Depth-first search for a horizon-k improving path (owned-mode rules
    /// when the space uses them). An infinite horizon is answered exactly by
    /// the farsighted distances.
    [[nodiscard]] auto find_horizon_k_path(const StateSpace &, int from, int to, const Horizon &, const SearchLimits & = {}) -> SearchOutcome;
    [[nodiscard]] auto find_horizon_k_path(const StateSpace &, const Matching & from, const Matching & to, const Horizon &, const SearchLimits & = {}) -> SearchOutcome;
    /// One outcome per target, sharing the work that depends only on `from`.
    [[nodiscard]] auto find_horizon_k_paths(const StateSpace &, int from, const std::vector<int> & targets, const Horizon &,
            const SearchLimits & = {}) -> std::vector<SearchOutcome>;

    enum class Variant
    {
        phi_k,
        phi_tilde_k,
        phi_hat_L,
        phi_hat_L_closure,
        phi_infinity
    };

    [[nodiscard]] auto to_string(Variant) -> std::string_view;

    struct ReachabilitySet
    {
        int source = 0;
        Variant variant = Variant::phi_k;
        /// k for phi_k, L for the hat variants, empty for phi_infinity.
        std::optional<int> parameter;
        std::vector<int> members;
        /// Targets whose search ran out of budget.
        std::vector<int> unknown;

        [[nodiscard]] auto exact() const -> bool { return unknown.empty(); }
        [[nodiscard]] auto contains(int x) const -> bool;
    };

    /// With `targets`, only those matchings are searched; the rest appear in
    /// neither list.
    [[nodiscard]] auto phi_k(const StateSpace &, int source, const Horizon &, const SearchLimits & = {},
            const std::optional<std::vector<int>> & targets = std::nullopt) -> ReachabilitySet;
    [[nodiscard]] auto phi_infinity(const StateSpace &, int source) -> ReachabilitySet;
    /// Targets reachable by a farsighted improving path of length at most L;
    /// empty for L <= 0.
    [[nodiscard]] auto hat_phi_L(const StateSpace &, int source, int L) -> ReachabilitySet;
    /// Targets reachable by composing any number of such paths.
    [[nodiscard]] auto hat_phi_L_closure(const StateSpace &, int source, int L) -> ReachabilitySet;

    struct Saturation
    {
        /// |𝓜| - 1, past which every lookahead reaches the end of any path.
        int analytic = 0;
        /// Smallest k with φ_k = φ_∞ on every source. Empty when a budget
        /// left some k undecided or the sweep stopped at `sweep_limit` first.
        std::optional<int> empirical;
    };

    /// Sweeps k upward from 1. Horizons between the limit and |𝓜| - 1 are
    /// exponential to search, so the sweep can be cut short.
    [[nodiscard]] auto saturation_k(const StateSpace &, const SearchLimits & = {}, std::optional<int> sweep_limit = std::nullopt) -> Saturation;

    [[nodiscard]] auto path_to_json(const Problem &, const ImprovingPath &) -> Json;
    /// Inverse of path_to_json; rebuilds move annotations from the states.
    [[nodiscard]] auto path_from_json(const Problem &, const Json &) -> ImprovingPath;
    [[nodiscard]] auto verdict_to_json(const PathVerdict &) -> Json;
    [[nodiscard]] auto reachability_to_json(const StateSpace &, const ReachabilitySet &) -> Json;
}

#endif
