#ifndef FARSIGHT_MODEL_HH
#define FARSIGHT_MODEL_HH

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace farsight
{
    /// Sentinel for "matched to herself" wherever an object index is expected.
    inline constexpr int kUnmatched = -1;

    /// Priority rank used for agents missing from an object's priority list.
    inline constexpr int kUnranked = std::numeric_limits<int>::max();

    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Malformed problem or matching document. `location()` is a JSON pointer
    /// (or a byte offset for syntax errors).
    class ParseError : public Error
    {
    public:
        ParseError(std::string location, const std::string & message);
        [[nodiscard]] auto location() const -> const std::string & { return _location; }

    private:
        std::string _location;
    };

    /// The instance is too large for exhaustive desk-scale treatment.
    class CapExceeded : public Error
    {
    public:
        using Error::Error;
    };

    /// A mechanism was asked to run on a problem it does not support.
    class UnsupportedMode : public Error
    {
    public:
        using Error::Error;
    };

    /// Caller broke a documented precondition.
    class ContractViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    enum class Mode
    {
        standard,
        owned
    };

    /// How the owner's agreement is judged when someone takes her object in
    /// owned mode. `strict` requires a strict lookahead improvement for every
    /// Add; `vacant_weak` keeps the strict test when the object is occupied and
    /// only asks that the owner is not made worse off when it is vacant.
    enum class OwnerConsent
    {
        strict,
        vacant_weak
    };

    /// Move semantics shared by the move generator, the searches and the path
    /// validator.
    struct Rules
    {
        Mode mode = Mode::standard;
        OwnerConsent consent = OwnerConsent::vacant_weak;
        /// Restrict Add(i, s) to objects acceptable to i.
        bool acceptable_only = false;

        auto operator==(const Rules &) const -> bool = default;
    };

    [[nodiscard]] auto to_string(Mode) -> std::string_view;
    [[nodiscard]] auto parse_mode(std::string_view) -> Mode;

    /// A priority-based matching problem. Identifiers are kept in input order;
    /// every algorithm iterates in that order.
    class Problem
    {
    public:
        /// Validates every invariant and throws ParseError naming the offending
        /// entry.
        Problem(std::vector<std::string> agents, std::vector<std::string> objects,
                std::vector<std::vector<int>> preferences, std::vector<std::vector<int>> priorities,
                std::optional<std::vector<int>> owners = std::nullopt);

        [[nodiscard]] auto n() const -> int { return static_cast<int>(_agents.size()); }
        [[nodiscard]] auto m() const -> int { return static_cast<int>(_objects.size()); }
        [[nodiscard]] auto agents() const -> const std::vector<std::string> & { return _agents; }
        [[nodiscard]] auto objects() const -> const std::vector<std::string> & { return _objects; }
        [[nodiscard]] auto agent_name(int i) const -> const std::string & { return _agents.at(i); }
        [[nodiscard]] auto object_name(int s) const -> const std::string & { return _objects.at(s); }
        [[nodiscard]] auto find_agent(std::string_view name) const -> std::optional<int>;
        [[nodiscard]] auto find_object(std::string_view name) const -> std::optional<int>;

        [[nodiscard]] auto preferences(int i) const -> std::span<const int> { return _preferences.at(i); }
        [[nodiscard]] auto priorities(int s) const -> std::span<const int> { return _priorities.at(s); }

        [[nodiscard]] auto has_owners() const -> bool { return _owners.has_value(); }
        /// Owner of object s in owned mode, kUnmatched otherwise.
        [[nodiscard]] auto owner_of(int s) const -> int { return _owners ? (*_owners)[s] : kUnmatched; }
        [[nodiscard]] auto owners() const -> const std::optional<std::vector<int>> & { return _owners; }

        /// Position of `x` (an object or kUnmatched) in P_i: acceptable objects
        /// get their list position, self gets the list length, unacceptable
        /// objects share the next value.
        [[nodiscard]] auto preference_rank(int i, int x) const -> int
        {
            return _pref_rank[static_cast<std::size_t>(i) * (_objects.size() + 1) + static_cast<std::size_t>(x + 1)];
        }
        /// x P_i y.
        [[nodiscard]] auto prefers(int i, int x, int y) const -> bool { return preference_rank(i, x) < preference_rank(i, y); }
        /// x R_i y.
        [[nodiscard]] auto weakly_prefers(int i, int x, int y) const -> bool { return preference_rank(i, x) <= preference_rank(i, y); }
        [[nodiscard]] auto acceptable(int i, int s) const -> bool { return prefers(i, s, kUnmatched); }

        /// 1-based F_s(i), kUnranked when i is not on the list.
        [[nodiscard]] auto priority_rank(int s, int i) const -> int
        {
            return _prio_rank[static_cast<std::size_t>(s) * _agents.size() + static_cast<std::size_t>(i)];
        }
        [[nodiscard]] auto has_complete_priorities() const -> bool;

    private:
        std::vector<std::string> _agents, _objects;
        std::vector<std::vector<int>> _preferences, _priorities;
        std::optional<std::vector<int>> _owners;
        std::vector<int> _pref_rank, _prio_rank;
    };

    /// A partial injective assignment of agents to objects. Self-matched agents
    /// are not stored, so equal matchings have equal representations.
    class Matching
    {
    public:
        Matching() = default;
        /// Throws ContractViolation when two pairs share an agent or an object.
        explicit Matching(std::vector<std::pair<int, int>> pairs);

        [[nodiscard]] auto object_of(int agent) const -> int;
        [[nodiscard]] auto holder_of(int object) const -> int;
        [[nodiscard]] auto contains(int agent, int object) const -> bool { return object_of(agent) == object && object != kUnmatched; }
        /// (agent, object) pairs sorted by agent.
        [[nodiscard]] auto pairs() const -> const std::vector<std::pair<int, int>> & { return _pairs; }
        [[nodiscard]] auto size() const -> std::size_t { return _pairs.size(); }
        [[nodiscard]] auto empty() const -> bool { return _pairs.empty(); }

        /// Sets agent's match, dropping any pair that used the object.
        auto assign(int agent, int object) -> void;
        auto unassign(int agent) -> void;

        auto operator<=>(const Matching &) const = default;
        auto operator==(const Matching &) const -> bool = default;

    private:
        std::vector<std::pair<int, int>> _pairs;
    };

    struct MatchingHash
    {
        auto operator()(const Matching &) const noexcept -> std::size_t;
    };

    /// Throws ContractViolation if the matching mentions unknown indices.
    auto check_matching(const Problem &, const Matching &) -> void;

    enum class MoveKind
    {
        add,
        remove
    };

    struct Move
    {
        MoveKind kind = MoveKind::add;
        int agent = 0;
        int object = 0;
        /// Previous holder of `object`, unseated by an Add.
        std::optional<int> displaced;
        /// Object the mover held before an Add.
        std::optional<int> vacated;

        auto operator==(const Move &) const -> bool = default;
    };

    [[nodiscard]] auto make_add(const Matching &, int agent, int object) -> Move;
    [[nodiscard]] auto make_remove(int agent, int object) -> Move;

    /// Every structurally feasible single move; lookahead conditions are not
    /// considered here.
    [[nodiscard]] auto legal_moves(const Problem &, const Matching &, const Rules & = {}) -> std::vector<Move>;
    [[nodiscard]] auto is_legal(const Problem &, const Matching &, const Move &, const Rules & = {}) -> bool;

    /// Throws ContractViolation when the move does not fit the matching.
    [[nodiscard]] auto apply_move(const Matching &, const Move &) -> Matching;

    inline constexpr std::size_t kDefaultMatchingCap = 100'000;

    /// Sum over k of C(n,k) C(m,k) k!, saturating at SIZE_MAX.
    [[nodiscard]] auto count_matchings(int n, int m) -> std::size_t;

    /// All matchings, sorted by their pair lists. Throws CapExceeded past `cap`.
    [[nodiscard]] auto enumerate_matchings(const Problem &, std::size_t cap = kDefaultMatchingCap) -> std::vector<Matching>;

    [[nodiscard]] auto parse_problem(std::string_view text) -> Problem;
    [[nodiscard]] auto serialize_problem(const Problem &) -> std::string;
    [[nodiscard]] auto parse_matching(const Problem &, std::string_view text) -> Matching;
    [[nodiscard]] auto serialize_matching(const Problem &, const Matching &) -> std::string;
    /// `{i1->s3, i2->s1}` style, for logs and tables.
    [[nodiscard]] auto describe(const Problem &, const Matching &) -> std::string;
    [[nodiscard]] auto describe(const Problem &, const Move &) -> std::string;
}

#endif
