#ifndef FARSIGHT_STABLE_SETS_HH
#define FARSIGHT_STABLE_SETS_HH

#include <farsight/dynamics.hh>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace farsight
{
    /// A verdict depends on edges whose search ran out of budget (or was
    /// never run).
    class Indeterminate : public Error
    {
    public:
        using Error::Error;
    };

    /// Boolean |𝓜| x |𝓜| relation, edge(a, b) meaning b is reachable from a.
    class ReachabilityRelation
    {
    public:
        ReachabilityRelation(Variant variant, std::optional<int> parameter, int size);

        [[nodiscard]] auto variant() const -> Variant { return _variant; }
        [[nodiscard]] auto parameter() const -> std::optional<int> { return _parameter; }
        [[nodiscard]] auto size() const -> int { return _size; }
        [[nodiscard]] auto edge(int a, int b) const -> bool { return _edges[at(a, b)]; }
        /// The entry is not known to be exact.
        [[nodiscard]] auto unknown(int a, int b) const -> bool { return _unknown[at(a, b)]; }
        [[nodiscard]] auto exact() const -> bool;
        [[nodiscard]] auto successors(int a) const -> std::vector<int>;

        auto set(int a, int b, bool edge, bool unknown = false) -> void;

        auto operator==(const ReachabilityRelation &) const -> bool = default;

    private:
        [[nodiscard]] auto at(int a, int b) const -> std::size_t { return static_cast<std::size_t>(a) * _size + b; }

        Variant _variant;
        std::optional<int> _parameter;
        int _size;
        std::vector<bool> _edges;
        std::vector<bool> _unknown;
    };

    /// Computes the relation row by row. `parameter` is k for phi_k (empty
    /// means the infinite horizon) and L for the hat variants. For phi_k a
    /// `targets` list limits the searches to those columns and leaves every
    /// other entry unknown; the cheaper variants always fill the whole matrix.
    [[nodiscard]] auto build_relation(const StateSpace &, Variant, std::optional<int> parameter, const SearchLimits & = {},
            const std::optional<std::vector<int>> & targets = std::nullopt) -> ReachabilityRelation;

    struct StableSetVerdict
    {
        bool internal_stable = true;
        std::optional<std::pair<int, int>> internal_violation;
        bool external_stable = true;
        std::optional<int> orphan;
        bool verdict = true;
    };

    /// Internal and external stability of V. Throws Indeterminate when an
    /// unknown edge could change either answer.
    [[nodiscard]] auto check_vnm_set(const ReachabilityRelation &, const std::vector<int> & members) -> StableSetVerdict;

    struct VnmEnumeration
    {
        /// Each set sorted; sets in lexicographic order.
        std::vector<std::vector<int>> sets;
        /// False when max_count stopped the enumeration early.
        bool complete = true;
    };

    /// Every kernel of the relation's directed graph. Throws Indeterminate
    /// unless the relation is exact.
    [[nodiscard]] auto enumerate_vnm_sets(const ReachabilityRelation &, std::size_t max_count = 10'000) -> VnmEnumeration;

    struct Deviation
    {
        int from = 0;
        Move move;
        int to = 0;
    };

    struct DeterrenceVerdict
    {
        bool deterred = true;
        std::vector<Deviation> undeterred;
    };

    [[nodiscard]] auto check_deterrence(const StateSpace &, const std::vector<int> & members, int L) -> DeterrenceVerdict;

    struct ExternalStabilityVerdict
    {
        bool holds = true;
        std::optional<int> orphan;
    };

    [[nodiscard]] auto check_horizon_L_external_stability(const StateSpace &, const std::vector<int> & members, int L) -> ExternalStabilityVerdict;

    inline constexpr std::size_t kMinimalityGuard = 12;

    struct FarsightedSetVerdict
    {
        DeterrenceVerdict deterrence;
        ExternalStabilityVerdict external;
        bool minimal = true;
        /// A proper subset that also satisfies both conditions.
        std::optional<std::vector<int>> smaller;
        bool verdict = true;
    };

    /// Throws CapExceeded when |V| is above kMinimalityGuard.
    [[nodiscard]] auto check_horizon_L_farsighted_set(const StateSpace &, const std::vector<int> & members, int L) -> FarsightedSetVerdict;

    [[nodiscard]] auto relation_to_json(const StateSpace &, const ReachabilityRelation &) -> Json;
    [[nodiscard]] auto vnm_verdict_to_json(const StateSpace &, const StableSetVerdict &) -> Json;
    [[nodiscard]] auto enumeration_to_json(const StateSpace &, const VnmEnumeration &) -> Json;
    [[nodiscard]] auto farsighted_verdict_to_json(const StateSpace &, const FarsightedSetVerdict &) -> Json;
}

#endif
