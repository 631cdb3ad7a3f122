#ifndef FARSIGHT_MECHANISMS_HH
#define FARSIGHT_MECHANISMS_HH

#include <farsight/json.hh>
#include <farsight/model.hh>

#include <optional>
#include <tuple>
#include <vector>

namespace farsight
{
    /// One TTC cycle. A trade cycle s1 -> i1 -> s2 -> ... -> il -> s1 is stored
    /// as objects = [s1..sl] and agents = [i1..il], so objects[x] points to
    /// agents[x] and agents[x] points to objects[(x+1) % l]. A self-cycle has a
    /// single agent and no objects.
    struct TtcCycle
    {
        std::vector<int> objects;
        std::vector<int> agents;

        [[nodiscard]] auto is_self_cycle() const -> bool { return objects.empty(); }
        /// c-bar: number of agents involved.
        [[nodiscard]] auto agent_count() const -> int { return static_cast<int>(agents.size()); }
        /// Object that ranks agents[x] first among the remaining agents.
        [[nodiscard]] auto claimed_by(std::size_t x) const -> int { return objects.at(x); }
        /// Object agents[x] points to, i.e. her TTC assignment.
        [[nodiscard]] auto assigned_to(std::size_t x) const -> int { return objects.at((x + 1) % objects.size()); }
        /// m_k^l as (agent, object) pairs; empty for a self-cycle.
        [[nodiscard]] auto matches() const -> std::vector<std::pair<int, int>>;
    };

    struct TtcRound
    {
        std::vector<TtcCycle> cycles;
        std::vector<std::pair<int, int>> matches;
        std::vector<int> removed_agents;
        std::vector<int> removed_objects;
        int max_cycle_agents = 0;
    };

    struct TtcTrace
    {
        std::vector<TtcRound> rounds;
        int final_round = 0;
        /// Largest number of agents in a trade cycle; 0 when nobody trades.
        int gamma = 0;
        Matching matching;
    };

    /// Top trading cycles with the full round-by-round record.
    [[nodiscard]] auto run_ttc(const Problem &) -> TtcTrace;

    /// Agent-proposing deferred acceptance.
    [[nodiscard]] auto run_da(const Problem &) -> Matching;

    /// Immediate acceptance (Boston mechanism).
    [[nodiscard]] auto run_ia(const Problem &) -> Matching;

    struct EnvyWitness
    {
        int envious = 0;
        int holder = 0;
        int object = 0;

        auto operator==(const EnvyWitness &) const -> bool = default;
    };

    struct StabilityAudit
    {
        bool individually_rational = true;
        bool non_wasteful = true;
        std::vector<EnvyWitness> justified_envy;
        bool stable = true;
    };

    [[nodiscard]] auto audit_matching(const Problem &, const Matching &) -> StabilityAudit;

    /// `a` Pareto dominates `b`.
    [[nodiscard]] auto pareto_dominates(const Problem &, const Matching & a, const Matching & b) -> bool;

    struct EfficiencyVerdict
    {
        bool efficient = true;
        std::optional<Matching> dominated_by;
    };

    /// Exhaustive check against every matching; throws CapExceeded when the
    /// instance is too large.
    [[nodiscard]] auto is_pareto_efficient(const Problem &, const Matching &, std::size_t cap = kDefaultMatchingCap) -> EfficiencyVerdict;

    [[nodiscard]] auto trace_to_json(const Problem &, const TtcTrace &) -> Json;
    [[nodiscard]] auto audit_to_json(const Problem &, const StabilityAudit &) -> Json;
}

#endif
