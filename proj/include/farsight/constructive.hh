#ifndef FARSIGHT_CONSTRUCTIVE_HH
#define FARSIGHT_CONSTRUCTIVE_HH

#include <farsight/dynamics.hh>
#include <farsight/mechanisms.hh>

#include <vector>

namespace farsight
{
    struct HorizonBounds
    {
        int gamma = 0;
        /// 3γ - 1
        int theorem1_bound = -1;
        /// 2γ + 1
        int tight_bound = 1;

        auto operator==(const HorizonBounds &) const -> bool = default;
    };

    [[nodiscard]] auto bounds_from_gamma(int gamma) -> HorizonBounds;
    [[nodiscard]] auto bounds_from_trace(const TtcTrace &) -> HorizonBounds;

    /// Moves spent on one TTC cycle.
    struct CycleSegment
    {
        int round = 0;
        int cycle = 0;
        int agents = 0;
        int length = 0;
    };

    struct ConstructedPath
    {
        ImprovingPath path;
        std::vector<CycleSegment> segments;
    };

    /// Walks the TTC rounds in order: each cycle's agents first claim the
    /// objects that rank them first, then all but one step away, then everyone
    /// moves on to her TTC object. The path carries the horizon 3γ - 1 (at
    /// least 1). Throws ContractViolation when `from` already equals μ^T.
    [[nodiscard]] auto build_canonical_path(const Problem &, const Matching & from, const Rules & = {}) -> ConstructedPath;

    /// Same phases, but agents leave in the order they arrived, which keeps
    /// every lookahead within 2γ + 1 steps.
    [[nodiscard]] auto build_tight_path(const Problem &, const Matching & from, const Rules & = {}) -> ConstructedPath;

    [[nodiscard]] auto constructed_to_json(const Problem &, const ConstructedPath &) -> Json;
}

#endif
