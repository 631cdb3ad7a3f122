#ifndef FARSIGHT_EXPERIMENT_HH
#define FARSIGHT_EXPERIMENT_HH

#include <farsight/constructive.hh>
#include <farsight/stable_sets.hh>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace farsight
{
    /// Random instance named i1..in / s1..sm. Standard mode draws a random
    /// acceptable set per agent and full random priorities; owned mode (n must
    /// equal m) makes every object acceptable unless `allow_unacceptable`,
    /// gives i_l the object s_l and ranks only the owner.
    [[nodiscard]] auto gen_random_problem(std::uint64_t seed, int n, int m, Mode mode = Mode::standard, bool allow_unacceptable = false) -> Problem;

    struct MinimalK
    {
        /// Smallest k at which {μ^T} is a horizon-k stable set, searched up to
        /// max(1, 3γ - 1).
        std::optional<int> k;
        /// False when some smaller k could not be decided within budget.
        bool exact = true;
    };

    [[nodiscard]] auto minimal_stabilizing_k(const StateSpace &, const SearchLimits & = {}) -> MinimalK;

    struct ExperimentConfig
    {
        std::vector<std::uint64_t> seeds;
        int n = 3;
        int m = 3;
        Mode mode = Mode::standard;
        bool allow_unacceptable = false;
        SearchLimits limits;
        /// The DA flag needs the full relation; past this many matchings it
        /// is left undecided.
        std::size_t da_max_matchings = 100;
        /// Per-pair budget for that relation.
        std::uint64_t da_node_budget = 100'000;
        std::size_t cap = kDefaultMatchingCap;
    };

    struct ExperimentRow
    {
        std::uint64_t seed = 0;
        int n = 0;
        int m = 0;
        HorizonBounds bounds;
        MinimalK minimal;
        bool ttc_stable = false;
        /// Empty when DA does not apply (owned mode) or the stable sets at the
        /// measured k were not enumerated.
        std::optional<bool> da_in_some_stable_set;
        bool da_applicable = true;
    };

    [[nodiscard]] auto run_experiment_row(std::uint64_t seed, const ExperimentConfig &) -> ExperimentRow;
    [[nodiscard]] auto run_experiment(const ExperimentConfig &) -> std::vector<ExperimentRow>;

    inline constexpr const char * kCsvHeader = "seed,n,m,gamma,theorem1_bound,tight_bound,minimal_k,ttc_stable_flag,da_in_some_stable_set_flag";

    /// Header plus one LF-terminated line per row. minimal_k prints as a
    /// number, "<=k" when smaller horizons were undecided, or "none";
    /// the DA flag prints true, false, na or indeterminate.
    [[nodiscard]] auto to_csv(const std::vector<ExperimentRow> &) -> std::string;
    [[nodiscard]] auto summarize(const std::vector<ExperimentRow> &) -> std::string;

    /// "1..50", "3", or "1,4,9".
    [[nodiscard]] auto parse_seeds(const std::string &) -> std::vector<std::uint64_t>;
}

#endif
