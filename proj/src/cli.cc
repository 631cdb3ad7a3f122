#include <farsight/cli.hh>
#include <farsight/experiment.hh>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace farsight
{
    namespace
    {
        struct Options
        {
            std::string mode;
            bool json = false;
            std::optional<int> max_len;
            std::size_t node_budget = SearchLimits{}.node_budget;
            std::size_t cap = kDefaultMatchingCap;

            std::string problem_file;
            std::string mechanism = "ttc";
            std::string matching, from, to, set, check;
            std::optional<int> k, L;
            bool infinite = false;
            std::string variant;
            bool tight = false;
            bool show_relation = false;
            std::size_t max_count = 10'000;

            std::string seeds;
            int n = 3, m = 3;
            bool allow_unacceptable = false;
            std::size_t da_max_matchings = ExperimentConfig{}.da_max_matchings;
        };

        /// The usage-level problems CLI11 cannot see on its own.
        class UsageError : public std::runtime_error
        {
        public:
            using std::runtime_error::runtime_error;
        };

        auto read_file(const std::string & path) -> std::string
        {
            std::ifstream in(path, std::ios::binary);
            if (! in)
                throw Error("cannot read '" + path + "'");
            std::ostringstream text;
            text << in.rdbuf();
            return text.str();
        }

        /// Inline JSON when the argument looks like it, a file name otherwise.
        auto read_document(const std::string & argument) -> std::string
        {
            auto start = argument.find_first_not_of(" \t\r\n");
            if (start != std::string::npos && (argument[start] == '{' || argument[start] == '['))
                return argument;
            return read_file(argument);
        }

        auto parse_json(const std::string & text, const std::string & what) -> Json
        {
            try {
                return Json::parse(text);
            }
            catch (const Json::parse_error & e) {
                throw ParseError("byte " + std::to_string(e.byte), what + ": " + e.what());
            }
        }

        class Session
        {
        public:
            Session(const Options & options, std::ostream & out) :
                _options(options),
                _out(out),
                _problem(parse_problem(read_file(options.problem_file)))
            {
                if (options.mode.empty())
                    _rules.mode = _problem.has_owners() ? Mode::owned : Mode::standard;
                else
                    _rules.mode = parse_mode(options.mode);
                if (_rules.mode == Mode::owned && ! _problem.has_owners())
                    throw UnsupportedMode("--mode owned needs an ownership map in the problem");
                _limits.max_len = options.max_len;
                _limits.node_budget = options.node_budget;
            }

            auto space() -> const StateSpace &
            {
                if (! _space)
                    _space = std::make_unique<StateSpace>(_problem, _rules, _options.cap);
                return *_space;
            }

            auto matching(const std::string & argument) -> Matching
            {
                return parse_matching(_problem, read_document(argument));
            }

            auto matching_set(const std::string & argument) -> std::vector<int>
            {
                auto doc = parse_json(read_document(argument), "--set");
                if (! doc.is_array())
                    throw ParseError("", "--set expects a JSON array of matchings");
                std::vector<int> members;
                for (std::size_t x = 0 ; x < doc.size() ; ++x)
                    members.push_back(space().index_of(matching_from_json(_problem, doc[x], "/" + std::to_string(x))));
                std::sort(members.begin(), members.end());
                members.erase(std::unique(members.begin(), members.end()), members.end());
                return members;
            }

            auto horizon() const -> Horizon
            {
                if (_options.infinite)
                    return Horizon::infinite();
                if (! _options.k)
                    throw UsageError("one of --k or --infinite is required");
                return Horizon(*_options.k);
            }

            auto describe_set(const std::vector<int> & members) -> std::string
            {
                std::string text = "{";
                for (std::size_t x = 0 ; x < members.size() ; ++x)
                    text += (x ? ", " : "") + describe(_problem, space().matching(members[x]));
                return text + "}";
            }

            auto print_path(const ImprovingPath & path) -> void
            {
                for (std::size_t l = 0 ; l < path.steps.size() ; ++l)
                    _out << "  " << describe(_problem, path.states[l]) << "\n    " << describe(_problem, path.steps[l]) << "\n";
                _out << "  " << describe(_problem, path.states.back()) << "\n";
            }

            auto print_verdict(const PathVerdict & verdict) -> void
            {
                _out << (verdict.valid ? "valid" : "invalid") << "\n";
                for (auto & v : verdict.violations)
                    _out << "  step " << v.step << ": " << v.clause << "\n";
            }

            auto emit(const Json & doc) -> void
            {
                _out << dump(doc);
            }

            auto solve() -> int
            {
                Json doc = Json::object();
                doc["mechanism"] = _options.mechanism;
                if (_options.mechanism == "ttc") {
                    auto trace = run_ttc(_problem);
                    doc["matching"] = matching_to_json(_problem, trace.matching);
                    doc["gamma"] = trace.gamma;
                    doc["trace"] = trace_to_json(_problem, trace);
                    if (_options.json)
                        return emit(doc), kExitOk;
                    _out << "matching " << describe(_problem, trace.matching) << "\ngamma " << trace.gamma << "\n";
                    for (std::size_t r = 0 ; r < trace.rounds.size() ; ++r) {
                        _out << "round " << r + 1 << ":";
                        for (auto & cycle : trace.rounds[r].cycles) {
                            _out << " (";
                            if (cycle.is_self_cycle())
                                _out << _problem.agent_name(cycle.agents.front());
                            else
                                for (std::size_t x = 0 ; x < cycle.agents.size() ; ++x)
                                    _out << (x ? "," : "") << _problem.object_name(cycle.objects[x]) << "," << _problem.agent_name(cycle.agents[x]);
                            _out << ")";
                        }
                        _out << "\n";
                    }
                    return kExitOk;
                }

                auto result = _options.mechanism == "da" ? run_da(_problem) : run_ia(_problem);
                doc["matching"] = matching_to_json(_problem, result);
                if (_options.json)
                    emit(doc);
                else
                    _out << "matching " << describe(_problem, result) << "\n";
                return kExitOk;
            }

            auto audit() -> int
            {
                auto mu = matching(_options.matching);
                auto report = audit_matching(_problem, mu);
                auto efficiency = is_pareto_efficient(_problem, mu, _options.cap);

                Json doc = Json::object();
                doc["matching"] = matching_to_json(_problem, mu);
                doc["audit"] = audit_to_json(_problem, report);
                doc["pareto_efficient"] = efficiency.efficient;
                doc["dominated_by"] = efficiency.dominated_by ? matching_to_json(_problem, *efficiency.dominated_by) : Json();
                if (_options.json)
                    return emit(doc), kExitOk;

                _out << "matching " << describe(_problem, mu) << "\n"
                     << "individually rational " << (report.individually_rational ? "yes" : "no") << "\n"
                     << "non-wasteful " << (report.non_wasteful ? "yes" : "no") << "\n"
                     << "justified envy " << report.justified_envy.size() << "\n";
                for (auto & w : report.justified_envy)
                    _out << "  " << _problem.agent_name(w.envious) << " envies " << _problem.agent_name(w.holder)
                         << " at " << _problem.object_name(w.object) << "\n";
                _out << "stable " << (report.stable ? "yes" : "no") << "\n"
                     << "pareto efficient " << (efficiency.efficient ? "yes" : "no") << "\n";
                if (efficiency.dominated_by)
                    _out << "  dominated by " << describe(_problem, *efficiency.dominated_by) << "\n";
                return kExitOk;
            }

            auto paths() -> int
            {
                if (! _options.check.empty()) {
                    auto path = path_from_json(_problem, parse_json(read_document(_options.check), "--check"));
                    auto verdict = validate_path(_problem, path);
                    Json doc = Json::object();
                    doc["path"] = path_to_json(_problem, path);
                    doc["verdict"] = verdict_to_json(verdict);
                    if (_options.json)
                        emit(doc);
                    else
                        print_verdict(verdict);
                    return kExitOk;
                }

                if (_options.from.empty() || _options.to.empty())
                    throw UsageError("paths needs --from and --to, or --check");
                auto from = matching(_options.from), to = matching(_options.to);
                auto outcome = find_horizon_k_path(space(), from, to, horizon(), _limits);

                const char * status = outcome.status == SearchStatus::found ? "found"
                    : outcome.status == SearchStatus::not_found ? "not_found" : "budget_exhausted";
                Json doc = Json::object();
                doc["status"] = status;
                doc["nodes"] = outcome.nodes;
                doc["path"] = outcome.path ? path_to_json(_problem, *outcome.path) : Json();
                std::optional<PathVerdict> verdict;
                if (outcome.path) {
                    verdict = validate_path(_problem, *outcome.path);
                    doc["verdict"] = verdict_to_json(*verdict);
                }

                if (_options.json)
                    emit(doc);
                else {
                    _out << status << " (" << outcome.nodes << " nodes)\n";
                    if (outcome.path) {
                        print_path(*outcome.path);
                        print_verdict(*verdict);
                    }
                }
                return outcome.status == SearchStatus::budget_exhausted ? kExitDomainError : kExitOk;
            }

            auto phi() -> int
            {
                int source = space().index_of(matching(_options.from));
                std::string variant = _options.variant;
                if (variant.empty())
                    variant = _options.infinite ? "phi_infinity" : "phi_k";

                ReachabilitySet set;
                if (variant == "phi_k" || variant == "phi_tilde_k")
                    set = phi_k(space(), source, horizon(), _limits);
                else if (variant == "phi_infinity")
                    set = phi_infinity(space(), source);
                else {
                    if (! _options.L)
                        throw UsageError(variant + " needs --L");
                    set = variant == "phi_hat_L" ? hat_phi_L(space(), source, *_options.L) : hat_phi_L_closure(space(), source, *_options.L);
                }

                if (_options.json)
                    return emit(reachability_to_json(space(), set)), kExitOk;
                _out << to_string(set.variant);
                if (set.parameter)
                    _out << " " << *set.parameter;
                _out << " of " << describe(_problem, space().matching(source)) << ": " << set.members.size() << " matchings\n";
                for (int x : set.members)
                    _out << "  " << describe(_problem, space().matching(x)) << "\n";
                if (! set.exact()) {
                    _out << "undecided within budget: " << set.unknown.size() << "\n";
                    for (int x : set.unknown)
                        _out << "  " << describe(_problem, space().matching(x)) << "\n";
                }
                return set.exact() ? kExitOk : kExitDomainError;
            }

            auto construct() -> int
            {
                auto from = matching(_options.from);
                auto built = _options.tight ? build_tight_path(_problem, from, _rules) : build_canonical_path(_problem, from, _rules);
                auto bounds = bounds_from_trace(run_ttc(_problem));

                Json doc = constructed_to_json(_problem, built);
                Json verdicts = Json::object();
                std::vector<std::pair<std::string, int>> checks{
                    { "theorem1_bound", std::max(1, bounds.theorem1_bound) },
                    { "tight_bound", std::max(1, bounds.tight_bound) } };
                std::vector<PathVerdict> results;
                for (auto & [name, k] : checks) {
                    auto path = built.path;
                    path.horizon = Horizon(k);
                    results.push_back(validate_path(_problem, path));
                    Json v = verdict_to_json(results.back());
                    v["k"] = k;
                    verdicts[name] = std::move(v);
                }
                doc["verdicts"] = std::move(verdicts);
                if (_options.json)
                    return emit(doc), kExitOk;

                _out << (_options.tight ? "tight" : "canonical") << " path, length " << built.path.length() << "\n";
                print_path(built.path);
                _out << "segments\n";
                for (auto & s : built.segments)
                    _out << "  round " << s.round << " cycle " << s.cycle << " (" << s.agents << " agents): " << s.length << " moves\n";
                for (std::size_t x = 0 ; x < checks.size() ; ++x) {
                    _out << "k = " << checks[x].second << " (" << checks[x].first << "): ";
                    print_verdict(results[x]);
                }
                return kExitOk;
            }

            auto relation() -> ReachabilityRelation
            {
                auto h = horizon();
                if (h.is_infinite())
                    return build_relation(space(), Variant::phi_infinity, std::nullopt, _limits);
                return build_relation(space(), Variant::phi_k, h.k(), _limits);
            }

            auto stable_sets() -> int
            {
                auto rel = relation();
                auto found = enumerate_vnm_sets(rel, _options.max_count);
                if (_options.json) {
                    Json doc = enumeration_to_json(space(), found);
                    if (_options.show_relation)
                        doc["relation"] = relation_to_json(space(), rel);
                    return emit(doc), kExitOk;
                }
                _out << found.sets.size() << " stable set" << (found.sets.size() == 1 ? "" : "s")
                     << (found.complete ? "" : " (enumeration stopped early)") << "\n";
                for (auto & set : found.sets)
                    _out << "  " << describe_set(set) << "\n";
                if (_options.show_relation)
                    for (int a = 0 ; a < rel.size() ; ++a)
                        _out << describe(_problem, space().matching(a)) << " -> " << describe_set(rel.successors(a)) << "\n";
                return kExitOk;
            }

            auto verify_set() -> int
            {
                auto members = matching_set(_options.set);
                auto verdict = check_vnm_set(relation(), members);
                if (_options.json)
                    return emit(vnm_verdict_to_json(space(), verdict)), kExitOk;
                _out << describe_set(members) << "\ninternal stability " << (verdict.internal_stable ? "holds" : "fails");
                if (verdict.internal_violation)
                    _out << ": " << describe(_problem, space().matching(verdict.internal_violation->second))
                         << " reachable from " << describe(_problem, space().matching(verdict.internal_violation->first));
                _out << "\nexternal stability " << (verdict.external_stable ? "holds" : "fails");
                if (verdict.orphan)
                    _out << ": nothing in the set is reachable from " << describe(_problem, space().matching(*verdict.orphan));
                _out << "\nstable set " << (verdict.verdict ? "yes" : "no") << "\n";
                return kExitOk;
            }

            auto farsighted_set() -> int
            {
                if (! _options.L)
                    throw UsageError("farsighted-set needs --L");
                auto members = matching_set(_options.set);
                auto verdict = check_horizon_L_farsighted_set(space(), members, *_options.L);
                if (_options.json)
                    return emit(farsighted_verdict_to_json(space(), verdict)), kExitOk;
                _out << describe_set(members) << " at L = " << *_options.L << "\n"
                     << "deterrence " << (verdict.deterrence.deterred ? "holds" : "fails") << "\n";
                for (auto & d : verdict.deterrence.undeterred)
                    _out << "  " << describe(_problem, space().matching(d.from)) << " " << describe(_problem, d.move) << "\n";
                _out << "external stability " << (verdict.external.holds ? "holds" : "fails");
                if (verdict.external.orphan)
                    _out << ": " << describe(_problem, space().matching(*verdict.external.orphan)) << " cannot reach the set";
                _out << "\nminimal " << (verdict.minimal ? "yes" : "no");
                if (verdict.smaller)
                    _out << ": " << describe_set(*verdict.smaller) << " also works";
                _out << "\nfarsighted set " << (verdict.verdict ? "yes" : "no") << "\n";
                return kExitOk;
            }

        private:
            const Options & _options;
            std::ostream & _out;
            Problem _problem;
            Rules _rules;
            SearchLimits _limits;
            std::unique_ptr<StateSpace> _space;
        };

        auto experiment(const Options & options, std::ostream & out, std::ostream & err) -> int
        {
            ExperimentConfig config;
            try {
                config.seeds = parse_seeds(options.seeds);
            }
            catch (const ContractViolation & e) {
                throw UsageError(e.what());
            }
            config.n = options.n;
            config.m = options.m;
            config.mode = options.mode.empty() ? Mode::standard : parse_mode(options.mode);
            config.allow_unacceptable = options.allow_unacceptable;
            config.da_max_matchings = options.da_max_matchings;
            config.limits.max_len = options.max_len;
            config.limits.node_budget = options.node_budget;
            config.cap = options.cap;

            auto rows = run_experiment(config);
            if (options.json) {
                Json doc = Json::array();
                for (auto & row : rows) {
                    Json r = Json::object();
                    r["seed"] = row.seed;
                    r["n"] = row.n;
                    r["m"] = row.m;
                    r["gamma"] = row.bounds.gamma;
                    r["theorem1_bound"] = row.bounds.theorem1_bound;
                    r["tight_bound"] = row.bounds.tight_bound;
                    r["minimal_k"] = row.minimal.k ? Json(*row.minimal.k) : Json();
                    r["minimal_k_exact"] = row.minimal.exact;
                    r["ttc_stable_flag"] = row.ttc_stable;
                    r["da_in_some_stable_set_flag"] = row.da_in_some_stable_set ? Json(*row.da_in_some_stable_set) : Json();
                    doc.push_back(std::move(r));
                }
                out << dump(doc);
            }
            else
                out << to_csv(rows);
            err << summarize(rows) << "\n";
            return kExitOk;
        }
    }

    auto run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err) -> int
    {
        Options options;
        CLI::App app{ "Farsighted stability of priority-based matchings", "farsight" };
        app.require_subcommand(1);
        app.fallthrough();
        app.add_option("--mode", options.mode, "standard or owned (default: owned when the problem has owners)")
            ->check(CLI::IsMember({ "standard", "owned" }));
        app.add_flag("--json", options.json, "JSON output");
        app.add_option("--max-len", options.max_len, "longest path the searches consider")->check(CLI::PositiveNumber);
        app.add_option("--node-budget", options.node_budget, "search nodes per query");
        app.add_option("--cap", options.cap, "largest matching space to enumerate");

        auto problem_arg = [&] (CLI::App * sub) {
            sub->add_option("problem", options.problem_file, "problem JSON file")->required();
        };
        auto horizon_args = [&] (CLI::App * sub) {
            auto k = sub->add_option("--k", options.k, "lookahead horizon")->check(CLI::PositiveNumber);
            sub->add_flag("--infinite", options.infinite, "unbounded lookahead")->excludes(k);
        };

        auto solve = app.add_subcommand("solve", "run TTC, DA or IA");
        solve->add_option("--mechanism", options.mechanism)->check(CLI::IsMember({ "ttc", "da", "ia" }));
        problem_arg(solve);

        auto audit = app.add_subcommand("audit", "stability and efficiency audit of a matching");
        audit->add_option("--matching", options.matching, "matching JSON (file or inline)")->required();
        problem_arg(audit);

        auto paths = app.add_subcommand("paths", "search for a horizon-k improving path, or check one");
        paths->add_option("--from", options.from);
        paths->add_option("--to", options.to);
        paths->add_option("--check", options.check, "validate this path document instead of searching");
        horizon_args(paths);
        problem_arg(paths);

        auto phi = app.add_subcommand("phi", "reachable set of a matching");
        phi->add_option("--from", options.from)->required();
        phi->add_option("--variant", options.variant)
            ->check(CLI::IsMember({ "phi_k", "phi_tilde_k", "phi_infinity", "phi_hat_L", "phi_hat_L_closure" }));
        phi->add_option("--L", options.L);
        horizon_args(phi);
        problem_arg(phi);

        auto construct = app.add_subcommand("construct", "build the TTC-guided path to the TTC matching");
        construct->add_option("--from", options.from)->required();
        construct->add_flag("--tight", options.tight, "arrival-order variant");
        problem_arg(construct);

        auto stable_sets = app.add_subcommand("stable-sets", "enumerate horizon-k stable sets");
        stable_sets->add_option("--max-count", options.max_count);
        stable_sets->add_flag("--show-relation", options.show_relation);
        horizon_args(stable_sets);
        problem_arg(stable_sets);

        auto verify = app.add_subcommand("verify-set", "check one candidate stable set");
        verify->add_option("--set", options.set, "JSON array of matchings (file or inline)")->required();
        horizon_args(verify);
        problem_arg(verify);

        auto farsighted = app.add_subcommand("farsighted-set", "check a horizon-L farsighted set");
        farsighted->add_option("--set", options.set)->required();
        farsighted->add_option("--L", options.L)->required();
        problem_arg(farsighted);

        auto experiment_cmd = app.add_subcommand("experiment", "random-instance sweep, CSV on stdout");
        experiment_cmd->add_option("--seeds", options.seeds, "e.g. 1..50 or 1,2,7")->required();
        experiment_cmd->add_option("--n", options.n)->check(CLI::PositiveNumber);
        experiment_cmd->add_option("--m", options.m)->check(CLI::PositiveNumber);
        experiment_cmd->add_flag("--allow-unacceptable", options.allow_unacceptable);
        experiment_cmd->add_option("--da-max-matchings", options.da_max_matchings, "largest space for which the DA flag is computed");

        try {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::ParseError & e) {
            return app.exit(e, out, err) == 0 ? kExitOk : kExitUsageError;
        }

        try {
            if (experiment_cmd->parsed())
                return experiment(options, out, err);

            Session session(options, out);
            if (solve->parsed())
                return session.solve();
            if (audit->parsed())
                return session.audit();
            if (paths->parsed())
                return session.paths();
            if (phi->parsed())
                return session.phi();
            if (construct->parsed())
                return session.construct();
            if (stable_sets->parsed())
                return session.stable_sets();
            if (verify->parsed())
                return session.verify_set();
            return session.farsighted_set();
        }
        catch (const UsageError & e) {
            err << "usage error: " << e.what() << "\n";
            return kExitUsageError;
        }
        catch (const std::exception & e) {
            err << "error: " << e.what() << "\n";
            return kExitDomainError;
        }
    }
}
