#ifndef FARSIGHT_JSON_HH
#define FARSIGHT_JSON_HH

#include <farsight/model.hh>

#include <json.hpp>

#include <string>
#include <vector>

namespace farsight
{
    using Json = nlohmann::ordered_json;

    [[nodiscard]] auto problem_to_json(const Problem &) -> Json;
    [[nodiscard]] auto problem_from_json(const Json &) -> Problem;
    [[nodiscard]] auto matching_to_json(const Problem &, const Matching &) -> Json;
    [[nodiscard]] auto matching_from_json(const Problem &, const Json &, const std::string & where = "") -> Matching;
    [[nodiscard]] auto move_to_json(const Problem &, const Move &) -> Json;
    [[nodiscard]] auto move_from_json(const Problem &, const Json &, const std::string & where = "") -> Move;

    /// Canonical text form: two-space indent, trailing newline.
    [[nodiscard]] auto dump(const Json &) -> std::string;
}

#endif
