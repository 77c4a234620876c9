#pragma once

#include "asmnav/annotation/store.hpp"
#include "asmnav/core/model.hpp"
#include "asmnav/selection/index.hpp"
#include "asmnav/selection/selection.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace asmnav::service {

using nlohmann::json;

/// The request is syntactically wrong (as opposed to naming an unknown entity).
class BadRequest : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultSearchLimit = 50;
inline constexpr std::size_t kDefaultPageSize = 500;
inline constexpr std::size_t kMaxPageSize = 5000;

/// Read-only query surface over one model. Every method is a pure function of
/// the model and its arguments; the CLI and the HTTP service both go through here.
class Navigator {
public:
    explicit Navigator(ModelPtr model);

    const ProgramModel& model() const { return *model_; }
    const ModelPtr& model_ptr() const { return model_; }
    const selection::IntervalIndex& index() const { return index_; }

    json summary() const;
    json sources() const;
    json source(const std::string& file) const;
    json disassembly(std::optional<AddressRange> window, std::size_t offset, std::size_t limit,
                     const std::vector<annotation::RenameRule>& rules) const;

    selection::ResolvedSelection resolve(const selection::Origin& origin) const;
    json selection(const selection::Origin& origin) const;
    json cfg(const std::vector<BlockId>& seeds, unsigned hops) const;

    /// Hierarchy views. With a filter, only entities overlapping it remain,
    /// together with their ancestors.
    json loops(const std::optional<RangeList>& filter) const;
    json function_loops(FunctionId function) const;
    json inlining(const std::optional<RangeList>& filter) const;
    json callgraph(const std::optional<RangeList>& filter) const;

    json search(std::string_view query, std::size_t limit) const;

    /// Accepts {"kind": "line"|"range"|"blocks"|"loop"|"function"|"inline", ...}.
    selection::Origin parse_origin(const json& origin) const;
    /// Exact name first, then a numeric id.
    FunctionId find_function(std::string_view name_or_id) const;

private:
    ModelPtr model_;
    selection::IntervalIndex index_;
};

json resolved_to_json(const selection::ResolvedSelection& resolved, const ProgramModel& model);
json annotations_to_json(const std::vector<annotation::RenameRule>& rules);

/// "0x10-0x20,0x40-0x48" -> ranges. Throws BadRequest.
RangeList parse_range_list(std::string_view text);
/// "1,2,7" -> ids. Throws BadRequest.
std::vector<BlockId> parse_id_list(std::string_view text);

} // namespace asmnav::service
