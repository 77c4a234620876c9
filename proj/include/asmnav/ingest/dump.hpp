#pragma once

#include "asmnav/core/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>

namespace asmnav::ingest {

/// The file is readable JSON but was written by an incompatible schema.
class SchemaMismatch : public std::runtime_error {
public:
    SchemaMismatch(int found, const std::string& detail);
    int found_version() const noexcept { return found_; }

private:
    int found_;
};

/// The file is not a well-formed canonical dump (truncated, wrong shape,
/// dangling references).
class ParseFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json model_to_json(const ProgramModel& model);

/// Rebuilds a model from its canonical dump. Throws SchemaMismatch or
/// ParseFailure; never returns a partially populated model.
ProgramModel model_from_json(const nlohmann::json& doc);

/// Writes atomically: the dump goes to a sibling temp file that is renamed into place.
void save_model(const ProgramModel& model, const std::filesystem::path& path);
ProgramModel load_model(const std::filesystem::path& path);

nlohmann::json ranges_to_json(std::span<const AddressRange> ranges);
RangeList ranges_from_json(const nlohmann::json& array);

} // namespace asmnav::ingest
