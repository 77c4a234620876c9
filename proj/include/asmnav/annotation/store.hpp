#pragma once

#include "asmnav/core/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace asmnav::annotation {

inline constexpr int kAnnotationSchemaVersion = 1;

/// A user-made renaming of a register, optionally limited to an address range.
struct RenameRule {
    std::uint64_t id = 0; // creation sequence number; later rules have larger ids
    std::string register_name;
    std::string new_name;
    std::optional<AddressRange> scope; // absent: whole program

    bool applies_to(std::string_view canonical_register, Address address) const;
    bool operator==(const RenameRule&) const = default;
};

class UnknownRule : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidRule : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using RuleSnapshot = std::shared_ptr<const std::vector<RenameRule>>;

/// Session-scoped rename rules layered over an immutable model. One writer at a
/// time; readers take snapshots that later writes do not disturb.
class AnnotationStore {
public:
    AnnotationStore();
    AnnotationStore(AnnotationStore&& other) noexcept;
    AnnotationStore& operator=(AnnotationStore&& other) noexcept;

    RenameRule add_rename(std::string register_name, std::string new_name,
                          std::optional<AddressRange> scope = std::nullopt);
    /// Throws UnknownRule if no rule has this id.
    void remove_rename(std::uint64_t id);
    std::vector<RenameRule> list_renames() const;
    RuleSnapshot snapshot() const;

    nlohmann::json to_json() const;
    static AnnotationStore from_json(const nlohmann::json& doc);
    void save(const std::filesystem::path& path) const;
    static AnnotationStore load(const std::filesystem::path& path);

private:
    mutable std::mutex mutex_;
    RuleSnapshot rules_;
    std::uint64_t next_id_ = 1;
};

enum class AnnotationSource { automated, manual };

struct RenderedAnnotation {
    std::string register_name;
    std::vector<std::string> names;
    AnnotationSource source = AnnotationSource::automated;
    std::optional<std::uint64_t> rule_id;

    bool operator==(const RenderedAnnotation&) const = default;
};

struct RenderedOperands {
    std::string text; // "%reg<name>" markup, or the plain operands when nothing applies
    std::vector<RenderedAnnotation> annotations;

    bool operator==(const RenderedOperands&) const = default;
};

/// Resolves every register token of `instruction`: the latest manual rule in
/// scope wins, otherwise the automated annotation, otherwise nothing.
RenderedOperands render_operands(const Instruction& instruction, const std::vector<RenameRule>& rules);

} // namespace asmnav::annotation
