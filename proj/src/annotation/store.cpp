#include "asmnav/annotation/store.hpp"

#include "asmnav/analysis/debug_info.hpp"
#include "asmnav/analysis/isa.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace asmnav::annotation {

using nlohmann::json;

bool RenameRule::applies_to(std::string_view canonical_register, Address address) const
{
    if (analysis::canonical_register(register_name) != canonical_register)
        return false;
    return !scope || scope->contains(address);
}

AnnotationStore::AnnotationStore() : rules_(std::make_shared<const std::vector<RenameRule>>()) {}

AnnotationStore::AnnotationStore(AnnotationStore&& other) noexcept
{
    std::lock_guard lock(other.mutex_);
    rules_ = other.rules_;
    next_id_ = other.next_id_;
}

AnnotationStore& AnnotationStore::operator=(AnnotationStore&& other) noexcept
{
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        rules_ = other.rules_;
        next_id_ = other.next_id_;
    }
    return *this;
}

RenameRule AnnotationStore::add_rename(std::string register_name, std::string new_name,
                                       std::optional<AddressRange> scope)
{
    if (new_name.empty())
        throw InvalidRule("rename needs a non-empty name");
    if (analysis::canonical_register(register_name).empty())
        throw InvalidRule("rename needs a register");
    if (scope && !scope->valid())
        throw InvalidRule("rename scope must be a non-empty address range");

    std::lock_guard lock(mutex_);
    RenameRule rule{next_id_++, std::move(register_name), std::move(new_name), scope};
    auto next = std::make_shared<std::vector<RenameRule>>(*rules_);
    next->push_back(rule);
    rules_ = std::move(next);
    return rule;
}

void AnnotationStore::remove_rename(std::uint64_t id)
{
    std::lock_guard lock(mutex_);
    auto next = std::make_shared<std::vector<RenameRule>>(*rules_);
    auto it = std::find_if(next->begin(), next->end(), [&](const RenameRule& r) { return r.id == id; });
    if (it == next->end())
        throw UnknownRule("no rename rule with id " + std::to_string(id));
    next->erase(it);
    rules_ = std::move(next);
}

std::vector<RenameRule> AnnotationStore::list_renames() const { return *snapshot(); }

RuleSnapshot AnnotationStore::snapshot() const
{
    std::lock_guard lock(mutex_);
    return rules_;
}

json AnnotationStore::to_json() const
{
    json rules = json::array();
    for (const auto& r : *snapshot()) {
        json scope = nullptr;
        if (r.scope)
            scope = {{"start", format_address(r.scope->start)}, {"end", format_address(r.scope->end)}};
        rules.push_back({{"id", r.id}, {"register", r.register_name}, {"new_name", r.new_name}, {"scope", scope}});
    }
    return {{"schema_version", kAnnotationSchemaVersion}, {"rules", std::move(rules)}};
}

AnnotationStore AnnotationStore::from_json(const json& doc)
{
    if (!doc.is_object() || doc.value("schema_version", -1) != kAnnotationSchemaVersion)
        throw std::runtime_error("annotation file has an unsupported schema version");
    AnnotationStore store;
    std::vector<RenameRule> rules;
    try {
        for (const auto& j : doc.at("rules")) {
            RenameRule r;
            r.id = j.at("id").get<std::uint64_t>();
            r.register_name = j.at("register").get<std::string>();
            r.new_name = j.at("new_name").get<std::string>();
            if (const auto& s = j.at("scope"); !s.is_null()) {
                auto start = parse_address(s.at("start").get<std::string>());
                auto end = parse_address(s.at("end").get<std::string>());
                if (!start || !end || *start >= *end)
                    throw std::runtime_error("annotation rule has an invalid scope");
                r.scope = AddressRange{*start, *end};
            }
            if (r.new_name.empty())
                throw std::runtime_error("annotation rule has an empty name");
            rules.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed annotation file: ") + e.what());
    }
    std::sort(rules.begin(), rules.end(), [](const RenameRule& a, const RenameRule& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < rules.size(); ++i)
        if (rules[i].id == rules[i - 1].id)
            throw std::runtime_error("annotation file repeats rule id " + std::to_string(rules[i].id));
    store.next_id_ = rules.empty() ? 1 : rules.back().id + 1;
    store.rules_ = std::make_shared<const std::vector<RenameRule>>(std::move(rules));
    return store;
}

void AnnotationStore::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << to_json().dump(1) << '\n';
}

AnnotationStore AnnotationStore::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return from_json(json::parse(buf.str()));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("annotation file is not valid JSON: ") + e.what());
    }
}

RenderedOperands render_operands(const Instruction& instruction, const std::vector<RenameRule>& rules)
{
    RenderedOperands out;
    for (auto token : analysis::operand_tokens(instruction.operand_text)) {
        auto key = analysis::canonical_register(token);
        bool seen = std::any_of(out.annotations.begin(), out.annotations.end(), [&](const RenderedAnnotation& a) {
            return analysis::canonical_register(a.register_name) == key;
        });
        if (seen)
            continue;

        const RenameRule* manual = nullptr;
        for (const auto& r : rules)
            if (r.applies_to(key, instruction.address) && (!manual || r.id > manual->id))
                manual = &r;
        if (manual) {
            out.annotations.push_back({std::string(token), {manual->new_name}, AnnotationSource::manual, manual->id});
            continue;
        }
        for (const auto& a : instruction.annotations)
            if (analysis::canonical_register(a.register_name) == key) {
                out.annotations.push_back({std::string(token), a.names, AnnotationSource::automated, std::nullopt});
                break;
            }
    }

    if (out.annotations.empty()) {
        out.text = instruction.operand_text;
        return out;
    }
    std::vector<OperandAnnotation> plain;
    for (const auto& a : out.annotations)
        plain.push_back({a.register_name, a.names});
    out.text = analysis::render_annotated_operands(instruction.operand_text, plain);
    return out;
}

} // namespace asmnav::annotation
