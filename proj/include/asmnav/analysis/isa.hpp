#pragma once

#include "asmnav/core/model.hpp"

#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace asmnav::analysis {

enum class TransferKind { none, jump, branch, call, ret };

struct ControlTransfer {
    TransferKind kind = TransferKind::none;
    std::optional<Address> target; // absent for indirect transfers and returns

    bool is_transfer() const { return kind != TransferKind::none; }
    bool operator==(const ControlTransfer&) const = default;
};

using TransferClassifier = std::function<ControlTransfer(const Instruction&)>;

struct RegisterClass {
    std::string name;
    std::regex pattern; // matched against the whole token, sigil included
};

/// Per-ISA tables driving both control-transfer and register classification.
struct IsaTable {
    std::string name;
    std::map<std::string, TransferKind, std::less<>> transfer_mnemonics;
    std::vector<RegisterClass> register_classes; // first match wins
    std::set<std::string, std::less<>> vector_classes;
    std::set<std::string, std::less<>> vector_mnemonics;

    ControlTransfer classify_transfer(const Instruction& instruction) const;
    std::optional<std::string> register_class(std::string_view token) const;
    TransferClassifier classifier() const;
};

/// AT&T-syntax x86-64 as printed by objdump.
const IsaTable& x86_64_isa();

/// Minimal ISA used by hand-written fixtures: jmp/br*/call/ret, r0.. general
/// registers and v0.. vector registers.
const IsaTable& toy_isa();

/// Throws std::invalid_argument for an unknown name.
const IsaTable& isa_by_name(std::string_view name);

struct InstructionClass {
    bool is_vector = false;
    std::set<std::string> register_classes;

    bool operator==(const InstructionClass&) const = default;
};

InstructionClass classify_instruction(const Instruction& instruction, const IsaTable& isa);

/// Characters that can appear inside a register or immediate token.
bool is_operand_token_char(char c);

/// Splits operand text into candidate register/immediate tokens. "%es:(%rdi,%rcx,8)"
/// gives {"%es", "%rdi", "%rcx", "8"}.
std::vector<std::string_view> operand_tokens(std::string_view operands);

/// Last word of a possibly prefixed mnemonic ("rep stos" -> "stos").
std::string_view base_mnemonic(std::string_view mnemonic);

} // namespace asmnav::analysis
