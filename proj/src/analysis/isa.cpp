#include "asmnav/analysis/isa.hpp"

#include <cctype>
#include <stdexcept>

namespace asmnav::analysis {

namespace {

std::optional<Address> direct_target(std::string_view operands)
{
    auto first = operands.find_first_not_of(" \t");
    if (first == std::string_view::npos)
        return std::nullopt;
    operands.remove_prefix(first);
    if (operands.front() == '*')
        return std::nullopt;
    auto end = operands.find_first_of(" \t,");
    return parse_address(operands.substr(0, end));
}

IsaTable make_x86_64()
{
    IsaTable t;
    t.name = "x86-64";
    for (auto m : {"jmp", "jmpq", "ljmp"})
        t.transfer_mnemonics.emplace(m, TransferKind::jump);
    for (auto m : {"ja",   "jae",  "jb",   "jbe",  "jc",    "jcxz",  "jecxz", "jrcxz", "je",   "jg",   "jge",
                   "jl",   "jle",  "jna",  "jnae", "jnb",   "jnbe",  "jnc",   "jne",   "jng",  "jnge", "jnl",
                   "jnle", "jno",  "jnp",  "jns",  "jnz",   "jo",    "jp",    "jpe",   "jpo",  "js",   "jz",
                   "loop", "loope", "loopne", "loopz", "loopnz", "xbegin"})
        t.transfer_mnemonics.emplace(m, TransferKind::branch);
    for (auto m : {"call", "callq", "lcall"})
        t.transfer_mnemonics.emplace(m, TransferKind::call);
    for (auto m : {"ret", "retq", "retl", "lret", "iret", "iretq", "sysret", "hlt", "ud2"})
        t.transfer_mnemonics.emplace(m, TransferKind::ret);

    auto cls = [&](const char* name, const char* re) { t.register_classes.push_back({name, std::regex(re)}); };
    cls("vector", "%[xyz]mm([0-9]|[12][0-9]|3[01])");
    cls("mask", "%k[0-7]");
    cls("mmx", "%mm[0-7]");
    cls("x87", "%st");
    cls("segment", "%[cdefgs]s");
    cls("instruction_pointer", "%[re]?ip");
    cls("general", "%(r[abcd]x|e[abcd]x|[abcd][xlh]|r[sd]i|e[sd]i|[sd]il?|r[sb]p|e[sb]p|[sb]pl?|"
                   "r([89]|1[0-5])[dwb]?)");
    t.vector_classes = {"vector"};
    t.vector_mnemonics = {"vzeroupper", "vzeroall", "addpd", "addps", "subpd", "subps", "mulpd",
                          "mulps", "divpd", "divps", "sqrtpd", "sqrtps", "maxpd", "maxps", "minpd",
                          "minps", "andpd", "andps", "xorpd", "xorps", "movapd", "movaps", "movupd",
                          "movups", "shufpd", "shufps", "unpckhpd", "unpcklpd", "haddpd", "haddps"};
    return t;
}

IsaTable make_toy()
{
    IsaTable t;
    t.name = "toy";
    t.transfer_mnemonics.emplace("jmp", TransferKind::jump);
    for (auto m : {"br", "bz", "bnz", "blt", "bge"})
        t.transfer_mnemonics.emplace(m, TransferKind::branch);
    t.transfer_mnemonics.emplace("call", TransferKind::call);
    t.transfer_mnemonics.emplace("ret", TransferKind::ret);
    t.register_classes.push_back({"vector", std::regex("v[0-9]+")});
    t.register_classes.push_back({"general", std::regex("r[0-9]+")});
    t.vector_classes = {"vector"};
    t.vector_mnemonics = {"vadd", "vmul", "vload", "vstore"};
    return t;
}

} // namespace

bool is_operand_token_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '%' || c == '.';
}

std::string_view base_mnemonic(std::string_view mnemonic)
{
    auto space = mnemonic.rfind(' ');
    return space == std::string_view::npos ? mnemonic : mnemonic.substr(space + 1);
}

std::vector<std::string_view> operand_tokens(std::string_view operands)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < operands.size()) {
        while (i < operands.size() && !is_operand_token_char(operands[i]))
            ++i;
        auto start = i;
        while (i < operands.size() && is_operand_token_char(operands[i]))
            ++i;
        if (i > start)
            out.push_back(operands.substr(start, i - start));
    }
    return out;
}

ControlTransfer IsaTable::classify_transfer(const Instruction& instruction) const
{
    auto it = transfer_mnemonics.find(base_mnemonic(instruction.mnemonic));
    if (it == transfer_mnemonics.end())
        return {};
    ControlTransfer out{it->second, std::nullopt};
    if (out.kind != TransferKind::ret)
        out.target = direct_target(instruction.operand_text);
    return out;
}

std::optional<std::string> IsaTable::register_class(std::string_view token) const
{
    for (const auto& c : register_classes)
        if (std::regex_match(token.begin(), token.end(), c.pattern))
            return c.name;
    return std::nullopt;
}

TransferClassifier IsaTable::classifier() const
{
    return [this](const Instruction& i) { return classify_transfer(i); };
}

const IsaTable& x86_64_isa()
{
    static const IsaTable table = make_x86_64();
    return table;
}

const IsaTable& toy_isa()
{
    static const IsaTable table = make_toy();
    return table;
}

const IsaTable& isa_by_name(std::string_view name)
{
    if (name == x86_64_isa().name)
        return x86_64_isa();
    if (name == toy_isa().name)
        return toy_isa();
    throw std::invalid_argument("unknown ISA '" + std::string(name) + "'");
}

InstructionClass classify_instruction(const Instruction& instruction, const IsaTable& isa)
{
    InstructionClass out;
    for (auto token : operand_tokens(instruction.operand_text))
        if (auto cls = isa.register_class(token)) {
            if (isa.vector_classes.count(*cls))
                out.is_vector = true;
            out.register_classes.insert(std::move(*cls));
        }
    if (isa.vector_mnemonics.count(base_mnemonic(instruction.mnemonic)))
        out.is_vector = true;
    return out;
}

} // namespace asmnav::analysis
