#pragma once

#include "cairovm/field.hpp"
#include "cairovm/isa.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cairovm {

class CasmSyntaxError : public std::runtime_error {
public:
    CasmSyntaxError(std::size_t line, std::size_t column, const std::string& what);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Assembles Casm text.
///
/// Grammar, one statement per line (`//` starts a comment):
///
///   name:                                label
///   func name{implicit,..}(arg,..) -> (ret,..):   function header (also a label)
///   [ap] = [fp + (-5)]; ap++             assert_eq, optional `; ap++`
///   [ap] = [[fp + (-4)]]                 op1 through op0
///   [ap] = [fp + (-4)] + 1               res = op0 + op1 (also `*`)
///   call rel -11 | call abs 7 | call rel name
///   jmp rel 0 | jmp abs 7 | jmp rel name
///   jmp rel 4 if [ap + (-1)] != 0
///   ap += 3
///   ret
///   dw 0x...                             raw word
///
/// Immediates are reduced into `cfg`. Label references in `rel` targets
/// resolve to relative immediates; in `abs` targets to base_pc + offset.
Program parse_casm(std::string_view text, const FieldConfig& cfg, const BigInt& base_pc = 0);

/// Disassembles a program. Labels and function headers are printed at their
/// offsets; an instruction with no canonical text form is printed as `dw`
/// lines so that parse(print(p)) reproduces the words exactly.
std::string print_casm(const Program& program, const FieldConfig& cfg);

/// Text of one instruction (with its immediate when size is 2), or nullopt
/// when it has no canonical form.
std::optional<std::string> format_instruction(const Instruction& instr, const std::optional<BigInt>& immediate,
                                              const FieldConfig& cfg);

}  // namespace cairovm
