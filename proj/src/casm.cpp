#include "cairovm/casm.hpp"

#include <cctype>
#include <limits>
#include <sstream>

namespace cairovm {

CasmSyntaxError::CasmSyntaxError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column)
{
}

namespace {

enum class TokKind { Ident, Number, Punct };

struct Token {
    TokKind kind;
    std::string text;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no)
{
    static const char* const kTwoChar[] = {"!=", "+=", "++", "->"};
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < line.size() && line[i + 1] == '/')
            break;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_' ||
                                       line[j] == '.'))
                ++j;
            out.push_back({TokKind::Ident, std::string(line.substr(i, j - i)), i + 1});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < line.size() && std::isalnum(static_cast<unsigned char>(line[j])))
                ++j;
            out.push_back({TokKind::Number, std::string(line.substr(i, j - i)), i + 1});
            i = j;
            continue;
        }
        bool matched = false;
        for (const char* two : kTwoChar) {
            if (line.substr(i, 2) == two) {
                out.push_back({TokKind::Punct, two, i + 1});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        if (std::string_view("[](){}+-*=;:,").find(c) != std::string_view::npos) {
            out.push_back({TokKind::Punct, std::string(1, c), i + 1});
            ++i;
            continue;
        }
        throw CasmSyntaxError(line_no, i + 1, std::string("unexpected character '") + c + "'");
    }
    return out;
}

struct MemRef {
    Register reg = Register::AP;
    std::int64_t off = 0;
};

struct Op1Operand {
    enum class Kind { Imm, Label, Mem, Deref } kind = Kind::Imm;
    BigInt imm;
    std::string label;
    MemRef mem;           // Mem: the cell; Deref: the op0 cell
    std::int64_t off = 0; // Deref: offset added to op0
};

struct ResExpr {
    bool binary = false;
    MemRef op0;
    char op = '+';
    Op1Operand op1;
};

struct Statement {
    enum class Kind { Instr, Raw, Label, Func } kind = Kind::Instr;
    std::size_t line = 0;
    std::size_t column = 0;
    Instruction instr;
    // Immediate for size-2 instructions: literal or label reference.
    std::optional<BigInt> imm;
    std::optional<std::string> imm_label;
    bool label_relative = true;
    BigInt raw;
    std::string name;
    FunctionDecl func;
};

class LineParser {
public:
    LineParser(std::vector<Token> toks, std::size_t line_no) : toks_(std::move(toks)), line_(line_no) {}

    bool at_end() const { return pos_ >= toks_.size(); }

    const Token& peek(std::size_t ahead = 0) const
    {
        static const Token kEnd{TokKind::Punct, "<end>", 0};
        return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : kEnd;
    }

    bool peek_is(std::string_view text, std::size_t ahead = 0) const
    {
        return pos_ + ahead < toks_.size() && toks_[pos_ + ahead].text == text;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        const std::size_t col = at_end() ? (toks_.empty() ? 1 : toks_.back().column + toks_.back().text.size())
                                         : peek().column;
        throw CasmSyntaxError(line_, col, what);
    }

    const Token& take()
    {
        if (at_end())
            fail("unexpected end of line");
        return toks_[pos_++];
    }

    void expect(std::string_view text)
    {
        if (!peek_is(text))
            fail("expected '" + std::string(text) + "', found '" + peek().text + "'");
        ++pos_;
    }

    bool accept(std::string_view text)
    {
        if (peek_is(text)) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string ident()
    {
        if (peek().kind != TokKind::Ident)
            fail("expected identifier, found '" + peek().text + "'");
        return take().text;
    }

    BigInt number()
    {
        if (peek().kind != TokKind::Number)
            fail("expected number, found '" + peek().text + "'");
        const Token& t = take();
        try {
            return parse_bigint(t.text);
        } catch (const std::invalid_argument&) {
            throw CasmSyntaxError(line_, t.column, "malformed number '" + t.text + "'");
        }
    }

    // INT | -INT | (-INT) | (INT)
    BigInt signed_number()
    {
        if (accept("(")) {
            BigInt v = signed_number();
            expect(")");
            return v;
        }
        if (accept("-"))
            return -number();
        return number();
    }

    std::int64_t offset_value()
    {
        BigInt v = signed_number();
        if (v < std::numeric_limits<std::int16_t>::min() || v > std::numeric_limits<std::int16_t>::max())
            fail("offset out of 16-bit range");
        return to_i64(v);
    }

    Register reg()
    {
        const std::string r = ident();
        if (r == "ap")
            return Register::AP;
        if (r == "fp")
            return Register::FP;
        fail("expected ap or fp, found '" + r + "'");
    }

    // After '[' has been consumed: reg [(+|-) offset] ']'
    MemRef memref_tail()
    {
        MemRef m;
        m.reg = reg();
        if (accept("+"))
            m.off = offset_value();
        else if (accept("-"))
            m.off = -offset_value();
        expect("]");
        return m;
    }

    MemRef memref()
    {
        expect("[");
        return memref_tail();
    }

    Op1Operand op1_operand(bool allow_label)
    {
        Op1Operand o;
        if (accept("[")) {
            if (accept("[")) {
                o.kind = Op1Operand::Kind::Deref;
                o.mem = memref_tail();
                if (accept("+"))
                    o.off = offset_value();
                else if (accept("-"))
                    o.off = -offset_value();
                expect("]");
            } else {
                o.kind = Op1Operand::Kind::Mem;
                o.mem = memref_tail();
            }
            return o;
        }
        if (allow_label && peek().kind == TokKind::Ident) {
            o.kind = Op1Operand::Kind::Label;
            o.label = ident();
            return o;
        }
        o.kind = Op1Operand::Kind::Imm;
        o.imm = signed_number();
        return o;
    }

    ResExpr res_expr()
    {
        ResExpr r;
        // Binary form starts with a plain memref followed by + or *.
        if (peek_is("[") && !peek_is("[", 1)) {
            std::size_t save = pos_;
            MemRef left = memref();
            if (peek_is("+") || peek_is("*")) {
                r.binary = true;
                r.op0 = left;
                r.op = take().text[0];
                r.op1 = op1_operand(false);
                if (r.op1.kind == Op1Operand::Kind::Deref)
                    fail("op1 of a binary expression cannot dereference op0");
                return r;
            }
            pos_ = save;
        }
        r.op1 = op1_operand(false);
        return r;
    }

    std::vector<std::string> ident_list(std::string_view close)
    {
        std::vector<std::string> out;
        if (accept(close))
            return out;
        out.push_back(ident());
        while (accept(","))
            out.push_back(ident());
        expect(close);
        return out;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

void check_offset(const LineParser& p, std::int64_t off)
{
    if (off < std::numeric_limits<std::int16_t>::min() || off > std::numeric_limits<std::int16_t>::max())
        p.fail("offset out of 16-bit range");
}

void set_op1(LineParser& p, Statement& st, const Op1Operand& o)
{
    Instruction& i = st.instr;
    switch (o.kind) {
    case Op1Operand::Kind::Imm:
        i.op1_src = Op1Source::Imm;
        i.off_op1 = 1;
        st.imm = o.imm;
        break;
    case Op1Operand::Kind::Label:
        i.op1_src = Op1Source::Imm;
        i.off_op1 = 1;
        st.imm_label = o.label;
        break;
    case Op1Operand::Kind::Mem:
        check_offset(p, o.mem.off);
        i.op1_src = o.mem.reg == Register::AP ? Op1Source::ApDeref : Op1Source::FpDeref;
        i.off_op1 = static_cast<std::int16_t>(o.mem.off);
        break;
    case Op1Operand::Kind::Deref:
        check_offset(p, o.mem.off);
        check_offset(p, o.off);
        i.op1_src = Op1Source::Op0Deref;
        i.op0_reg = o.mem.reg;
        i.off_op0 = static_cast<std::int16_t>(o.mem.off);
        i.off_op1 = static_cast<std::int16_t>(o.off);
        break;
    }
}

void set_res(LineParser& p, Statement& st, const ResExpr& r)
{
    if (!r.binary) {
        set_op1(p, st, r.op1);
        st.instr.res = ResLogic::Op1;
        return;
    }
    check_offset(p, r.op0.off);
    st.instr.op0_reg = r.op0.reg;
    st.instr.off_op0 = static_cast<std::int16_t>(r.op0.off);
    set_op1(p, st, r.op1);
    st.instr.res = r.op == '+' ? ResLogic::Add : ResLogic::Mul;
}

// Defaults for operands the instruction does not use.
Instruction blank()
{
    Instruction i;
    i.dst_reg = Register::FP;
    i.off_dst = -1;
    i.op0_reg = Register::FP;
    i.off_op0 = -1;
    i.op1_src = Op1Source::Imm;
    i.off_op1 = 1;
    return i;
}

Statement parse_statement(LineParser& p, std::size_t line_no)
{
    Statement st;
    st.line = line_no;
    st.column = p.peek().column;

    if (p.peek_is("func")) {
        p.take();
        st.kind = Statement::Kind::Func;
        st.func.name = p.ident();
        if (p.accept("{"))
            st.func.implicit_args = p.ident_list("}");
        p.expect("(");
        st.func.args = p.ident_list(")");
        if (p.accept("->")) {
            p.expect("(");
            st.func.rets = p.ident_list(")");
        }
        p.expect(":");
        return st;
    }
    if (p.peek().kind == TokKind::Ident && p.peek_is(":", 1)) {
        st.kind = Statement::Kind::Label;
        st.name = p.ident();
        p.expect(":");
        return st;
    }
    if (p.accept("dw")) {
        st.kind = Statement::Kind::Raw;
        st.raw = p.signed_number();
        return st;
    }

    st.instr = blank();
    Instruction& i = st.instr;
    if (p.accept("ret")) {
        i = make_ret();
    } else if (p.accept("call")) {
        const bool rel = p.peek_is("rel");
        if (!p.accept("rel") && !p.accept("abs"))
            p.fail("expected 'rel' or 'abs' after call");
        i = rel ? make_call_rel_imm() : make_call_abs_imm();
        st.label_relative = rel;
        set_op1(p, st, p.op1_operand(true));
        if (st.instr.op1_src == Op1Source::Op0Deref)
            p.fail("call target cannot dereference op0");
    } else if (p.accept("jmp")) {
        const bool rel = p.peek_is("rel");
        if (!p.accept("rel") && !p.accept("abs"))
            p.fail("expected 'rel' or 'abs' after jmp");
        st.label_relative = rel;
        Op1Operand target = p.op1_operand(true);
        if (p.accept("if")) {
            if (!rel)
                p.fail("conditional jumps are relative");
            MemRef cond = p.memref();
            p.expect("!=");
            if (p.signed_number() != 0)
                p.fail("conditional jump compares against 0");
            check_offset(p, cond.off);
            i.dst_reg = cond.reg;
            i.off_dst = static_cast<std::int16_t>(cond.off);
            set_op1(p, st, target);
            i.res = ResLogic::Unconstrained;
            i.pc_update = PcUpdate::Jnz;
        } else {
            set_op1(p, st, target);
            i.res = ResLogic::Op1;
            i.pc_update = rel ? PcUpdate::JumpRel : PcUpdate::JumpAbs;
        }
    } else if (p.peek_is("ap") && p.peek_is("+=", 1)) {
        p.take();
        p.take();
        set_res(p, st, p.res_expr());
        i.ap_update = ApUpdate::AddRes;
    } else if (p.peek_is("[")) {
        MemRef dst = p.memref();
        check_offset(p, dst.off);
        p.expect("=");
        i.dst_reg = dst.reg;
        i.off_dst = static_cast<std::int16_t>(dst.off);
        set_res(p, st, p.res_expr());
        i.opcode = Opcode::AssertEq;
    } else {
        p.fail("unknown statement starting with '" + p.peek().text + "'");
    }

    if (p.accept(";")) {
        p.expect("ap");
        p.expect("++");
        if (i.ap_update != ApUpdate::Regular)
            p.fail("ap++ conflicts with another ap update");
        i.ap_update = ApUpdate::Add1;
    }
    if (auto why = i.violation())
        p.fail("invalid instruction: " + *why);
    return st;
}

}  // namespace

Program parse_casm(std::string_view text, const FieldConfig& cfg, const BigInt& base_pc)
{
    std::vector<Statement> stmts;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        auto toks = tokenize(line, line_no);
        if (!toks.empty()) {
            LineParser p(std::move(toks), line_no);
            stmts.push_back(parse_statement(p, line_no));
            if (!p.at_end())
                p.fail("trailing tokens starting at '" + p.peek().text + "'");
        }
        start = end + 1;
    }

    Program prog;
    prog.base_pc = base_pc;

    // Pass 1: offsets of labels and functions.
    std::size_t offset = 0;
    for (const auto& st : stmts) {
        switch (st.kind) {
        case Statement::Kind::Label:
        case Statement::Kind::Func: {
            const std::string& name = st.kind == Statement::Kind::Label ? st.name : st.func.name;
            if (prog.labels.count(name))
                throw CasmSyntaxError(st.line, st.column, "duplicate label '" + name + "'");
            prog.labels[name] = offset;
            if (st.kind == Statement::Kind::Func) {
                FunctionDecl f = st.func;
                f.offset = offset;
                prog.functions.push_back(std::move(f));
            }
            break;
        }
        case Statement::Kind::Raw: offset += 1; break;
        case Statement::Kind::Instr: offset += st.instr.size(); break;
        }
    }

    // Pass 2: encode.
    offset = 0;
    for (const auto& st : stmts) {
        if (st.kind == Statement::Kind::Raw) {
            prog.words.push_back(mod_floor(st.raw, cfg.modulus));
            offset += 1;
            continue;
        }
        if (st.kind != Statement::Kind::Instr)
            continue;
        prog.words.push_back(from_u64(encode(st.instr)));
        if (st.instr.size() == 2) {
            BigInt imm;
            if (st.imm_label) {
                auto it = prog.labels.find(*st.imm_label);
                if (it == prog.labels.end())
                    throw CasmSyntaxError(st.line, st.column, "unresolved label '" + *st.imm_label + "'");
                imm = st.label_relative ? from_i64(static_cast<std::int64_t>(it->second) - static_cast<std::int64_t>(offset))
                                        : base_pc + from_u64(it->second);
            } else {
                imm = *st.imm;
            }
            prog.words.push_back(mod_floor(imm, cfg.modulus));
        }
        offset += st.instr.size();
    }
    return prog;
}

namespace {

std::string fmt_offset_cell(Register reg, std::int64_t off)
{
    const std::string r = reg == Register::AP ? "ap" : "fp";
    if (off == 0)
        return "[" + r + "]";
    if (off < 0)
        return "[" + r + " + (" + std::to_string(off) + ")]";
    return "[" + r + " + " + std::to_string(off) + "]";
}

std::string fmt_signed(const BigInt& v, bool paren_negative)
{
    if (v < 0)
        return paren_negative ? "(" + to_dec(v) + ")" : to_dec(v);
    return to_dec(v);
}

// op1 text; `paren_negative` wraps negative immediates in parentheses.
std::optional<std::string> fmt_op1(const Instruction& i, const std::optional<BigInt>& imm, const FieldConfig& cfg,
                                   bool paren_negative)
{
    switch (i.op1_src) {
    case Op1Source::Imm:
        if (!imm || i.off_op1 != 1)
            return std::nullopt;
        return fmt_signed(Felt(*imm, cfg).to_signed(), paren_negative);
    case Op1Source::FpDeref: return fmt_offset_cell(Register::FP, i.off_op1);
    case Op1Source::ApDeref: return fmt_offset_cell(Register::AP, i.off_op1);
    case Op1Source::Op0Deref: {
        std::string inner = fmt_offset_cell(i.op0_reg, i.off_op0);
        if (i.off_op1 == 0)
            return "[" + inner + "]";
        if (i.off_op1 < 0)
            return "[" + inner + " + (" + std::to_string(i.off_op1) + ")]";
        return "[" + inner + " + " + std::to_string(i.off_op1) + "]";
    }
    }
    return std::nullopt;
}

std::optional<std::string> fmt_res(const Instruction& i, const std::optional<BigInt>& imm, const FieldConfig& cfg,
                                   bool paren_negative)
{
    switch (i.res) {
    case ResLogic::Op1: return fmt_op1(i, imm, cfg, paren_negative);
    case ResLogic::Add:
    case ResLogic::Mul: {
        if (i.op1_src == Op1Source::Op0Deref)
            return std::nullopt;
        auto rhs = fmt_op1(i, imm, cfg, true);
        if (!rhs)
            return std::nullopt;
        return fmt_offset_cell(i.op0_reg, i.off_op0) + (i.res == ResLogic::Add ? " + " : " * ") + *rhs;
    }
    case ResLogic::Unconstrained: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<std::string> render(const Instruction& i, const std::optional<BigInt>& imm, const FieldConfig& cfg)
{
    std::string body;
    switch (i.opcode) {
    case Opcode::Ret:
        if (!(i == make_ret()))
            return std::nullopt;
        return std::string("ret");
    case Opcode::Call: {
        auto target = fmt_op1(i, imm, cfg, false);
        if (!target || i.res != ResLogic::Op1 || i.op1_src == Op1Source::Op0Deref)
            return std::nullopt;
        body = std::string("call ") + (i.pc_update == PcUpdate::JumpRel ? "rel " : "abs ") + *target;
        break;
    }
    case Opcode::AssertEq: {
        auto res = fmt_res(i, imm, cfg, false);
        if (!res)
            return std::nullopt;
        body = fmt_offset_cell(i.dst_reg, i.off_dst) + " = " + *res;
        break;
    }
    case Opcode::Nop: {
        if (i.pc_update == PcUpdate::Jnz) {
            auto target = fmt_op1(i, imm, cfg, false);
            if (!target)
                return std::nullopt;
            body = "jmp rel " + *target + " if " + fmt_offset_cell(i.dst_reg, i.off_dst) + " != 0";
        } else if (i.pc_update == PcUpdate::JumpRel || i.pc_update == PcUpdate::JumpAbs) {
            if (i.res != ResLogic::Op1 || i.op1_src == Op1Source::Op0Deref)
                return std::nullopt;
            auto target = fmt_op1(i, imm, cfg, false);
            if (!target)
                return std::nullopt;
            body = std::string("jmp ") + (i.pc_update == PcUpdate::JumpRel ? "rel " : "abs ") + *target;
        } else if (i.ap_update == ApUpdate::AddRes) {
            auto res = fmt_res(i, imm, cfg, false);
            if (!res)
                return std::nullopt;
            return "ap += " + *res;
        } else {
            return std::nullopt;
        }
        break;
    }
    }
    if (i.ap_update == ApUpdate::Add1)
        body += "; ap++";
    else if (i.ap_update == ApUpdate::AddRes)
        return std::nullopt;
    return body;
}

}  // namespace

std::optional<std::string> format_instruction(const Instruction& instr, const std::optional<BigInt>& immediate,
                                              const FieldConfig& cfg)
{
    auto text = render(instr, immediate, cfg);
    if (!text)
        return std::nullopt;
    // Only canonical text: it must assemble back to the same words.
    try {
        Program back = parse_casm(*text, cfg);
        std::vector<BigInt> expect{from_u64(encode(instr))};
        if (instr.size() == 2)
            expect.push_back(mod_floor(*immediate, cfg.modulus));
        if (back.words != expect)
            return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return text;
}

std::string print_casm(const Program& program, const FieldConfig& cfg)
{
    std::ostringstream out;
    auto emit_labels = [&](std::size_t offset) {
        for (const auto& f : program.functions) {
            if (f.offset != offset)
                continue;
            out << "func " << f.name;
            if (!f.implicit_args.empty()) {
                out << "{";
                for (std::size_t k = 0; k < f.implicit_args.size(); ++k)
                    out << (k ? ", " : "") << f.implicit_args[k];
                out << "}";
            }
            out << "(";
            for (std::size_t k = 0; k < f.args.size(); ++k)
                out << (k ? ", " : "") << f.args[k];
            out << ")";
            if (!f.rets.empty()) {
                out << " -> (";
                for (std::size_t k = 0; k < f.rets.size(); ++k)
                    out << (k ? ", " : "") << f.rets[k];
                out << ")";
            }
            out << ":\n";
        }
        for (const auto& [name, off] : program.labels)
            if (off == offset && !program.function_named(name))
                out << name << ":\n";
    };

    std::size_t at = 0;
    while (at < program.words.size()) {
        emit_labels(at);
        Decoded d = decode(program.words[at]);
        const Instruction* instr = std::get_if<Instruction>(&d);
        if (instr && at + instr->size() <= program.words.size()) {
            std::optional<BigInt> imm;
            if (instr->size() == 2)
                imm = program.words[at + 1];
            if (auto text = format_instruction(*instr, imm, cfg)) {
                out << *text << "\n";
                at += instr->size();
                continue;
            }
        }
        out << "dw " << to_hex(program.words[at]) << "\n";
        ++at;
    }
    emit_labels(at);
    return out.str();
}

}  // namespace cairovm
