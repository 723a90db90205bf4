#include "cairovm/specgen.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cairovm::spec {

const char* to_string(SpecErrorKind kind)
{
    switch (kind) {
    case SpecErrorKind::IllFormed: return "IllFormed";
    case SpecErrorKind::OutOfBounds: return "OutOfBounds";
    case SpecErrorKind::UnsupportedControlFlow: return "UnsupportedControlFlow";
    case SpecErrorKind::RevokedReference: return "RevokedReference";
    case SpecErrorKind::UnknownCallee: return "UnknownCallee";
    }
    return "?";
}

SpecError::SpecError(SpecErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

const char* to_string(Terminator t)
{
    switch (t) {
    case Terminator::Ret: return "ret";
    case Terminator::Jmp: return "jmp";
    case Terminator::Jnz: return "jnz";
    case Terminator::FallThrough: return "fallthrough";
    case Terminator::Halt: return "halt";
    }
    return "?";
}

namespace {

struct Decoded1 {
    Instruction instr;
    std::optional<BigInt> imm;  // signed
};

using InstrMap = std::map<std::size_t, Decoded1>;

InstrMap decode_all(const Program& prog, const FieldConfig& cfg)
{
    std::vector<std::size_t> offs;
    try {
        offs = prog.instruction_offsets();
    } catch (const std::runtime_error& e) {
        throw SpecError(SpecErrorKind::IllFormed, e.what());
    }
    InstrMap out;
    for (std::size_t o : offs) {
        Decoded1 d{std::get<Instruction>(decode(prog.words[o])), std::nullopt};
        if (d.instr.size() == 2)
            d.imm = Felt(prog.words[o + 1], cfg).to_signed();
        out.emplace(o, d);
    }
    return out;
}

std::int64_t small(const BigInt& v, const std::string& what)
{
    if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max())
        throw SpecError(SpecErrorKind::OutOfBounds, what + " " + to_dec(v) + " is out of range");
    return to_i64(v);
}

bool is_halt(const Decoded1& d)
{
    return d.imm && is_halting_jump(d.instr, *d.imm);
}

// Target word offset of a jump or call with an immediate operand.
std::int64_t imm_target(const Program& prog, std::size_t at, const Decoded1& d, bool relative)
{
    if (!d.imm || (d.instr.res != ResLogic::Op1 && d.instr.pc_update != PcUpdate::Jnz))
        throw SpecError(SpecErrorKind::UnsupportedControlFlow,
                        "computed jump target at offset " + std::to_string(at));
    if (relative)
        return static_cast<std::int64_t>(at) + small(*d.imm, "jump offset");
    return small(*d.imm - prog.base_pc, "absolute target");
}

bool relative_pc(const Instruction& i)
{
    return i.pc_update == PcUpdate::JumpRel || i.pc_update == PcUpdate::Jnz;
}

std::string subscript(std::size_t k)
{
    static const char* const digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
    std::string s = std::to_string(k);
    std::string out;
    for (char c : s)
        out += digits[c - '0'];
    return out;
}

}  // namespace

// ---------------------------------------------------------------- cfg

const CfgFunction* Cfg::function_at(std::size_t entry) const
{
    for (const auto& f : functions)
        if (f.entry == entry)
            return &f;
    return nullptr;
}

const CfgFunction* Cfg::function_named(const std::string& name) const
{
    for (const auto& f : functions)
        if (f.name == name)
            return &f;
    return nullptr;
}

const BasicBlock& Cfg::block_containing(std::size_t offset) const
{
    auto it = blocks.upper_bound(offset);
    if (it == blocks.begin())
        throw std::out_of_range("no block contains offset " + std::to_string(offset));
    --it;
    if (offset >= it->second.end)
        throw std::out_of_range("no block contains offset " + std::to_string(offset));
    return it->second;
}

std::size_t Cfg::edge_count() const
{
    std::size_t n = 0;
    for (const auto& [s, b] : blocks)
        n += b.succs.size();
    return n;
}

namespace {

void check_acyclic_without_back_edges(const Cfg& cfg, const CfgFunction& fn,
                                      const std::set<std::pair<std::size_t, std::size_t>>& back)
{
    // 0 = unvisited, 1 = on stack, 2 = done
    std::map<std::size_t, int> color;
    std::function<void(std::size_t)> dfs = [&](std::size_t b) {
        color[b] = 1;
        for (std::size_t s : cfg.blocks.at(b).succs) {
            if (back.count({b, s}))
                continue;
            if (color[s] == 1)
                throw SpecError(SpecErrorKind::UnsupportedControlFlow,
                                "irreducible control flow in " + fn.name + " (cycle through offset " +
                                    std::to_string(s) + " without a dominating header)");
            if (color[s] == 0)
                dfs(s);
        }
        color[b] = 2;
    };
    dfs(fn.entry);
}

std::vector<std::pair<std::size_t, std::size_t>> find_back_edges(const Cfg& cfg, const CfgFunction& fn)
{
    // Iterative dominator sets; functions are small.
    const auto& ids = fn.blocks;
    std::map<std::size_t, std::set<std::size_t>> dom;
    const std::set<std::size_t> all(ids.begin(), ids.end());
    for (std::size_t b : ids)
        dom[b] = b == fn.entry ? std::set<std::size_t>{b} : all;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t b : ids) {
            if (b == fn.entry)
                continue;
            std::set<std::size_t> meet;
            bool first = true;
            for (std::size_t p : cfg.blocks.at(b).preds) {
                if (!dom.count(p))
                    continue;
                if (first) {
                    meet = dom[p];
                    first = false;
                } else {
                    std::set<std::size_t> tmp;
                    std::set_intersection(meet.begin(), meet.end(), dom[p].begin(), dom[p].end(),
                                          std::inserter(tmp, tmp.begin()));
                    meet = std::move(tmp);
                }
            }
            meet.insert(b);
            if (meet != dom[b]) {
                dom[b] = std::move(meet);
                changed = true;
            }
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> back;
    for (std::size_t b : ids)
        for (std::size_t s : cfg.blocks.at(b).succs)
            if (dom[b].count(s))
                back.emplace_back(b, s);
    return back;
}

}  // namespace

Cfg build_cfg(const Program& prog, const FieldConfig& field)
{
    const InstrMap instrs = decode_all(prog, field);
    const auto n = static_cast<std::int64_t>(prog.words.size());

    Cfg cfg;
    cfg.program = &prog;
    cfg.field = &field;

    // Function entries.
    std::set<std::size_t> entries;
    for (const auto& f : prog.functions)
        entries.insert(f.offset);
    std::map<std::size_t, std::vector<CallSite>> calls_from;  // by call offset
    for (const auto& [at, d] : instrs) {
        if (d.instr.opcode != Opcode::Call)
            continue;
        if (!d.imm)
            throw SpecError(SpecErrorKind::UnsupportedControlFlow,
                            "computed call target at offset " + std::to_string(at));
        const std::int64_t t = imm_target(prog, at, d, d.instr.pc_update == PcUpdate::JumpRel);
        const bool external = t < 0 || t >= n;
        if (!external) {
            if (!instrs.count(static_cast<std::size_t>(t)))
                throw SpecError(SpecErrorKind::OutOfBounds,
                                "call at " + std::to_string(at) + " targets the middle of an instruction");
            entries.insert(static_cast<std::size_t>(t));
        }
        calls_from[at].push_back({at, t, external});
    }
    if (entries.empty() && !instrs.empty())
        entries.insert(0);

    // Leaders: entries, jump targets, and instructions after a terminator.
    std::set<std::size_t> leaders = entries;
    std::map<std::size_t, std::vector<std::size_t>> jump_targets;
    for (const auto& [at, d] : instrs) {
        const Instruction& i = d.instr;
        const std::size_t next = at + i.size();
        const bool jumps = i.opcode != Opcode::Call && i.opcode != Opcode::Ret &&
                           (i.pc_update == PcUpdate::JumpAbs || i.pc_update == PcUpdate::JumpRel ||
                            i.pc_update == PcUpdate::Jnz);
        if (i.opcode == Opcode::Ret || jumps)
            leaders.insert(next);
        if (jumps && !is_halt(d)) {
            const std::int64_t t = imm_target(prog, at, d, relative_pc(i));
            if (t < 0 || t >= n || !instrs.count(static_cast<std::size_t>(t)))
                throw SpecError(SpecErrorKind::OutOfBounds,
                                "jump at offset " + std::to_string(at) + " leaves the program (target " +
                                    std::to_string(t) + ")");
            leaders.insert(static_cast<std::size_t>(t));
            jump_targets[at].push_back(static_cast<std::size_t>(t));
        }
    }

    auto build_block = [&](std::size_t start, std::size_t owner) {
        BasicBlock b;
        b.start = start;
        b.function = owner;
        std::size_t at = start;
        for (;;) {
            auto it = instrs.find(at);
            if (it == instrs.end())
                throw SpecError(SpecErrorKind::OutOfBounds,
                                "execution falls off the end of the program after offset " + std::to_string(start));
            const Decoded1& d = it->second;
            const Instruction& i = d.instr;
            const std::size_t next = at + i.size();
            if (i.opcode == Opcode::Ret) {
                b.term = Terminator::Ret;
                b.end = next;
                return b;
            }
            if (is_halt(d)) {
                b.term = Terminator::Halt;
                b.end = next;
                return b;
            }
            if (i.opcode != Opcode::Call && (i.pc_update == PcUpdate::JumpAbs || i.pc_update == PcUpdate::JumpRel)) {
                b.term = Terminator::Jmp;
                b.end = next;
                b.succs = jump_targets.at(at);
                return b;
            }
            if (i.pc_update == PcUpdate::Jnz) {
                b.term = Terminator::Jnz;
                b.end = next;
                if (next >= prog.words.size())
                    throw SpecError(SpecErrorKind::OutOfBounds, "jnz at the end of the program");
                b.succs = {next, jump_targets.at(at).front()};
                if (b.succs[0] == b.succs[1])
                    b.succs.pop_back();
                return b;
            }
            if (next >= prog.words.size())
                throw SpecError(SpecErrorKind::OutOfBounds,
                                "execution falls off the end of the program at offset " + std::to_string(at));
            if (leaders.count(next)) {
                b.term = Terminator::FallThrough;
                b.end = next;
                b.succs = {next};
                return b;
            }
            at = next;
        }
    };

    for (std::size_t entry : entries) {
        CfgFunction fn;
        fn.entry = entry;
        if (const FunctionDecl* d = prog.function_at(entry))
            fn.decl = *d;
        if (fn.decl)
            fn.name = fn.decl->name;
        else if (auto label = prog.label_at(entry))
            fn.name = *label;
        else
            fn.name = "fn_" + std::to_string(entry);

        std::deque<std::size_t> work{entry};
        std::set<std::size_t> seen{entry};
        while (!work.empty()) {
            const std::size_t s = work.front();
            work.pop_front();
            if (!cfg.blocks.count(s))
                cfg.blocks.emplace(s, build_block(s, entry));
            if (cfg.blocks.at(s).function == entry)
                fn.blocks.push_back(s);
            for (std::size_t t : cfg.blocks.at(s).succs)
                if (seen.insert(t).second)
                    work.push_back(t);
        }
        std::sort(fn.blocks.begin(), fn.blocks.end());
        for (std::size_t b : fn.blocks)
            for (std::size_t at = b; at < cfg.blocks.at(b).end; at += instrs.at(at).instr.size())
                if (calls_from.count(at))
                    for (const auto& c : calls_from.at(at))
                        fn.calls.push_back(c);
        cfg.functions.push_back(std::move(fn));
    }

    for (auto& [s, b] : cfg.blocks)
        for (std::size_t t : b.succs)
            cfg.blocks.at(t).preds.push_back(s);
    for (auto& [s, b] : cfg.blocks) {
        std::sort(b.preds.begin(), b.preds.end());
        const std::size_t implicit = entries.count(s) ? 1 : 0;
        b.join = b.preds.size() + implicit > 1;
    }

    for (const auto& fn : cfg.functions) {
        auto back = find_back_edges(cfg, fn);
        check_acyclic_without_back_edges(cfg, fn, {back.begin(), back.end()});
        cfg.back_edges.insert(cfg.back_edges.end(), back.begin(), back.end());
    }
    return cfg;
}

// ---------------------------------------------------------------- ap flow

namespace {

struct Lattice {
    enum class State { Unset, Known, Unknown } state = State::Unset;
    std::int64_t value = 0;

    bool join(const Lattice& o)
    {
        if (o.state == State::Unset || state == State::Unknown)
            return false;
        if (state == State::Unset) {
            *this = o;
            return true;
        }
        if (o.state == State::Unknown || o.value != value) {
            state = State::Unknown;
            return true;
        }
        return false;
    }

    std::optional<std::int64_t> get() const
    {
        if (state == State::Known)
            return value;
        return std::nullopt;
    }
};

Lattice known(std::int64_t v)
{
    return {Lattice::State::Known, v};
}

Lattice unknown()
{
    return {Lattice::State::Unknown, 0};
}

std::optional<std::int64_t> callee_delta(const ApFlow& flow, const CallSite& c,
                                         const std::map<std::int64_t, ExternalCallee>& externals)
{
    if (auto it = externals.find(c.target); it != externals.end())
        return it->second.ap_delta;
    if (c.external)
        return std::nullopt;
    auto it = flow.delta.find(static_cast<std::size_t>(c.target));
    if (it == flow.delta.end())
        return std::nullopt;
    return it->second;
}

void track_function(const Cfg& cfg, const InstrMap& instrs, const CfgFunction& fn, ApFlow& flow,
                    const std::map<std::int64_t, ExternalCallee>& externals)
{
    std::map<std::size_t, Lattice> in;
    in[fn.entry] = known(0);
    std::deque<std::size_t> work{fn.entry};
    std::map<std::size_t, const CallSite*> call_at;
    for (const auto& c : fn.calls)
        call_at[c.at] = &c;

    Lattice at_ret;
    while (!work.empty()) {
        const std::size_t at = work.front();
        work.pop_front();
        const Decoded1& d = instrs.at(at);
        const Instruction& i = d.instr;
        const Lattice cur = in[at];

        Lattice out = cur;
        if (cur.state == Lattice::State::Known) {
            if (i.opcode == Opcode::Call) {
                auto delta = callee_delta(flow, *call_at.at(at), externals);
                out = delta ? known(cur.value + 2 + *delta) : unknown();
            } else if (i.ap_update == ApUpdate::Add1) {
                out = known(cur.value + 1);
            } else if (i.ap_update == ApUpdate::AddRes) {
                if (i.res == ResLogic::Op1 && d.imm)
                    out = known(cur.value + small(*d.imm, "ap increment"));
                else
                    out = unknown();
            }
        }

        if (i.opcode == Opcode::Ret) {
            at_ret.join(cur);
            continue;
        }
        if (is_halt(d))
            continue;

        std::vector<std::size_t> succ;
        const BasicBlock& blk = cfg.block_containing(at);
        const std::size_t next = at + i.size();
        if (next < blk.end)
            succ.push_back(next);
        else
            succ = blk.succs;
        for (std::size_t s : succ)
            if (in[s].join(out) && std::find(work.begin(), work.end(), s) == work.end())
                work.push_back(s);
    }
    for (const auto& [o, l] : in)
        flow.at[o] = l.get();
    flow.delta[fn.entry] = at_ret.get();
}

}  // namespace

ApFlow track_ap(const Cfg& cfg, const std::map<std::int64_t, ExternalCallee>& externals)
{
    const InstrMap instrs = decode_all(*cfg.program, *cfg.field);
    ApFlow flow;

    // Callees before callers; recursive calls see an unknown delta.
    std::set<std::size_t> done, active;
    std::function<void(const CfgFunction&)> visit = [&](const CfgFunction& fn) {
        if (done.count(fn.entry) || active.count(fn.entry))
            return;
        active.insert(fn.entry);
        for (const auto& c : fn.calls)
            if (!c.external)
                if (const auto* callee = cfg.function_at(static_cast<std::size_t>(c.target)))
                    visit(*callee);
        track_function(cfg, instrs, fn, flow, externals);
        active.erase(fn.entry);
        done.insert(fn.entry);
    };
    for (const auto& fn : cfg.functions)
        visit(fn);
    return flow;
}

// ---------------------------------------------------------------- ast

ExprPtr Expr::constant(BigInt v)
{
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Const;
    e->value = std::move(v);
    return e;
}

ExprPtr Expr::var(std::string n)
{
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->name = std::move(n);
    return e;
}

ExprPtr Expr::mem(ExprPtr addr)
{
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Mem;
    e->a = std::move(addr);
    return e;
}

ExprPtr Expr::add(ExprPtr x, ExprPtr y)
{
    if (y->kind == Kind::Const && y->value == 0)
        return x;
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Add;
    e->a = std::move(x);
    e->b = std::move(y);
    return e;
}

ExprPtr Expr::mul(ExprPtr x, ExprPtr y)
{
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Mul;
    e->a = std::move(x);
    e->b = std::move(y);
    return e;
}

namespace {

bool atomic(const ExprPtr& e)
{
    return e->kind == Expr::Kind::Var || (e->kind == Expr::Kind::Const && e->value >= 0);
}

std::string paren(const ExprPtr& e)
{
    return atomic(e) ? render(e) : "(" + render(e) + ")";
}

}  // namespace

std::string render(const ExprPtr& e)
{
    switch (e->kind) {
    case Expr::Kind::Const: return to_dec(e->value);
    case Expr::Kind::Var: return e->name;
    case Expr::Kind::Mem: return "mem (" + render(e->a) + ")";
    case Expr::Kind::Add:
        if (e->b->kind == Expr::Kind::Const && e->b->value < 0)
            return render(e->a) + " - " + to_dec(-e->b->value);
        return render(e->a) + " + " + (e->b->kind == Expr::Kind::Add ? paren(e->b) : render(e->b));
    case Expr::Kind::Mul: {
        auto side = [](const ExprPtr& x) { return x->kind == Expr::Kind::Add ? "(" + render(x) + ")" : render(x); };
        return side(e->a) + " * " + side(e->b);
    }
    }
    return "?";
}

SpecPtr Spec::truth()
{
    return std::make_shared<Spec>();
}

SpecPtr Spec::exists(std::vector<Binder> binders, SpecPtr body)
{
    if (binders.empty())
        return body;
    auto s = std::make_shared<Spec>();
    s->kind = Kind::Exists;
    s->binders = std::move(binders);
    s->body = std::move(body);
    return s;
}

SpecPtr Spec::eq(ExprPtr l, ExprPtr r)
{
    auto s = std::make_shared<Spec>();
    s->kind = Kind::Eq;
    s->lhs = std::move(l);
    s->rhs = std::move(r);
    return s;
}

SpecPtr Spec::ne(ExprPtr l, ExprPtr r)
{
    auto s = std::make_shared<Spec>();
    s->kind = Kind::Ne;
    s->lhs = std::move(l);
    s->rhs = std::move(r);
    return s;
}

SpecPtr Spec::range_checked(ExprPtr x)
{
    auto s = std::make_shared<Spec>();
    s->kind = Kind::RangeChecked;
    s->lhs = std::move(x);
    return s;
}

SpecPtr Spec::conj(std::vector<SpecPtr> parts)
{
    std::vector<SpecPtr> flat;
    for (auto& p : parts) {
        if (p->kind == Kind::True)
            continue;
        if (p->kind == Kind::And)
            flat.insert(flat.end(), p->parts.begin(), p->parts.end());
        else
            flat.push_back(std::move(p));
    }
    if (flat.empty())
        return truth();
    if (flat.size() == 1)
        return flat.front();
    auto s = std::make_shared<Spec>();
    s->kind = Kind::And;
    s->parts = std::move(flat);
    return s;
}

SpecPtr Spec::disj(std::vector<SpecPtr> parts)
{
    auto s = std::make_shared<Spec>();
    s->kind = Kind::Or;
    s->parts = std::move(parts);
    return s;
}

SpecPtr Spec::call(std::string callee, std::string kappa, std::vector<ExprPtr> args, std::vector<ExprPtr> rets)
{
    auto s = std::make_shared<Spec>();
    s->kind = Kind::CallSpec;
    s->callee = std::move(callee);
    s->kappa = std::move(kappa);
    s->args = std::move(args);
    s->rets = std::move(rets);
    return s;
}

SpecPtr Spec::steps(BigInt constant, std::vector<std::string> kappas)
{
    auto s = std::make_shared<Spec>();
    s->kind = Kind::StepLowerBound;
    s->constant = std::move(constant);
    s->kappas = std::move(kappas);
    return s;
}

SpecPtr Spec::block_ref(std::string function, std::size_t block, std::string kappa, std::vector<ExprPtr> args)
{
    auto s = std::make_shared<Spec>();
    s->kind = Kind::BlockRef;
    s->function = std::move(function);
    s->block = block;
    s->kappa = std::move(kappa);
    s->args = std::move(args);
    return s;
}

std::vector<SpecPtr> atoms(const SpecPtr& s)
{
    std::vector<SpecPtr> out;
    std::function<void(const SpecPtr&)> walk = [&](const SpecPtr& x) {
        if (x->kind == Spec::Kind::And)
            for (const auto& p : x->parts)
                walk(p);
        else if (x->kind == Spec::Kind::Exists)
            walk(x->body);
        else
            out.push_back(x);
    };
    walk(s);
    return out;
}

const FunctionSpec* Extraction::spec_named(const std::string& name) const
{
    for (const auto& s : specs)
        if (s.name == name)
            return &s;
    return nullptr;
}

// ---------------------------------------------------------------- extraction

namespace {

std::string block_unit_name(const std::string& fn, std::size_t block)
{
    return fn + "_block" + std::to_string(block);
}

struct SymState {
    std::map<std::int64_t, ExprPtr> cells;  // fp-relative
    BigInt steps = 0;
    std::vector<std::string> kappas;
};

class Extractor {
public:
    Extractor(const Program& prog, const FieldConfig& field, const Cfg& cfg, const ApFlow& flow, const InstrMap& instrs,
              const ExtractOptions& opts)
        : prog_(prog), field_(field), cfg_(cfg), flow_(flow), instrs_(instrs), opts_(opts)
    {
    }

    FunctionSpec function_spec(const CfgFunction& fn)
    {
        FunctionSpec fs;
        fs.name = fn.name;
        fs.entry = fn.entry;
        SymState st = begin(fn, fs);
        fs.body = step(fn, fn.entry, std::move(st), false);
        return fs;
    }

    FunctionSpec block_spec(const CfgFunction& fn, std::size_t block)
    {
        FunctionSpec fs;
        fs.name = block_unit_name(fn.name, block);
        fs.entry = block;
        fs.is_block = true;
        SymState st = begin(fn, fs);
        fs.body = step(fn, block, std::move(st), false);
        return fs;
    }

private:
    SymState begin(const CfgFunction& fn, FunctionSpec& fs)
    {
        counters_.clear();
        rc_vars_.clear();
        rho_.clear();
        SymState st;
        if (!fn.decl)
            return st;
        const auto args = fn.decl->all_args();
        const auto n = static_cast<std::int64_t>(args.size());
        for (std::int64_t k = 0; k < n; ++k) {
            st.cells[-(2 + n) + k] = Expr::var(args[k]);
            fs.params.push_back(args[k]);
            if (opts_.rc_pointer_names.count(args[k]))
                rc_vars_.insert(args[k]);
        }
        for (const auto& r : fn.decl->all_rets()) {
            rho_.push_back("ρ_" + r);
            fs.rets.push_back(rho_.back());
        }
        return st;
    }

    std::string fresh(const std::string& base)
    {
        return base + subscript(++counters_[base]);
    }

    // Name for a new variable holding `value`: pointers derived from a
    // range-check pointer keep that family's name.
    std::string fresh_for(const ExprPtr& value)
    {
        if (auto fam = rc_family(value)) {
            std::string name = fresh(*fam);
            rc_vars_.insert(name);
            family_[name] = *fam;
            return name;
        }
        return fresh("tmp");
    }

    // Family base name when `e` is an rc pointer plus a constant.
    std::optional<std::string> rc_family(const ExprPtr& e) const
    {
        if (e->kind == Expr::Kind::Var && rc_vars_.count(e->name)) {
            auto it = family_.find(e->name);
            return it == family_.end() ? e->name : it->second;
        }
        if (e->kind == Expr::Kind::Add && e->b->kind == Expr::Kind::Const)
            return rc_family(e->a);
        return std::nullopt;
    }

    std::int64_t ap_at(std::size_t at) const
    {
        auto it = flow_.at.find(at);
        if (it == flow_.at.end() || !it->second)
            throw SpecError(SpecErrorKind::RevokedReference,
                            "ap-relative reference at offset " + std::to_string(at) + " after ap was revoked");
        return *it->second;
    }

    std::int64_t cell_offset(Register reg, std::int16_t off, std::size_t at) const
    {
        return (reg == Register::AP ? ap_at(at) : 0) + off;
    }

    // Reads a frame cell, binding an existential for a cell whose content
    // is not yet determined.
    ExprPtr read(SymState& st, std::int64_t cell, std::vector<Binder>& binders)
    {
        auto it = st.cells.find(cell);
        if (it != st.cells.end())
            return it->second;
        const std::string name = fresh("tmp");
        binders.push_back({name, false, {Locator::Kind::FrameCell, cell, 0}});
        auto v = Expr::var(name);
        st.cells[cell] = v;
        return v;
    }

    SpecPtr finish(std::vector<SpecPtr> atoms, const std::vector<Binder>& binders, SpecPtr rest)
    {
        if (binders.empty()) {
            atoms.push_back(std::move(rest));
            return Spec::conj(std::move(atoms));
        }
        // Binders introduced by this instruction scope over its atoms too.
        atoms.push_back(std::move(rest));
        return Spec::exists(binders, Spec::conj(std::move(atoms)));
    }

    SpecPtr step(const CfgFunction& fn, std::size_t at, SymState st, bool allow_ref)
    {
        if (allow_ref) {
            auto b = cfg_.blocks.find(at);
            if (b != cfg_.blocks.end() && b->second.join) {
                const std::string k = fresh("κ");
                std::vector<ExprPtr> args;
                if (fn.decl)
                    for (const auto& a : fn.decl->all_args())
                        args.push_back(Expr::var(a));
                auto kappas = st.kappas;
                kappas.push_back(k);
                return Spec::exists({{k, true, {Locator::Kind::BlockSteps, 0, at}}},
                                    Spec::conj({Spec::block_ref(fn.name, at, k, args), Spec::steps(st.steps, kappas)}));
            }
        }

        const Decoded1& d = instrs_.at(at);
        const Instruction& i = d.instr;
        const std::size_t next = at + i.size();

        if (is_halt(d))
            return Spec::steps(st.steps, st.kappas);

        if (i.opcode == Opcode::Ret) {
            std::vector<SpecPtr> parts{Spec::steps(st.steps + 1, st.kappas)};
            std::vector<Binder> binders;
            if (!rho_.empty()) {
                const std::int64_t ap = ap_at(at);
                const auto r = static_cast<std::int64_t>(rho_.size());
                for (std::int64_t k = 0; k < r; ++k)
                    parts.push_back(Spec::eq(Expr::var(rho_[k]), read(st, ap - r + k, binders)));
            }
            return Spec::exists(binders, Spec::conj(std::move(parts)));
        }

        st.steps += 1;

        if (i.opcode == Opcode::Call)
            return call(fn, at, d, std::move(st));

        if (i.pc_update == PcUpdate::Jnz) {
            std::vector<Binder> binders;
            ExprPtr c = read(st, cell_offset(i.dst_reg, i.off_dst, at), binders);
            const std::size_t target = static_cast<std::size_t>(imm_target(prog_, at, d, true));
            auto zero = Expr::constant(0);
            SpecPtr fall = Spec::conj({Spec::eq(c, zero), step(fn, next, st, true)});
            SpecPtr jump = Spec::conj({Spec::ne(c, zero), step(fn, target, st, true)});
            return Spec::exists(binders, Spec::disj({fall, jump}));
        }

        if (i.opcode == Opcode::Nop) {
            if (i.pc_update == PcUpdate::JumpAbs || i.pc_update == PcUpdate::JumpRel)
                return step(fn, static_cast<std::size_t>(imm_target(prog_, at, d, i.pc_update == PcUpdate::JumpRel)),
                            std::move(st), true);
            return step(fn, next, std::move(st), true);
        }

        // AssertEq
        std::vector<Binder> binders;
        std::vector<SpecPtr> parts;
        const std::int64_t dst_cell = cell_offset(i.dst_reg, i.off_dst, at);
        const bool binary = i.res == ResLogic::Add || i.res == ResLogic::Mul;
        const bool uses_op0 = binary || i.op1_src == Op1Source::Op0Deref;
        const std::int64_t op0_cell = uses_op0 ? cell_offset(i.op0_reg, i.off_op0, at) : 0;

        std::optional<std::int64_t> op1_cell;
        if (i.op1_src == Op1Source::FpDeref)
            op1_cell = i.off_op1;
        else if (i.op1_src == Op1Source::ApDeref)
            op1_cell = ap_at(at) + i.off_op1;

        const bool dst_known = st.cells.count(dst_cell) != 0;
        const bool op0_known = !uses_op0 || st.cells.count(op0_cell) != 0;
        const bool op1_known = !op1_cell || st.cells.count(*op1_cell) != 0;

        auto op1_expr = [&]() -> ExprPtr {
            switch (i.op1_src) {
            case Op1Source::Imm: return Expr::constant(*d.imm);
            case Op1Source::Op0Deref:
                return Expr::mem(Expr::add(read(st, op0_cell, binders), Expr::constant(i.off_op1)));
            default: return read(st, *op1_cell, binders);
            }
        };
        auto res_expr = [&]() -> ExprPtr {
            ExprPtr op1 = op1_expr();
            if (!binary)
                return op1;
            ExprPtr op0 = read(st, op0_cell, binders);
            return i.res == ResLogic::Add ? Expr::add(op0, op1) : Expr::mul(op0, op1);
        };

        if (!dst_known && op0_known && op1_known) {
            ExprPtr res = res_expr();
            if (!binary) {
                // Plain copy: the cell takes the value, no new variable.
                st.cells[dst_cell] = res;
                if (res->kind == Expr::Kind::Mem && rc_family(res->a))
                    parts.push_back(Spec::range_checked(res));
            } else {
                const std::string name = fresh_for(res);
                binders.push_back({name, false, {Locator::Kind::FrameCell, dst_cell, 0}});
                st.cells[dst_cell] = Expr::var(name);
                parts.push_back(Spec::eq(Expr::var(name), res));
            }
        } else {
            ExprPtr dst = read(st, dst_cell, binders);
            ExprPtr res = res_expr();
            parts.push_back(Spec::eq(dst, res));
            if (res->kind == Expr::Kind::Mem && rc_family(res->a))
                parts.push_back(Spec::range_checked(dst));
        }

        const bool jumps = i.pc_update == PcUpdate::JumpAbs || i.pc_update == PcUpdate::JumpRel;
        const std::size_t to =
            jumps ? static_cast<std::size_t>(imm_target(prog_, at, d, i.pc_update == PcUpdate::JumpRel)) : next;
        return finish(std::move(parts), binders, step(fn, to, std::move(st), true));
    }

    SpecPtr call(const CfgFunction& fn, std::size_t at, const Decoded1& d, SymState st)
    {
        const CallSite* site = nullptr;
        for (const auto& c : fn.calls)
            if (c.at == at)
                site = &c;

        std::string name;
        FunctionDecl decl;
        std::optional<std::int64_t> delta;
        if (auto it = opts_.externals.find(site->target); it != opts_.externals.end()) {
            name = it->second.name;
            decl = it->second.decl;
            delta = it->second.ap_delta;
        } else if (site->external) {
            throw SpecError(SpecErrorKind::UnknownCallee,
                            "call at offset " + std::to_string(at) + " leaves the program (target " +
                                std::to_string(site->target) + ") and no callee facts were supplied");
        } else {
            const CfgFunction* callee = cfg_.function_at(static_cast<std::size_t>(site->target));
            name = callee->name;
            if (callee->decl)
                decl = *callee->decl;
            auto it = flow_.delta.find(callee->entry);
            if (it != flow_.delta.end())
                delta = it->second;
        }

        std::vector<Binder> binders;
        const std::int64_t ap = ap_at(at);
        const auto n = static_cast<std::int64_t>(decl.arity());
        std::vector<ExprPtr> args;
        for (std::int64_t k = 0; k < n; ++k)
            args.push_back(read(st, ap - n + k, binders));

        // Call frame cells are opaque from here on.
        st.cells.erase(ap);
        st.cells.erase(ap + 1);

        const std::string kappa = fresh("κ");
        std::vector<Binder> outs{{kappa, true, {Locator::Kind::CallSteps, 0, at}}};
        const auto ret_names = decl.all_rets();
        const auto r = static_cast<std::int64_t>(ret_names.size());
        std::vector<ExprPtr> rets;
        if (r > 0) {
            if (!delta)
                throw SpecError(SpecErrorKind::RevokedReference,
                                "return values of the call at offset " + std::to_string(at) +
                                    " sit at an unknown ap offset");
            const std::int64_t after = ap + 2 + *delta;
            for (std::int64_t k = 0; k < r; ++k) {
                std::string v;
                if (opts_.rc_pointer_names.count(ret_names[k])) {
                    v = fresh(ret_names[k]);
                    rc_vars_.insert(v);
                    family_[v] = ret_names[k];
                } else {
                    v = fresh(ret_names[k]);
                }
                outs.push_back({v, false, {Locator::Kind::FrameCell, after - r + k, 0}});
                st.cells[after - r + k] = Expr::var(v);
                rets.push_back(Expr::var(v));
            }
        }
        st.kappas.push_back(kappa);

        SpecPtr call_atom = Spec::call(name, kappa, args, rets);
        SpecPtr rest = step(fn, at + d.instr.size(), std::move(st), true);
        SpecPtr inner = Spec::exists(outs, Spec::conj({call_atom, rest}));
        return Spec::exists(binders, inner);
    }

    const Program& prog_;
    const FieldConfig& field_;
    const Cfg& cfg_;
    const ApFlow& flow_;
    const InstrMap& instrs_;
    const ExtractOptions& opts_;

    std::map<std::string, std::size_t> counters_;
    std::set<std::string> rc_vars_;
    std::map<std::string, std::string> family_;
    std::vector<std::string> rho_;
};

}  // namespace

Extraction extract_auto_specs(const Program& prog, const FieldConfig& field, const ExtractOptions& opts)
{
    Extraction ex;
    ex.cfg = build_cfg(prog, field);
    ex.flow = track_ap(ex.cfg, opts.externals);
    const InstrMap instrs = decode_all(prog, field);
    Extractor x(prog, field, ex.cfg, ex.flow, instrs, opts);
    for (const auto& fn : ex.cfg.functions)
        ex.specs.push_back(x.function_spec(fn));
    for (const auto& fn : ex.cfg.functions)
        for (std::size_t b : fn.blocks)
            if (ex.cfg.blocks.at(b).join)
                ex.specs.push_back(x.block_spec(fn, b));
    return ex;
}

// ---------------------------------------------------------------- rendering

namespace {

std::vector<std::string> render_lines(const SpecPtr& s)
{
    switch (s->kind) {
    case Spec::Kind::True: return {"True"};
    case Spec::Kind::Eq: return {render(s->lhs) + " = " + render(s->rhs)};
    case Spec::Kind::Ne: return {render(s->lhs) + " ≠ " + render(s->rhs)};
    case Spec::Kind::RangeChecked: return {"is_range_checked (rc_bound F) " + paren(s->lhs)};
    case Spec::Kind::CallSpec: {
        std::string line = "spec_" + s->callee + " mem " + s->kappa;
        for (const auto& a : s->args)
            line += " " + paren(a);
        for (const auto& r : s->rets)
            line += " " + paren(r);
        return {line};
    }
    case Spec::Kind::StepLowerBound: {
        std::string line;
        for (const auto& k : s->kappas)
            line += k + " + ";
        if (s->constant != 0 || s->kappas.empty())
            line += to_dec(s->constant);
        else
            line.resize(line.size() - 3);
        return {line + " ≤ κ"};
    }
    case Spec::Kind::BlockRef: {
        std::string line = "block_spec_" + s->function + "_" + std::to_string(s->block) + " mem " + s->kappa;
        for (const auto& a : s->args)
            line += " " + paren(a);
        return {line};
    }
    case Spec::Kind::And: {
        std::vector<std::string> out;
        for (std::size_t k = 0; k < s->parts.size(); ++k) {
            auto lines = render_lines(s->parts[k]);
            if (k + 1 < s->parts.size())
                lines.back() += " ∧";
            out.insert(out.end(), lines.begin(), lines.end());
        }
        return out;
    }
    case Spec::Kind::Or: {
        std::vector<std::string> out;
        for (std::size_t k = 0; k < s->parts.size(); ++k) {
            auto lines = render_lines(s->parts[k]);
            for (std::size_t j = 0; j < lines.size(); ++j)
                lines[j] = (j == 0 ? (k == 0 ? "((" : " (") : "  ") + lines[j];
            lines.back() += k + 1 < s->parts.size() ? ") ∨" : "))";
            out.insert(out.end(), lines.begin(), lines.end());
        }
        return out;
    }
    case Spec::Kind::Exists: {
        auto body = render_lines(s->body);
        auto sort = [](const Binder& b) { return b.natural ? "ℕ" : "F"; };
        if (s->binders.size() == 1) {
            body.front() = "∃ " + s->binders[0].name + " : " + sort(s->binders[0]) + ", " + body.front();
            return body;
        }
        std::string head = "∃";
        for (const auto& b : s->binders)
            head += " (" + b.name + " : " + sort(b) + ")";
        head += ",";
        std::vector<std::string> out{head};
        body.front() = "  " + body.front();
        out.insert(out.end(), body.begin(), body.end());
        return out;
    }
    }
    return {"?"};
}

}  // namespace

std::string render_spec_body(const SpecPtr& s)
{
    std::string out;
    for (const auto& l : render_lines(s))
        out += l + "\n";
    return out;
}

std::string render_spec(const FunctionSpec& fs)
{
    std::ostringstream o;
    o << "def " << (fs.is_block ? "auto_block_spec_" : "auto_spec_") << fs.name << " (mem : F → F) (κ : ℕ)";
    std::vector<std::string> names = fs.params;
    names.insert(names.end(), fs.rets.begin(), fs.rets.end());
    if (names.empty()) {
        o << " : Prop :=\n";
    } else {
        o << "\n    (";
        for (std::size_t k = 0; k < names.size(); ++k)
            o << (k ? " " : "") << names[k];
        o << " : F) : Prop :=\n";
    }
    for (const auto& l : render_lines(fs.body))
        o << "  " << l << "\n";
    return o.str();
}

std::string cfg_to_json(const Extraction& ex)
{
    using nlohmann::json;
    json doc;
    json blocks = json::array();
    for (const auto& [s, b] : ex.cfg.blocks) {
        blocks.push_back({{"start", b.start},
                          {"end", b.end},
                          {"terminator", to_string(b.term)},
                          {"succs", b.succs},
                          {"preds", b.preds},
                          {"join", b.join},
                          {"function", b.function}});
    }
    doc["blocks"] = blocks;
    json edges = json::array();
    for (const auto& [s, b] : ex.cfg.blocks)
        for (std::size_t t : b.succs)
            edges.push_back({s, t});
    doc["edges"] = edges;
    json back = json::array();
    for (const auto& [u, v] : ex.cfg.back_edges)
        back.push_back({u, v});
    doc["back_edges"] = back;
    json fns = json::array();
    for (const auto& f : ex.cfg.functions) {
        json calls = json::array();
        for (const auto& c : f.calls)
            calls.push_back({{"at", c.at}, {"target", c.target}, {"external", c.external}});
        json delta = nullptr;
        if (auto it = ex.flow.delta.find(f.entry); it != ex.flow.delta.end() && it->second)
            delta = *it->second;
        fns.push_back({{"name", f.name},
                       {"entry", f.entry},
                       {"arity", f.decl ? f.decl->arity() : 0},
                       {"blocks", f.blocks},
                       {"calls", calls},
                       {"ap_delta", delta}});
    }
    doc["functions"] = fns;
    json ap = json::array();
    for (const auto& [o, v] : ex.flow.at)
        ap.push_back({{"offset", o}, {"ap", v ? json(*v) : json(nullptr)}});
    doc["ap_offsets"] = ap;
    return doc.dump(2);
}

// ---------------------------------------------------------------- evaluation

std::vector<Invocation> find_invocations(const Trace& trace, const Program& prog, const Memory& mem, std::size_t entry)
{
    const FieldConfig& cfg = mem.config();
    const Felt entry_pc = Felt(prog.base_pc, cfg) + Felt(from_u64(entry), cfg);
    std::vector<Invocation> out;
    const auto& st = trace.states;
    for (std::size_t i = 0; i < st.size(); ++i) {
        if (st[i].pc != entry_pc)
            continue;
        if (i > 0 && fetch(prog, mem, st[i - 1].pc).instr.opcode != Opcode::Call)
            continue;
        for (std::size_t r = i; r + 1 < st.size(); ++r) {
            if (st[r].fp == st[i].fp && fetch(prog, mem, st[r].pc).instr.opcode == Opcode::Ret) {
                out.push_back({i, r});
                break;
            }
        }
    }
    return out;
}

std::vector<Felt> invocation_args(const FunctionDecl& decl, const Trace& trace, const Memory& mem,
                                  const Invocation& inv)
{
    const FieldConfig& cfg = mem.config();
    const Felt fp = trace.states[inv.entry_index].fp;
    const auto n = static_cast<long>(decl.arity());
    std::vector<Felt> out;
    for (long k = 0; k < n; ++k)
        out.push_back(mem.at(fp + Felt(-(2 + n) + k, cfg)));
    return out;
}

std::vector<Felt> invocation_rets(const FunctionDecl& decl, const Trace& trace, const Memory& mem,
                                  const Invocation& inv)
{
    const FieldConfig& cfg = mem.config();
    const Felt ap = trace.states[inv.ret_index + 1].ap;
    const auto r = static_cast<long>(decl.return_count());
    std::vector<Felt> out;
    for (long k = 0; k < r; ++k)
        out.push_back(mem.at(ap + Felt(-r + k, cfg)));
    return out;
}

namespace {

class Evaluator {
public:
    Evaluator(const Trace& trace, const Memory& mem, const Program& prog, const Invocation& inv, const UserSpecs& us)
        : trace_(trace), mem_(mem), prog_(prog), inv_(inv), us_(us), cfg_(mem.config()),
          fp_(trace.states[inv.entry_index].fp)
    {
    }

    std::map<std::string, Felt> felts;
    std::map<std::string, BigInt> nats;
    std::string diag;

    std::optional<Felt> value(const ExprPtr& e)
    {
        switch (e->kind) {
        case Expr::Kind::Const: return Felt(e->value, cfg_);
        case Expr::Kind::Var: {
            auto it = felts.find(e->name);
            if (it == felts.end()) {
                diag = "unbound variable " + e->name;
                return std::nullopt;
            }
            return it->second;
        }
        case Expr::Kind::Mem: {
            auto a = value(e->a);
            if (!a)
                return std::nullopt;
            auto v = mem_.get(*a);
            if (!v)
                diag = "memory cell " + to_dec(a->value()) + " is unassigned";
            return v;
        }
        case Expr::Kind::Add:
        case Expr::Kind::Mul: {
            auto x = value(e->a);
            auto y = value(e->b);
            if (!x || !y)
                return std::nullopt;
            return e->kind == Expr::Kind::Add ? *x + *y : *x * *y;
        }
        }
        return std::nullopt;
    }

    bool holds(const SpecPtr& s)
    {
        switch (s->kind) {
        case Spec::Kind::True: return true;
        case Spec::Kind::Eq:
        case Spec::Kind::Ne: {
            auto l = value(s->lhs);
            auto r = value(s->rhs);
            if (!l || !r)
                return false;
            const bool eq = *l == *r;
            if (eq != (s->kind == Spec::Kind::Eq)) {
                diag = render(s->lhs) + (s->kind == Spec::Kind::Eq ? " = " : " ≠ ") + render(s->rhs) +
                       " fails (" + to_dec(l->value()) + " vs " + to_dec(r->value()) + ")";
                return false;
            }
            return true;
        }
        case Spec::Kind::RangeChecked: {
            auto v = value(s->lhs);
            if (!v)
                return false;
            if (v->value() >= cfg_.rc_bound) {
                diag = render(s->lhs) + " = " + to_dec(v->value()) + " is not range checked";
                return false;
            }
            return true;
        }
        case Spec::Kind::And:
            for (const auto& p : s->parts)
                if (!holds(p))
                    return false;
            return true;
        case Spec::Kind::Or: {
            std::string why;
            for (const auto& p : s->parts) {
                if (holds(p))
                    return true;
                why += (why.empty() ? "" : "; ") + diag;
            }
            diag = "no disjunct holds: " + why;
            return false;
        }
        case Spec::Kind::StepLowerBound: {
            BigInt total = s->constant;
            for (const auto& k : s->kappas) {
                auto it = nats.find(k);
                if (it == nats.end()) {
                    diag = "unbound step variable " + k;
                    return false;
                }
                total += it->second;
            }
            if (total > nats.at("κ")) {
                diag = "step bound " + to_dec(total) + " exceeds κ = " + to_dec(nats.at("κ"));
                return false;
            }
            return true;
        }
        case Spec::Kind::CallSpec: {
            auto it = us_.functions.find(s->callee);
            if (it == us_.functions.end()) {
                diag = "no user spec registered for " + s->callee;
                return false;
            }
            std::vector<Felt> args, rets;
            for (const auto& a : s->args) {
                auto v = value(a);
                if (!v)
                    return false;
                args.push_back(*v);
            }
            for (const auto& r : s->rets) {
                auto v = value(r);
                if (!v)
                    return false;
                rets.push_back(*v);
            }
            if (!it->second(mem_, to_u64(nats.at(s->kappa)), args, rets)) {
                diag = "spec_" + s->callee + " fails";
                return false;
            }
            return true;
        }
        case Spec::Kind::BlockRef: {
            auto it = us_.blocks.find(block_unit_name(s->function, s->block));
            if (it == us_.blocks.end())
                return true;  // default block invariant
            std::vector<Felt> args;
            for (const auto& a : s->args) {
                auto v = value(a);
                if (!v)
                    return false;
                args.push_back(*v);
            }
            if (!it->second(mem_, to_u64(nats.at(s->kappa)), args, {})) {
                diag = "block spec " + block_unit_name(s->function, s->block) + " fails";
                return false;
            }
            return true;
        }
        case Spec::Kind::Exists: {
            for (const auto& b : s->binders)
                if (!bind(b))
                    return false;
            return holds(s->body);
        }
        }
        return false;
    }

private:
    bool bind(const Binder& b)
    {
        const auto& st = trace_.states;
        const std::size_t lo = inv_.entry_index;
        const std::size_t hi = inv_.ret_index;
        switch (b.loc.kind) {
        case Locator::Kind::FrameCell: {
            auto v = mem_.get(fp_ + Felt(static_cast<long>(b.loc.frame_offset), cfg_));
            if (!v) {
                diag = "no witness for " + b.name + ": frame cell fp" + std::to_string(b.loc.frame_offset) +
                       " is unassigned";
                return false;
            }
            felts.insert_or_assign(b.name, *v);
            return true;
        }
        case Locator::Kind::CallSteps:
        case Locator::Kind::BlockSteps: {
            const Felt pc = Felt(prog_.base_pc, cfg_) + Felt(from_u64(b.loc.pc_offset), cfg_);
            const std::size_t from = b.loc.kind == Locator::Kind::BlockSteps ? lo + 1 : lo;
            for (std::size_t i = from; i <= hi; ++i) {
                if (st[i].pc != pc || st[i].fp != fp_)
                    continue;
                if (b.loc.kind == Locator::Kind::BlockSteps) {
                    nats.insert_or_assign(b.name, BigInt(static_cast<unsigned long>(hi + 1 - i)));
                    return true;
                }
                for (std::size_t j = i + 1; j < st.size(); ++j) {
                    if (st[j].fp == fp_) {
                        nats.insert_or_assign(b.name, BigInt(static_cast<unsigned long>(j - i - 1)));
                        return true;
                    }
                }
                break;
            }
            diag = "no witness for " + b.name + ": offset " + std::to_string(b.loc.pc_offset) +
                   " not reached in this frame";
            return false;
        }
        }
        return false;
    }

    const Trace& trace_;
    const Memory& mem_;
    const Program& prog_;
    const Invocation& inv_;
    const UserSpecs& us_;
    const FieldConfig& cfg_;
    Felt fp_;
};

}  // namespace

EvalResult eval_spec_on_trace(const FunctionSpec& fs, const Trace& trace, const Memory& mem, const Program& prog,
                              const Invocation& inv, const UserSpecs& user_specs)
{
    if (!trace.halted)
        throw ContractViolation("eval_spec_on_trace needs a halting trace");
    if (inv.ret_index + 1 >= trace.states.size())
        throw std::out_of_range("invocation does not lie in the trace");
    Evaluator ev(trace, mem, prog, inv, user_specs);
    const FieldConfig& cfg = mem.config();
    const Felt fp = trace.states[inv.entry_index].fp;
    const Felt ap = trace.states[inv.ret_index + 1].ap;
    const auto n = static_cast<long>(fs.params.size());
    for (long k = 0; k < n; ++k) {
        auto v = mem.get(fp + Felt(-(2 + n) + k, cfg));
        if (!v)
            return {false, "argument " + fs.params[k] + " is unassigned"};
        ev.felts.insert_or_assign(fs.params[k], *v);
    }
    const auto r = static_cast<long>(fs.rets.size());
    for (long k = 0; k < r; ++k) {
        auto v = mem.get(ap + Felt(-r + k, cfg));
        if (!v)
            return {false, "return value " + fs.rets[k] + " is unassigned"};
        ev.felts.insert_or_assign(fs.rets[k], *v);
    }
    ev.nats["κ"] = BigInt(static_cast<unsigned long>(inv.kappa()));
    const bool ok = ev.holds(fs.body);
    return {ok, ok ? std::string() : ev.diag};
}

}  // namespace cairovm::spec
