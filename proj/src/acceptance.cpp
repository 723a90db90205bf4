#include "cairovm/acceptance.hpp"

#include "cairovm/batch.hpp"
#include "cairovm/dict_squash.hpp"
#include "cairovm/isa.hpp"
#include "cairovm/secp_ec.hpp"
#include "cairovm/specgen.hpp"
#include "cairovm/stdlib.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#ifndef CAIROVM_GOLDEN_DIR
#define CAIROVM_GOLDEN_DIR "tests/golden"
#endif

namespace cairovm::acceptance {

namespace {

struct Failed {
    std::string why;
};

void require(bool cond, const std::string& why)
{
    if (!cond)
        throw Failed{why};
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Failed{"cannot read " + path};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const FieldConfig& vm_field()
{
    return FieldConfig::default_config();
}

const FieldConfig& small_field()
{
    return FieldConfig::small_test_config();
}

// ---------------------------------------------------------------- 1

std::string squash_example()
{
    const FieldConfig& cfg = vm_field();
    const dict::AccessLog log = dict::example_log(cfg);
    const dict::SquashedDict out = dict::squash_dict(log, dict::generate_hints(log), from_u64(log.size()));
    require(out == dict::example_squashed(cfg), "squashed output differs:\n" + dict::format_table(out));
    require(dict::spec_squash_dict_check(log, out, from_u64(log.size())), "output fails the squash specification");
    return "3 rows (0,2,5) (5,4,4) (7,3,0)";
}

// ---------------------------------------------------------------- 2

std::int64_t call_immediate(const Program& prog, std::size_t at, const FieldConfig& cfg)
{
    return to_i64(Felt(prog.words.at(at + 1), cfg).to_signed());
}

std::string stdlib_layout()
{
    const FieldConfig& cfg = vm_field();
    const Program lib = stdlib::assemble_library(cfg);
    const FunctionDecl* nn = lib.function_named("assert_nn");
    const FunctionDecl* le = lib.function_named("assert_le");
    const FunctionDecl* nnle = lib.function_named("assert_nn_le");
    require(nn && le && nnle, "library lacks a function");
    const std::size_t entry = nnle->offset;
    require(nn->offset + 9 == entry, "assert_nn is not at entry - 9");
    require(le->offset + 5 == entry, "assert_le is not at entry - 5");

    std::vector<std::int64_t> imms;
    for (std::size_t off : lib.instruction_offsets()) {
        if (off < entry)
            continue;
        const Decoded d = decode(lib.words[off]);
        const auto* ins = std::get_if<Instruction>(&d);
        if (ins && ins->opcode == Opcode::Call)
            imms.push_back(call_immediate(lib, off, cfg));
    }
    require(imms == std::vector<std::int64_t>{-11, -11}, "call immediates are not both -11");

    const auto run = stdlib::run_stdlib("assert_nn_le", {Felt(3L, cfg), Felt(5L, cfg)}, cfg);
    require(run->halted(), "assert_nn_le(3, 5) did not halt");
    const Trace& t = run->trace();
    const spec::Invocation inv = run->invocation();
    const BigInt d_nnle = (t.states[inv.ret_index + 1].ap - t.states[inv.entry_index].ap).value();
    require(d_nnle == 14, "assert_nn_le ap delta is " + to_dec(d_nnle));

    const auto nn_invs = spec::find_invocations(t, run->program, run->mem, nn->offset);
    require(!nn_invs.empty(), "no assert_nn invocation in the trace");
    for (const auto& i : nn_invs) {
        const BigInt d = (t.states[i.ret_index + 1].ap - t.states[i.entry_index].ap).value();
        require(d == 1, "assert_nn ap delta is " + to_dec(d));
    }
    return "assert_nn @ entry-9, assert_le @ entry-5, calls -11/-11, delta 14 and 1";
}

// ---------------------------------------------------------------- 3

CheckResult rc_accounting(const stdlib::StdlibRun& run, const BigInt& mu)
{
    const spec::Invocation inv = run.invocation();
    return rc_ensures_check(run.mem, run.cfg->rc_bound, mu, run.rc_base, run.rets.at(0), from_u64(inv.kappa()));
}

std::string range_check_accounting()
{
    std::size_t runs = 0;
    auto check_field = [&](const FieldConfig& cfg, const std::vector<std::pair<BigInt, BigInt>>& pairs) {
        for (const auto& [a, b] : pairs) {
            const auto run = stdlib::run_stdlib("assert_nn_le", {Felt(a, cfg), Felt(b, cfg)}, cfg);
            if (!run->halted())
                continue;
            ++runs;
            require(BigInt(2) <= from_u64(run->invocation().kappa()), "mu exceeds kappa");
            const CheckResult ok = rc_accounting(*run, 2);
            require(ok.ok, "rc_ensures_check failed for (" + to_dec(a) + ", " + to_dec(b) + "): " + ok.reason);
        }
    };
    std::vector<std::pair<BigInt, BigInt>> big{{0, 0}, {3, 5}, {0, pow2(128) - 1}, {pow2(128) - 1, pow2(128) - 1}};
    std::mt19937_64 rng(3);
    for (int i = 0; i < 32; ++i) {
        const BigInt a = batch::random_bits(rng, 127);
        big.emplace_back(a, a + batch::random_bits(rng, 126));
    }
    check_field(vm_field(), big);
    std::vector<std::pair<BigInt, BigInt>> small;
    for (long a = 0; a < 64; a += 7)
        for (long b = a; b < a + 64; b += 9)
            small.emplace_back(a, b);
    check_field(small_field(), small);

    // Offsetting mu by the modulus keeps end = start + mu in the field but
    // breaks mu <= kappa.
    const FieldConfig& sf = small_field();
    const auto run = stdlib::run_stdlib("assert_nn_le", {Felt(3L, sf), Felt(5L, sf)}, sf);
    require(run->halted(), "small-field run did not halt");
    const BigInt wrapped = 2 + sf.modulus;
    require(run->rets.at(0) == run->rc_base + Felt(wrapped, sf), "wrapped mu does not satisfy the pointer equation");
    require(!rc_accounting(*run, wrapped).ok, "wrapped mu accepted");
    return std::to_string(runs) + " runs with mu = 2; mu = 2 + 12289 rejected";
}

// ---------------------------------------------------------------- 4

std::string assert_nn_spec(const std::string& golden_dir)
{
    const FieldConfig& cfg = vm_field();
    const spec::Extraction ex = spec::extract_auto_specs(stdlib::assemble_library(cfg), cfg);
    const spec::FunctionSpec* fs = ex.spec_named("assert_nn");
    require(fs != nullptr, "no auto-spec for assert_nn");

    bool mem_eq = false, rc = false, rc_succ = false, steps = false;
    for (const auto& a : spec::atoms(fs->body)) {
        using K = spec::Spec::Kind;
        if (a->kind == K::Eq && spec::render(a->lhs) == "a" && spec::render(a->rhs) == "mem (range_check_ptr)")
            mem_eq = true;
        if (a->kind == K::RangeChecked && spec::render(a->lhs) == "a")
            rc = true;
        if (a->kind == K::StepLowerBound && a->constant == 3 && a->kappas.empty())
            steps = true;
    }
    std::function<void(const spec::SpecPtr&)> walk = [&](const spec::SpecPtr& s) {
        if (s->kind == spec::Spec::Kind::And)
            for (const auto& p : s->parts)
                walk(p);
        if (s->kind != spec::Spec::Kind::Exists)
            return;
        for (const auto& b : s->binders)
            for (const auto& a : spec::atoms(s->body))
                if (a->kind == spec::Spec::Kind::Eq && spec::render(a->lhs) == b.name &&
                    spec::render(a->rhs) == "range_check_ptr + 1")
                    rc_succ = true;
        walk(s->body);
    };
    walk(fs->body);
    require(mem_eq, "missing a = mem (range_check_ptr)");
    require(rc, "missing is_range_checked a");
    require(rc_succ, "missing the range_check_ptr + 1 existential");
    require(steps, "missing 3 <= kappa");

    const std::string golden = read_file(golden_dir + "/assert_nn_auto_spec.txt");
    require(spec::render_spec(*fs) == golden, "rendered spec differs from the golden file");
    return "4 conjuncts present, golden match";
}

// ---------------------------------------------------------------- 5

bool nn_le_satisfiable(long a, long b, long p, long rc)
{
    for (long m = 0; m < rc; ++m) {
        if (m % p != a)
            continue;
        for (long n = 0; n < rc; ++n)
            if ((m + n) % p == b)
                return true;
    }
    return false;
}

std::string small_field_semantics()
{
    const FieldConfig& cfg = small_field();
    const long p = to_i64(cfg.modulus), rc = to_i64(cfg.rc_bound);
    std::set<long> values;
    for (long v = 0; v < 96; ++v)
        values.insert(v);
    for (long v = p - 32; v < p; ++v)
        values.insert(v);
    std::mt19937_64 rng(5);
    while (values.size() < 192)
        values.insert(static_cast<long>(rng() % static_cast<std::uint64_t>(p)));

    const Program prog = stdlib::assemble_with_driver("assert_nn_le", cfg);
    const spec::Extraction ex = spec::extract_auto_specs(prog, cfg);
    const spec::FunctionSpec& fs = *ex.spec_named("assert_nn_le");
    const spec::UserSpecs us = stdlib::user_specs();

    std::size_t pairs = 0, halted = 0;
    for (long a : values)
        for (long b : values) {
            ++pairs;
            const auto run = stdlib::run_stdlib("assert_nn_le", {Felt(a, cfg), Felt(b, cfg)}, cfg);
            const bool sat = nn_le_satisfiable(a, b, p, rc);
            if (run->halted() != sat)
                throw Failed{"(" + std::to_string(a) + ", " + std::to_string(b) + "): halted " +
                             std::to_string(run->halted()) + ", satisfiable " + std::to_string(sat)};
            if (!run->halted())
                continue;
            ++halted;
            const spec::EvalResult e =
                spec::eval_spec_on_trace(fs, run->trace(), run->mem, run->program, run->invocation(), us);
            require(e.value, "auto-spec false on (" + std::to_string(a) + ", " + std::to_string(b) + "): " +
                                 e.diagnostic);
            require(stdlib::spec_assert_nn_le(cfg, Felt(a, cfg), Felt(b, cfg)),
                    "auto-spec holds but the user spec fails");
        }
    return std::to_string(pairs) + " pairs, " + std::to_string(halted) + " halting";
}

// ---------------------------------------------------------------- 6

std::string codec()
{
    const std::vector<Instruction> combos = valid_flag_combinations();
    require(!combos.empty() && combos.size() <= 1536, "unexpected number of valid combinations");
    const std::int16_t offs[] = {-32768, -1, 0, 32767};
    std::size_t checked = 0;
    for (const Instruction& base : combos)
        for (int t = 0; t < 16; ++t) {
            Instruction i = base;
            i.off_dst = offs[t % 4];
            i.off_op0 = offs[t / 4];
            i.off_op1 = offs[(t + t / 4) % 4];
            const Decoded d = decode(from_u64(encode(i)));
            const auto* back = std::get_if<Instruction>(&d);
            require(back && *back == i, "decode(encode(i)) != i");
            ++checked;
        }

    struct Group {
        unsigned first, width;
    };
    using namespace flag_bit;
    const Group groups[] = {{kOp1Imm, 3}, {kResAdd, 2}, {kPcJumpAbs, 3}, {kApAdd, 2}, {kOpcodeCall, 3}};
    std::set<std::uint64_t> valid_words;
    for (const Instruction& i : combos)
        valid_words.insert(encode(i));
    std::size_t invalid = 0, decoded = 0;
    for (std::uint64_t flags = 0; flags < (1u << kFlagCount); ++flags) {
        bool multi = false;
        for (const Group& g : groups)
            multi |= __builtin_popcountll((flags >> g.first) & ((1u << g.width) - 1)) > 1;
        const std::uint64_t word = (flags << kFlagsShift) | 0x800080008000ull;
        const Decoded d = decode(from_u64(word));
        if (multi) {
            ++invalid;
            require(std::holds_alternative<IllFormed>(d), "multi-hot pattern decoded");
        } else if (std::holds_alternative<Instruction>(d)) {
            ++decoded;
            require(valid_words.count(word) == 1, "pattern outside the valid set decoded");
        }
    }
    require(decoded == combos.size(), "some valid combination failed to decode");
    require(std::holds_alternative<IllFormed>(decode(pow2(63) + from_u64(0x800080008000ull))), "bit 63 accepted");
    return std::to_string(combos.size()) + " combinations x 16 offsets round-trip, " + std::to_string(invalid) +
           " multi-hot patterns IllFormed";
}

// ---------------------------------------------------------------- 7

std::string ec_equivalence(bool parallel)
{
    const FieldConfig& cfg = vm_field();
    std::size_t cases = 0;
    for (const secp::CurveParams* c : {&secp::CurveParams::secp256k1(), &secp::CurveParams::secp256r1()}) {
        const CheckResult valid = secp::validate_curve(*c);
        require(valid.ok, valid.reason);
        for (auto op : {batch::EcOp::Add, batch::EcOp::Double, batch::EcOp::FastAdd, batch::EcOp::Mul}) {
            const batch::Summary s = batch::ec_equivalence(op, *c, cfg, {1000, 7000, parallel});
            require(s.ok(), c->name + " " + batch::to_string(op) + ": " + s.first_failure);
            cases += s.cases;
        }
    }
    return std::to_string(cases) + " cases, table of 16 on every multiplication";
}

// ---------------------------------------------------------------- 8

// Chord-and-tangent by exhaustive search: the slope is found by scanning
// [0, p), and the third intersection by deflating the cubic
// x^3 + a x + b - (l (x - x1) + y1)^2 by the known roots.
secp::ECGroupPoint geometric_add(const secp::ECGroupPoint& P, const secp::ECGroupPoint& Q, long p, long a, long b)
{
    if (P.zero)
        return Q;
    if (Q.zero)
        return P;
    const long x1 = to_i64(P.x), y1 = to_i64(P.y), x2 = to_i64(Q.x), y2 = to_i64(Q.y);
    auto md = [p](long v) { return ((v % p) + p) % p; };
    long num, den;
    if (x1 != x2) {
        num = md(y2 - y1);
        den = md(x2 - x1);
    } else if (y1 == y2 && y1 != 0) {
        num = md(3 * x1 * x1 + a);
        den = md(2 * y1);
    } else {
        return secp::ECGroupPoint::infinity();  // vertical line
    }
    long lam = -1;
    for (long l = 0; l < p; ++l)
        if (md(l * den) == num) {
            lam = l;
            break;
        }
    require(lam >= 0, "no slope found");
    // Cubic coefficients (monic): x^3 + c2 x^2 + c1 x + c0.
    const long k = md(y1 - lam * x1);
    long c2 = md(-lam * lam), c1 = md(a - 2 * lam * k), c0 = md(b - k * k);
    // Deflate by (x - x1) then (x - x2): synthetic division.
    auto deflate = [&](long r) {
        const long q1 = md(c2 + r);
        const long q0 = md(c1 + r * q1);
        require(md(c0 + r * q0) == 0, "known root does not divide the cubic");
        c2 = 1;
        c1 = q1;
        c0 = q0;
    };
    deflate(x1);
    // Now x^2 + c1 x + c0; divide by (x - x2).
    const long rem = md(x2 * x2 + c1 * x2 + c0);
    require(rem == 0, "second root does not divide");
    const long x3 = md(-c1 - x2);
    const long y3 = md(lam * (x3 - x1) + y1);
    return secp::ECGroupPoint::affine(x3, md(-y3));
}

std::string tiny_curve()
{
    const secp::CurveParams& c = secp::tiny_curve();
    const long p = to_i64(c.p), a = to_i64(c.a), b = to_i64(c.b);
    std::vector<secp::ECGroupPoint> pts{secp::ECGroupPoint::infinity()};
    for (long x = 0; x < p; ++x)
        for (long y = 0; y < p; ++y)
            if (((y * y - x * x * x - a * x - b) % p + p) % p == 0)
                pts.push_back(secp::ECGroupPoint::affine(x, y));
    require(pts.size() == 31, "expected 31 points, found " + std::to_string(pts.size()));
    const CheckResult valid = secp::validate_curve(c);
    require(valid.ok, valid.reason);

    auto index = [&](const secp::ECGroupPoint& q) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i] == q)
                return i;
        throw Failed{"result " + secp::to_string(q) + " is not a curve point"};
    };
    const std::size_t n = pts.size();
    std::vector<std::size_t> table(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const secp::ECGroupPoint f = secp::oracle_add(pts[i], pts[j], c);
            const secp::ECGroupPoint g = geometric_add(pts[i], pts[j], p, a, b);
            require(f == g, "oracle and enumeration disagree on " + secp::to_string(pts[i]) + " + " +
                                secp::to_string(pts[j]));
            table[i * n + j] = index(f);
        }
    for (std::size_t i = 0; i < n; ++i) {
        require(table[i] == i && table[i * n] == i, "Zero is not the identity");
        bool inverse = false;
        for (std::size_t j = 0; j < n; ++j) {
            require(table[i * n + j] == table[j * n + i], "addition is not commutative");
            inverse |= table[i * n + j] == 0;
        }
        require(inverse, "missing inverse");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                require(table[table[i * n + j] * n + k] == table[i * n + table[j * n + k]], "associativity fails");
    return "31 points, 961 sums agree, 29791 triples associative";
}

// ---------------------------------------------------------------- 9

std::string ecdsa_round_trip(bool parallel)
{
    const batch::Summary s =
        batch::ecdsa_round_trip(secp::CurveParams::secp256k1(), vm_field(), {100, 9000, parallel});
    require(s.ok(), s.first_failure);
    return "100 recoveries, parity law held, 400 tampers changed the key";
}

// ---------------------------------------------------------------- 10

std::string dict_fuzz(bool parallel)
{
    const batch::Summary s = batch::dict_fuzz(vm_field(), {10000, 10000, parallel});
    require(s.ok(), s.first_failure);
    std::size_t consistent = 0, corrupt_accepted = 0;
    for (const auto& d : s.digests) {
        consistent += d.rfind("consistent", 0) == 0;
        corrupt_accepted += d.find("corrupt:accepted") != std::string::npos;
    }
    return "10000 logs (" + std::to_string(consistent) + " consistent), 10000 corrupted trials, " +
           std::to_string(corrupt_accepted) + " accepted with the oracle's output, 0 divergent";
}

// ---------------------------------------------------------------- 11

std::string gadget_soundness(bool parallel)
{
    const FieldConfig& cfg = vm_field();
    std::size_t trials = 0;
    for (const secp::CurveParams* c : {&secp::CurveParams::secp256k1(), &secp::CurveParams::secp256r1()})
        for (auto g : {batch::Gadget::VerifyZero, batch::Gadget::Reduce, batch::Gadget::Inv, batch::Gadget::DivModN,
                       batch::Gadget::IsZero}) {
            const batch::Summary s = batch::gadget_mutation(g, *c, cfg, {1000, 11000, parallel});
            require(s.ok(), c->name + " " + batch::to_string(g) + ": " + s.first_failure);
            trials += s.cases;
        }
    const auto audit = secp::interval_audit(cfg);
    for (const auto& e : audit)
        require(e.ok, "audit: " + e.gadget + " / " + e.quantity + " bound " + to_hex(e.bound) + " >= " +
                          to_hex(e.limit));
    return std::to_string(trials) + " perturbations rejected, " + std::to_string(audit.size()) +
           " audit entries within bounds";
}

struct Criterion {
    int id;
    const char* title;
    double budget;
    std::function<std::string(bool)> body;
};

}  // namespace

std::string default_golden_dir()
{
    return CAIROVM_GOLDEN_DIR;
}

std::vector<Result> run(const Config& cfg)
{
    const std::string golden = cfg.golden_dir.empty() ? default_golden_dir() : cfg.golden_dir;
    const std::vector<Criterion> all{
        {1, "squash_dict example table", 1, [](bool) { return squash_example(); }},
        {2, "stdlib layout and ap deltas", 1, [](bool) { return stdlib_layout(); }},
        {3, "range-check accounting", 1, [](bool) { return range_check_accounting(); }},
        {4, "assert_nn auto-spec", 1, [golden](bool) { return assert_nn_spec(golden); }},
        {5, "small-field exhaustive semantics", 120, [](bool) { return small_field_semantics(); }},
        {6, "instruction codec", 10, [](bool) { return codec(); }},
        {7, "EC layer equivalence", 180, [](bool par) { return ec_equivalence(par); }},
        {8, "tiny-curve exhaustiveness", 10, [](bool) { return tiny_curve(); }},
        {9, "ECDSA round trip", 120, [](bool par) { return ecdsa_round_trip(par); }},
        {10, "dict-squash fuzz", 180, [](bool par) { return dict_fuzz(par); }},
        {11, "non-native gadget soundness", 60, [](bool par) { return gadget_soundness(par); }},
    };
    std::vector<Result> out;
    for (const Criterion& c : all) {
        if (!cfg.only.empty() && std::find(cfg.only.begin(), cfg.only.end(), c.id) == cfg.only.end())
            continue;
        Result r{c.id, c.title, false, {}, 0, c.budget};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            r.detail = c.body(cfg.parallel);
            r.pass = true;
        } catch (const Failed& f) {
            r.detail = f.why;
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.pass && r.seconds >= r.budget_seconds) {
            r.pass = false;
            r.detail += " (over the time budget)";
        }
        if (cfg.progress)
            cfg.progress(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_line(const Result& r)
{
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2f s / %g s", r.seconds, r.budget_seconds);
    return std::string(r.pass ? "PASS" : "FAIL") + "  [" + std::to_string(r.id) + "] " + r.title + " (" + timing +
           "): " + r.detail;
}

}  // namespace cairovm::acceptance
