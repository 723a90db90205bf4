#include "cairovm/acceptance.hpp"
#include "cairovm/batch.hpp"
#include "cairovm/casm.hpp"
#include "cairovm/dict_squash.hpp"
#include "cairovm/ecdsa.hpp"
#include "cairovm/secp_ec.hpp"
#include "cairovm/specgen.hpp"
#include "cairovm/stdlib.hpp"
#include "cairovm/vm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace cairovm;
using nlohmann::json;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Report {
    std::string command;
    int exit_code = kOk;
    std::ostringstream text;
    json data = json::object();
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path);
    if (!out)
        throw UsageError("cannot write " + path);
    out << content;
}

json parse_json(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw UsageError(what + ": " + e.what());
    }
}

BigInt parse_int(const std::string& s, const std::string& what)
{
    try {
        return parse_bigint(s);
    } catch (const std::invalid_argument&) {
        throw UsageError("bad " + what + ": " + s);
    }
}

std::shared_ptr<const FieldConfig> load_field()
{
    const char* path = std::getenv("CAIROVM_FIELD");
    if (!path || !*path)
        return std::shared_ptr<const FieldConfig>(&FieldConfig::default_config(), [](const FieldConfig*) {});
    try {
        return FieldConfig::from_json(read_file(path));
    } catch (const FieldError& e) {
        throw UsageError(std::string("CAIROVM_FIELD: ") + e.what());
    }
}

bool ends_with(const std::string& s, const std::string& suffix)
{
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// ---------------------------------------------------------------- programs

json program_to_json(const Program& p)
{
    json words = json::array();
    for (const BigInt& w : p.words)
        words.push_back(to_hex(w));
    return {{"base_pc", to_hex(p.base_pc)}, {"words", words}};
}

Program program_from_json(const json& j)
{
    Program p;
    try {
        p.base_pc = parse_bigint(j.at("base_pc").get<std::string>());
        for (const auto& w : j.at("words"))
            p.words.push_back(parse_bigint(w.get<std::string>()));
    } catch (const std::exception& e) {
        throw UsageError(std::string("program dump: ") + e.what());
    }
    return p;
}

Program load_program_file(const std::string& path, const FieldConfig& cfg, const BigInt& base_pc,
                          const std::string& appendix = {})
{
    const std::string text = read_file(path);
    if (ends_with(path, ".json")) {
        if (!appendix.empty())
            throw UsageError("a JSON program dump carries no function table; pass Casm source");
        return program_from_json(parse_json(text, path));
    }
    return parse_casm(text + "\n" + appendix, cfg, base_pc);
}

json state_json(const MachineState& s)
{
    return {{"pc", to_hex(s.pc.value())}, {"ap", to_hex(s.ap.value())}, {"fp", to_hex(s.fp.value())}};
}

json trace_json(const Trace& t, const Memory& mem)
{
    json states = json::array();
    for (const auto& s : t.states)
        states.push_back(state_json(s));
    json writes = json::array();
    for (const auto& [addr, value] : mem.write_log())
        writes.push_back({{"addr", to_hex(addr)}, {"value", to_hex(value)}});
    return {{"trace", states}, {"writes", writes}};
}

void preload(Memory& mem, const std::string& path)
{
    const json j = parse_json(read_file(path), path);
    const json& cells = j.is_object() && j.contains("writes") ? j["writes"] : j;
    if (!cells.is_array())
        throw UsageError(path + ": expected a list of {addr, value}");
    const FieldConfig& cfg = mem.config();
    for (const auto& c : cells) {
        try {
            mem.write(Felt(parse_bigint(c.at("addr").get<std::string>()), cfg),
                      Felt(parse_bigint(c.at("value").get<std::string>()), cfg));
        } catch (const json::exception& e) {
            throw UsageError(path + ": " + e.what());
        }
    }
}

// ---------------------------------------------------------------- assemble / disasm

struct ProgramArgs {
    std::string program;
    std::string out;
    std::string base_pc = "0";
};

void cmd_assemble(const ProgramArgs& a, const FieldConfig& cfg, Report& r)
{
    const Program p = load_program_file(a.program, cfg, parse_int(a.base_pc, "base pc"));
    const json dump = program_to_json(p);
    if (!a.out.empty()) {
        write_file(a.out, dump.dump(2) + "\n");
        r.text << "wrote " << p.words.size() << " words to " << a.out << "\n";
    } else {
        r.text << dump.dump(2) << "\n";
    }
    r.data = {{"words", p.words.size()}, {"program", dump}};
}

void cmd_disasm(const ProgramArgs& a, const FieldConfig& cfg, Report& r)
{
    const Program p = load_program_file(a.program, cfg, parse_int(a.base_pc, "base pc"));
    const std::string text = print_casm(p, cfg);
    r.text << text;
    r.data = {{"casm", text}};
}

// ---------------------------------------------------------------- run

struct RunArgs {
    std::string program;
    std::string entry = "0";
    std::size_t max_steps = 10000;
    std::string memory;
    std::string trace;
    std::string base_pc = "0";
    std::string ap = "100";
    std::string fp;
    std::string rc_base = "1000";
    std::size_t rc_size = 256;
    std::vector<std::string> args;
};

void cmd_run(const RunArgs& a, const FieldConfig& cfg, Report& r)
{
    const BigInt base_pc = parse_int(a.base_pc, "base pc");
    // With --args the entry names a function that is called from an appended
    // `call rel` / `jmp rel 0` driver.
    const bool call_mode = !a.args.empty();
    const std::string appendix = call_mode ? "__driver:\ncall rel " + a.entry + "\njmp rel 0\n" : "";
    const Program prog = load_program_file(a.program, cfg, base_pc, appendix);

    Memory mem(cfg);
    load_program(mem, prog);
    const Felt rc_base(parse_int(a.rc_base, "rc base"), cfg);
    mem.add_range_check_segment(rc_base, from_u64(a.rc_size));
    if (!a.memory.empty())
        preload(mem, a.memory);

    Felt ap(parse_int(a.ap, "ap"), cfg);
    Felt fp = a.fp.empty() ? ap : Felt(parse_int(a.fp, "fp"), cfg);
    std::size_t entry = 0;
    const FunctionDecl* decl = nullptr;
    std::vector<Felt> args;
    if (call_mode) {
        decl = prog.function_named(a.entry);
        if (!decl)
            throw UsageError("no function named " + a.entry);
        for (const auto& name : decl->implicit_args)
            if (name == "range_check_ptr")
                args.push_back(rc_base);
            else
                throw UsageError("unsupported implicit argument " + name);
        for (const auto& s : a.args)
            args.emplace_back(parse_int(s, "argument"), cfg);
        if (args.size() != decl->arity())
            throw UsageError(a.entry + " takes " + std::to_string(decl->args.size()) + " arguments");
        for (std::size_t k = 0; k < args.size(); ++k)
            mem.write(ap + Felt(from_u64(k), cfg), args[k]);
        ap = fp = ap + Felt(from_u64(args.size()), cfg);
        entry = prog.labels.at("__driver");
    } else if (auto it = prog.labels.find(a.entry); it != prog.labels.end()) {
        entry = it->second;
    } else {
        entry = to_u64(parse_int(a.entry, "entry pc"));
    }

    const MachineState start{Felt(prog.base_pc + from_u64(entry), cfg), ap, fp};
    const RunOutcome out = run_collect(prog, start, mem, {}, a.max_steps);
    const Trace& t = out.trace;

    r.data["steps"] = t.steps();
    r.data["halted"] = out.halted();
    r.data["final_state"] = state_json(t.final_state());
    r.text << "steps: " << t.steps() << "\n";
    r.text << "final: pc=" << to_hex(t.final_state().pc.value()) << " ap=" << to_hex(t.final_state().ap.value())
           << " fp=" << to_hex(t.final_state().fp.value()) << "\n";
    if (out.error) {
        r.exit_code = kCheckFailed;
        r.data["error"] = {{"kind", to_string(out.error->kind())}, {"detail", out.error->detail()}};
        if (out.error->step())
            r.data["error"]["step"] = *out.error->step();
        r.text << "error: " << to_string(out.error->kind()) << ": " << out.error->detail() << "\n";
    } else if (!out.halted()) {
        r.exit_code = kCheckFailed;
        r.text << "did not halt\n";
    } else {
        r.text << "halted\n";
    }
    if (call_mode && out.halted()) {
        const std::size_t n = t.states.size();
        const spec::Invocation inv{1, n - 2};
        json rets = json::array();
        r.text << "returns:";
        for (const Felt& v : spec::invocation_rets(*decl, t, mem, inv)) {
            rets.push_back(to_hex(v.value()));
            r.text << " " << to_hex(v.value());
        }
        r.text << "\n";
        r.data["returns"] = rets;
    }
    if (!a.trace.empty())
        write_file(a.trace, trace_json(t, mem).dump(2) + "\n");
}

// ---------------------------------------------------------------- specgen

void cmd_specgen(const ProgramArgs& a, const FieldConfig& cfg, Report& r)
{
    if (a.out.empty())
        throw UsageError("specgen needs --out");
    const Program prog = load_program_file(a.program, cfg, parse_int(a.base_pc, "base pc"));
    const spec::Extraction ex = spec::extract_auto_specs(prog, cfg);
    std::filesystem::create_directories(a.out);
    json files = json::array();
    for (const auto& fs : ex.specs) {
        const std::string name = fs.name + "_auto_spec.txt";
        write_file(a.out + "/" + name, spec::render_spec(fs));
        files.push_back(name);
        r.text << name << "\n";
    }
    write_file(a.out + "/cfg.json", spec::cfg_to_json(ex));
    files.push_back("cfg.json");
    r.text << "cfg.json\n";
    r.data = {{"out", a.out}, {"files", files}};
}

// ---------------------------------------------------------------- stdlib-test

json criterion_json(const acceptance::Result& res)
{
    return {{"id", res.id},       {"title", res.title},     {"pass", res.pass},
            {"detail", res.detail}, {"seconds", res.seconds}, {"budget_seconds", res.budget_seconds}};
}

// Random pairs around the interesting edges of the default field: small
// values, the range-check bound and the negatives.
std::string sampled_default_field(std::size_t count, std::uint64_t seed)
{
    const FieldConfig& cfg = FieldConfig::default_config();
    const Program prog = stdlib::assemble_with_driver("assert_nn_le", cfg);
    const spec::Extraction ex = spec::extract_auto_specs(prog, cfg);
    const spec::FunctionSpec& fs = *ex.spec_named("assert_nn_le");
    const spec::UserSpecs us = stdlib::user_specs();
    std::mt19937_64 rng(seed);
    auto sample = [&]() -> BigInt {
        const BigInt d = batch::random_bits(rng, 8);
        switch (rng() % 4) {
        case 0:
            return d;
        case 1:
            return cfg.rc_bound - 128 + d;
        case 2:
            return cfg.modulus - d - 1;
        default:
            return batch::random_below(rng, cfg.modulus);
        }
    };
    std::size_t halted = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const Felt a(sample(), cfg), b(sample(), cfg);
        const auto run = stdlib::run_stdlib("assert_nn_le", {a, b}, cfg);
        const std::string where = "(" + to_hex(a.value()) + ", " + to_hex(b.value()) + ")";
        if (run->halted() != stdlib::spec_assert_nn_le(cfg, a, b))
            throw std::runtime_error(where + ": halting disagrees with the specification");
        if (!run->halted())
            continue;
        ++halted;
        const auto e = spec::eval_spec_on_trace(fs, run->trace(), run->mem, run->program, run->invocation(), us);
        if (!e.value)
            throw std::runtime_error(where + ": auto-spec false: " + e.diagnostic);
        const CheckResult rc = rc_ensures_check(run->mem, cfg.rc_bound, 2, run->rc_base, run->rets.at(0),
                                                from_u64(run->invocation().kappa()));
        if (!rc.ok)
            throw std::runtime_error(where + ": " + rc.reason);
    }
    return std::to_string(count) + " pairs, " + std::to_string(halted) + " halting";
}

void cmd_stdlib_test(std::size_t samples, Report& r)
{
    acceptance::Config ac;
    ac.only = {2, 3, 4, 5};
    json suites = json::array();
    bool ok = true;
    for (const auto& res : acceptance::run(ac)) {
        r.text << acceptance::format_line(res) << "\n";
        suites.push_back(criterion_json(res));
        ok &= res.pass;
    }
    acceptance::Result sampled{0, "default-field sampled suite", false, {}, 0, 0};
    try {
        sampled.detail = sampled_default_field(samples, 42);
        sampled.pass = true;
    } catch (const std::exception& e) {
        sampled.detail = e.what();
    }
    r.text << (sampled.pass ? "PASS" : "FAIL") << "  " << sampled.title << ": " << sampled.detail << "\n";
    suites.push_back({{"title", sampled.title}, {"pass", sampled.pass}, {"detail", sampled.detail}});
    ok &= sampled.pass;
    r.data = {{"suites", suites}, {"pass", ok}};
    r.exit_code = ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- ec

const secp::CurveParams& curve_named(const std::string& name)
{
    if (name == "k1" || name == "secp256k1")
        return secp::CurveParams::secp256k1();
    if (name == "r1" || name == "secp256r1")
        return secp::CurveParams::secp256r1();
    throw UsageError("unknown curve " + name + " (k1 or r1)");
}

secp::ECGroupPoint parse_point(const std::string& s, const secp::CurveParams& c)
{
    if (s == "Zero")
        return secp::ECGroupPoint::infinity();
    if (s == "G")
        return secp::generator(c);
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw UsageError("point must be x,y or Zero: " + s);
    return secp::ECGroupPoint::affine(parse_int(s.substr(0, comma), "x"), parse_int(s.substr(comma + 1), "y"));
}

std::string point_text(const secp::ECGroupPoint& p)
{
    return p.zero ? "Zero" : to_hex(p.x) + "," + to_hex(p.y);
}

json point_json(const secp::ECGroupPoint& p)
{
    if (p.zero)
        return "Zero";
    return {{"x", to_hex(p.x)}, {"y", to_hex(p.y)}};
}

struct EcArgs {
    std::string op;
    std::string curve = "k1";
    std::string point;
    std::string point2;
    std::string scalar;
};

void cmd_ec(const EcArgs& a, const FieldConfig& cfg, Report& r)
{
    const secp::CurveParams& c = curve_named(a.curve);
    secp::require_wide_field(cfg);
    const secp::ECGroupPoint p = parse_point(a.point, c);
    if (!secp::on_curve(p, c))
        throw UsageError("point is not on " + c.name);
    const secp::EcValue v = secp::make_ec_value(p, c, cfg);

    secp::EcValue out;
    secp::ECGroupPoint expected;
    if (a.op == "double") {
        out = secp::ec_double(v, c, cfg);
        expected = secp::oracle_double(p, c);
    } else if (a.op == "add") {
        const secp::ECGroupPoint q = parse_point(a.point2.empty() ? a.point : a.point2, c);
        if (!secp::on_curve(q, c))
            throw UsageError("second point is not on " + c.name);
        out = secp::ec_add(v, secp::make_ec_value(q, c, cfg), c, cfg);
        expected = secp::oracle_add(p, q, c);
    } else {
        if (a.scalar.empty())
            throw UsageError("ec mul needs --scalar");
        const BigInt k = parse_int(a.scalar, "scalar");
        if (k < 0 || k >= pow2(256))
            throw UsageError("scalar must lie in [0, 2^256)");
        secp::MulStats stats;
        out = secp::ec_mul_by_uint256(v, secp::Uint256::from_bigint(k, cfg), c, cfg, &stats);
        expected = secp::oracle_smul(k, p, c);
        r.data["table_entries"] = stats.table_entries;
        r.data["doublings"] = stats.doublings;
        r.data["additions"] = stats.additions;
    }
    const secp::ECGroupPoint got = secp::to_group(out.w, c);
    const CheckResult wit = secp::check_witness(out, c, cfg);
    const bool agrees = got == expected;
    r.text << point_text(got) << "\n";
    if (!agrees)
        r.text << "oracle: " << point_text(expected) << "\n";
    if (!wit.ok)
        r.text << "witness: " << wit.reason << "\n";
    r.data["curve"] = c.name;
    r.data["result"] = point_json(got);
    r.data["oracle_agrees"] = agrees;
    r.data["witness_ok"] = wit.ok;
    r.exit_code = agrees && wit.ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- ecdsa

struct RecoverArgs {
    std::string curve = "k1";
    std::string msg, r, s, v;
};

void cmd_ecdsa_recover(const RecoverArgs& a, const FieldConfig& cfg, Report& r)
{
    const secp::CurveParams& c = curve_named(a.curve);
    secp::require_wide_field(cfg);
    const auto in = ecdsa::RecoveryInput::from_ints(parse_int(a.msg, "msg"), parse_int(a.r, "r"),
                                                     parse_int(a.s, "s"), parse_int(a.v, "v"), cfg);
    const ecdsa::Recovery rec = ecdsa::recover_public_key(in, c, cfg);
    const secp::ECGroupPoint pub = secp::to_group(rec.public_key.w, c);
    const CheckResult spec = ecdsa::spec_recover_public_key(in, rec, c);
    r.text << point_text(pub) << "\n";
    if (!spec.ok)
        r.text << "specification: " << spec.reason << "\n";
    r.data = {{"curve", c.name},
              {"public_key", point_json(pub)},
              {"r_point", point_json(secp::to_group(rec.r_point.w, c))},
              {"spec_ok", spec.ok}};
    r.exit_code = spec.ok ? kOk : kCheckFailed;
}

void summary_report(const batch::Summary& s, Report& r)
{
    r.text << s.cases << " cases, " << s.failures << " failures\n";
    if (!s.ok())
        r.text << "first failure: " << s.first_failure << "\n";
    r.data = {{"cases", s.cases}, {"failures", s.failures}};
    if (!s.ok())
        r.data["first_failure"] = s.first_failure;
    r.exit_code = s.ok() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- squash-dict

struct SquashArgs {
    std::string log;
    std::optional<std::uint64_t> corrupt_seed;
    std::string kappa;
};

void cmd_squash(const SquashArgs& a, const FieldConfig& cfg, Report& r)
{
    dict::AccessLog log;
    try {
        log = dict::log_from_json(read_file(a.log), cfg);
    } catch (const std::invalid_argument& e) {
        throw UsageError(a.log + ": " + e.what());
    }
    const BigInt kappa = a.kappa.empty() ? from_u64(log.size()) : parse_int(a.kappa, "kappa");
    dict::SquashHints hints = dict::generate_hints(log);
    if (a.corrupt_seed) {
        std::mt19937_64 rng(*a.corrupt_seed);
        hints = dict::corrupt_hints(hints, log, rng);
    }
    const dict::Replay replay = dict::oracle_replay(log);
    r.data["accesses"] = log.size();
    r.data["kappa"] = to_dec(kappa);
    r.data["oracle_consistent"] = replay.consistent;
    try {
        const dict::SquashedDict out = dict::squash_dict(log, hints, kappa);
        const bool agrees = replay.consistent && out == replay.squashed;
        r.text << dict::format_table(out) << "verdict: accepted\n";
        if (!agrees)
            r.text << "oracle disagrees\n";
        json rows = json::array();
        for (const auto& e : out)
            rows.push_back({{"key", to_hex(e.key.value())}, {"prev", to_hex(e.prev.value())},
                            {"next", to_hex(e.next.value())}});
        r.data["verdict"] = "accepted";
        r.data["squashed"] = rows;
        r.data["oracle_agrees"] = agrees;
        r.exit_code = agrees ? kOk : kCheckFailed;
    } catch (const dict::HintRejected& e) {
        r.text << "verdict: rejected (" << dict::to_string(e.reason()) << ": " << e.what() << ")\n";
        r.data["verdict"] = "rejected";
        r.data["reason"] = dict::to_string(e.reason());
        r.data["error"] = {{"kind", "HintRejected"}, {"detail", e.what()}};
        r.exit_code = kCheckFailed;
    }
}

// ---------------------------------------------------------------- selftest

void cmd_selftest(bool serial, const std::vector<int>& only, bool stream, Report& r)
{
    acceptance::Config ac;
    ac.parallel = !serial;
    ac.only = only;
    if (stream)
        ac.progress = [](const acceptance::Result& res) { std::cout << acceptance::format_line(res) << std::endl; };
    json criteria = json::array();
    std::size_t passed = 0;
    const auto results = acceptance::run(ac);
    for (const auto& res : results) {
        if (!stream)
            r.text << acceptance::format_line(res) << "\n";
        criteria.push_back(criterion_json(res));
        passed += res.pass;
    }
    r.text << passed << "/" << results.size() << " criteria passed\n";
    r.data = {{"criteria", criteria}, {"passed", passed}, {"total", results.size()}};
    r.exit_code = passed == results.size() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cairo VM model, specification extraction and secp/ECDSA/dictionary verifiers"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Print a JSON report instead of text");

    ProgramArgs prog_args;
    auto* assemble = app.add_subcommand("assemble", "Assemble Casm into a program dump");
    assemble->add_option("--program", prog_args.program, "Casm file")->required();
    assemble->add_option("--out", prog_args.out, "Output JSON (stdout when absent)");
    assemble->add_option("--base-pc", prog_args.base_pc, "Load address");

    auto* disasm = app.add_subcommand("disasm", "Disassemble a program dump or Casm file");
    disasm->add_option("--program", prog_args.program, "Program (.json dump or Casm)")->required();
    disasm->add_option("--base-pc", prog_args.base_pc, "Load address for Casm input");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute a program");
    run->add_option("--program", run_args.program, "Program (.json dump or Casm)")->required();
    run->add_option("--entry-pc", run_args.entry, "Entry word offset or label");
    run->add_option("--max-steps", run_args.max_steps, "Step budget");
    run->add_option("--memory", run_args.memory, "Memory preload: [{addr, value}]");
    run->add_option("--trace", run_args.trace, "Write the trace dump here");
    run->add_option("--base-pc", run_args.base_pc, "Load address");
    run->add_option("--ap", run_args.ap, "Initial ap (argument base with --args)");
    run->add_option("--fp", run_args.fp, "Initial fp (defaults to ap)");
    run->add_option("--rc-base", run_args.rc_base, "Range-check segment base");
    run->add_option("--rc-size", run_args.rc_size, "Range-check segment size");
    run->add_option("--args", run_args.args, "Call the entry function with these explicit arguments")
        ->delimiter(',');

    auto* specgen = app.add_subcommand("specgen", "Extract auto-specs for every function");
    specgen->add_option("--program", prog_args.program, "Casm file")->required();
    specgen->add_option("--out", prog_args.out, "Output directory")->required();
    specgen->add_option("--base-pc", prog_args.base_pc, "Load address");

    std::size_t stdlib_samples = 300;
    auto* stdlib_test = app.add_subcommand("stdlib-test", "Small-field exhaustive and default-field sampled suites");
    stdlib_test->add_option("--samples", stdlib_samples, "Default-field sample count");

    EcArgs ec_args;
    auto* ec = app.add_subcommand("ec", "Non-native elliptic-curve operations");
    ec->add_option("op", ec_args.op, "add | double | mul")
        ->required()
        ->check(CLI::IsMember({"add", "double", "mul"}));
    ec->add_option("--curve", ec_args.curve, "k1 | r1");
    ec->add_option("--point", ec_args.point, "x,y in hex, G, or Zero")->required();
    ec->add_option("--point2", ec_args.point2, "Second addend (defaults to --point)");
    ec->add_option("--scalar", ec_args.scalar, "Scalar below 2^256");

    RecoverArgs rec_args;
    auto* recover = app.add_subcommand("ecdsa-recover", "Recover a public key from a signature");
    recover->add_option("--curve", rec_args.curve, "k1 | r1");
    recover->add_option("--msg", rec_args.msg, "Message hash")->required();
    recover->add_option("--r", rec_args.r, "r")->required();
    recover->add_option("--s", rec_args.s, "s")->required();
    recover->add_option("--v", rec_args.v, "Parity of R.y")->required();

    std::size_t ecdsa_cases = 10;
    std::uint64_t ecdsa_seed = 1;
    std::string ecdsa_curve = "k1";
    auto* ecdsa_self = app.add_subcommand("ecdsa-selftest", "Sign, recover and tamper on random keys");
    ecdsa_self->add_option("--cases", ecdsa_cases, "Number of signatures");
    ecdsa_self->add_option("--seed", ecdsa_seed, "Base seed");
    ecdsa_self->add_option("--curve", ecdsa_curve, "k1 | r1");

    SquashArgs sq_args;
    std::uint64_t corrupt_seed = 0;
    auto* squash = app.add_subcommand("squash-dict", "Squash a dictionary access log");
    squash->add_option("--log", sq_args.log, "Access log JSON")->required();
    auto* corrupt_opt = squash->add_option("--corrupt-hints", corrupt_seed, "Corrupt the hints with this seed");
    squash->add_option("--kappa", sq_args.kappa, "Step bound (defaults to the log length)");

    bool serial = false;
    std::vector<int> only;
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
    selftest->add_flag("--serial", serial, "Use the serial batch kernels");
    selftest->add_option("--only", only, "Criterion ids")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    Report r;
    r.command = app.get_subcommands().front()->get_name();
    try {
        const auto field = load_field();
        const FieldConfig& cfg = *field;
        if (assemble->parsed())
            cmd_assemble(prog_args, cfg, r);
        else if (disasm->parsed())
            cmd_disasm(prog_args, cfg, r);
        else if (run->parsed())
            cmd_run(run_args, cfg, r);
        else if (specgen->parsed())
            cmd_specgen(prog_args, cfg, r);
        else if (stdlib_test->parsed())
            cmd_stdlib_test(stdlib_samples, r);
        else if (ec->parsed())
            cmd_ec(ec_args, cfg, r);
        else if (recover->parsed())
            cmd_ecdsa_recover(rec_args, cfg, r);
        else if (ecdsa_self->parsed()) {
            secp::require_wide_field(cfg);
            summary_report(batch::ecdsa_round_trip(curve_named(ecdsa_curve), cfg, {ecdsa_cases, ecdsa_seed, false}),
                           r);
        } else if (squash->parsed()) {
            if (*corrupt_opt)
                sq_args.corrupt_seed = corrupt_seed;
            cmd_squash(sq_args, cfg, r);
        } else if (selftest->parsed())
            cmd_selftest(serial, only, !as_json, r);
    } catch (const UsageError& e) {
        r.exit_code = kUsage;
        r.data["error"] = {{"kind", "usage"}, {"detail", e.what()}};
        r.text << "error: " << e.what() << "\n";
    } catch (const CasmSyntaxError& e) {
        r.exit_code = kUsage;
        r.data["error"] = {{"kind", "syntax"}, {"detail", e.what()}};
        r.text << "error: " << e.what() << "\n";
    } catch (const secp::GadgetError& e) {
        r.exit_code = kCheckFailed;
        r.data["error"] = {{"kind", secp::to_string(e.kind())}, {"detail", e.what()}};
        r.text << "error: " << secp::to_string(e.kind()) << ": " << e.what() << "\n";
    } catch (const ecdsa::EcdsaError& e) {
        r.exit_code = kCheckFailed;
        r.data["error"] = {{"kind", ecdsa::to_string(e.kind())}, {"detail", e.what()}};
        r.text << "error: " << ecdsa::to_string(e.kind()) << ": " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        r.exit_code = kUsage;
        r.data["error"] = {{"kind", "usage"}, {"detail", e.what()}};
        r.text << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        r.exit_code = kCheckFailed;
        r.data["error"] = {{"kind", "failure"}, {"detail", e.what()}};
        r.text << "error: " << e.what() << "\n";
    }

    if (as_json) {
        const json report{{"command", r.command}, {"ok", r.exit_code == kOk}, {"exit_code", r.exit_code},
                          {"result", r.data}};
        std::cout << report.dump(2) << std::endl;
    } else {
        (r.exit_code == kUsage ? std::cerr : std::cout) << r.text.str();
    }
    return r.exit_code;
}
