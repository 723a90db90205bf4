#include "cairovm/stdlib.hpp"

#include <stdexcept>

namespace cairovm::stdlib {

const std::map<std::string, std::string>& sources()
{
    static const std::map<std::string, std::string> src{
        {"assert_nn",
         "func assert_nn{range_check_ptr}(a):\n"
         "[fp + (-3)] = [[fp + (-4)]]\n"
         "[ap] = [fp + (-4)] + 1; ap++\n"
         "ret\n"},
        // b - a is deduced into [ap] by the second instruction.
        {"assert_le",
         "func assert_le{range_check_ptr}(a, b):\n"
         "[ap] = [fp + (-5)]; ap++\n"
         "[fp + (-3)] = [ap] + [fp + (-4)]; ap++\n"
         "call rel -6\n"
         "ret\n"},
        {"assert_nn_le",
         "func assert_nn_le{range_check_ptr}(a, b):\n"
         "[ap] = [fp + (-5)]; ap++\n"
         "[ap] = [fp + (-4)]; ap++\n"
         "call rel -11\n"
         "[ap] = [fp + (-4)]; ap++\n"
         "[ap] = [fp + (-3)]; ap++\n"
         "call rel -11\n"
         "ret\n"},
    };
    return src;
}

std::string library_source()
{
    const auto& s = sources();
    return s.at("assert_nn") + s.at("assert_le") + s.at("assert_nn_le");
}

Program assemble_library(const FieldConfig& cfg)
{
    return parse_casm(library_source(), cfg);
}

Program assemble_with_driver(const std::string& fn, const FieldConfig& cfg)
{
    if (!sources().count(fn))
        throw std::invalid_argument("unknown library function: " + fn);
    return parse_casm(library_source() + "call rel " + fn + "\njmp rel 0\n", cfg);
}

spec::Invocation StdlibRun::invocation() const
{
    const Trace& t = outcome.trace;
    if (!halted() || t.states.size() < 3)
        throw std::logic_error("no completed invocation");
    // Driver: call at index 0, function body from 1, ret at size - 2.
    return {1, t.states.size() - 2};
}

const FunctionDecl& StdlibRun::decl() const
{
    return *program.function_named(function);
}

std::unique_ptr<StdlibRun> run_stdlib(const std::string& fn, const std::vector<Felt>& args, const FieldConfig& cfg,
                                      const BigInt& rc_base, std::size_t max_steps)
{
    auto r = std::unique_ptr<StdlibRun>(
        new StdlibRun{fn, &cfg, assemble_with_driver(fn, cfg), Memory(cfg), {}, {}, {}, Felt(rc_base, cfg)});
    Memory& mem = r->mem;
    load_program(mem, r->program);
    mem.add_range_check_segment(r->rc_base, kRcSegmentSize);

    r->args.push_back(r->rc_base);
    r->args.insert(r->args.end(), args.begin(), args.end());
    const FunctionDecl* decl = r->program.function_named(fn);
    if (decl->arity() != r->args.size())
        throw std::invalid_argument(fn + " takes " + std::to_string(decl->arity() - 1) + " explicit arguments");

    const Felt stack(kStackBase, cfg);
    for (std::size_t k = 0; k < r->args.size(); ++k)
        mem.write(stack + Felt(from_u64(k), cfg), r->args[k]);
    const Felt frame = stack + Felt(from_u64(r->args.size()), cfg);
    const MachineState entry{Felt(r->program.base_pc, cfg) + Felt(from_u64(kDriverOffset), cfg), frame, frame};

    r->outcome = run_collect(r->program, entry, mem, {}, max_steps);
    if (r->halted())
        r->rets = spec::invocation_rets(*decl, r->outcome.trace, mem, r->invocation());
    return r;
}

bool spec_assert_nn(const FieldConfig& cfg, const Felt& a)
{
    // ∃ n < rc_bound, a = ↑n. rc_bound < modulus, so n can only be a's residue.
    return a.value() < cfg.rc_bound;
}

bool spec_assert_le(const FieldConfig& cfg, const Felt& a, const Felt& b)
{
    // ∃ k < rc_bound, b - a = ↑k.
    return (b - a).value() < cfg.rc_bound;
}

bool spec_assert_nn_le(const FieldConfig& cfg, const Felt& a, const Felt& b)
{
    // ∃ m n < rc_bound, a = ↑m ∧ b = ↑(m + n): m is a's residue, and then
    // n ≡ b - a.
    return spec_assert_nn(cfg, a) && spec_assert_le(cfg, a, b);
}

spec::UserSpecs user_specs()
{
    spec::UserSpecs us;
    us.functions["assert_nn"] = [](const Memory& mem, std::size_t, const std::vector<Felt>& args,
                                   const std::vector<Felt>& rets) {
        return args.size() == 2 && rets.size() == 1 && spec_assert_nn(mem.config(), args[1]);
    };
    us.functions["assert_le"] = [](const Memory& mem, std::size_t, const std::vector<Felt>& args,
                                   const std::vector<Felt>& rets) {
        return args.size() == 3 && rets.size() == 1 && spec_assert_le(mem.config(), args[1], args[2]);
    };
    us.functions["assert_nn_le"] = [](const Memory& mem, std::size_t, const std::vector<Felt>& args,
                                      const std::vector<Felt>& rets) {
        return args.size() == 3 && rets.size() == 1 && spec_assert_nn_le(mem.config(), args[1], args[2]);
    };
    return us;
}

}  // namespace cairovm::stdlib
