#include "cairovm/acceptance.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv)
{
    cairovm::acceptance::Config cfg;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--serial") == 0)
            cfg.parallel = false;
    cfg.progress = [](const cairovm::acceptance::Result& r) {
        std::cout << cairovm::acceptance::format_line(r) << std::endl;
    };
    int passed = 0, total = 0;
    for (const auto& r : cairovm::acceptance::run(cfg)) {
        ++total;
        passed += r.pass;
    }
    std::cout << passed << "/" << total << " criteria passed" << std::endl;
    return passed == total && total == cairovm::acceptance::kCriterionCount ? 0 : 1;
}
