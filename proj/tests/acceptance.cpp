// Acceptance criteria, one line each.
#include <iostream>

#include "CLI11.hpp"
#include "acceptance_suite.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    std::vector<int> which;
    app.add_option("--criterion", which, "criterion numbers (default: all)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    if (which.empty())
        for (int k = 1; k <= tbp::acceptance::kCriteria; ++k) which.push_back(k);
    int failed = 0;
    for (int k : which) {
        if (k < 1 || k > tbp::acceptance::kCriteria) {
            std::cerr << "no criterion " << k << '\n';
            return 2;
        }
        auto r = tbp::acceptance::run_criterion(k);
        std::cout << tbp::acceptance::format_line(r) << std::endl;
        failed += !r.pass;
    }
    return failed ? 1 : 0;
}
