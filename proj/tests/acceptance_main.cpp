/// @file acceptance_main.cpp
/// @brief Acceptance driver: runs the selected criteria and prints one PASS/FAIL line each.

#include "nlsv/acceptance.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"nlsv acceptance suite"};
    std::vector<int> only;
    nlsv::AcceptanceOptions opts;
    app.add_option("--only", only, "Criterion ids to run (default: all)")->check(CLI::Range(1, 11));
    app.add_option("--workers", opts.workers, "Worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const bool ok = nlsv::run_acceptance(only, opts, [](const nlsv::CriterionResult& r) {
        std::cout << nlsv::format_result(r) << std::endl;
    });
    return ok ? 0 : 1;
}
