#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "delaystab/cli.hpp"

int main(int argc, char** argv) {
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        return delaystab::cli::dispatch(std::move(args));
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return delaystab::cli::kExitRuntime;
    }
}
