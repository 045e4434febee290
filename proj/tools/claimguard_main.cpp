#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "claimguard/cli/cli.hpp"

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("claimguard"));
    return claimguard::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
