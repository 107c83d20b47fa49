#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lexeval/config.hpp"

namespace lexeval {

struct ComputeArgs {
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> config;
    std::filesystem::path out;
    std::vector<std::string> disable;
    std::optional<std::string> format;  // json | jsonl; default inferred from extension
    std::optional<std::size_t> jobs;
};

struct ValidateArgs {
    std::filesystem::path metrics;
    std::filesystem::path ratings;
    std::optional<std::filesystem::path> config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> bootstrap_samples;
    std::optional<std::size_t> permutation_samples;
};

struct ReportArgs {
    std::filesystem::path analysis;
    std::string format = "markdown";  // markdown | csv
};

int cmd_compute(const ComputeArgs& args, std::ostream& err);
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace lexeval
