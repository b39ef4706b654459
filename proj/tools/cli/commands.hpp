#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "table.hpp"

namespace euii::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

/// A fully resolved command. `params` holds every input that affects the
/// output, so a manifest built from it reproduces the run.
struct Invocation {
    std::string subcommand;
    nlohmann::ordered_json params;
    Format format = Format::csv;
    unsigned workers = 0;
};

bool is_stochastic(const std::string& subcommand);

/// Computes the result table of an invocation. Skipped-row and exclusion
/// notices go to `notes` (standard error when null).
Table execute(const Invocation& invocation, std::ostream* notes = nullptr);

nlohmann::ordered_json make_manifest(const Invocation& invocation, double seconds);
Invocation invocation_from_manifest(const nlohmann::json& manifest);

/// Default worker count: EUII_WORKERS if set, else 0 (all cores).
unsigned default_workers();

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace euii::cli
