#pragma once

#include <map>
#include <optional>
#include <string>

#include "lorentz/extended_time.hpp"

namespace lorentz::cli {

/// One verification run: a subcommand plus its configuration sections.
/// Sections mirror the module names ([run], [spacetime], [measure],
/// [params], [path], [function], [vectors]); entries are "key = value".
struct RunConfig {
    std::string command;
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string out_dir = ".";
    std::uint64_t seed = 20240901;
    std::optional<double> tol;  // global tolerance override
    bool quiet = false;

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const;
    bool has(const std::string& section, const std::string& key) const;
};

/// Parses the flat structured-text config ('#' comments, [section] headers,
/// key = value lines). The [run] section feeds command/out/seed/tol.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Executes one subcommand, writing CSV artifacts and summary.csv into the
/// output directory. Exit status: 0 all checks pass, 2 parse error,
/// 3 precondition/check failure (witness in the summary), 4 numerical.
int run(const RunConfig& config);

/// Runs every config listed in the manifest (one path per line), isolating
/// failures, and aggregates per-entry results into batch.csv under out_dir.
/// Duplicate output directories abort before any entry executes.
int batch(const std::string& manifest_path, const std::string& out_dir, bool quiet);

}  // namespace lorentz::cli
