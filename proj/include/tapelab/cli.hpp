#pragma once

#include "tapelab/core.hpp"
#include "tapelab/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tapelab {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes of the tapelab binary.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,     // bad flags or scenario config
    kExitIo = 3,        // unreadable / unwritable files, corrupt tapes
    kExitNotFound = 4,  // unknown ticker, missing tape
};

// Files of a simulation run directory.
namespace run_files {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kSymbols = "symbols.csv";
inline constexpr const char* kExchanges = "exchanges.csv";
inline constexpr const char* kScenario = "scenario.cfg";
inline constexpr const char* kGroundTruth = "ground_truth.nms";
std::string sip_tape(SipId sip);  // "sip_A.nms", ...
} // namespace run_files

/// Writes the three SIP tapes, the ground-truth tape, the directories, the
/// canonical scenario and manifest.json into out_dir. Returns the manifest.
nlohmann::json cmd_simulate(const SimConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

struct AnalyzeOptions {
    std::string subcommand;  // latency, oos, nbbo, windows, descriptive, trend, returns, scatter
    std::vector<std::filesystem::path> tapes;
    std::optional<std::filesystem::path> run_dir;        // alternative to tapes: the run's SIP tapes
    std::optional<std::filesystem::path> symbols_path;   // default: symbols.csv beside the first tape
    std::optional<std::string> symbol;
    bool include_quotes = false;
    bool ex_trf = false;
    std::int64_t bin_width_cents = 1;
    std::string ordering = "sip";   // nbbo: sip | exchange
    std::string kinds = "both";     // windows: trades | quotes | both
    std::string group = "exchange"; // latency: sip | exchange | sip-exchange
    std::filesystem::path out_dir = ".";
};

/// Runs one analysis, writes its CSVs into out_dir and returns the JSON summary.
nlohmann::json cmd_analyze(const AnalyzeOptions& options, std::ostream& log);

/// Runs every analysis over the run's tapes into run_dir/report and returns
/// the bundle summary. Output bytes depend only on the tapes.
nlohmann::json cmd_report(const std::filesystem::path& run_dir, std::ostream& log);

/// Full command line (args[0] is the program name). JSON goes to out, logs to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tapelab
