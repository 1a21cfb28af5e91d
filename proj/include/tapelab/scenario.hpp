#pragma once

#include "tapelab/digest.hpp"
#include "tapelab/sim.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace tapelab {

// Scenario files are plain text: top-level `key = value` lines followed by
// sections. Blank lines are ignored and '#' starts a comment.
//
//   scenario_name = typical_day
//   seed = 42
//   session_start_us = 0
//   session_end_us = 57600000000
//
//   [latency]            uniform link delay applied to every (venue, SIP) link
//   median_us = 450
//   sigma = 0.25
//   floor_us = 0
//
//   [links]              per-link overrides; sip may be '*' for all three
//   venue,sip,median_us,sigma,floor_us
//   CHX,*,2250,0.25,0
//
//   [shape.NAME]         intraday multipliers referenced by the symbols table
//   pre_market = 0.05
//   open_burst = 3
//   midday = 1
//   close_burst = 3
//   after_hours = 0.05
//   open_burst_s = 1800
//   close_burst_s = 1800
//
//   [venues.NAME]        venue weights referenced by the symbols table
//   NASD = 0.22
//   ...
//
//   [symbols]
//   ticker,listing,rate_per_s,price0,step_ticks,quote_ratio,lot,mean_lots,sweep_extra,trf_fraction,shape,venues
//   AAPL,NASDAQ,2.6,116.00,100,10,100,2,4.75,0.15,NAME,NAME
//
// Every field except the symbols table has a default. Throws ConfigError
// naming the offending field (with its line number where there is one).
SimConfig parse_scenario(std::string_view text,
                         const ExchangeRegistry& registry = ExchangeRegistry::standard());
SimConfig load_scenario(const std::filesystem::path& path,
                        const ExchangeRegistry& registry = ExchangeRegistry::standard());

/// Canonical text: parse_scenario(format_scenario(c)) == c, and equal
/// configs always format to identical bytes.
std::string format_scenario(const SimConfig& config,
                            const ExchangeRegistry& registry = ExchangeRegistry::standard());

/// SHA-256 of the canonical text; written into every tape header.
Digest scenario_hash(const SimConfig& config, const ExchangeRegistry& registry = ExchangeRegistry::standard());

} // namespace tapelab
