#pragma once

#include "tapelab/core.hpp"
#include "tapelab/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tapelab {

// Lognormal link delay: median * exp(sigma * Z), never below floor_us.
struct LinkDelay {
    double median_us = 450.0;
    double sigma = 0.25;
    double floor_us = 0.0;
    bool operator==(const LinkDelay&) const = default;
};

// One delay distribution per (venue, SIP) link.
class LatencyModel {
public:
    /// Every link uses `uniform`.
    explicit LatencyModel(LinkDelay uniform = {}, std::size_t venue_count = ExchangeRegistry::standard().size());

    /// 450 us median / sigma 0.25 everywhere; CHX links at 2,250 us; QTRF sigma 0.75.
    static LatencyModel default_profile();
    static LatencyModel zero() { return LatencyModel(LinkDelay{0.0, 0.0, 0.0}); }
    static LatencyModel constant(double delay_us) { return LatencyModel(LinkDelay{delay_us, 0.0, 0.0}); }

    const LinkDelay& link(ExchangeId venue, SipId sip) const { return links_.at(venue)[sip_index(sip)]; }
    void set_link(ExchangeId venue, SipId sip, LinkDelay delay) { links_.at(venue)[sip_index(sip)] = delay; }
    void set_venue(ExchangeId venue, LinkDelay delay) { links_.at(venue).fill(delay); }
    void scale_medians(double factor);
    std::size_t venue_count() const noexcept { return links_.size(); }

    /// Whole microseconds, >= floor_us.
    std::uint64_t sample(ExchangeId venue, SipId sip, RngStream& rng) const;

    bool operator==(const LatencyModel&) const = default;

private:
    std::vector<std::array<LinkDelay, 3>> links_;
};

// Piecewise intensity multiplier over the session clock.
struct IntradayShape {
    double pre_market = 1.0;   // 04:00 - 09:30
    double open_burst = 1.0;   // 09:30 + open_burst_s
    double midday = 1.0;
    double close_burst = 1.0;  // 16:00 - close_burst_s
    double after_hours = 1.0;  // 16:00 - 20:00
    std::uint64_t open_burst_s = 1800;
    std::uint64_t close_burst_s = 1800;

    static IntradayShape constant() { return {}; }
    static IntradayShape typical_day();

    double at(Timestamp ts) const;
    double max() const;
    /// Integral of the multiplier over [start, end), in seconds.
    double integral(Timestamp start, Timestamp end) const;
    bool operator==(const IntradayShape&) const = default;
};

struct SizeDistribution {
    std::uint32_t lot = 100;  // shares per lot
    double mean_lots = 2.0;   // geometric lot count, support 1, 2, ...
    bool operator==(const SizeDistribution&) const = default;
};

struct SymbolActivityProfile {
    std::string ticker;
    Listing listing = Listing::NYSE;
    /// Poisson intensity of executions (parent orders) per second, before the shape.
    double trade_rate_per_s = 0.0;
    IntradayShape intraday_shape;
    double quote_trade_ratio = 10.0;
    /// Lit venues and their probabilities; must sum to 1.
    std::vector<std::pair<ExchangeId, double>> venue_weights;
    Price price0{};
    std::int64_t walk_step_ticks = 100;
    SizeDistribution size_distribution;
    /// Mean number of extra venue fills per execution (Poisson). 0 means one print per execution.
    double sweep_extra_mean = 0.0;
    /// Share of prints reported through the listing's TRF instead of a lit venue.
    double trf_fraction = 0.15;

    bool penny() const { return price0.ticks < Price::kTicksPerDollar; }
    /// Expected number of prints over [start, end).
    double expected_trades(Timestamp start, Timestamp end) const;
    bool operator==(const SymbolActivityProfile&) const = default;
};

/// Equal-ish default split over the 11 lit venues.
std::vector<std::pair<ExchangeId, double>> default_venue_weights();

struct SimConfig {
    std::uint64_t seed = 0;
    std::vector<SymbolActivityProfile> symbols;
    LatencyModel latency = LatencyModel::default_profile();
    Timestamp session_start{0};
    Timestamp session_end{kSessionEndUs};
    std::string scenario_name = "custom";

    /// Throws ConfigError naming the offending field.
    void validate(const ExchangeRegistry& registry = ExchangeRegistry::standard()) const;
    /// Symbol ids follow the order of `symbols`.
    SymbolDirectory directory() const;
    bool operator==(const SimConfig&) const = default;
};

/// TRF that receives dark prints for a listing: QTRF for NASDAQ, NTRF otherwise.
ExchangeId trf_for(Listing listing);

// A message as sent by its venue; the event id is its index in the ground truth.
struct MarketEvent {
    SymbolId symbol_id = 0;
    MsgKind kind = MsgKind::Trade;
    ExchangeId exchange_id = 0;
    Price price;
    std::uint32_t size = 0;
    Timestamp ts;
    bool operator==(const MarketEvent&) const = default;
};

/// Ground truth, ordered by (ts, symbol_id). Per symbol, timestamps are
/// strictly increasing; per venue, ask - bid >= 1 tick at all times, and the
/// exchange-time NBBO is never locked or crossed.
std::vector<MarketEvent> generate_events(const SimConfig& config,
                                         const ExchangeRegistry& registry = ExchangeRegistry::standard());

/// Ground-truth view as a tape: sip_ts = exchange_ts, sip_seq = event id + 1.
std::vector<TapeRecord> ground_truth_tape(std::span<const MarketEvent> events);

struct SipTape {
    SipId sip = SipId::A;
    std::vector<TapeRecord> records;        // sip_seq 1, 2, ... in (sip_ts, exchange_ts, venue, event id) order
    std::vector<std::uint64_t> event_ids;  // parallel to records
};

struct Consolidated {
    std::array<SipTape, 3> sips;
    std::size_t total_records() const;
};

/// sip_ts = exchange_ts + sampled link delay. Each (venue, SIP) link is FIFO:
/// a message never overtakes an earlier one on the same link.
Consolidated consolidate(std::span<const MarketEvent> events, const SymbolDirectory& directory,
                         const LatencyModel& latency, std::uint64_t seed,
                         const ExchangeRegistry& registry = ExchangeRegistry::standard());

/// "typical_day" or "stress_open"; throws ConfigError otherwise.
SimConfig scenario_preset(std::string_view name);

// Preset constants, exposed for tests.
inline constexpr double kStressOpenMultiplier = 10.0;
inline constexpr double kStressLatencyFactor = 4.0;

} // namespace tapelab
