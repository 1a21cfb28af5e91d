#pragma once

#include "tapelab/core.hpp"
#include "tapelab/nbbo.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tapelab {

enum class KindFilter { Trades, Quotes, Both };
bool matches(KindFilter filter, MsgKind kind) noexcept;

// ------------------------------------------------------------------ selection

/// Records of one symbol, filtered by kind (and optionally without TRF prints),
/// in SIP order: (sip_ts, sip_seq).
std::vector<TapeRecord> select_records(std::span<const TapeRecord> records, SymbolId symbol, KindFilter kinds,
                                       bool ex_trf = false,
                                       const ExchangeRegistry& registry = ExchangeRegistry::standard());

/// Buckets records by symbol id (size = directory size), each bucket in SIP order.
std::vector<std::vector<TapeRecord>> split_by_symbol(std::span<const TapeRecord> records, std::size_t symbol_count);

// ------------------------------------------------------------------- latency

// Box-plot summary with the lower-interpolation quantile convention:
// quantile p is the order statistic at index floor(p * (n - 1)).
struct BoxStats {
    std::uint64_t count = 0;
    std::int64_t median = 0;
    double mean = 0.0;
    double std = 0.0;  // population
    std::int64_t min = 0, max = 0;
    std::int64_t q1 = 0, q3 = 0;
    std::int64_t whisker_lo = 0, whisker_hi = 0;  // most extreme data within 1.5 IQR of the quartiles
    std::uint64_t outlier_count = 0;
};

/// Sorts `values` in place. Requires a non-empty input.
BoxStats box_stats(std::vector<std::int64_t>& values);

enum class LatencyGroupBy { Sip, Exchange, SipExchange };

struct LatencyStat {
    std::optional<SipId> sip;
    std::optional<ExchangeId> exchange;
    BoxStats stats;
};

/// One entry per non-empty group, ordered by (sip, exchange).
std::vector<LatencyStat> latency_stats(std::span<const TapeRecord> records, const SymbolDirectory& directory,
                                       LatencyGroupBy group_by, KindFilter kinds = KindFilter::Both);

// Log-spaced histogram for non-negative quantities. Bin 0 holds values in
// [0, 1); bin k >= 1 holds [10^((k-1)/b), 10^(k/b)) with b bins per decade.
// Negative inputs are tallied separately.
struct LogHistogram {
    int bins_per_decade = 10;
    std::vector<double> lower_edges;
    std::vector<std::uint64_t> counts;
    std::uint64_t negative = 0;
    std::uint64_t total() const;
};

LogHistogram log_histogram(std::span<const std::int64_t> values, int bins_per_decade = 10);

// ----------------------------------------------------------- out of sequence

struct OosReport {
    SymbolId symbol_id = 0;
    std::uint64_t total_trades = 0;
    std::uint64_t oos_count = 0;     // negative first differences of exchange_ts in SIP order
    double oos_fraction = 0.0;       // oos_count / total_trades, 0 when there are no trades
    std::uint64_t max_reversal_us = 0;
    double percent() const { return 100.0 * oos_fraction; }
};

/// `trades`: one symbol, trades only, sorted by (sip_ts, sip_seq).
/// Throws OrderingError for unsorted or mixed-symbol input and
/// std::invalid_argument for quote records.
OosReport detect_out_of_sequence(std::span<const TapeRecord> trades);

// --------------------------------------------------------------------- trend

struct TrendFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

/// Ordinary least squares y = slope * x + intercept. Throws DegenerateFit
/// for fewer than two points or zero variance in x. A perfect fit, including
/// constant y, has r_squared 1.
TrendFit fit_trend(std::span<const std::pair<double, double>> points);

/// Average ranks for ties. Returns 0 when either side has no variance.
double spearman(std::span<const double> x, std::span<const double> y);

// ----------------------------------------------------------- latency windows

struct WindowCounts {
    std::vector<std::uint64_t> counts;  // one per message of the requested kinds, in input order
    LogHistogram histogram;
};

/// For each message m: #{r != m of the requested kinds with sip_ts(r) in
/// [exchange_ts(m), sip_ts(m))}. Input: one symbol sorted by sip_ts.
WindowCounts latency_window_events(std::span<const TapeRecord> records, KindFilter kinds,
                                   int bins_per_decade = 10);

// -------------------------------------------------------------- descriptive

enum class Metric { TradeCount, DollarVolume, MessageCount };
enum class SeriesGroupBy { None, Exchange, Sip };

// values[g][s] is the metric for group g in session second s (by sip_ts).
struct SecondSeries {
    Metric metric = Metric::TradeCount;
    std::vector<std::string> groups;
    std::vector<std::vector<double>> values;
    std::size_t seconds() const { return values.empty() ? 0 : values.front().size(); }
};

/// Covers every second of the session (extended if a record lands later).
/// Dollar volume is summed exactly in ticks and reported in dollars.
SecondSeries per_second_aggregate(std::span<const TapeRecord> records, Metric metric, SeriesGroupBy group_by,
                                  const SymbolDirectory& directory,
                                  const ExchangeRegistry& registry = ExchangeRegistry::standard(),
                                  std::size_t session_seconds = kSessionSeconds);

std::vector<double> cumulative(std::span<const double> series);

// ------------------------------------------------------------- cross / lock

struct ScatterPoint {
    SymbolId symbol_id = 0;
    std::uint64_t message_count = 0;  // quotes
    std::uint64_t cross_count = 0;
    std::uint64_t lock_count = 0;
    std::optional<double> mean_trade_price;
    bool penny_flag = false;
};

/// SIP-order NBBO replay per symbol; one point per directory entry.
std::vector<ScatterPoint> cross_lock_scatter(std::span<const TapeRecord> records, const SymbolDirectory& directory,
                                             const ExchangeRegistry& registry = ExchangeRegistry::standard());

// Spread distribution of an NBBO sequence. Bin k covers
// [k * width, (k + 1) * width) cents; one-sided and empty records are skipped.
struct SpreadHistogram {
    std::int64_t bin_width_cents = 1;
    std::vector<std::pair<std::int64_t, std::uint64_t>> bins;  // (lower edge in ticks, count), ascending
};
SpreadHistogram spread_histogram(std::span<const NbboRecord> sequence, std::int64_t bin_width_cents = 1);

// Each venue's own book replayed alone (one symbol).
struct VenueSpreadStat {
    ExchangeId exchange_id = 0;
    std::uint64_t quotes = 0;
    std::uint64_t two_sided = 0;  // records after which both sides were present
    std::int64_t min_spread_ticks = 0;
    std::int64_t median_spread_ticks = 0;
    std::int64_t max_spread_ticks = 0;
    std::uint64_t crossed = 0;  // records in Crossed state
    std::uint64_t locked = 0;   // records in Locked state
};
std::vector<VenueSpreadStat> venue_spread_stats(std::span<const TapeRecord> records, Ordering ordering,
                                                const ExchangeRegistry& registry = ExchangeRegistry::standard());

// ------------------------------------------------------------------ returns

struct ReturnsComparison {
    std::uint64_t n_returns = 0;
    std::uint64_t mismatch_count = 0;
    std::uint64_t sign_flip_count = 0;
    double sum_abs_diff = 0.0;
};

/// Simple returns under SIP order vs exchange-time order, compared pointwise.
/// Throws std::invalid_argument for fewer than two trades.
ReturnsComparison returns_compare(std::span<const TapeRecord> trades);

} // namespace tapelab
