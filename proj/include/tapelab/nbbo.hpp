#pragma once

#include "tapelab/core.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tapelab {

struct QuoteSide {
    Price price;
    std::uint32_t size = 0;
    bool operator==(const QuoteSide&) const = default;
};

// Per-venue best bid and offer. Only venues that display quotes have sides.
class TopOfBook {
public:
    explicit TopOfBook(const ExchangeRegistry& registry = ExchangeRegistry::standard());

    /// Replaces the venue's side with (price, size); size 0 clears the side.
    /// Throws QuoteRejected for TRF venues, std::invalid_argument for trades.
    void apply(const TapeRecord& quote);

    const std::optional<QuoteSide>& bid(ExchangeId venue) const { return bids_.at(venue); }
    const std::optional<QuoteSide>& ask(ExchangeId venue) const { return asks_.at(venue); }
    std::size_t venue_count() const noexcept { return bids_.size(); }
    const ExchangeRegistry& registry() const noexcept { return *registry_; }

    bool operator==(const TopOfBook& o) const { return bids_ == o.bids_ && asks_ == o.asks_; }

private:
    const ExchangeRegistry* registry_;
    std::vector<std::optional<QuoteSide>> bids_;
    std::vector<std::optional<QuoteSide>> asks_;
};

/// Value form of TopOfBook::apply.
TopOfBook apply_quote(TopOfBook state, const TapeRecord& quote);

enum class MarketState : std::uint8_t { Normal, Locked, Crossed, OneSided, Empty };
inline constexpr std::size_t kMarketStateCount = 5;
std::string_view to_string(MarketState s);

struct NbboSide {
    Price price;
    std::uint64_t size = 0;  // summed over every venue at the best price
    ExchangeId setter = 0;   // lowest exchange id among the venues at the best price
    bool operator==(const NbboSide&) const = default;
};

struct NbboRecord {
    Timestamp ts;
    std::optional<NbboSide> best_bid;
    std::optional<NbboSide> best_ask;
    std::optional<Price> spread;  // ask - bid, present iff both sides are
    MarketState state = MarketState::Empty;
    bool operator==(const NbboRecord&) const = default;
};

MarketState classify(const std::optional<NbboSide>& bid, const std::optional<NbboSide>& ask);

/// Full scan of every venue side.
NbboRecord compute_nbbo(const TopOfBook& book, Timestamp ts);

// Incrementally maintained NBBO. Improvements and size changes at the best
// price update the cache in O(1); a venue leaving the best price forces a
// rescan of that side on the next read.
class NbboTracker {
public:
    explicit NbboTracker(const ExchangeRegistry& registry = ExchangeRegistry::standard());

    void apply(const TapeRecord& quote);
    NbboRecord current(Timestamp ts);
    const TopOfBook& book() const noexcept { return book_; }

private:
    struct Cache {
        std::optional<NbboSide> best;
        bool dirty = false;
    };
    void update_side(Cache& cache, const std::optional<QuoteSide>& before, const std::optional<QuoteSide>& after,
                     ExchangeId venue, bool is_bid);
    void rescan(Cache& cache, bool is_bid) const;

    TopOfBook book_;
    Cache bid_;
    Cache ask_;
};

enum class Ordering { SipOrder, ExchangeOrder };

/// Sorts indices of `records` by the chosen ordering key.
/// SipOrder: (sip_ts, sip_seq). ExchangeOrder: (exchange_ts, exchange_id, sip_seq).
std::vector<std::size_t> order_indices(std::span<const TapeRecord> records, Ordering ordering);

/// One NbboRecord per quote, applied in the chosen order and stamped with the
/// ordering key. Trades are skipped. Throws OrderingError on mixed symbols.
std::vector<NbboRecord> stream_nbbo(std::span<const TapeRecord> records, Ordering ordering,
                                    const ExchangeRegistry& registry = ExchangeRegistry::standard());

struct StateCounts {
    std::uint64_t crosses = 0;  // entries into Crossed from another state
    std::uint64_t locks = 0;    // entries into Locked from another state
    std::array<std::uint64_t, kMarketStateCount> time_in_state_us{};
    std::uint64_t time_in(MarketState s) const { return time_in_state_us[static_cast<std::size_t>(s)]; }
};

/// Durations run to the next record's timestamp; the last record has none.
StateCounts count_states(std::span<const NbboRecord> sequence);

/// CSV columns: ts_us,bid,bid_size,ask,ask_size,spread,state (absent values empty).
void write_nbbo_csv(std::span<const NbboRecord> sequence, const std::filesystem::path& path);

} // namespace tapelab
