#include "tapelab/sim.hpp"

#include "tapelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

namespace tapelab {

// ------------------------------------------------------------------- latency

LatencyModel::LatencyModel(LinkDelay uniform, std::size_t venue_count) : links_(venue_count) {
    for (auto& row : links_) row.fill(uniform);
}

LatencyModel LatencyModel::default_profile() {
    LatencyModel m(LinkDelay{450.0, 0.25, 0.0});
    m.set_venue(venue::CHX, LinkDelay{2250.0, 0.25, 0.0});
    m.set_venue(venue::QTRF, LinkDelay{450.0, 0.75, 0.0});
    return m;
}

void LatencyModel::scale_medians(double factor) {
    for (auto& row : links_)
        for (auto& link : row) link.median_us *= factor;
}

std::uint64_t LatencyModel::sample(ExchangeId venue, SipId sip, RngStream& rng) const {
    const auto& l = link(venue, sip);
    double d = l.median_us;
    if (l.sigma > 0.0 && l.median_us > 0.0) d = l.median_us * std::exp(l.sigma * rng.normal());
    d = std::max(d, l.floor_us);
    return static_cast<std::uint64_t>(std::llround(d));
}

// --------------------------------------------------------------------- shape

IntradayShape IntradayShape::typical_day() {
    return IntradayShape{0.05, 3.0, 1.0, 3.0, 0.05, 1800, 1800};
}

double IntradayShape::at(Timestamp ts) const {
    const std::uint64_t t = ts.micros;
    if (t < kRegularOpenUs) return pre_market;
    if (t < kRegularOpenUs + open_burst_s * kMicrosPerSecond) return open_burst;
    if (t < kRegularCloseUs - close_burst_s * kMicrosPerSecond) return midday;
    if (t < kRegularCloseUs) return close_burst;
    return after_hours;
}

double IntradayShape::max() const {
    return std::max({pre_market, open_burst, midday, close_burst, after_hours});
}

double IntradayShape::integral(Timestamp start, Timestamp end) const {
    const std::uint64_t open_end = kRegularOpenUs + open_burst_s * kMicrosPerSecond;
    const std::uint64_t close_start = kRegularCloseUs - close_burst_s * kMicrosPerSecond;
    const std::array<std::pair<std::uint64_t, double>, 5> segments{{
        {kRegularOpenUs, pre_market},
        {open_end, open_burst},
        {close_start, midday},
        {kRegularCloseUs, close_burst},
        {kSessionEndUs, after_hours},
    }};
    double total = 0.0;
    std::uint64_t seg_start = 0;
    for (const auto& [seg_end, mult] : segments) {
        const auto lo = std::max(seg_start, start.micros);
        const auto hi = std::min(seg_end, end.micros);
        if (hi > lo) total += mult * static_cast<double>(hi - lo) / kMicrosPerSecond;
        seg_start = seg_end;
    }
    return total;
}

double SymbolActivityProfile::expected_trades(Timestamp start, Timestamp end) const {
    return trade_rate_per_s * intraday_shape.integral(start, end) * (1.0 + sweep_extra_mean);
}

std::vector<std::pair<ExchangeId, double>> default_venue_weights() {
    using namespace venue;
    return {{BATS, 0.12}, {BATY, 0.06}, {EDGA, 0.05}, {EDGX, 0.12}, {CHX, 0.02}, {NASD, 0.22},
            {NQBS, 0.05}, {NQPH, 0.03}, {NYSE, 0.13}, {ARCA, 0.17}, {AMEX, 0.03}};
}

ExchangeId trf_for(Listing listing) {
    return listing == Listing::NASDAQ ? venue::QTRF : venue::NTRF;
}

// -------------------------------------------------------------------- config

void SimConfig::validate(const ExchangeRegistry& registry) const {
    if (symbols.empty()) throw ConfigError("symbols", "at least one symbol is required");
    if (session_end <= session_start) throw ConfigError("session_window", "zero-length session");
    if (session_end.micros > kSessionEndUs) throw ConfigError("session_window", "session ends after 20:00");
    if (latency.venue_count() != registry.size())
        throw ConfigError("latency", "link table does not match the exchange registry");
    for (std::size_t v = 0; v < registry.size(); ++v)
        for (SipId sip : kAllSips) {
            const auto& l = latency.link(static_cast<ExchangeId>(v), sip);
            if (!(l.median_us >= 0.0) || !(l.sigma >= 0.0) || !(l.floor_us >= 0.0))
                throw ConfigError("latency", "link parameters must be non-negative");
        }

    SymbolDirectory seen;
    for (const auto& s : symbols) {
        const std::string field = "symbols." + s.ticker;
        if (s.ticker.empty()) throw ConfigError("symbols", "empty ticker");
        if (seen.find(s.ticker)) throw ConfigError(field, "duplicate ticker");
        seen.add(s.ticker, s.listing, false);
        if (!(s.trade_rate_per_s >= 0.0)) throw ConfigError(field + ".trade_rate_per_s", "must be >= 0");
        if (!(s.quote_trade_ratio > 0.0)) throw ConfigError(field + ".quote_trade_ratio", "must be > 0");
        if (s.walk_step_ticks < 1) throw ConfigError(field + ".walk_step_ticks", "must be >= 1");
        if (s.price0.ticks < 4 * s.walk_step_ticks)
            throw ConfigError(field + ".price0", "must be at least 4 walk steps");
        if (s.size_distribution.lot == 0 || !(s.size_distribution.mean_lots >= 1.0))
            throw ConfigError(field + ".size_distribution", "lot must be > 0 and mean_lots >= 1");
        if (!(s.sweep_extra_mean >= 0.0)) throw ConfigError(field + ".sweep_extra_mean", "must be >= 0");
        if (!(s.trf_fraction >= 0.0 && s.trf_fraction <= 1.0))
            throw ConfigError(field + ".trf_fraction", "must be in [0, 1]");
        const auto& sh = s.intraday_shape;
        if (!(sh.pre_market >= 0 && sh.open_burst >= 0 && sh.midday >= 0 && sh.close_burst >= 0 &&
              sh.after_hours >= 0))
            throw ConfigError(field + ".intraday_shape", "multipliers must be >= 0");
        if (s.venue_weights.empty()) throw ConfigError(field + ".venue_weights", "no venues");
        double sum = 0.0;
        for (const auto& [v, w] : s.venue_weights) {
            if (!registry.contains(v) || !registry.at(v).quotes_allowed)
                throw ConfigError(field + ".venue_weights", "venue must be a quoting exchange");
            if (!(w >= 0.0)) throw ConfigError(field + ".venue_weights", "negative weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(field + ".venue_weights", "weights must sum to 1");
    }
}

SymbolDirectory SimConfig::directory() const {
    SymbolDirectory d;
    for (const auto& s : symbols) d.add(s.ticker, s.listing, s.penny());
    return d;
}

// ---------------------------------------------------------------- generation

namespace {

struct Side {
    Price price;
    std::uint32_t size = 0;
    bool present = false;
};

class SymbolGenerator {
public:
    SymbolGenerator(const SimConfig& cfg, SymbolId id, const ExchangeRegistry& registry)
        : cfg_(cfg),
          p_(cfg.symbols[id]),
          id_(id),
          arrivals_(cfg.seed, id, StreamPurpose::Arrivals),
          sweeps_(cfg.seed, id, StreamPurpose::Sweeps),
          venues_(cfg.seed, id, StreamPurpose::Venues),
          quotes_(cfg.seed, id, StreamPurpose::Quotes),
          prices_(cfg.seed, id, StreamPurpose::Prices),
          sizes_(cfg.seed, id, StreamPurpose::Sizes),
          bids_(registry.size()),
          asks_(registry.size()),
          step_(p_.walk_step_ticks),
          ref_(p_.price0.ticks),
          last_ts_(static_cast<std::int64_t>(cfg.session_start.micros) - 1) {
        double acc = 0.0;
        for (const auto& [v, w] : p_.venue_weights) {
            lit_.push_back(v);
            acc += w;
            cumulative_.push_back(acc);
        }
        lo_ = std::max(4 * step_, snap(p_.price0.ticks / 2));
        hi_ = std::max(lo_ + 4 * step_, snap(p_.price0.ticks * 2));
        quote_trials_ = static_cast<std::uint32_t>(std::ceil(2.0 * p_.quote_trade_ratio));
        quote_p_ = p_.quote_trade_ratio / quote_trials_;
    }

    void run(std::vector<MarketEvent>& out) {
        out_ = &out;
        const double peak = p_.trade_rate_per_s * p_.intraday_shape.max();
        if (!(peak > 0.0)) return;
        const double rate_per_us = peak / kMicrosPerSecond;
        const double shape_max = p_.intraday_shape.max();
        const auto end = static_cast<double>(cfg_.session_end.micros);

        double t = static_cast<double>(cfg_.session_start.micros);
        while (true) {
            t += arrivals_.exponential(rate_per_us);
            if (t >= end) break;
            const Timestamp candidate{static_cast<std::uint64_t>(t)};
            if (arrivals_.uniform() * shape_max >= p_.intraday_shape.at(candidate)) continue;
            execution(candidate.micros);
        }
    }

private:
    std::int64_t snap(std::int64_t ticks) const { return (ticks / step_) * step_; }

    std::uint64_t next_ts(std::uint64_t wanted) {
        const auto ts = std::max<std::int64_t>(static_cast<std::int64_t>(wanted), last_ts_ + 1);
        last_ts_ = ts;
        return static_cast<std::uint64_t>(ts);
    }

    void emit(MsgKind kind, ExchangeId venue, Price price, std::uint32_t size, std::uint64_t wanted_ts) {
        out_->push_back(MarketEvent{id_, kind, venue, price, size, Timestamp{next_ts(wanted_ts)}});
    }

    ExchangeId pick_lit() { return lit_[venues_.pick(cumulative_)]; }

    std::uint32_t draw_size() {
        return p_.size_distribution.lot * sizes_.geometric(p_.size_distribution.mean_lots);
    }

    std::int64_t draw_offset() { return step_ * static_cast<std::int64_t>(1 + prices_.uniform_int(3)); }

    void walk() {
        if (!prices_.bernoulli(0.5)) return;
        ref_ += prices_.bernoulli(0.5) ? step_ : -step_;
        if (ref_ < lo_) ref_ = 2 * lo_ - ref_;
        if (ref_ > hi_) ref_ = 2 * hi_ - ref_;
    }

    // One venue quote update plus whatever refreshes keep every bid below
    // every ask. Refreshes only widen and go first, so each intermediate
    // state is uncrossed as well. Returns the number of messages emitted.
    std::size_t quote_action(ExchangeId venue) {
        walk();
        const bool is_bid = prices_.bernoulli(0.5);
        const Price price{is_bid ? ref_ - draw_offset() : ref_ + draw_offset()};
        const std::uint32_t size = draw_size();
        std::size_t emitted = 0;

        if (is_bid) {
            std::int64_t max_bid = price.ticks;
            for (ExchangeId v : lit_)
                if (bids_[v].present && v != venue) max_bid = std::max(max_bid, bids_[v].price.ticks);
            for (ExchangeId v : lit_) {
                if (asks_[v].present && asks_[v].price <= price) {
                    asks_[v] = {Price{std::max(ref_ + draw_offset(), max_bid + step_)}, draw_size(), true};
                    emit(MsgKind::AskQuote, v, asks_[v].price, asks_[v].size, next_quote_time());
                    ++emitted;
                }
            }
            bids_[venue] = {price, size, true};
            emit(MsgKind::BidQuote, venue, price, size, next_quote_time());
        } else {
            std::int64_t min_ask = price.ticks;
            for (ExchangeId v : lit_)
                if (asks_[v].present && v != venue) min_ask = std::min(min_ask, asks_[v].price.ticks);
            for (ExchangeId v : lit_) {
                if (bids_[v].present && bids_[v].price >= price) {
                    bids_[v] = {Price{std::min(ref_ - draw_offset(), min_ask - step_)}, draw_size(), true};
                    emit(MsgKind::BidQuote, v, bids_[v].price, bids_[v].size, next_quote_time());
                    ++emitted;
                }
            }
            asks_[venue] = {price, size, true};
            emit(MsgKind::AskQuote, venue, price, size, next_quote_time());
        }
        return emitted + 1;
    }

    std::uint64_t next_quote_time() {
        return quote_cursor_ < quote_times_.size() ? quote_times_[quote_cursor_++] : 0;
    }

    Price trade_price(ExchangeId venue) {
        std::int64_t mid = ref_;
        if (venue < bids_.size() && bids_[venue].present && asks_[venue].present)
            mid = (bids_[venue].price.ticks + asks_[venue].price.ticks) / 2;
        mid = (mid + step_ / 2) / step_ * step_;
        const auto noise = static_cast<std::int64_t>(prices_.uniform_int(3)) - 1;
        return Price{std::max(step_, mid + noise * step_)};
    }

    void execution(std::uint64_t exec_ts) {
        const std::uint32_t prints = 1 + sweeps_.poisson(p_.sweep_extra_mean);

        struct Print {
            ExchangeId venue;
            ExchangeId quote_venue;
            std::uint32_t quotes;
        };
        std::vector<Print> plan(prints);
        std::uint32_t total_quotes = 0;
        for (auto& pr : plan) {
            const bool dark = p_.trf_fraction > 0.0 && venues_.bernoulli(p_.trf_fraction);
            pr.quote_venue = pick_lit();
            pr.venue = dark ? trf_for(p_.listing) : pr.quote_venue;
            pr.quotes = quotes_.binomial(quote_trials_, quote_p_);
            total_quotes += pr.quotes;
        }

        // Quote updates spread over the gap since the previous execution.
        quote_times_.clear();
        quote_cursor_ = 0;
        const auto gap_start = static_cast<std::uint64_t>(last_ts_ + 1);
        for (std::uint32_t i = 0; i < total_quotes; ++i) {
            const double u = quotes_.uniform();
            quote_times_.push_back(exec_ts > gap_start
                                       ? gap_start + static_cast<std::uint64_t>(u * static_cast<double>(exec_ts - gap_start))
                                       : gap_start);
        }
        std::sort(quote_times_.begin(), quote_times_.end());

        for (const auto& pr : plan) {
            std::size_t done = 0;
            while (done < pr.quotes) done += quote_action(pr.quote_venue);
        }

        std::uint64_t ts = exec_ts;
        for (std::size_t j = 0; j < plan.size(); ++j) {
            if (j > 0) ts += 1 + sweeps_.uniform_int(20);
            emit(MsgKind::Trade, plan[j].venue, trade_price(plan[j].venue), draw_size(), ts);
            ts = static_cast<std::uint64_t>(last_ts_);
        }
    }

    const SimConfig& cfg_;
    const SymbolActivityProfile& p_;
    SymbolId id_;
    RngStream arrivals_, sweeps_, venues_, quotes_, prices_, sizes_;
    std::vector<Side> bids_, asks_;
    std::vector<ExchangeId> lit_;
    std::vector<double> cumulative_;
    std::int64_t step_;
    std::int64_t ref_;
    std::int64_t lo_ = 0, hi_ = 0;
    std::int64_t last_ts_;
    std::uint32_t quote_trials_ = 1;
    double quote_p_ = 0.0;
    std::vector<std::uint64_t> quote_times_;
    std::size_t quote_cursor_ = 0;
    std::vector<MarketEvent>* out_ = nullptr;
};

} // namespace

std::vector<MarketEvent> generate_events(const SimConfig& config, const ExchangeRegistry& registry) {
    config.validate(registry);
    std::vector<MarketEvent> events;
    double expected = 0.0;
    for (const auto& s : config.symbols)
        expected += s.expected_trades(config.session_start, config.session_end) * (1.0 + s.quote_trade_ratio);
    events.reserve(static_cast<std::size_t>(expected * 1.05) + 16);

    for (SymbolId id = 0; id < config.symbols.size(); ++id) SymbolGenerator(config, id, registry).run(events);
    // Per-symbol timestamps are strictly increasing, so (ts, symbol) is a total order.
    std::sort(events.begin(), events.end(), [](const MarketEvent& a, const MarketEvent& b) {
        return std::tie(a.ts, a.symbol_id) < std::tie(b.ts, b.symbol_id);
    });
    return events;
}

std::vector<TapeRecord> ground_truth_tape(std::span<const MarketEvent> events) {
    std::vector<TapeRecord> out;
    out.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        out.push_back(TapeRecord{e.symbol_id, e.kind, e.exchange_id, e.price, e.size, e.ts, e.ts, i + 1});
    }
    return out;
}

// ------------------------------------------------------------- consolidation

std::size_t Consolidated::total_records() const {
    std::size_t n = 0;
    for (const auto& s : sips) n += s.records.size();
    return n;
}

Consolidated consolidate(std::span<const MarketEvent> events, const SymbolDirectory& directory,
                         const LatencyModel& latency, std::uint64_t seed, const ExchangeRegistry& registry) {
    std::vector<RngStream> streams;
    streams.reserve(directory.size());
    for (SymbolId s = 0; s < directory.size(); ++s) streams.emplace_back(seed, s, StreamPurpose::Latency);

    std::vector<std::array<std::uint64_t, 3>> link_last(registry.size(), {0, 0, 0});
    struct Pending {
        TapeRecord rec;
        std::uint64_t event_id;
    };
    std::array<std::vector<Pending>, 3> pending;

    Timestamp prev{0};
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (!directory.contains(e.symbol_id))
            throw DataNotFound("event " + std::to_string(i) + " references unknown symbol id " +
                               std::to_string(e.symbol_id));
        if (!registry.contains(e.exchange_id))
            throw DataNotFound("event " + std::to_string(i) + " references unknown venue id " +
                               std::to_string(e.exchange_id));
        if (e.ts < prev) throw OrderingError("consolidate: events are not in exchange-time order");
        prev = e.ts;

        const SipId sip = directory.sip_of(e.symbol_id);
        auto& last = link_last[e.exchange_id][sip_index(sip)];
        const std::uint64_t arrival = std::max(e.ts.micros + latency.sample(e.exchange_id, sip, streams[e.symbol_id]), last);
        last = arrival;
        pending[sip_index(sip)].push_back(
            {TapeRecord{e.symbol_id, e.kind, e.exchange_id, e.price, e.size, e.ts, Timestamp{arrival}, 0}, i});
    }

    Consolidated out;
    for (SipId sip : kAllSips) {
        auto& rows = pending[sip_index(sip)];
        std::sort(rows.begin(), rows.end(), [](const Pending& a, const Pending& b) {
            return std::tie(a.rec.sip_ts, a.rec.exchange_ts, a.rec.exchange_id, a.event_id) <
                   std::tie(b.rec.sip_ts, b.rec.exchange_ts, b.rec.exchange_id, b.event_id);
        });
        auto& tape = out.sips[sip_index(sip)];
        tape.sip = sip;
        tape.records.reserve(rows.size());
        tape.event_ids.reserve(rows.size());
        std::uint64_t seq = 0;
        for (auto& row : rows) {
            row.rec.sip_seq = ++seq;
            tape.records.push_back(row.rec);
            tape.event_ids.push_back(row.event_id);
        }
        rows = {};
    }
    return out;
}

} // namespace tapelab
