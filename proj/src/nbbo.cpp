#include "tapelab/nbbo.hpp"

#include "tapelab/errors.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace tapelab {

TopOfBook::TopOfBook(const ExchangeRegistry& registry)
    : registry_(&registry), bids_(registry.size()), asks_(registry.size()) {}

void TopOfBook::apply(const TapeRecord& quote) {
    if (!is_quote(quote.msg_kind)) throw std::invalid_argument("apply_quote: record is a trade");
    const auto& venue = registry_->at(quote.exchange_id);
    if (!venue.quotes_allowed) throw QuoteRejected("quote from non-quoting venue " + venue.abbreviation);
    auto& side = quote.msg_kind == MsgKind::BidQuote ? bids_[quote.exchange_id] : asks_[quote.exchange_id];
    if (quote.size == 0)
        side.reset();
    else
        side = QuoteSide{quote.price, quote.size};
}

TopOfBook apply_quote(TopOfBook state, const TapeRecord& quote) {
    state.apply(quote);
    return state;
}

std::string_view to_string(MarketState s) {
    switch (s) {
    case MarketState::Normal: return "Normal";
    case MarketState::Locked: return "Locked";
    case MarketState::Crossed: return "Crossed";
    case MarketState::OneSided: return "OneSided";
    case MarketState::Empty: return "Empty";
    }
    return "?";
}

MarketState classify(const std::optional<NbboSide>& bid, const std::optional<NbboSide>& ask) {
    if (!bid && !ask) return MarketState::Empty;
    if (!bid || !ask) return MarketState::OneSided;
    const auto spread = ask->price - bid->price;
    if (spread.ticks < 0) return MarketState::Crossed;
    if (spread.ticks == 0) return MarketState::Locked;
    return MarketState::Normal;
}

namespace {

std::optional<NbboSide> scan_side(const TopOfBook& book, bool is_bid) {
    std::optional<NbboSide> best;
    for (std::size_t v = 0; v < book.venue_count(); ++v) {
        const auto venue = static_cast<ExchangeId>(v);
        const auto& side = is_bid ? book.bid(venue) : book.ask(venue);
        if (!side) continue;
        const bool better = !best || (is_bid ? side->price > best->price : side->price < best->price);
        if (better)
            best = NbboSide{side->price, side->size, venue};
        else if (side->price == best->price)
            best->size += side->size;  // venues are visited in id order, so the setter stays lowest
    }
    return best;
}

NbboRecord make_record(Timestamp ts, std::optional<NbboSide> bid, std::optional<NbboSide> ask) {
    NbboRecord r;
    r.ts = ts;
    r.state = classify(bid, ask);
    if (bid && ask) r.spread = ask->price - bid->price;
    r.best_bid = std::move(bid);
    r.best_ask = std::move(ask);
    return r;
}

} // namespace

NbboRecord compute_nbbo(const TopOfBook& book, Timestamp ts) {
    return make_record(ts, scan_side(book, true), scan_side(book, false));
}

NbboTracker::NbboTracker(const ExchangeRegistry& registry) : book_(registry) {}

void NbboTracker::apply(const TapeRecord& quote) {
    const bool is_bid = quote.msg_kind == MsgKind::BidQuote;
    const auto before = is_bid ? book_.bid(quote.exchange_id) : book_.ask(quote.exchange_id);
    book_.apply(quote);
    const auto& after = is_bid ? book_.bid(quote.exchange_id) : book_.ask(quote.exchange_id);
    update_side(is_bid ? bid_ : ask_, before, after, quote.exchange_id, is_bid);
}

void NbboTracker::update_side(Cache& cache, const std::optional<QuoteSide>& before,
                              const std::optional<QuoteSide>& after, ExchangeId venue, bool is_bid) {
    if (cache.dirty) return;
    auto& best = cache.best;
    const auto improves = [&](Price p) { return is_bid ? p > best->price : p < best->price; };
    const bool was_at_best = before && best && before->price == best->price;

    if (after && (!best || improves(after->price))) {
        best = NbboSide{after->price, after->size, venue};
        return;
    }
    if (after && after->price == best->price) {
        if (was_at_best) {
            best->size = best->size - before->size + after->size;
        } else {
            best->size += after->size;
            best->setter = std::min(best->setter, venue);
        }
        return;
    }
    // The venue is now worse than the best (or gone); only matters if it was contributing.
    if (was_at_best) {
        if (best->size > before->size && venue != best->setter)
            best->size -= before->size;
        else
            cache.dirty = true;
    }
}

void NbboTracker::rescan(Cache& cache, bool is_bid) const {
    cache.best = scan_side(book_, is_bid);
    cache.dirty = false;
}

NbboRecord NbboTracker::current(Timestamp ts) {
    if (bid_.dirty) rescan(bid_, true);
    if (ask_.dirty) rescan(ask_, false);
    return make_record(ts, bid_.best, ask_.best);
}

std::vector<std::size_t> order_indices(std::span<const TapeRecord> records, Ordering ordering) {
    std::vector<std::size_t> idx(records.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (ordering == Ordering::SipOrder) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const auto& x = records[a];
            const auto& y = records[b];
            return std::tie(x.sip_ts, x.sip_seq, a) < std::tie(y.sip_ts, y.sip_seq, b);
        });
    } else {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const auto& x = records[a];
            const auto& y = records[b];
            return std::tie(x.exchange_ts, x.exchange_id, x.sip_seq, a) <
                   std::tie(y.exchange_ts, y.exchange_id, y.sip_seq, b);
        });
    }
    return idx;
}

std::vector<NbboRecord> stream_nbbo(std::span<const TapeRecord> records, Ordering ordering,
                                    const ExchangeRegistry& registry) {
    std::vector<NbboRecord> out;
    if (records.empty()) return out;
    const SymbolId symbol = records.front().symbol_id;
    std::size_t quotes = 0;
    for (const auto& r : records) {
        if (r.symbol_id != symbol) throw OrderingError("stream_nbbo: input mixes several symbols");
        quotes += is_quote(r.msg_kind) ? 1 : 0;
    }
    out.reserve(quotes);
    NbboTracker tracker(registry);
    for (std::size_t i : order_indices(records, ordering)) {
        const auto& r = records[i];
        if (!is_quote(r.msg_kind)) continue;
        tracker.apply(r);
        out.push_back(tracker.current(ordering == Ordering::SipOrder ? r.sip_ts : r.exchange_ts));
    }
    return out;
}

StateCounts count_states(std::span<const NbboRecord> sequence) {
    StateCounts c;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const auto state = sequence[i].state;
        const bool entered = i == 0 || sequence[i - 1].state != state;
        if (entered && state == MarketState::Crossed) ++c.crosses;
        if (entered && state == MarketState::Locked) ++c.locks;
        if (i + 1 < sequence.size())
            c.time_in_state_us[static_cast<std::size_t>(state)] +=
                sequence[i + 1].ts.micros - sequence[i].ts.micros;
    }
    return c;
}

void write_nbbo_csv(std::span<const NbboRecord> sequence, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out << "ts_us,bid,bid_size,ask,ask_size,spread,state\n";
    for (const auto& r : sequence) {
        out << r.ts.micros << ',';
        if (r.best_bid) out << price_to_decimal(r.best_bid->price) << ',' << r.best_bid->size;
        else out << ',';
        out << ',';
        if (r.best_ask) out << price_to_decimal(r.best_ask->price) << ',' << r.best_ask->size;
        else out << ',';
        out << ',';
        if (r.spread) out << price_to_decimal(*r.spread);
        out << ',' << to_string(r.state) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace tapelab
