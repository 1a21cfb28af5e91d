#include "tapelab/analytics.hpp"

#include "tapelab/errors.hpp"
#include "tapelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace tapelab {

bool matches(KindFilter filter, MsgKind kind) noexcept {
    switch (filter) {
    case KindFilter::Trades: return kind == MsgKind::Trade;
    case KindFilter::Quotes: return is_quote(kind);
    case KindFilter::Both: return true;
    }
    return true;
}

namespace {

bool sip_less(const TapeRecord& a, const TapeRecord& b) {
    return std::tie(a.sip_ts, a.sip_seq) < std::tie(b.sip_ts, b.sip_seq);
}

void ensure_sip_order(std::vector<TapeRecord>& v) {
    if (!std::is_sorted(v.begin(), v.end(), sip_less)) std::stable_sort(v.begin(), v.end(), sip_less);
}

} // namespace

std::vector<TapeRecord> select_records(std::span<const TapeRecord> records, SymbolId symbol, KindFilter kinds,
                                       bool ex_trf, const ExchangeRegistry& registry) {
    std::vector<TapeRecord> out;
    for (const auto& r : records) {
        if (r.symbol_id != symbol || !matches(kinds, r.msg_kind)) continue;
        if (ex_trf && registry.contains(r.exchange_id) && registry.at(r.exchange_id).family == ExchangeFamily::TRF)
            continue;
        out.push_back(r);
    }
    ensure_sip_order(out);
    return out;
}

std::vector<std::vector<TapeRecord>> split_by_symbol(std::span<const TapeRecord> records, std::size_t symbol_count) {
    std::vector<std::size_t> sizes(symbol_count, 0);
    for (const auto& r : records) {
        if (r.symbol_id >= symbol_count)
            throw DataNotFound("record references unknown symbol id " + std::to_string(r.symbol_id));
        ++sizes[r.symbol_id];
    }
    std::vector<std::vector<TapeRecord>> out(symbol_count);
    for (std::size_t s = 0; s < symbol_count; ++s) out[s].reserve(sizes[s]);
    for (const auto& r : records) out[r.symbol_id].push_back(r);
    for (auto& v : out) ensure_sip_order(v);
    return out;
}

// ------------------------------------------------------------------- latency

BoxStats box_stats(std::vector<std::int64_t>& values) {
    if (values.empty()) throw std::invalid_argument("box_stats: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const auto q = [&](double p) { return values[static_cast<std::size_t>(std::floor(p * static_cast<double>(n - 1)))]; };

    BoxStats b;
    b.count = n;
    b.min = values.front();
    b.max = values.back();
    b.q1 = q(0.25);
    b.median = q(0.5);
    b.q3 = q(0.75);

    long double sum = 0;
    for (auto v : values) sum += v;
    const long double mean = sum / n;
    long double ss = 0;
    for (auto v : values) ss += (v - mean) * (v - mean);
    b.mean = static_cast<double>(mean);
    b.std = static_cast<double>(std::sqrt(ss / n));

    const double iqr = static_cast<double>(b.q3 - b.q1);
    const double lo_fence = static_cast<double>(b.q1) - 1.5 * iqr;
    const double hi_fence = static_cast<double>(b.q3) + 1.5 * iqr;
    const auto lo = std::lower_bound(values.begin(), values.end(), lo_fence,
                                     [](std::int64_t v, double f) { return static_cast<double>(v) < f; });
    const auto hi = std::upper_bound(values.begin(), values.end(), hi_fence,
                                     [](double f, std::int64_t v) { return f < static_cast<double>(v); });
    b.whisker_lo = *lo;
    b.whisker_hi = *(hi - 1);
    b.outlier_count = static_cast<std::uint64_t>((lo - values.begin()) + (values.end() - hi));
    return b;
}

std::vector<LatencyStat> latency_stats(std::span<const TapeRecord> records, const SymbolDirectory& directory,
                                       LatencyGroupBy group_by, KindFilter kinds) {
    // Key: sip * 256 + exchange; unused halves are fixed at 0xFF.
    std::map<std::uint32_t, std::vector<std::int64_t>> groups;
    for (const auto& r : records) {
        if (!matches(kinds, r.msg_kind)) continue;
        std::uint32_t sip = 0xFF, ex = 0xFF;
        if (group_by != LatencyGroupBy::Exchange) sip = static_cast<std::uint32_t>(sip_index(directory.sip_of(r.symbol_id)));
        if (group_by != LatencyGroupBy::Sip) ex = r.exchange_id;
        groups[sip * 256 + ex].push_back(record_latency(r));
    }
    std::vector<LatencyStat> out;
    out.reserve(groups.size());
    for (auto& [key, values] : groups) {
        LatencyStat s;
        if (key / 256 != 0xFF) s.sip = kAllSips[key / 256];
        if (key % 256 != 0xFF) s.exchange = static_cast<ExchangeId>(key % 256);
        s.stats = box_stats(values);
        out.push_back(std::move(s));
    }
    return out;
}

std::uint64_t LogHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), negative);
}

LogHistogram log_histogram(std::span<const std::int64_t> values, int bins_per_decade) {
    if (bins_per_decade < 1) throw std::invalid_argument("log_histogram: bins_per_decade must be >= 1");
    LogHistogram h;
    h.bins_per_decade = bins_per_decade;
    const auto edge = [&](std::size_t k) { return k == 0 ? 0.0 : std::pow(10.0, static_cast<double>(k - 1) / bins_per_decade); };
    const auto bin_of = [&](std::int64_t v) -> std::size_t {
        if (v < 1) return 0;
        auto k = static_cast<std::size_t>(std::floor(std::log10(static_cast<double>(v)) * bins_per_decade)) + 1;
        // Guard against rounding at exact decade boundaries.
        while (k > 1 && static_cast<double>(v) < edge(k)) --k;
        while (static_cast<double>(v) >= edge(k + 1)) ++k;
        return k;
    };
    std::size_t top = 0;
    for (auto v : values)
        if (v >= 0) top = std::max(top, bin_of(v));
    h.counts.assign(values.empty() ? 0 : top + 1, 0);
    for (auto v : values) {
        if (v < 0) ++h.negative;
        else ++h.counts[bin_of(v)];
    }
    for (std::size_t k = 0; k < h.counts.size(); ++k) h.lower_edges.push_back(edge(k));
    return h;
}

// ----------------------------------------------------------- out of sequence

OosReport detect_out_of_sequence(std::span<const TapeRecord> trades) {
    OosReport rep;
    if (trades.empty()) return rep;
    rep.symbol_id = trades.front().symbol_id;
    rep.total_trades = trades.size();
    for (std::size_t i = 0; i < trades.size(); ++i) {
        const auto& r = trades[i];
        if (r.msg_kind != MsgKind::Trade) throw std::invalid_argument("detect_out_of_sequence: quote record in input");
        if (r.symbol_id != rep.symbol_id) throw OrderingError("detect_out_of_sequence: input mixes several symbols");
        if (i == 0) continue;
        const auto& prev = trades[i - 1];
        if (sip_less(r, prev) || r.sip_seq == prev.sip_seq)
            throw OrderingError("detect_out_of_sequence: input is not sorted by (sip_ts, sip_seq) at index " +
                                std::to_string(i));
        if (r.exchange_ts < prev.exchange_ts) {
            ++rep.oos_count;
            rep.max_reversal_us = std::max(rep.max_reversal_us, prev.exchange_ts.micros - r.exchange_ts.micros);
        }
    }
    rep.oos_fraction = static_cast<double>(rep.oos_count) / static_cast<double>(rep.total_trades);
    return rep;
}

// --------------------------------------------------------------------- trend

TrendFit fit_trend(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw DegenerateFit("fit_trend: need at least two points");
    const auto n = static_cast<long double>(points.size());
    long double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    const long double mx = sx / n, my = sy / n;
    long double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0) throw DegenerateFit("fit_trend: all x values are equal");
    const long double slope = sxy / sxx;
    const long double intercept = my - slope * mx;
    long double ss_res = 0;
    for (const auto& [x, y] : points) {
        const long double e = y - (slope * x + intercept);
        ss_res += e * e;
    }
    TrendFit f;
    f.slope = static_cast<double>(slope);
    f.intercept = static_cast<double>(intercept);
    f.n_points = points.size();
    f.r_squared = syy == 0 ? 1.0 : std::clamp(static_cast<double>(1 - ss_res / syy), 0.0, 1.0);
    return f;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
    if (x.size() < 2) return 0.0;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mean = (n + 1.0) / 2.0;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// ----------------------------------------------------------- latency windows

WindowCounts latency_window_events(std::span<const TapeRecord> records, KindFilter kinds, int bins_per_decade) {
    std::vector<std::uint64_t> arrivals;
    arrivals.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (i > 0) {
            if (r.symbol_id != records[0].symbol_id)
                throw OrderingError("latency_window_events: input mixes several symbols");
            if (r.sip_ts < records[i - 1].sip_ts)
                throw OrderingError("latency_window_events: input is not sorted by sip_ts");
        }
        if (matches(kinds, r.msg_kind)) arrivals.push_back(r.sip_ts.micros);
    }

    WindowCounts out;
    out.counts.reserve(arrivals.size());
    std::vector<std::int64_t> as_signed;
    as_signed.reserve(arrivals.size());
    for (const auto& r : records) {
        if (!matches(kinds, r.msg_kind)) continue;
        std::uint64_t c = 0;
        if (r.exchange_ts < r.sip_ts) {
            // m itself arrives at sip_ts(m), outside the half-open window.
            const auto lo = std::lower_bound(arrivals.begin(), arrivals.end(), r.exchange_ts.micros);
            const auto hi = std::lower_bound(lo, arrivals.end(), r.sip_ts.micros);
            c = static_cast<std::uint64_t>(hi - lo);
        }
        out.counts.push_back(c);
        as_signed.push_back(static_cast<std::int64_t>(c));
    }
    out.histogram = log_histogram(as_signed, bins_per_decade);
    return out;
}

// -------------------------------------------------------------- descriptive

SecondSeries per_second_aggregate(std::span<const TapeRecord> records, Metric metric, SeriesGroupBy group_by,
                                  const SymbolDirectory& directory, const ExchangeRegistry& registry,
                                  std::size_t session_seconds) {
    SecondSeries s;
    s.metric = metric;
    switch (group_by) {
    case SeriesGroupBy::None: s.groups = {"all"}; break;
    case SeriesGroupBy::Exchange:
        for (const auto& row : registry.rows()) s.groups.push_back(row.abbreviation);
        break;
    case SeriesGroupBy::Sip:
        for (SipId sip : kAllSips) s.groups.emplace_back(to_string(sip));
        break;
    }
    std::size_t seconds = session_seconds;
    for (const auto& r : records) seconds = std::max<std::size_t>(seconds, r.sip_ts.micros / kMicrosPerSecond + 1);

    // Exact integer accumulation: counts, or price ticks times shares.
    std::vector<std::vector<std::int64_t>> acc(s.groups.size(), std::vector<std::int64_t>(seconds, 0));
    for (const auto& r : records) {
        const bool trade = r.msg_kind == MsgKind::Trade;
        if (metric != Metric::MessageCount && !trade) continue;
        std::size_t g = 0;
        if (group_by == SeriesGroupBy::Exchange) g = r.exchange_id;
        else if (group_by == SeriesGroupBy::Sip) g = sip_index(directory.sip_of(r.symbol_id));
        if (g >= acc.size()) throw DataNotFound("record references unknown venue id " + std::to_string(r.exchange_id));
        const std::int64_t v = metric == Metric::DollarVolume ? r.price.ticks * static_cast<std::int64_t>(r.size) : 1;
        acc[g][r.sip_ts.micros / kMicrosPerSecond] += v;
    }
    s.values.resize(acc.size());
    for (std::size_t g = 0; g < acc.size(); ++g) {
        s.values[g].resize(seconds);
        for (std::size_t t = 0; t < seconds; ++t)
            s.values[g][t] = metric == Metric::DollarVolume
                                 ? static_cast<double>(acc[g][t]) / static_cast<double>(Price::kTicksPerDollar)
                                 : static_cast<double>(acc[g][t]);
    }
    return s;
}

std::vector<double> cumulative(std::span<const double> series) {
    std::vector<double> out(series.size());
    std::partial_sum(series.begin(), series.end(), out.begin());
    return out;
}

// ------------------------------------------------------------- cross / lock

std::vector<ScatterPoint> cross_lock_scatter(std::span<const TapeRecord> records, const SymbolDirectory& directory,
                                             const ExchangeRegistry& registry) {
    const auto by_symbol = split_by_symbol(records, directory.size());
    std::vector<ScatterPoint> out(directory.size());
    parallel_for(directory.size(), [&](std::size_t s) {
        const auto& recs = by_symbol[s];
        auto& p = out[s];
        p.symbol_id = static_cast<SymbolId>(s);
        p.penny_flag = directory.at(p.symbol_id).penny_flag;
        long double price_sum = 0;
        std::uint64_t trades = 0;
        for (const auto& r : recs) {
            if (is_quote(r.msg_kind)) {
                ++p.message_count;
            } else {
                price_sum += r.price.dollars();
                ++trades;
            }
        }
        if (trades > 0) p.mean_trade_price = static_cast<double>(price_sum / trades);
        const auto counts = count_states(stream_nbbo(recs, Ordering::SipOrder, registry));
        p.cross_count = counts.crosses;
        p.lock_count = counts.locks;
    });
    return out;
}

SpreadHistogram spread_histogram(std::span<const NbboRecord> sequence, std::int64_t bin_width_cents) {
    if (bin_width_cents < 1) throw std::invalid_argument("spread_histogram: bin width must be >= 1 cent");
    SpreadHistogram h;
    h.bin_width_cents = bin_width_cents;
    const std::int64_t width = bin_width_cents * (Price::kTicksPerDollar / 100);
    std::map<std::int64_t, std::uint64_t> bins;
    for (const auto& r : sequence) {
        if (!r.spread) continue;
        const auto t = r.spread->ticks;
        const std::int64_t k = t >= 0 ? t / width : -((-t + width - 1) / width);
        ++bins[k * width];
    }
    h.bins.assign(bins.begin(), bins.end());
    return h;
}

std::vector<VenueSpreadStat> venue_spread_stats(std::span<const TapeRecord> records, Ordering ordering,
                                                const ExchangeRegistry& registry) {
    std::vector<std::vector<TapeRecord>> per_venue(registry.size());
    for (const auto& r : records)
        if (is_quote(r.msg_kind)) per_venue.at(r.exchange_id).push_back(r);
    std::vector<VenueSpreadStat> out;
    for (std::size_t v = 0; v < per_venue.size(); ++v) {
        if (per_venue[v].empty()) continue;
        VenueSpreadStat st;
        st.exchange_id = static_cast<ExchangeId>(v);
        st.quotes = per_venue[v].size();
        std::vector<std::int64_t> spreads;
        for (const auto& n : stream_nbbo(per_venue[v], ordering, registry)) {
            if (!n.spread) continue;
            spreads.push_back(n.spread->ticks);
            st.crossed += n.state == MarketState::Crossed ? 1 : 0;
            st.locked += n.state == MarketState::Locked ? 1 : 0;
        }
        st.two_sided = spreads.size();
        if (!spreads.empty()) {
            const auto b = box_stats(spreads);
            st.min_spread_ticks = b.min;
            st.median_spread_ticks = b.median;
            st.max_spread_ticks = b.max;
        }
        out.push_back(st);
    }
    return out;
}

// ------------------------------------------------------------------ returns

ReturnsComparison returns_compare(std::span<const TapeRecord> trades) {
    if (trades.size() < 2) throw std::invalid_argument("returns_compare: need at least two trades");
    for (const auto& r : trades) {
        if (r.msg_kind != MsgKind::Trade) throw std::invalid_argument("returns_compare: quote record in input");
        if (r.symbol_id != trades.front().symbol_id) throw OrderingError("returns_compare: input mixes several symbols");
    }
    const auto returns = [&](Ordering o) {
        const auto idx = order_indices(trades, o);
        std::vector<double> r(idx.size() - 1);
        for (std::size_t i = 1; i < idx.size(); ++i)
            r[i - 1] = static_cast<double>(trades[idx[i]].price.ticks) /
                           static_cast<double>(trades[idx[i - 1]].price.ticks) -
                       1.0;
        return r;
    };
    const auto sip = returns(Ordering::SipOrder);
    const auto truth = returns(Ordering::ExchangeOrder);
    ReturnsComparison c;
    c.n_returns = sip.size();
    for (std::size_t i = 0; i < sip.size(); ++i) {
        if (sip[i] == truth[i]) continue;
        ++c.mismatch_count;
        c.sum_abs_diff += std::abs(sip[i] - truth[i]);
        if (sip[i] != 0.0 && truth[i] != 0.0 && (sip[i] > 0) != (truth[i] > 0)) ++c.sign_flip_count;
    }
    return c;
}

} // namespace tapelab
