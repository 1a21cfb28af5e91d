#include "tapelab/cli.hpp"

#include "tapelab/analytics.hpp"
#include "tapelab/errors.hpp"
#include "tapelab/nbbo.hpp"
#include "tapelab/parallel.hpp"
#include "tapelab/scenario.hpp"
#include "tapelab/tape_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <utility>

namespace fs = std::filesystem;
using nlohmann::json;

namespace tapelab {

std::string run_files::sip_tape(SipId sip) {
    return "sip_" + std::string(to_string(sip)) + ".nms";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void make_dirs(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

json tape_entry(const std::string& name, const fs::path& dir, const std::string& file, std::uint64_t records,
                std::optional<SipId> sip) {
    json j;
    j["name"] = name;
    j["path"] = file;
    j["sip"] = sip ? json(std::string(to_string(*sip))) : json(nullptr);
    j["records"] = records;
    j["sha256"] = to_hex(sha256_file(dir / file));
    return j;
}

// ------------------------------------------------------------------ loading

struct Loaded {
    SymbolDirectory directory;
    std::vector<TapeRecord> records;
    std::size_t issues = 0;
};

Loaded load(const std::vector<fs::path>& tapes, const fs::path& symbols_path, std::ostream& log) {
    Loaded d;
    if (!fs::exists(symbols_path))
        throw DataNotFound("symbol directory not found: " + symbols_path.string() + " (pass --symbols)");
    d.directory = read_symbol_directory(symbols_path);
    for (const auto& p : tapes) {
        if (!fs::exists(p)) throw DataNotFound("tape not found: " + p.string());
        auto contents = read_tape(p);
        d.issues += contents.issues.size();
        if (d.records.empty()) d.records = std::move(contents.records);
        else d.records.insert(d.records.end(), contents.records.begin(), contents.records.end());
    }
    for (const auto& r : d.records)
        if (!d.directory.contains(r.symbol_id))
            throw DataNotFound("tape references symbol id " + std::to_string(r.symbol_id) + " missing from " +
                               symbols_path.string());
    log << "[tapelab] loaded " << d.records.size() << " records from " << tapes.size() << " tape(s)";
    if (d.issues) log << ", " << d.issues << " validation issue(s)";
    log << '\n';
    return d;
}

SymbolId require_symbol(const Loaded& d, const AnalyzeOptions& o) {
    if (!o.symbol) throw ConfigError("--symbol", "required for analyze " + o.subcommand);
    const auto id = d.directory.find(*o.symbol);
    if (!id) throw DataNotFound("unknown ticker '" + *o.symbol + "'");
    return *id;
}

std::optional<SymbolId> optional_symbol(const Loaded& d, const AnalyzeOptions& o) {
    if (!o.symbol) return std::nullopt;
    return require_symbol(d, o);
}

std::string label_of(const Loaded& d, std::optional<SymbolId> s) {
    return s ? d.directory.at(*s).ticker : "all";
}

json box_json(const BoxStats& b) {
    return json{{"count", b.count},         {"median_us", b.median},   {"mean_us", b.mean},
                {"std_us", b.std},          {"min_us", b.min},         {"max_us", b.max},
                {"q1_us", b.q1},            {"q3_us", b.q3},           {"whisker_lo_us", b.whisker_lo},
                {"whisker_hi_us", b.whisker_hi}, {"outlier_count", b.outlier_count}};
}

json oos_json(const OosReport& r) {
    return json{{"total_trades", r.total_trades},
                {"oos_count", r.oos_count},
                {"oos_fraction", r.oos_fraction},
                {"oos_percent", r.percent()},
                {"max_reversal_us", r.max_reversal_us}};
}

void write_histogram(const LogHistogram& h, const fs::path& path, const char* value_name) {
    auto out = open_out(path);
    out << "lower_edge_" << value_name << ",count\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k) out << num(h.lower_edges[k]) << ',' << h.counts[k] << '\n';
    finish(out, path);
}

// -------------------------------------------------------------- subcommands

json analyze_latency(const Loaded& d, const AnalyzeOptions& o) {
    const auto symbol = optional_symbol(d, o);
    const auto label = label_of(d, symbol);
    const KindFilter kinds = o.include_quotes ? KindFilter::Both : KindFilter::Trades;
    LatencyGroupBy group;
    if (o.group == "sip") group = LatencyGroupBy::Sip;
    else if (o.group == "exchange") group = LatencyGroupBy::Exchange;
    else if (o.group == "sip-exchange") group = LatencyGroupBy::SipExchange;
    else throw ConfigError("--group", "expected sip, exchange or sip-exchange");

    std::vector<TapeRecord> subset;
    std::span<const TapeRecord> recs = d.records;
    if (symbol) {
        subset = select_records(d.records, *symbol, KindFilter::Both);
        recs = subset;
    }
    const auto stats = latency_stats(recs, d.directory, group, kinds);

    std::vector<std::int64_t> all;
    all.reserve(recs.size());
    for (const auto& r : recs)
        if (matches(kinds, r.msg_kind)) all.push_back(record_latency(r));
    const auto hist = log_histogram(all);

    const auto& registry = ExchangeRegistry::standard();
    const fs::path csv = o.out_dir / ("latency_" + label + ".csv");
    auto out = open_out(csv);
    out << "sip,exchange,count,median_us,mean_us,std_us,min_us,q1_us,q3_us,max_us,whisker_lo_us,whisker_hi_us,"
           "outliers\n";
    json groups = json::array();
    for (const auto& s : stats) {
        const std::string sip = s.sip ? std::string(to_string(*s.sip)) : "";
        const std::string ex = s.exchange ? registry.at(*s.exchange).abbreviation : "";
        const auto& b = s.stats;
        out << sip << ',' << ex << ',' << b.count << ',' << b.median << ',' << num(b.mean) << ',' << num(b.std)
            << ',' << b.min << ',' << b.q1 << ',' << b.q3 << ',' << b.max << ',' << b.whisker_lo << ','
            << b.whisker_hi << ',' << b.outlier_count << '\n';
        auto g = box_json(b);
        g["sip"] = s.sip ? json(sip) : json(nullptr);
        g["exchange"] = s.exchange ? json(ex) : json(nullptr);
        groups.push_back(std::move(g));
    }
    finish(out, csv);
    write_histogram(hist, o.out_dir / ("latency_hist_" + label + ".csv"), "us");

    json j;
    j["subcommand"] = "latency";
    j["symbol"] = label;
    j["kinds"] = o.include_quotes ? "both" : "trades";
    j["group_by"] = o.group;
    j["records"] = all.size();
    j["negative_latency"] = hist.negative;
    j["overall"] = all.empty() ? json(nullptr) : box_json(box_stats(all));
    j["groups"] = std::move(groups);
    return j;
}

json analyze_oos(const Loaded& d, const AnalyzeOptions& o) {
    const SymbolId id = require_symbol(d, o);
    const auto label = d.directory.at(id).ticker;
    const auto with_trf = select_records(d.records, id, KindFilter::Trades, false);
    const auto without_trf = select_records(d.records, id, KindFilter::Trades, true);
    const auto rep = detect_out_of_sequence(with_trf);
    const auto rep_ex = detect_out_of_sequence(without_trf);
    const auto& chosen = o.ex_trf ? without_trf : with_trf;

    const auto& registry = ExchangeRegistry::standard();
    const fs::path csv = o.out_dir / ("oos_" + label + ".csv");
    auto out = open_out(csv);
    out << "sip_seq,sip_ts_us,exchange_ts_us,exchange,price,first_diff_us,out_of_sequence\n";
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        const auto& r = chosen[i];
        out << r.sip_seq << ',' << r.sip_ts.micros << ',' << r.exchange_ts.micros << ','
            << registry.at(r.exchange_id).abbreviation << ',' << price_to_decimal(r.price) << ',';
        if (i > 0) {
            const auto diff = static_cast<std::int64_t>(r.exchange_ts.micros) -
                              static_cast<std::int64_t>(chosen[i - 1].exchange_ts.micros);
            out << diff << ',' << (diff < 0 ? 1 : 0);
        } else {
            out << ",0";
        }
        out << '\n';
    }
    finish(out, csv);

    json j = oos_json(o.ex_trf ? rep_ex : rep);
    j["subcommand"] = "oos";
    j["symbol"] = label;
    j["ex_trf"] = o.ex_trf;
    j["with_trf"] = oos_json(rep);
    j["without_trf"] = oos_json(rep_ex);
    return j;
}

json analyze_nbbo(const Loaded& d, const AnalyzeOptions& o) {
    const SymbolId id = require_symbol(d, o);
    const auto label = d.directory.at(id).ticker;
    Ordering ordering;
    if (o.ordering == "sip") ordering = Ordering::SipOrder;
    else if (o.ordering == "exchange") ordering = Ordering::ExchangeOrder;
    else throw ConfigError("--ordering", "expected sip or exchange");

    const auto recs = select_records(d.records, id, KindFilter::Both);
    const auto seq = stream_nbbo(recs, ordering);
    write_nbbo_csv(seq, o.out_dir / ("nbbo_" + label + ".csv"));
    const auto counts = count_states(seq);

    const auto hist = spread_histogram(seq, o.bin_width_cents);
    const fs::path spread_csv = o.out_dir / ("nbbo_spread_" + label + ".csv");
    auto out = open_out(spread_csv);
    out << "lower_edge,upper_edge,count\n";
    const Price width{o.bin_width_cents * (Price::kTicksPerDollar / 100)};
    for (const auto& [lo, c] : hist.bins)
        out << price_to_decimal(Price{lo}) << ',' << price_to_decimal(Price{lo} + width) << ',' << c << '\n';
    finish(out, spread_csv);

    const auto& registry = ExchangeRegistry::standard();
    const auto venues = venue_spread_stats(recs, ordering);
    const fs::path venue_csv = o.out_dir / ("nbbo_venues_" + label + ".csv");
    auto vout = open_out(venue_csv);
    vout << "exchange,quotes,two_sided,min_spread,median_spread,max_spread,crossed,locked\n";
    std::uint64_t venue_crossed = 0, venue_locked = 0;
    for (const auto& v : venues) {
        vout << registry.at(v.exchange_id).abbreviation << ',' << v.quotes << ',' << v.two_sided << ','
             << price_to_decimal(Price{v.min_spread_ticks}) << ',' << price_to_decimal(Price{v.median_spread_ticks})
             << ',' << price_to_decimal(Price{v.max_spread_ticks}) << ',' << v.crossed << ',' << v.locked << '\n';
        venue_crossed += v.crossed;
        venue_locked += v.locked;
    }
    finish(vout, venue_csv);

    json time_in_state;
    for (std::size_t s = 0; s < kMarketStateCount; ++s)
        time_in_state[std::string(to_string(static_cast<MarketState>(s)))] = counts.time_in_state_us[s];
    std::uint64_t crossed_records = 0, locked_records = 0;
    for (const auto& r : seq) {
        crossed_records += r.state == MarketState::Crossed ? 1 : 0;
        locked_records += r.state == MarketState::Locked ? 1 : 0;
    }
    return json{{"subcommand", "nbbo"},
                {"symbol", label},
                {"ordering", o.ordering},
                {"quotes", seq.size()},
                {"crosses", counts.crosses},
                {"locks", counts.locks},
                {"crossed_records", crossed_records},
                {"locked_records", locked_records},
                {"time_in_state_us", time_in_state},
                {"bin_width_cents", o.bin_width_cents},
                {"venue_crossed_records", venue_crossed},
                {"venue_locked_records", venue_locked}};
}

json analyze_windows(const Loaded& d, const AnalyzeOptions& o) {
    const SymbolId id = require_symbol(d, o);
    const auto label = d.directory.at(id).ticker;
    KindFilter kinds;
    if (o.kinds == "trades") kinds = KindFilter::Trades;
    else if (o.kinds == "quotes") kinds = KindFilter::Quotes;
    else if (o.kinds == "both") kinds = KindFilter::Both;
    else throw ConfigError("--kinds", "expected trades, quotes or both");

    const auto recs = select_records(d.records, id, KindFilter::Both);
    const auto w = latency_window_events(recs, kinds);
    write_histogram(w.histogram, o.out_dir / ("windows_" + label + ".csv"), "events");
    {
        const auto& registry = ExchangeRegistry::standard();
        const fs::path csv = o.out_dir / ("windows_events_" + label + ".csv");
        auto out = open_out(csv);
        out << "sip_seq,kind,exchange,exchange_ts_us,sip_ts_us,events\n";
        std::size_t k = 0;
        for (const auto& r : recs) {
            if (!matches(kinds, r.msg_kind)) continue;
            out << r.sip_seq << ',' << kind_code(r.msg_kind) << ',' << registry.at(r.exchange_id).abbreviation << ','
                << r.exchange_ts.micros << ',' << r.sip_ts.micros << ',' << w.counts[k++] << '\n';
        }
        finish(out, csv);
    }

    json j{{"subcommand", "windows"}, {"symbol", label}, {"kinds", o.kinds}, {"messages", w.counts.size()}};
    if (w.counts.empty()) {
        j["median_events"] = nullptr;
        j["p90_events"] = nullptr;
        j["max_events"] = nullptr;
        j["mean_events"] = nullptr;
        j["modal_bin_lower_edge"] = nullptr;
        return j;
    }
    std::vector<std::int64_t> v(w.counts.begin(), w.counts.end());
    const auto b = box_stats(v);
    const auto modal = std::max_element(w.histogram.counts.begin(), w.histogram.counts.end()) - w.histogram.counts.begin();
    j["median_events"] = b.median;
    j["p90_events"] = v[static_cast<std::size_t>(0.9 * static_cast<double>(v.size() - 1))];
    j["max_events"] = b.max;
    j["mean_events"] = b.mean;
    j["modal_bin_lower_edge"] = w.histogram.lower_edges[static_cast<std::size_t>(modal)];
    return j;
}

json analyze_descriptive(const Loaded& d, const AnalyzeOptions& o) {
    const auto symbol = optional_symbol(d, o);
    const auto label = label_of(d, symbol);
    std::vector<TapeRecord> subset;
    std::span<const TapeRecord> recs = d.records;
    if (symbol) {
        subset = select_records(d.records, *symbol, KindFilter::Both);
        recs = subset;
    }
    const auto trades = per_second_aggregate(recs, Metric::TradeCount, SeriesGroupBy::None, d.directory);
    const auto dollars = per_second_aggregate(recs, Metric::DollarVolume, SeriesGroupBy::None, d.directory);
    const auto messages = per_second_aggregate(recs, Metric::MessageCount, SeriesGroupBy::Sip, d.directory);
    const auto by_venue = per_second_aggregate(recs, Metric::TradeCount, SeriesGroupBy::Exchange, d.directory);
    const auto cum_dollars = cumulative(dollars.values[0]);
    const std::size_t n = trades.seconds();

    // Last trade price per second (SIP order), for the single-symbol price path.
    std::vector<std::optional<Price>> last_price(n);
    if (symbol)
        for (const auto& r : recs)
            if (r.msg_kind == MsgKind::Trade) last_price[r.sip_ts.micros / kMicrosPerSecond] = r.price;

    const fs::path csv = o.out_dir / ("descriptive_" + label + ".csv");
    auto out = open_out(csv);
    out << "second,last_price,trades,dollar_volume,cumulative_dollar_volume,messages_A,messages_B,messages_C\n";
    for (std::size_t t = 0; t < n; ++t) {
        out << t << ',';
        if (last_price[t]) out << price_to_decimal(*last_price[t]);
        out << ',' << num(trades.values[0][t]) << ',' << num(dollars.values[0][t]) << ',' << num(cum_dollars[t])
            << ',' << num(messages.values[0][t]) << ',' << num(messages.values[1][t]) << ','
            << num(messages.values[2][t]) << '\n';
    }
    finish(out, csv);

    const fs::path venue_csv = o.out_dir / ("descriptive_exchange_" + label + ".csv");
    auto vout = open_out(venue_csv);
    vout << "second";
    for (const auto& g : by_venue.groups) vout << ",cumulative_trades_" << g;
    vout << '\n';
    std::vector<std::vector<double>> cum_venue;
    for (const auto& v : by_venue.values) cum_venue.push_back(cumulative(v));
    for (std::size_t t = 0; t < n; ++t) {
        vout << t;
        for (const auto& c : cum_venue) vout << ',' << num(c[t]);
        vout << '\n';
    }
    finish(vout, venue_csv);

    std::vector<double> total_msgs(n, 0.0);
    for (const auto& g : messages.values)
        for (std::size_t t = 0; t < n; ++t) total_msgs[t] += g[t];
    const auto peak = std::max_element(total_msgs.begin(), total_msgs.end());
    // Midday: 10:00 to 15:30, counting only seconds with traffic.
    std::vector<std::int64_t> midday;
    for (std::size_t t = 21'600; t < std::min<std::size_t>(n, 41'400); ++t)
        if (total_msgs[t] > 0) midday.push_back(static_cast<std::int64_t>(total_msgs[t]));
    json midday_median = nullptr;
    json peak_ratio = nullptr;
    if (!midday.empty()) {
        const auto b = box_stats(midday);
        midday_median = b.median;
        if (b.median > 0) peak_ratio = *peak / static_cast<double>(b.median);
    }
    double total_trades = 0, total_msgs_sum = 0;
    for (double v : trades.values[0]) total_trades += v;
    for (double v : total_msgs) total_msgs_sum += v;
    return json{{"subcommand", "descriptive"},
                {"symbol", label},
                {"seconds", n},
                {"total_trades", total_trades},
                {"total_dollar_volume", cum_dollars.empty() ? 0.0 : cum_dollars.back()},
                {"total_messages", total_msgs_sum},
                {"peak_message_second", n ? json(static_cast<std::size_t>(peak - total_msgs.begin())) : json(nullptr)},
                {"peak_messages_per_second", n ? json(*peak) : json(nullptr)},
                {"midday_median_messages_per_second", midday_median},
                {"peak_to_midday_ratio", peak_ratio}};
}

std::vector<OosReport> oos_by_symbol(const Loaded& d, bool ex_trf) {
    const auto by_symbol = split_by_symbol(d.records, d.directory.size());
    const auto& registry = ExchangeRegistry::standard();
    std::vector<OosReport> reps(d.directory.size());
    parallel_for(d.directory.size(), [&](std::size_t s) {
        std::vector<TapeRecord> trades;
        for (const auto& r : by_symbol[s]) {
            if (r.msg_kind != MsgKind::Trade) continue;
            if (ex_trf && registry.at(r.exchange_id).family == ExchangeFamily::TRF) continue;
            trades.push_back(r);
        }
        reps[s] = detect_out_of_sequence(trades);
        reps[s].symbol_id = static_cast<SymbolId>(s);
    });
    return reps;
}

json analyze_trend(const Loaded& d, const AnalyzeOptions& o) {
    const auto reps = oos_by_symbol(d, o.ex_trf);
    const fs::path csv = o.out_dir / "trend_all.csv";
    auto out = open_out(csv);
    out << "ticker,listing,total_trades,oos_count,oos_percent\n";
    std::vector<std::pair<double, double>> points;
    std::vector<double> totals, percents;
    for (const auto& r : reps) {
        const auto& info = d.directory.at(r.symbol_id);
        out << info.ticker << ',' << to_string(info.listing) << ',' << r.total_trades << ',' << r.oos_count << ','
            << num(r.percent()) << '\n';
        if (r.total_trades == 0) continue;
        points.emplace_back(static_cast<double>(r.total_trades), static_cast<double>(r.oos_count));
        totals.push_back(static_cast<double>(r.total_trades));
        percents.push_back(r.oos_fraction);
    }
    finish(out, csv);
    const auto fit = fit_trend(points);
    return json{{"subcommand", "trend"},
                {"symbol", "all"},
                {"ex_trf", o.ex_trf},
                {"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"n_points", fit.n_points},
                {"spearman_trades_vs_oos_percent", spearman(totals, percents)}};
}

json analyze_returns(const Loaded& d, const AnalyzeOptions& o) {
    const SymbolId id = require_symbol(d, o);
    const auto label = d.directory.at(id).ticker;
    const auto trades = select_records(d.records, id, KindFilter::Trades, o.ex_trf);
    const auto c = returns_compare(trades);

    const auto sip_idx = order_indices(trades, Ordering::SipOrder);
    const auto true_idx = order_indices(trades, Ordering::ExchangeOrder);
    const fs::path csv = o.out_dir / ("returns_" + label + ".csv");
    auto out = open_out(csv);
    out << "index,sip_return,true_return,diff\n";
    for (std::size_t i = 1; i < trades.size(); ++i) {
        const auto ret = [&](const std::vector<std::size_t>& idx) {
            return static_cast<double>(trades[idx[i]].price.ticks) / static_cast<double>(trades[idx[i - 1]].price.ticks) - 1.0;
        };
        const double a = ret(sip_idx), b = ret(true_idx);
        out << i - 1 << ',' << num(a) << ',' << num(b) << ',' << num(a - b) << '\n';
    }
    finish(out, csv);
    return json{{"subcommand", "returns"},  {"symbol", label},
                {"ex_trf", o.ex_trf},       {"n_returns", c.n_returns},
                {"mismatch_count", c.mismatch_count}, {"sign_flip_count", c.sign_flip_count},
                {"sum_abs_diff", c.sum_abs_diff}};
}

json analyze_scatter(const Loaded& d, const AnalyzeOptions& o) {
    const auto points = cross_lock_scatter(d.records, d.directory);
    const fs::path csv = o.out_dir / "scatter_all.csv";
    auto out = open_out(csv);
    out << "ticker,message_count,cross_count,lock_count,mean_trade_price,penny_flag\n";
    std::vector<double> msgs, crosses;
    std::uint64_t total_crosses = 0, total_locks = 0;
    for (const auto& p : points) {
        out << d.directory.at(p.symbol_id).ticker << ',' << p.message_count << ',' << p.cross_count << ','
            << p.lock_count << ',' << (p.mean_trade_price ? num(*p.mean_trade_price) : "") << ','
            << (p.penny_flag ? 1 : 0) << '\n';
        total_crosses += p.cross_count;
        total_locks += p.lock_count;
        if (!p.penny_flag) {
            msgs.push_back(static_cast<double>(p.message_count));
            crosses.push_back(static_cast<double>(p.cross_count));
        }
    }
    finish(out, csv);
    return json{{"subcommand", "scatter"},
                {"symbol", "all"},
                {"symbols", points.size()},
                {"total_crosses", total_crosses},
                {"total_locks", total_locks},
                {"spearman_messages_vs_crosses_non_penny", spearman(msgs, crosses)}};
}

json analyze_loaded(const Loaded& d, const AnalyzeOptions& o) {
    make_dirs(o.out_dir);
    const auto& s = o.subcommand;
    if (s == "latency") return analyze_latency(d, o);
    if (s == "oos") return analyze_oos(d, o);
    if (s == "nbbo") return analyze_nbbo(d, o);
    if (s == "windows") return analyze_windows(d, o);
    if (s == "descriptive") return analyze_descriptive(d, o);
    if (s == "trend") return analyze_trend(d, o);
    if (s == "returns") return analyze_returns(d, o);
    if (s == "scatter") return analyze_scatter(d, o);
    throw ConfigError("analyze", "unknown analysis '" + s + "'");
}

std::vector<fs::path> run_sip_tapes(const fs::path& run_dir) {
    std::vector<fs::path> out;
    for (SipId sip : kAllSips) out.push_back(run_dir / run_files::sip_tape(sip));
    return out;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataNotFound("not found: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path.string() + ": " + e.what());
    }
}

} // namespace

// ------------------------------------------------------------------ commands

json cmd_simulate(const SimConfig& config, const fs::path& out_dir, std::ostream& log) {
    const auto& registry = ExchangeRegistry::standard();
    config.validate(registry);
    make_dirs(out_dir);
    const Digest hash = scenario_hash(config, registry);
    json timings;
    double write_s = 0.0;

    auto t0 = Clock::now();
    auto events = generate_events(config, registry);
    timings["generate"] = seconds_since(t0);
    log << "[tapelab] generated " << events.size() << " events\n";

    t0 = Clock::now();
    std::uint64_t truth_count = 0;
    {
        const auto truth = ground_truth_tape(events);
        truth_count = write_tape(truth, out_dir / run_files::kGroundTruth, WriteOptions{hash, nullptr});
    }
    write_s += seconds_since(t0);

    t0 = Clock::now();
    const auto directory = config.directory();
    auto cons = consolidate(events, directory, config.latency, config.seed, registry);
    events = {};
    timings["consolidate"] = seconds_since(t0);

    t0 = Clock::now();
    json tapes = json::array();
    for (SipId sip : kAllSips) {
        const auto& tape = cons.sips[sip_index(sip)];
        const auto file = run_files::sip_tape(sip);
        const auto n = write_tape(tape.records, out_dir / file, WriteOptions{hash, &directory});
        tapes.push_back(tape_entry("sip_" + std::string(to_string(sip)), out_dir, file, n, sip));
    }
    tapes.push_back(tape_entry("ground_truth", out_dir, run_files::kGroundTruth, truth_count, std::nullopt));
    write_symbol_directory(directory, out_dir / run_files::kSymbols);
    write_exchange_directory(registry, out_dir / run_files::kExchanges);
    {
        const fs::path p = out_dir / run_files::kScenario;
        auto out = open_out(p);
        out << format_scenario(config, registry);
        finish(out, p);
    }
    write_s += seconds_since(t0);
    timings["write"] = write_s;

    json m;
    m["tool_version"] = kToolVersion;
    m["scenario_name"] = config.scenario_name;
    m["scenario_hash"] = to_hex(hash);
    m["seed"] = config.seed;
    m["session_start_us"] = config.session_start.micros;
    m["session_end_us"] = config.session_end.micros;
    m["symbols"] = run_files::kSymbols;
    m["exchanges"] = run_files::kExchanges;
    m["scenario"] = run_files::kScenario;
    m["tapes"] = std::move(tapes);
    m["analysis_outputs"] = json::object();
    m["timings_s"] = std::move(timings);

    const fs::path mp = out_dir / run_files::kManifest;
    auto out = open_out(mp);
    out << m.dump(2) << '\n';
    finish(out, mp);
    log << "[tapelab] wrote " << cons.total_records() << " SIP records to " << out_dir.string() << '\n';
    return m;
}

json cmd_analyze(const AnalyzeOptions& options, std::ostream& log) {
    auto tapes = options.tapes;
    if (options.run_dir) {
        const auto more = run_sip_tapes(*options.run_dir);
        tapes.insert(tapes.end(), more.begin(), more.end());
    }
    if (tapes.empty()) throw ConfigError("--tape", "at least one tape (or --run) is required");
    fs::path symbols = options.symbols_path ? *options.symbols_path
                                            : tapes.front().parent_path() / run_files::kSymbols;
    const auto data = load(tapes, symbols, log);
    return analyze_loaded(data, options);
}

json cmd_report(const fs::path& run_dir, std::ostream& log) {
    const auto manifest = read_json(run_dir / run_files::kManifest);
    std::vector<fs::path> tapes;
    for (const auto& t : manifest.at("tapes")) {
        const fs::path p = run_dir / t.at("path").get<std::string>();
        if (!fs::exists(p)) throw DataNotFound("tape named in manifest is missing: " + p.string());
        if (!t.at("sip").is_null()) tapes.push_back(p);
    }
    const auto data = load(tapes, run_dir / manifest.value("symbols", std::string(run_files::kSymbols)), log);
    const fs::path out_dir = run_dir / "report";
    make_dirs(out_dir);

    // Summary table: ticker, percent out of sequence, total trades, listing.
    auto reps = oos_by_symbol(data, false);
    std::stable_sort(reps.begin(), reps.end(), [&](const OosReport& a, const OosReport& b) {
        if (a.total_trades != b.total_trades) return a.total_trades > b.total_trades;
        return data.directory.at(a.symbol_id).ticker < data.directory.at(b.symbol_id).ticker;
    });
    const fs::path table = out_dir / "table1.csv";
    auto out = open_out(table);
    out << "ticker,percent_out_of_sequence,total_trades,listing\n";
    json rows = json::array();
    for (const auto& r : reps) {
        const auto& info = data.directory.at(r.symbol_id);
        char pct[32];
        std::snprintf(pct, sizeof pct, "%.1f", r.percent());
        out << info.ticker << ',' << pct << ',' << r.total_trades << ',' << to_string(info.listing) << '\n';
        rows.push_back(json{{"ticker", info.ticker},
                            {"percent_out_of_sequence", r.percent()},
                            {"total_trades", r.total_trades},
                            {"listing", to_string(info.listing)}});
    }
    finish(out, table);

    json summary;
    summary["scenario_hash"] = manifest.value("scenario_hash", "");
    summary["table1"] = std::move(rows);
    AnalyzeOptions o;
    o.out_dir = out_dir;
    for (const char* sub : {"latency", "trend", "scatter", "descriptive"}) {
        o.subcommand = sub;
        o.symbol.reset();
        if (o.subcommand == "latency") o.group = "sip-exchange";
        summary[sub] = analyze_loaded(data, o);
        log << "[tapelab] report: " << sub << " done\n";
    }
    if (!reps.empty() && reps.front().total_trades > 0) {
        const auto top = data.directory.at(reps.front().symbol_id).ticker;
        summary["top_symbol"] = top;
        for (const char* sub : {"oos", "nbbo", "windows", "returns", "descriptive", "latency"}) {
            o.subcommand = sub;
            o.symbol = top;
            o.group = "sip-exchange";
            const std::string key = std::string(sub) + "_" + top;
            if (o.subcommand == "returns" && reps.front().total_trades < 2) continue;
            summary[key] = analyze_loaded(data, o);
            log << "[tapelab] report: " << key << " done\n";
        }
    }
    const fs::path sp = out_dir / "summary.json";
    auto sout = open_out(sp);
    sout << summary.dump(2) << '\n';
    finish(sout, sp);

    // Record every report file with its data-row count in the manifest.
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(out_dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    json outputs = json::object();
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        const auto lines = std::count(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>(), '\n');
        outputs["report/" + f.filename().string()] = json{{"rows", lines > 0 ? lines - 1 : 0}};
    }
    auto updated = manifest;
    updated["analysis_outputs"] = std::move(outputs);
    const fs::path mp = run_dir / run_files::kManifest;
    auto mout = open_out(mp);
    mout << updated.dump(2) << '\n';
    finish(mout, mp);
    return summary;
}

// ---------------------------------------------------------------------- CLI

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Consolidated tape simulator and SIP accuracy analyzer", "tapelab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path, preset, out_dir;
    std::optional<std::uint64_t> seed;
    auto* sim = app.add_subcommand("simulate", "Generate ground truth and SIP tapes");
    auto* cfg_opt = sim->add_option("--config", config_path, "Scenario config file");
    sim->add_option("--preset", preset, "Built-in scenario: typical_day or stress_open")->excludes(cfg_opt);
    sim->add_option("--seed", seed, "Override the scenario seed");
    sim->add_option("--out", out_dir, "Output run directory")->required();

    std::string scenario_preset_name, scenario_out;
    auto* scen = app.add_subcommand("scenario", "Print a built-in scenario as a config file");
    scen->add_option("--preset", scenario_preset_name, "typical_day or stress_open")->required();
    scen->add_option("--out", scenario_out, "Write to this file instead of standard output");

    AnalyzeOptions ao;
    std::vector<std::string> tape_args;
    std::string run_arg, symbols_arg, symbol_arg;
    auto* analyze = app.add_subcommand("analyze", "Run one analysis over tapes");
    analyze->require_subcommand(1);
    const std::pair<const char*, const char*> analyses[] = {
        {"latency", "Latency box statistics and histograms (sip_ts - exchange_ts)"},
        {"oos", "Out-of-sequence trades for one symbol"},
        {"nbbo", "NBBO replay, spread histogram and per-venue spreads for one symbol"},
        {"windows", "Events landing inside each message's latency window"},
        {"descriptive", "Per-second trades, dollar volume and messages"},
        {"trend", "Trades vs out-of-sequence count across symbols"},
        {"returns", "SIP-order vs exchange-order returns for one symbol"},
        {"scatter", "Quote messages vs NBBO crosses and locks per symbol"},
    };
    for (const auto& [name, help] : analyses) {
        auto* sub = analyze->add_subcommand(name, help);
        sub->add_option("--tape", tape_args, "Tape file (repeatable)");
        sub->add_option("--run", run_arg, "Run directory (uses its three SIP tapes)");
        sub->add_option("--symbols", symbols_arg, "Symbol directory CSV (default: symbols.csv beside the first tape)");
        sub->add_option("--symbol", symbol_arg, "Ticker");
        sub->add_flag("--include-quotes", ao.include_quotes, "latency: include quote messages");
        sub->add_flag("--ex-trf", ao.ex_trf, "oos/trend/returns: drop TRF prints");
        sub->add_option("--bin-width-cents", ao.bin_width_cents, "nbbo: spread histogram bin width")
            ->check(CLI::PositiveNumber);
        sub->add_option("--ordering", ao.ordering, "nbbo: sip or exchange");
        sub->add_option("--kinds", ao.kinds, "windows: trades, quotes or both");
        sub->add_option("--group", ao.group, "latency: sip, exchange or sip-exchange");
        sub->add_option("--out", ao.out_dir, "Directory for CSV outputs");
    }

    std::string report_dir;
    auto* report = app.add_subcommand("report", "Run every analysis over a run directory");
    report->add_option("run_dir", report_dir, "Run directory holding manifest.json")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) {
            if (config_path.empty() && preset.empty()) throw ConfigError("--config", "pass --config or --preset");
            SimConfig cfg = preset.empty() ? load_scenario(config_path) : scenario_preset(preset);
            if (seed) cfg.seed = *seed;
            out << cmd_simulate(cfg, out_dir, err).dump(2) << '\n';
        } else if (scen->parsed()) {
            const auto text = format_scenario(scenario_preset(scenario_preset_name));
            if (scenario_out.empty()) {
                out << text;
            } else {
                auto f = open_out(scenario_out);
                f << text;
                finish(f, scenario_out);
            }
        } else if (analyze->parsed()) {
            for (auto* sub : analyze->get_subcommands()) ao.subcommand = sub->get_name();
            for (const auto& t : tape_args) ao.tapes.emplace_back(t);
            if (!run_arg.empty()) ao.run_dir = fs::path(run_arg);
            if (!symbols_arg.empty()) ao.symbols_path = fs::path(symbols_arg);
            if (!symbol_arg.empty()) ao.symbol = symbol_arg;
            out << cmd_analyze(ao, err).dump(2) << '\n';
        } else if (report->parsed()) {
            out << cmd_report(report_dir, err).dump(2) << '\n';
        }
    } catch (const ConfigError& e) {
        err << "tapelab: error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const OrderingError& e) {
        err << "tapelab: error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataNotFound& e) {
        err << "tapelab: error: " << e.what() << '\n';
        return kExitNotFound;
    } catch (const IoError& e) {
        err << "tapelab: error: " << e.what() << '\n';
        return kExitIo;
    } catch (const TapeFormatError& e) {
        err << "tapelab: error: " << e.what() << '\n';
        return kExitIo;
    } catch (const CsvImportError& e) {
        err << "tapelab: error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "tapelab: error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace tapelab
