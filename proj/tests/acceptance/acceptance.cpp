// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// non-zero if any gating criterion fails.

#include "tapelab/analytics.hpp"
#include "tapelab/cli.hpp"
#include "tapelab/digest.hpp"
#include "tapelab/nbbo.hpp"
#include "tapelab/rng.hpp"
#include "tapelab/scenario.hpp"
#include "tapelab/sim.hpp"
#include "tapelab/tape_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tapelab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

bool g_all_pass = true;

void run(int number, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > budget_s) {
        o.pass = false;
        o.detail += " (over the " + std::to_string(static_cast<int>(budget_s)) + " s budget)";
    }
    g_all_pass = g_all_pass && o.pass;
    std::printf("criterion %d: %s  %s  [%.2f s]  %s\n", number, o.pass ? "PASS" : "FAIL", title.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

class ScratchDir {
public:
    ScratchDir() {
        path_ = fs::temp_directory_path() / ("tapelab_accept_" + std::to_string(std::random_device{}()));
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

// Adjacent SIP-order pairs whose exchange-time ranks decrease, counting only
// strict timestamp reversals.
std::uint64_t oos_oracle(const std::vector<TapeRecord>& sip_order) {
    std::vector<std::size_t> idx(sip_order.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return sip_order[a].exchange_ts < sip_order[b].exchange_ts;
    });
    std::vector<std::size_t> rank(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = r;
    std::uint64_t n = 0;
    for (std::size_t i = 1; i < sip_order.size(); ++i)
        if (rank[i] < rank[i - 1] && sip_order[i].exchange_ts != sip_order[i - 1].exchange_ts) ++n;
    return n;
}

SymbolActivityProfile profile(const std::string& ticker, Listing listing, double rate, const char* price) {
    SymbolActivityProfile p;
    p.ticker = ticker;
    p.listing = listing;
    p.trade_rate_per_s = rate;
    p.venue_weights = default_venue_weights();
    p.price0 = price_from_decimal(price);
    return p;
}

// --------------------------------------------------------------- criterion 1

Outcome oos_oracle_equivalence() {
    RngStream rng(20'151'1);
    std::size_t tapes = 0, with_reversals = 0, max_trades = 0;
    for (int t = 0; t < 100; ++t) {
        SimConfig c;
        c.seed = 1000 + static_cast<std::uint64_t>(t);
        c.session_start = Timestamp{kRegularOpenUs};
        c.session_end = Timestamp{kRegularOpenUs + 300 * kMicrosPerSecond};
        auto p = profile("SYM", Listing::NASDAQ, 1.0 + 5.0 * rng.uniform(), "50.00");
        p.quote_trade_ratio = 1.0;
        p.sweep_extra_mean = 2.0 * rng.uniform();
        c.symbols = {p};
        c.latency.scale_medians(0.5 + 2.0 * rng.uniform());
        const auto events = generate_events(c);
        const auto cons = consolidate(events, c.directory(), c.latency, c.seed);
        const auto trades = select_records(cons.sips[sip_index(SipId::C)].records, 0, KindFilter::Trades);
        if (trades.size() > 10'000) return {false, "tape " + std::to_string(t) + " exceeds 10^4 trades"};
        max_trades = std::max(max_trades, trades.size());
        const auto rep = detect_out_of_sequence(trades);
        const auto expect = oos_oracle(trades);
        if (rep.oos_count != expect)
            return {false, "tape " + std::to_string(t) + ": detector " + std::to_string(rep.oos_count) +
                               " vs oracle " + std::to_string(expect)};
        ++tapes;
        with_reversals += rep.oos_count > 0;
    }
    return {with_reversals > 0, std::to_string(tapes) + " tapes exact, " + std::to_string(with_reversals) +
                                    " with reversals, largest " + std::to_string(max_trades) + " trades"};
}

// --------------------------------------------------------------- criterion 2

Outcome table1_regression() {
    const std::vector<std::pair<double, double>> table{
        {482578, 66.2}, {97303, 50.1}, {86834, 43.0}, {69085, 56.3}, {51185, 43.3}, {29960, 26.4}, {16349, 27.9},
        {3304, 30.3},   {2804, 20.6},  {2428, 29.9},  {1653, 10.3},  {304, 0.3},    {286, 3.8},    {1, 0.0}};
    std::vector<std::pair<double, double>> pts;
    for (auto [n, pct] : table) pts.emplace_back(n, n * pct / 100.0);
    const auto f = fit_trend(pts);
    const bool ok = f.slope >= 0.60 && f.slope <= 0.72 && f.r_squared >= 0.95;
    return {ok, "slope " + fmt("%.4f", f.slope) + ", R^2 " + fmt("%.4f", f.r_squared) +
                    " (reference: slope 0.66, R^2 0.99)"};
}

// --------------------------------------------------------------- criterion 3

// Per-venue arrays rescanned from scratch after every quote.
std::vector<NbboRecord> nbbo_oracle(const std::vector<TapeRecord>& tape, Ordering ordering) {
    std::vector<std::size_t> idx(tape.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = tape[a];
        const auto& y = tape[b];
        if (ordering == Ordering::SipOrder) return std::tie(x.sip_ts, x.sip_seq) < std::tie(y.sip_ts, y.sip_seq);
        return std::tie(x.exchange_ts, x.exchange_id, x.sip_seq) < std::tie(y.exchange_ts, y.exchange_id, y.sip_seq);
    });
    const std::size_t venues = ExchangeRegistry::standard().size();
    std::vector<std::int64_t> bid_px(venues), ask_px(venues);
    std::vector<std::uint64_t> bid_sz(venues, 0), ask_sz(venues, 0);
    std::vector<NbboRecord> out;
    for (std::size_t i : idx) {
        const auto& q = tape[i];
        if (q.msg_kind == MsgKind::BidQuote) {
            bid_px[q.exchange_id] = q.price.ticks;
            bid_sz[q.exchange_id] = q.size;
        } else {
            ask_px[q.exchange_id] = q.price.ticks;
            ask_sz[q.exchange_id] = q.size;
        }
        NbboRecord r;
        r.ts = ordering == Ordering::SipOrder ? q.sip_ts : q.exchange_ts;
        for (std::size_t v = 0; v < venues; ++v) {
            if (bid_sz[v] > 0) {
                if (!r.best_bid || bid_px[v] > r.best_bid->price.ticks)
                    r.best_bid = NbboSide{Price{bid_px[v]}, bid_sz[v], static_cast<ExchangeId>(v)};
                else if (bid_px[v] == r.best_bid->price.ticks)
                    r.best_bid->size += bid_sz[v];
            }
            if (ask_sz[v] > 0) {
                if (!r.best_ask || ask_px[v] < r.best_ask->price.ticks)
                    r.best_ask = NbboSide{Price{ask_px[v]}, ask_sz[v], static_cast<ExchangeId>(v)};
                else if (ask_px[v] == r.best_ask->price.ticks)
                    r.best_ask->size += ask_sz[v];
            }
        }
        if (r.best_bid && r.best_ask) {
            r.spread = Price{r.best_ask->price.ticks - r.best_bid->price.ticks};
            r.state = r.spread->ticks < 0 ? MarketState::Crossed
                      : r.spread->ticks == 0 ? MarketState::Locked
                                             : MarketState::Normal;
        } else {
            r.state = r.best_bid || r.best_ask ? MarketState::OneSided : MarketState::Empty;
        }
        out.push_back(r);
    }
    return out;
}

Outcome nbbo_equivalence() {
    RngStream rng(314159);
    const auto lit = ExchangeRegistry::standard().quoting_venues();
    std::uint64_t compared = 0, crossed = 0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + rng.uniform_int(10'000);
        std::vector<TapeRecord> tape(n);
        std::uint64_t sip = 1'000'000;
        for (std::size_t i = 0; i < n; ++i) {
            auto& q = tape[i];
            q.msg_kind = rng.bernoulli(0.5) ? MsgKind::BidQuote : MsgKind::AskQuote;
            q.exchange_id = lit[rng.uniform_int(lit.size())];
            // Overlapping bands: bids mostly below asks, with enough overlap to lock and cross.
            const std::int64_t base = q.msg_kind == MsgKind::BidQuote ? 100'000 : 100'300;
            q.price = Price{base + 100 * static_cast<std::int64_t>(rng.uniform_int(5))};
            q.size = rng.bernoulli(0.1) ? 0 : static_cast<std::uint32_t>(100 * (1 + rng.uniform_int(5)));
            sip += rng.uniform_int(3);
            q.sip_ts = Timestamp{sip};
            q.exchange_ts = Timestamp{sip - rng.uniform_int(2'000)};
            q.sip_seq = i + 1;
        }
        for (Ordering o : {Ordering::SipOrder, Ordering::ExchangeOrder}) {
            const auto streamed = stream_nbbo(tape, o);
            const auto scratch = nbbo_oracle(tape, o);
            if (streamed.size() != scratch.size()) return {false, "length mismatch on tape " + std::to_string(t)};
            for (std::size_t i = 0; i < streamed.size(); ++i) {
                if (!(streamed[i] == scratch[i]))
                    return {false, "tape " + std::to_string(t) + " differs at event " + std::to_string(i)};
                crossed += streamed[i].state == MarketState::Crossed;
            }
            compared += streamed.size();
        }
    }
    return {true, std::to_string(compared) + " events identical over 50 tapes (" + std::to_string(crossed) +
                      " crossed states exercised)"};
}

// ------------------------------------------------------- shared typical_day run

struct DayRun {
    SimConfig config;
    SymbolDirectory directory;
    std::vector<std::vector<TapeRecord>> by_symbol;  // SIP order, all kinds
};

DayRun simulate_day(std::uint64_t seed, std::optional<LatencyModel> latency = std::nullopt) {
    DayRun d;
    d.config = scenario_preset("typical_day");
    d.config.seed = seed;
    if (latency) d.config.latency = *latency;
    d.directory = d.config.directory();
    auto events = generate_events(d.config);
    const auto cons = consolidate(events, d.directory, d.config.latency, d.config.seed);
    events = {};
    d.by_symbol.assign(d.directory.size(), {});
    for (const auto& tape : cons.sips) {
        auto split = split_by_symbol(tape.records, d.directory.size());
        for (std::size_t s = 0; s < split.size(); ++s)
            if (!split[s].empty()) d.by_symbol[s] = std::move(split[s]);
    }
    return d;
}

std::vector<OosReport> oos_all(const DayRun& d) {
    std::vector<OosReport> out;
    for (SymbolId s = 0; s < d.directory.size(); ++s) {
        std::vector<TapeRecord> trades;
        for (const auto& r : d.by_symbol[s])
            if (r.msg_kind == MsgKind::Trade) trades.push_back(r);
        auto rep = detect_out_of_sequence(trades);
        rep.symbol_id = s;
        out.push_back(rep);
    }
    return out;
}

std::optional<DayRun> g_day;

const DayRun& day42() {
    if (!g_day) g_day = simulate_day(42);
    return *g_day;
}

// --------------------------------------------------------------- criterion 4

Outcome venue_vs_sip_crosses() {
    const auto& d = day42();
    std::uint64_t venue_books = 0, venue_bad = 0, quotes = 0;
    for (const auto& recs : d.by_symbol) {
        for (const auto& v : venue_spread_stats(recs, Ordering::SipOrder)) {
            ++venue_books;
            quotes += v.quotes;
            venue_bad += v.crossed + v.locked;
        }
    }
    std::size_t top = 0;
    for (std::size_t s = 1; s < d.by_symbol.size(); ++s)
        if (d.by_symbol[s].size() > d.by_symbol[top].size()) top = s;
    const auto counts = count_states(stream_nbbo(d.by_symbol[top], Ordering::SipOrder));
    const bool ok = venue_bad == 0 && counts.crosses >= 1;
    return {ok, std::to_string(venue_books) + " venue books over " + std::to_string(quotes) + " quotes with " +
                    std::to_string(venue_bad) + " crossed/locked records; " + d.directory.at(top).ticker +
                    " SIP NBBO entered Crossed " + std::to_string(counts.crosses) + " times, Locked " +
                    std::to_string(counts.locks) + " times"};
}

// --------------------------------------------------------------- criterion 5

Outcome volume_error_monotonicity() {
    std::ostringstream detail;
    bool ok = true;
    for (std::uint64_t seed : {42, 43, 44, 45, 46}) {
        std::vector<OosReport> reps;
        if (seed == 42) {
            reps = oos_all(day42());
        } else {
            reps = oos_all(simulate_day(seed));
        }
        std::vector<double> trades, pct;
        const OosReport* heaviest = &reps.front();
        for (const auto& r : reps) {
            trades.push_back(static_cast<double>(r.total_trades));
            pct.push_back(r.percent());
            if (r.total_trades > heaviest->total_trades) heaviest = &r;
        }
        const double rho = spearman(trades, pct);
        const bool run_ok = rho >= 0.8 && heaviest->percent() > 30.0;
        ok = ok && run_ok;
        detail << "seed " << seed << ": rho " << fmt("%.3f", rho) << ", top " << fmt("%.1f", heaviest->percent())
               << "%; ";
    }
    return {ok, detail.str()};
}

// --------------------------------------------------------------- criterion 6

Outcome latency_fidelity() {
    SimConfig c;
    c.seed = 606;
    c.session_start = Timestamp{kRegularOpenUs};
    c.session_end = Timestamp{kRegularOpenUs + 2'000 * kMicrosPerSecond};
    c.symbols = {profile("NQ", Listing::NASDAQ, 5, "60.00"), profile("NY", Listing::NYSE, 5, "30.00"),
                 profile("AR", Listing::NYSE_ARCA_MKT_BATS_REGIONAL, 5, "90.00")};
    const auto events = generate_events(c);
    const auto dir = c.directory();
    const auto cons = consolidate(events, dir, c.latency, c.seed);
    std::vector<TapeRecord> all;
    for (const auto& t : cons.sips) all.insert(all.end(), t.records.begin(), t.records.end());
    if (all.size() < 100'000) return {false, "only " + std::to_string(all.size()) + " messages"};

    double worst = 0.0;
    std::string worst_link;
    std::size_t links = 0, min_count = SIZE_MAX;
    for (const auto& s : latency_stats(all, dir, LatencyGroupBy::SipExchange)) {
        const double configured = c.latency.link(*s.exchange, *s.sip).median_us;
        const double err = std::abs(static_cast<double>(s.stats.median) / configured - 1.0);
        ++links;
        min_count = std::min<std::size_t>(min_count, s.stats.count);
        if (err > worst) {
            worst = err;
            worst_link = ExchangeRegistry::standard().at(*s.exchange).abbreviation + "->" +
                         std::string(to_string(*s.sip));
        }
    }
    double chx = 0;
    std::vector<double> others;
    for (const auto& s : latency_stats(all, dir, LatencyGroupBy::Exchange)) {
        if (*s.exchange == venue::CHX) chx = static_cast<double>(s.stats.median);
        else others.push_back(static_cast<double>(s.stats.median));
    }
    std::sort(others.begin(), others.end());
    const double ratio = chx / others[others.size() / 2];
    const bool ok = worst <= 0.05 && ratio >= 4.0 && ratio <= 6.0;
    return {ok, std::to_string(all.size()) + " messages, " + std::to_string(links) + " links (>= " +
                    std::to_string(min_count) + " samples each), worst median error " + fmt("%.2f", 100 * worst) +
                    "% (" + worst_link + "), CHX ratio " + fmt("%.2f", ratio)};
}

// --------------------------------------------------------------- criterion 7

Outcome determinism() {
    ScratchDir tmp;
    std::ostringstream log;
    const auto cfg = scenario_preset("typical_day");
    const auto a = cmd_simulate(cfg, tmp.path() / "a", log);
    const auto b = cmd_simulate(cfg, tmp.path() / "b", log);
    bool ok = a["scenario_hash"] == b["scenario_hash"] && a["tapes"].size() == b["tapes"].size();
    std::uint64_t records = 0;
    for (std::size_t i = 0; ok && i < a["tapes"].size(); ++i) {
        ok = a["tapes"][i]["sha256"] == b["tapes"][i]["sha256"];
        // The manifest digest matches the bytes on disk.
        const auto path = tmp.path() / "b" / b["tapes"][i]["path"].get<std::string>();
        ok = ok && to_hex(sha256_file(path)) == b["tapes"][i]["sha256"].get<std::string>();
        records += a["tapes"][i]["records"].get<std::uint64_t>();
    }
    return {ok, "typical_day seed 42 twice: " + std::to_string(a["tapes"].size()) + " tapes, " +
                    std::to_string(records) + " records, digests " + (ok ? "identical" : "DIFFER")};
}

// --------------------------------------------------------------- criterion 8

Outcome returns_identity_and_skew() {
    std::uint64_t zero_mismatch = 0, zero_symbols = 0;
    {
        const auto z = simulate_day(42, LatencyModel::zero());
        for (const auto& recs : z.by_symbol) {
            std::vector<TapeRecord> trades;
            for (const auto& r : recs)
                if (r.msg_kind == MsgKind::Trade) trades.push_back(r);
            if (trades.size() < 2) continue;
            ++zero_symbols;
            zero_mismatch += returns_compare(trades).mismatch_count;
        }
    }
    const auto& d = day42();
    std::size_t with_oos = 0, skewed = 0;
    for (const auto& recs : d.by_symbol) {
        std::vector<TapeRecord> trades;
        for (const auto& r : recs)
            if (r.msg_kind == MsgKind::Trade) trades.push_back(r);
        if (detect_out_of_sequence(trades).oos_count == 0) continue;
        ++with_oos;
        skewed += returns_compare(trades).mismatch_count > 0;
    }
    const bool ok = zero_mismatch == 0 && skewed == with_oos;
    return {ok, "zero latency: " + std::to_string(zero_mismatch) + " mismatches over " +
                    std::to_string(zero_symbols) + " symbols; default latency: " + std::to_string(skewed) + "/" +
                    std::to_string(with_oos) + " symbols with reversals show skewed returns"};
}

// --------------------------------------------------------------- criterion 9

Outcome round_trips() {
    ScratchDir tmp;
    RngStream rng(99);
    SymbolDirectory dir;
    dir.add("AAPL", Listing::NASDAQ, false);
    dir.add("BAC", Listing::NYSE, false);
    dir.add("SPY", Listing::NYSE_ARCA_MKT_BATS_REGIONAL, false);
    dir.add("OHGI", Listing::NASDAQ, true);
    const auto& reg = ExchangeRegistry::standard();
    const auto lit = reg.quoting_venues();
    const auto bin = tmp.path() / "t.nms";
    const auto csv = tmp.path() / "t.csv";
    std::uint64_t records = 0;
    for (int t = 0; t < 1000; ++t) {
        // Canonical layout: SIP A, B, C groups, each by sip_ts with seq 1, 2, ...
        std::array<std::vector<TapeRecord>, 3> groups;
        const std::size_t n = rng.uniform_int(200);
        for (std::size_t i = 0; i < n; ++i) {
            TapeRecord r;
            r.symbol_id = static_cast<SymbolId>(rng.uniform_int(dir.size()));
            r.msg_kind = static_cast<MsgKind>(rng.uniform_int(3));
            r.exchange_id = is_quote(r.msg_kind) ? lit[rng.uniform_int(lit.size())]
                                                 : static_cast<ExchangeId>(rng.uniform_int(reg.size()));
            r.price = Price{1 + static_cast<std::int64_t>(rng.uniform_int(9'000'000'000ULL))};
            r.size = static_cast<std::uint32_t>(rng.uniform_int(1'000'000));
            r.exchange_ts = Timestamp{rng.uniform_int(kSessionEndUs - 100'000)};
            r.sip_ts = Timestamp{r.exchange_ts.micros + rng.uniform_int(50'000)};
            groups[sip_index(dir.sip_of(r.symbol_id))].push_back(r);
        }
        std::vector<TapeRecord> recs;
        for (auto& g : groups) {
            std::stable_sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.sip_ts < b.sip_ts; });
            for (std::size_t i = 0; i < g.size(); ++i) g[i].sip_seq = i + 1;
            recs.insert(recs.end(), g.begin(), g.end());
        }
        write_tape(recs, bin, WriteOptions{capture_marker(), &dir});
        if (fs::file_size(bin) != 64 + 48 * recs.size())
            return {false, "file size " + std::to_string(fs::file_size(bin)) + " for " + std::to_string(recs.size()) +
                               " records"};
        if (read_tape(bin).records != recs) return {false, "binary round trip differs on sequence " + std::to_string(t)};
        export_csv(recs, csv, dir);
        if (import_csv(csv, dir) != recs) return {false, "CSV round trip differs on sequence " + std::to_string(t)};
        records += recs.size();
    }
    return {true, "1000 sequences (" + std::to_string(records) + " records) identical through binary and CSV; size = 64 + 48 n"};
}

// -------------------------------------------------------------- criterion 10

Outcome throughput() {
    ScratchDir tmp;
    SimConfig c;
    c.seed = 10;
    c.scenario_name = "throughput";
    c.session_start = Timestamp{kRegularOpenUs};
    c.session_end = Timestamp{kRegularOpenUs + 3'600 * kMicrosPerSecond};
    c.symbols = {profile("HEAVY", Listing::NASDAQ, 24, "116.00"), profile("OTHER", Listing::NASDAQ, 1, "20.00")};
    c.symbols[0].sweep_extra_mean = 1.5;
    std::ostringstream log;
    const auto m = cmd_simulate(c, tmp.path(), log);
    const auto tape = tmp.path() / run_files::sip_tape(SipId::C);
    const auto records = read_tape(tape).records.size();
    if (records < 1'000'000) return {false, "tape holds only " + std::to_string(records) + " records"};

    const auto t0 = Clock::now();
    AnalyzeOptions o;
    o.tapes = {tape};
    o.out_dir = tmp.path() / "out";
    o.subcommand = "oos";
    o.symbol = "HEAVY";
    const auto oos = cmd_analyze(o, log);
    o.subcommand = "latency";
    o.symbol.reset();
    o.include_quotes = true;
    const auto lat = cmd_analyze(o, log);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool ok = secs < 30.0;
    return {ok, std::to_string(records) + " records: oos + latency in " + fmt("%.2f", secs) + " s (" +
                    (secs < 10.0 ? "meets" : "misses") + " the 10 s target; gate 30 s); oos " +
                    fmt("%.1f", oos["oos_percent"].get<double>()) + "%, " +
                    std::to_string(lat["records"].get<std::uint64_t>()) + " latencies"};
}

} // namespace

int main() {
    run(1, "OOS detector matches the brute-force oracle", 30, oos_oracle_equivalence);
    run(2, "reference-sample regression", 1, table1_regression);
    run(3, "streaming NBBO equals full recomputation", 30, nbbo_equivalence);
    run(4, "venues never cross, the SIP view does", 120, venue_vs_sip_crosses);
    run(5, "volume vs out-of-sequence monotonicity", 300, volume_error_monotonicity);
    run(6, "latency model fidelity", 60, latency_fidelity);
    run(7, "determinism", 120, determinism);
    run(8, "returns identity and skew", 120, returns_identity_and_skew);
    run(9, "binary and CSV round trips", 30, round_trips);
    g_day.reset();
    run(10, "throughput floor", 60, throughput);
    return g_all_pass ? 0 : 1;
}
