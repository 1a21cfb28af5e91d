#include "tapelab/scenario.hpp"

#include "tapelab/errors.hpp"
#include "tapelab/tape_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tapelab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Parser {
    const ExchangeRegistry& registry;
    std::size_t line_no = 0;

    [[noreturn]] void fail(const std::string& field, const std::string& what) const {
        throw ConfigError(field, "line " + std::to_string(line_no) + ": " + what);
    }

    double num(std::string_view text, const std::string& field) const {
        text = trim(text);
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
            fail(field, "expected a number, got '" + std::string(text) + "'");
        return v;
    }

    std::uint64_t whole(std::string_view text, const std::string& field) const {
        text = trim(text);
        std::uint64_t v = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
            fail(field, "expected a non-negative integer, got '" + std::string(text) + "'");
        return v;
    }
};


const std::vector<std::string> kSymbolColumns{"ticker",    "listing",     "rate_per_s",   "price0",
                                              "step_ticks", "quote_ratio", "lot",          "mean_lots",
                                              "sweep_extra", "trf_fraction", "shape",      "venues"};
const std::vector<std::string> kLinkColumns{"venue", "sip", "median_us", "sigma", "floor_us"};

} // namespace

SimConfig parse_scenario(std::string_view text, const ExchangeRegistry& registry) {
    Parser p{registry};
    SimConfig cfg;
    LinkDelay base{450.0, 0.25, 0.0};
    struct LinkOverride {
        ExchangeId venue;
        std::optional<SipId> sip;
        LinkDelay delay;
    };
    std::vector<LinkOverride> overrides;
    std::map<std::string, IntradayShape> shapes{{"constant", IntradayShape::constant()},
                                                {"typical_day", IntradayShape::typical_day()}};
    std::map<std::string, std::vector<std::pair<ExchangeId, double>>> venue_sets{
        {"default", default_venue_weights()}};
    struct PendingSymbol {
        SymbolActivityProfile profile;
        std::string shape, venues;
        std::size_t line;
    };
    std::vector<PendingSymbol> pending;

    std::string section;
    std::string section_name;  // NAME in [shape.NAME] / [venues.NAME]
    bool table_header_seen = false;

    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line_no;
        // '#' starts a comment anywhere on the line.
        const auto line = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') p.fail("section", "unterminated section header");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            const auto dot = name.find('.');
            section = name.substr(0, dot);
            section_name = dot == std::string::npos ? "" : name.substr(dot + 1);
            table_header_seen = false;
            if (section == "shape") {
                if (section_name.empty()) p.fail("shape", "shape sections need a name: [shape.NAME]");
                shapes[section_name] = IntradayShape::constant();
            } else if (section == "venues") {
                if (section_name.empty()) p.fail("venues", "venue sections need a name: [venues.NAME]");
                venue_sets[section_name].clear();
            } else if (section != "latency" && section != "links" && section != "symbols") {
                p.fail(name, "unknown section");
            }
            continue;
        }

        if (section == "links" || section == "symbols") {
            const auto cells = split_csv_line(line);
            const auto& columns = section == "links" ? kLinkColumns : kSymbolColumns;
            if (!table_header_seen) {
                if (cells.size() != columns.size() ||
                    !std::equal(cells.begin(), cells.end(), columns.begin(),
                                [](std::string_view a, const std::string& b) { return trim(a) == b; }))
                    p.fail(section, "table header must be: " + [&] {
                        std::string h;
                        for (const auto& c : columns) h += (h.empty() ? "" : ",") + c;
                        return h;
                    }());
                table_header_seen = true;
                continue;
            }
            if (cells.size() != columns.size())
                p.fail(section, "expected " + std::to_string(columns.size()) + " columns");
            if (section == "links") {
                const auto venue = registry.find(trim(cells[0]));
                if (!venue) p.fail("links.venue", "unknown venue '" + std::string(trim(cells[0])) + "'");
                std::optional<SipId> sip;
                if (trim(cells[1]) != "*") {
                    sip = parse_sip(trim(cells[1]));
                    if (!sip) p.fail("links.sip", "expected A, B, C or *");
                }
                overrides.push_back({*venue, sip,
                                     LinkDelay{p.num(cells[2], "links.median_us"), p.num(cells[3], "links.sigma"),
                                               p.num(cells[4], "links.floor_us")}});
            } else {
                PendingSymbol s;
                s.line = p.line_no;
                auto& prof = s.profile;
                prof.ticker = std::string(trim(cells[0]));
                const std::string field = "symbols." + prof.ticker;
                const auto listing = parse_listing(trim(cells[1]));
                if (!listing) p.fail(field + ".listing", "unknown listing '" + std::string(trim(cells[1])) + "'");
                prof.listing = *listing;
                prof.trade_rate_per_s = p.num(cells[2], field + ".rate_per_s");
                try {
                    prof.price0 = price_from_decimal(trim(cells[3]));
                } catch (const PriceParseError& e) {
                    p.fail(field + ".price0", e.what());
                }
                prof.walk_step_ticks = static_cast<std::int64_t>(p.whole(cells[4], field + ".step_ticks"));
                prof.quote_trade_ratio = p.num(cells[5], field + ".quote_ratio");
                prof.size_distribution.lot = static_cast<std::uint32_t>(p.whole(cells[6], field + ".lot"));
                prof.size_distribution.mean_lots = p.num(cells[7], field + ".mean_lots");
                prof.sweep_extra_mean = p.num(cells[8], field + ".sweep_extra");
                prof.trf_fraction = p.num(cells[9], field + ".trf_fraction");
                s.shape = std::string(trim(cells[10]));
                s.venues = std::string(trim(cells[11]));
                pending.push_back(std::move(s));
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) p.fail(section.empty() ? "scenario" : section, "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));

        if (section.empty()) {
            if (key == "scenario_name") cfg.scenario_name = std::string(value);
            else if (key == "seed") cfg.seed = p.whole(value, key);
            else if (key == "session_start_us") { cfg.session_start = Timestamp{p.whole(value, key)}; }
            else if (key == "session_end_us") cfg.session_end = Timestamp{p.whole(value, key)};
            else p.fail(key, "unknown key");
        } else if (section == "latency") {
            if (key == "median_us") base.median_us = p.num(value, "latency.median_us");
            else if (key == "sigma") base.sigma = p.num(value, "latency.sigma");
            else if (key == "floor_us") base.floor_us = p.num(value, "latency.floor_us");
            else p.fail("latency." + key, "unknown key");
        } else if (section == "shape") {
            auto& sh = shapes[section_name];
            const std::string field = "shape." + section_name + "." + key;
            if (key == "pre_market") sh.pre_market = p.num(value, field);
            else if (key == "open_burst") sh.open_burst = p.num(value, field);
            else if (key == "midday") sh.midday = p.num(value, field);
            else if (key == "close_burst") sh.close_burst = p.num(value, field);
            else if (key == "after_hours") sh.after_hours = p.num(value, field);
            else if (key == "open_burst_s") sh.open_burst_s = p.whole(value, field);
            else if (key == "close_burst_s") sh.close_burst_s = p.whole(value, field);
            else p.fail(field, "unknown key");
        } else if (section == "venues") {
            const auto venue = registry.find(key);
            if (!venue) p.fail("venues." + section_name, "unknown venue '" + key + "'");
            venue_sets[section_name].emplace_back(*venue, p.num(value, "venues." + section_name + "." + key));
        }
    }

    cfg.latency = LatencyModel(base, registry.size());
    for (const auto& o : overrides) {
        if (o.sip) cfg.latency.set_link(o.venue, *o.sip, o.delay);
        else cfg.latency.set_venue(o.venue, o.delay);
    }
    for (auto& s : pending) {
        p.line_no = s.line;
        const auto sh = shapes.find(s.shape);
        if (sh == shapes.end()) p.fail("symbols." + s.profile.ticker + ".shape", "unknown shape '" + s.shape + "'");
        const auto vs = venue_sets.find(s.venues);
        if (vs == venue_sets.end())
            p.fail("symbols." + s.profile.ticker + ".venues", "unknown venue set '" + s.venues + "'");
        s.profile.intraday_shape = sh->second;
        s.profile.venue_weights = vs->second;
        cfg.symbols.push_back(std::move(s.profile));
    }
    cfg.validate(registry);
    return cfg;
}

SimConfig load_scenario(const std::filesystem::path& path, const ExchangeRegistry& registry) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), registry);
}

std::string format_scenario(const SimConfig& config, const ExchangeRegistry& registry) {
    std::ostringstream out;
    out << "scenario_name = " << config.scenario_name << '\n'
        << "seed = " << config.seed << '\n'
        << "session_start_us = " << config.session_start.micros << '\n'
        << "session_end_us = " << config.session_end.micros << '\n';

    // The most common link delay becomes the uniform base; the rest are overrides.
    std::vector<std::pair<LinkDelay, std::size_t>> tally;
    for (std::size_t v = 0; v < config.latency.venue_count(); ++v)
        for (SipId sip : kAllSips) {
            const auto& l = config.latency.link(static_cast<ExchangeId>(v), sip);
            auto it = std::find_if(tally.begin(), tally.end(), [&](const auto& t) { return t.first == l; });
            if (it == tally.end()) tally.emplace_back(l, 1);
            else ++it->second;
        }
    LinkDelay base{};
    if (!tally.empty())
        base = std::max_element(tally.begin(), tally.end(), [](const auto& a, const auto& b) {
                   return a.second < b.second;
               })->first;
    out << "\n[latency]\n"
        << "median_us = " << fmt_double(base.median_us) << '\n'
        << "sigma = " << fmt_double(base.sigma) << '\n'
        << "floor_us = " << fmt_double(base.floor_us) << '\n';

    std::ostringstream links;
    for (std::size_t v = 0; v < config.latency.venue_count(); ++v) {
        const auto venue = static_cast<ExchangeId>(v);
        const auto& a = config.latency.link(venue, SipId::A);
        const bool same = a == config.latency.link(venue, SipId::B) && a == config.latency.link(venue, SipId::C);
        const auto emit = [&](std::string_view sip, const LinkDelay& l) {
            links << registry.at(venue).abbreviation << ',' << sip << ',' << fmt_double(l.median_us) << ','
                  << fmt_double(l.sigma) << ',' << fmt_double(l.floor_us) << '\n';
        };
        if (same) {
            if (!(a == base)) emit("*", a);
        } else {
            for (SipId sip : kAllSips)
                if (!(config.latency.link(venue, sip) == base)) emit(to_string(sip), config.latency.link(venue, sip));
        }
    }
    if (!links.str().empty()) {
        out << "\n[links]\n";
        for (std::size_t i = 0; i < kLinkColumns.size(); ++i) out << (i ? "," : "") << kLinkColumns[i];
        out << '\n' << links.str();
    }

    std::vector<IntradayShape> shapes;
    std::vector<std::vector<std::pair<ExchangeId, double>>> venue_sets;
    const auto index_of = [](auto& pool, const auto& value) {
        auto it = std::find(pool.begin(), pool.end(), value);
        if (it == pool.end()) {
            pool.push_back(value);
            return pool.size() - 1;
        }
        return static_cast<std::size_t>(it - pool.begin());
    };
    std::vector<std::pair<std::size_t, std::size_t>> refs;
    for (const auto& s : config.symbols)
        refs.emplace_back(index_of(shapes, s.intraday_shape), index_of(venue_sets, s.venue_weights));

    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto& sh = shapes[i];
        out << "\n[shape.s" << i << "]\n"
            << "pre_market = " << fmt_double(sh.pre_market) << '\n'
            << "open_burst = " << fmt_double(sh.open_burst) << '\n'
            << "midday = " << fmt_double(sh.midday) << '\n'
            << "close_burst = " << fmt_double(sh.close_burst) << '\n'
            << "after_hours = " << fmt_double(sh.after_hours) << '\n'
            << "open_burst_s = " << sh.open_burst_s << '\n'
            << "close_burst_s = " << sh.close_burst_s << '\n';
    }
    for (std::size_t i = 0; i < venue_sets.size(); ++i) {
        out << "\n[venues.v" << i << "]\n";
        for (const auto& [v, w] : venue_sets[i]) out << registry.at(v).abbreviation << " = " << fmt_double(w) << '\n';
    }

    out << "\n[symbols]\n";
    for (std::size_t i = 0; i < kSymbolColumns.size(); ++i) out << (i ? "," : "") << kSymbolColumns[i];
    out << '\n';
    for (std::size_t i = 0; i < config.symbols.size(); ++i) {
        const auto& s = config.symbols[i];
        out << s.ticker << ',' << to_string(s.listing) << ',' << fmt_double(s.trade_rate_per_s) << ','
            << price_to_decimal(s.price0) << ',' << s.walk_step_ticks << ',' << fmt_double(s.quote_trade_ratio)
            << ',' << s.size_distribution.lot << ',' << fmt_double(s.size_distribution.mean_lots) << ','
            << fmt_double(s.sweep_extra_mean) << ',' << fmt_double(s.trf_fraction) << ",s" << refs[i].first
            << ",v" << refs[i].second << '\n';
    }
    return out.str();
}

Digest scenario_hash(const SimConfig& config, const ExchangeRegistry& registry) {
    return sha256(format_scenario(config, registry));
}

// -------------------------------------------------------------------- presets

namespace {

struct PresetRow {
    const char* ticker;
    Listing listing;
    double target_trades;  // full-session print count the rate is solved for
    const char* price0;
    std::int64_t step_ticks;
};

// Volume ladder modeled on a typical trading day across liquid, mid and thin
// names. Reference prices are illustrative.
constexpr PresetRow kTypicalDay[] = {
    {"AAPL", Listing::NASDAQ, 482578, "116.00", 100},
    {"BAC", Listing::NYSE, 97303, "17.50", 100},
    {"XOM", Listing::NYSE, 86834, "78.00", 100},
    {"GOOG", Listing::NASDAQ, 69085, "660.00", 100},
    {"DNR", Listing::NYSE, 51185, "5.00", 100},
    {"IBM", Listing::NYSE, 29960, "155.00", 100},
    {"SHAK", Listing::NYSE, 16349, "55.00", 100},
    {"KLIC", Listing::NASDAQ, 3304, "11.50", 100},
    {"GBX", Listing::NYSE, 2804, "45.00", 100},
    {"WBMD", Listing::NASDAQ, 2428, "43.00", 100},
    {"EYES", Listing::NASDAQ, 1653, "12.00", 100},
    {"BRKA", Listing::NYSE, 304, "215000.00", 100},
    {"OHGI", Listing::NASDAQ, 286, "0.85", 1},
    {"ACU", Listing::NYSE_ARCA_MKT_BATS_REGIONAL, 1, "17.00", 100},
};

// Busier names split each execution across more venues.
double sweep_extra_for(double target_trades) {
    return std::max(0.0, 2.0 * std::log10(std::max(target_trades, 1.0)) - 4.4);
}

SimConfig typical_day() {
    SimConfig cfg;
    cfg.scenario_name = "typical_day";
    cfg.seed = 42;
    cfg.latency = LatencyModel::default_profile();
    const auto shape = IntradayShape::typical_day();
    const double session_integral = shape.integral(cfg.session_start, cfg.session_end);
    for (const auto& row : kTypicalDay) {
        SymbolActivityProfile s;
        s.ticker = row.ticker;
        s.listing = row.listing;
        s.intraday_shape = shape;
        s.venue_weights = default_venue_weights();
        s.price0 = price_from_decimal(row.price0);
        s.walk_step_ticks = row.step_ticks;
        s.sweep_extra_mean = sweep_extra_for(row.target_trades);
        s.trade_rate_per_s = row.target_trades / ((1.0 + s.sweep_extra_mean) * session_integral);
        cfg.symbols.push_back(std::move(s));
    }
    return cfg;
}

} // namespace

SimConfig scenario_preset(std::string_view name) {
    if (name == "typical_day") return typical_day();
    if (name == "stress_open") {
        auto cfg = typical_day();
        cfg.scenario_name = "stress_open";
        // 04:00 to 11:00: the pre-market, the open burst and an hour of midday.
        cfg.session_end = Timestamp{25'200 * kMicrosPerSecond};
        for (auto& s : cfg.symbols) s.intraday_shape.open_burst *= kStressOpenMultiplier;
        cfg.latency.scale_medians(kStressLatencyFactor);
        return cfg;
    }
    throw ConfigError("scenario", "unknown preset '" + std::string(name) + "' (expected typical_day or stress_open)");
}

} // namespace tapelab
