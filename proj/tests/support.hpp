#pragma once

#include "tapelab/core.hpp"
#include "tapelab/rng.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace tapelab::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("tapelab_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline TapeRecord make_record(SymbolId sym, MsgKind kind, ExchangeId venue, std::int64_t ticks, std::uint32_t size,
                              std::uint64_t exchange_ts, std::uint64_t sip_ts, std::uint64_t seq) {
    return TapeRecord{sym, kind, venue, Price{ticks}, size, Timestamp{exchange_ts}, Timestamp{sip_ts}, seq};
}

inline TapeRecord quote(ExchangeId venue, MsgKind side, std::int64_t ticks, std::uint32_t size = 100,
                        std::uint64_t ts = 0, std::uint64_t seq = 0) {
    return make_record(0, side, venue, ticks, size, ts, ts, seq);
}

// Symbols spread over all three SIPs.
inline SymbolDirectory mixed_directory() {
    SymbolDirectory d;
    d.add("AAPL", Listing::NASDAQ, false);
    d.add("BAC", Listing::NYSE, false);
    d.add("SPY", Listing::NYSE_ARCA_MKT_BATS_REGIONAL, false);
    d.add("OHGI", Listing::NASDAQ, true);
    return d;
}

// Valid tape in the canonical import layout: grouped by SIP A, B, C; each
// group sorted by sip_ts with sip_seq 1, 2, ...
inline std::vector<TapeRecord> random_tape(RngStream& rng, const SymbolDirectory& dir, std::size_t n) {
    const auto& reg = ExchangeRegistry::standard();
    const auto lit = reg.quoting_venues();
    std::array<std::vector<TapeRecord>, 3> groups;
    for (std::size_t i = 0; i < n; ++i) {
        TapeRecord r;
        r.symbol_id = static_cast<SymbolId>(rng.uniform_int(dir.size()));
        r.msg_kind = static_cast<MsgKind>(rng.uniform_int(3));
        r.exchange_id = is_quote(r.msg_kind) ? lit[rng.uniform_int(lit.size())]
                                             : static_cast<ExchangeId>(rng.uniform_int(reg.size()));
        r.price = Price{1 + static_cast<std::int64_t>(rng.uniform_int(5'000'000'000ULL))};
        r.size = static_cast<std::uint32_t>(rng.uniform_int(100'000));
        r.exchange_ts = Timestamp{rng.uniform_int(kSessionEndUs - 10'000)};
        r.sip_ts = Timestamp{r.exchange_ts.micros + rng.uniform_int(5'000)};
        groups[sip_index(dir.sip_of(r.symbol_id))].push_back(r);
    }
    std::vector<TapeRecord> out;
    for (auto& g : groups) {
        std::stable_sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.sip_ts < b.sip_ts; });
        std::uint64_t seq = 0;
        for (auto& r : g) {
            r.sip_seq = ++seq;
            out.push_back(r);
        }
    }
    return out;
}

} // namespace tapelab::testing
