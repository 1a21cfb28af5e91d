#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tapelab {

// Prices are integer ten-thousandths of a dollar.
struct Price {
    std::int64_t ticks = 0;

    static constexpr std::int64_t kTicksPerDollar = 10'000;

    constexpr auto operator<=>(const Price&) const = default;
    constexpr Price operator+(Price o) const { return {ticks + o.ticks}; }
    constexpr Price operator-(Price o) const { return {ticks - o.ticks}; }
    constexpr double dollars() const { return static_cast<double>(ticks) / kTicksPerDollar; }
};

// Largest accepted magnitude: $100,000,000 (well above BRK.A scale).
inline constexpr std::int64_t kMaxPriceTicks = 100'000'000LL * Price::kTicksPerDollar;

/// Parses a decimal dollar string with at most 4 fractional digits.
/// Throws PriceParseError (Malformed, TooManyDecimals, Overflow).
Price price_from_decimal(std::string_view text);

/// Canonical form: at least two fractional digits, trailing zeros past the
/// second stripped ("116.00", "116.015", "0.0001", "-0.02").
std::string price_to_decimal(Price p);

// Microseconds since the 04:00 session epoch.
struct Timestamp {
    std::uint64_t micros = 0;
    constexpr auto operator<=>(const Timestamp&) const = default;
};

inline constexpr std::uint64_t kMicrosPerSecond = 1'000'000;
inline constexpr std::uint64_t kSessionEndUs = 57'600 * kMicrosPerSecond;  // 20:00
inline constexpr std::uint64_t kRegularOpenUs = 19'800 * kMicrosPerSecond;  // 09:30
inline constexpr std::uint64_t kRegularCloseUs = 43'200 * kMicrosPerSecond; // 16:00
inline constexpr std::uint64_t kSessionSeconds = kSessionEndUs / kMicrosPerSecond;

enum class ExchangeFamily : std::uint8_t { BATS, Chicago, NASDAQ, NYSE, TRF };
enum class Datacenter : std::uint8_t { Secaucus, Carteret, Mahwah };
enum class Listing : std::uint8_t { NYSE, NYSE_ARCA_MKT_BATS_REGIONAL, NASDAQ };
enum class SipId : std::uint8_t { A = 0, B = 1, C = 2 };
enum class MsgKind : std::uint8_t { Trade = 0, BidQuote = 1, AskQuote = 2 };

inline constexpr std::array<SipId, 3> kAllSips{SipId::A, SipId::B, SipId::C};

/// NYSE -> A; ARCA/MKT/BATS/regional -> B; NASDAQ -> C.
constexpr SipId route_to_sip(Listing listing) noexcept {
    switch (listing) {
    case Listing::NYSE: return SipId::A;
    case Listing::NYSE_ARCA_MKT_BATS_REGIONAL: return SipId::B;
    case Listing::NASDAQ: return SipId::C;
    }
    return SipId::B;
}

constexpr std::size_t sip_index(SipId s) noexcept { return static_cast<std::size_t>(s); }
constexpr bool is_quote(MsgKind k) noexcept { return k != MsgKind::Trade; }

std::string_view to_string(SipId s);
std::string_view to_string(Listing l);
std::string_view to_string(ExchangeFamily f);
std::string_view to_string(Datacenter d);
char kind_code(MsgKind k);  // 'T', 'B', 'A'

std::optional<Listing> parse_listing(std::string_view text);
std::optional<SipId> parse_sip(std::string_view text);
std::optional<MsgKind> parse_kind_code(std::string_view text);

using ExchangeId = std::uint8_t;
using SymbolId = std::uint32_t;

struct ExchangeInfo {
    ExchangeId id = 0;
    std::string name;
    std::string abbreviation;
    ExchangeFamily family = ExchangeFamily::NYSE;
    Datacenter datacenter = Datacenter::Mahwah;
    bool quotes_allowed = true;
};

// Venue table. Lookups accept the primary abbreviation and the common aliases
// (BZX, BYX, NY-MKT).
class ExchangeRegistry {
public:
    explicit ExchangeRegistry(std::vector<ExchangeInfo> rows);

    /// The 13 exchanges and trade reporting facilities of the NMS.
    static const ExchangeRegistry& standard();

    std::size_t size() const noexcept { return rows_.size(); }
    const std::vector<ExchangeInfo>& rows() const noexcept { return rows_; }
    const ExchangeInfo& at(ExchangeId id) const;
    bool contains(ExchangeId id) const noexcept { return id < rows_.size(); }
    std::optional<ExchangeId> find(std::string_view abbreviation) const;
    ExchangeId require(std::string_view abbreviation) const;
    std::vector<ExchangeId> quoting_venues() const;

private:
    std::vector<ExchangeInfo> rows_;
    std::unordered_map<std::string, ExchangeId> by_abbrev_;
};

// Ids of the standard registry, in table order.
namespace venue {
inline constexpr ExchangeId BATS = 0, BATY = 1, EDGA = 2, EDGX = 3, CHX = 4, NASD = 5, NQBS = 6,
                            NQPH = 7, NYSE = 8, ARCA = 9, AMEX = 10, NTRF = 11, QTRF = 12;
}

struct SymbolInfo {
    SymbolId id = 0;
    std::string ticker;
    Listing listing = Listing::NYSE;
    bool penny_flag = false;
};

// Dense id -> SymbolInfo table; tickers are resolved only at I/O boundaries.
class SymbolDirectory {
public:
    SymbolDirectory() = default;
    explicit SymbolDirectory(std::vector<SymbolInfo> rows);

    /// Appends a symbol with the next dense id and returns that id.
    SymbolId add(std::string ticker, Listing listing, bool penny_flag);

    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }
    const std::vector<SymbolInfo>& rows() const noexcept { return rows_; }
    bool contains(SymbolId id) const noexcept { return id < rows_.size(); }
    const SymbolInfo& at(SymbolId id) const;
    std::optional<SymbolId> find(std::string_view ticker) const;
    SipId sip_of(SymbolId id) const { return route_to_sip(at(id).listing); }

private:
    std::vector<SymbolInfo> rows_;
    std::unordered_map<std::string, SymbolId> by_ticker_;
};

// One trade or top-of-book quote as printed by a SIP.
struct TapeRecord {
    SymbolId symbol_id = 0;
    MsgKind msg_kind = MsgKind::Trade;
    ExchangeId exchange_id = 0;
    Price price{};
    std::uint32_t size = 0;
    Timestamp exchange_ts{};
    Timestamp sip_ts{};
    std::uint64_t sip_seq = 0;

    bool operator==(const TapeRecord&) const = default;
};

/// sip_ts - exchange_ts; negative values are legal in captured data.
constexpr std::int64_t record_latency(const TapeRecord& r) noexcept {
    return static_cast<std::int64_t>(r.sip_ts.micros) - static_cast<std::int64_t>(r.exchange_ts.micros);
}

} // namespace tapelab
