#include "tapelab/core.hpp"

#include "tapelab/errors.hpp"

#include <cctype>
#include <cstdlib>

namespace tapelab {

Price price_from_decimal(std::string_view text) {
    using K = PriceParseError::Kind;
    const std::string quoted = "'" + std::string(text) + "'";
    if (text.empty()) throw PriceParseError(K::Malformed, "empty price");

    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        pos = 1;
    }
    std::int64_t whole = 0;
    std::size_t int_digits = 0;
    for (; pos < text.size() && text[pos] != '.'; ++pos, ++int_digits) {
        const char c = text[pos];
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw PriceParseError(K::Malformed, "malformed price " + quoted);
        if (whole > kMaxPriceTicks / Price::kTicksPerDollar)
            throw PriceParseError(K::Overflow, "price out of range " + quoted);
        whole = whole * 10 + (c - '0');
    }
    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (pos < text.size()) {
        ++pos;  // '.'
        for (; pos < text.size(); ++pos, ++frac_digits) {
            const char c = text[pos];
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw PriceParseError(K::Malformed, "malformed price " + quoted);
            if (frac_digits == 4)
                throw PriceParseError(K::TooManyDecimals, "more than 4 decimals in " + quoted);
            frac = frac * 10 + (c - '0');
        }
    }
    if (int_digits == 0 && frac_digits == 0)
        throw PriceParseError(K::Malformed, "malformed price " + quoted);
    for (std::size_t d = frac_digits; d < 4; ++d) frac *= 10;

    const std::int64_t ticks = whole * Price::kTicksPerDollar + frac;
    if (ticks > kMaxPriceTicks) throw PriceParseError(K::Overflow, "price out of range " + quoted);
    return Price{negative ? -ticks : ticks};
}

std::string price_to_decimal(Price p) {
    const bool negative = p.ticks < 0;
    const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(p.ticks + 1)) + 1
                                       : static_cast<std::uint64_t>(p.ticks);
    std::string frac = std::to_string(mag % Price::kTicksPerDollar);
    frac.insert(0, 4 - frac.size(), '0');
    while (frac.size() > 2 && frac.back() == '0') frac.pop_back();
    std::string out = negative ? "-" : "";
    out += std::to_string(mag / Price::kTicksPerDollar);
    out += '.';
    out += frac;
    return out;
}

std::string_view to_string(SipId s) {
    switch (s) {
    case SipId::A: return "A";
    case SipId::B: return "B";
    case SipId::C: return "C";
    }
    return "?";
}

std::string_view to_string(Listing l) {
    switch (l) {
    case Listing::NYSE: return "NYSE";
    case Listing::NYSE_ARCA_MKT_BATS_REGIONAL: return "NYSE_ARCA_MKT_BATS_REGIONAL";
    case Listing::NASDAQ: return "NASDAQ";
    }
    return "?";
}

std::string_view to_string(ExchangeFamily f) {
    switch (f) {
    case ExchangeFamily::BATS: return "BATS";
    case ExchangeFamily::Chicago: return "Chicago";
    case ExchangeFamily::NASDAQ: return "NASDAQ";
    case ExchangeFamily::NYSE: return "NYSE";
    case ExchangeFamily::TRF: return "TRF";
    }
    return "?";
}

std::string_view to_string(Datacenter d) {
    switch (d) {
    case Datacenter::Secaucus: return "Secaucus";
    case Datacenter::Carteret: return "Carteret";
    case Datacenter::Mahwah: return "Mahwah";
    }
    return "?";
}

char kind_code(MsgKind k) {
    switch (k) {
    case MsgKind::Trade: return 'T';
    case MsgKind::BidQuote: return 'B';
    case MsgKind::AskQuote: return 'A';
    }
    return '?';
}

std::optional<Listing> parse_listing(std::string_view text) {
    if (text == "NYSE") return Listing::NYSE;
    if (text == "NASDAQ") return Listing::NASDAQ;
    // Short aliases for the SIP-B group.
    if (text == "NYSE_ARCA_MKT_BATS_REGIONAL" || text == "ARCA" || text == "NYSEMKT" ||
        text == "BATS" || text == "REGIONAL")
        return Listing::NYSE_ARCA_MKT_BATS_REGIONAL;
    return std::nullopt;
}

std::optional<SipId> parse_sip(std::string_view text) {
    if (text == "A") return SipId::A;
    if (text == "B") return SipId::B;
    if (text == "C") return SipId::C;
    return std::nullopt;
}

std::optional<MsgKind> parse_kind_code(std::string_view text) {
    if (text == "T") return MsgKind::Trade;
    if (text == "B") return MsgKind::BidQuote;
    if (text == "A") return MsgKind::AskQuote;
    return std::nullopt;
}

// ---------------------------------------------------------------- registry

ExchangeRegistry::ExchangeRegistry(std::vector<ExchangeInfo> rows) : rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].id != i) throw Error("exchange registry ids must be dense and ordered");
        by_abbrev_.emplace(rows_[i].abbreviation, rows_[i].id);
    }
}

const ExchangeRegistry& ExchangeRegistry::standard() {
    static const ExchangeRegistry registry = [] {
        using F = ExchangeFamily;
        using D = Datacenter;
        ExchangeRegistry r({
            {venue::BATS, "BATS", "BATS", F::BATS, D::Secaucus, true},
            {venue::BATY, "BATS-Y", "BATY", F::BATS, D::Secaucus, true},
            {venue::EDGA, "Direct Edge A", "EDGA", F::BATS, D::Secaucus, true},
            {venue::EDGX, "Direct Edge X", "EDGX", F::BATS, D::Secaucus, true},
            {venue::CHX, "Chicago Stock Exchange", "CHX", F::Chicago, D::Secaucus, true},
            {venue::NASD, "NASDAQ", "NASD", F::NASDAQ, D::Carteret, true},
            {venue::NQBS, "NASDAQ-Boston", "NQBS", F::NASDAQ, D::Carteret, true},
            {venue::NQPH, "NASDAQ-Philadelphia", "NQPH", F::NASDAQ, D::Carteret, true},
            {venue::NYSE, "New York Stock Exchange", "NYSE", F::NYSE, D::Mahwah, true},
            {venue::ARCA, "New York Stock Exchange - ARCA", "ARCA", F::NYSE, D::Mahwah, true},
            {venue::AMEX, "New York Stock Exchange - Market", "AMEX", F::NYSE, D::Mahwah, true},
            {venue::NTRF, "NYSE Trade Reporting Facility", "NTRF", F::TRF, D::Mahwah, false},
            {venue::QTRF, "NASDAQ Trade Reporting Facility", "QTRF", F::TRF, D::Carteret, false},
        });
        r.by_abbrev_.emplace("BZX", venue::BATS);
        r.by_abbrev_.emplace("BYX", venue::BATY);
        r.by_abbrev_.emplace("NY-MKT", venue::AMEX);
        return r;
    }();
    return registry;
}

const ExchangeInfo& ExchangeRegistry::at(ExchangeId id) const {
    if (!contains(id)) throw DataNotFound("unknown exchange id " + std::to_string(id));
    return rows_[id];
}

std::optional<ExchangeId> ExchangeRegistry::find(std::string_view abbreviation) const {
    auto it = by_abbrev_.find(std::string(abbreviation));
    if (it == by_abbrev_.end()) return std::nullopt;
    return it->second;
}

ExchangeId ExchangeRegistry::require(std::string_view abbreviation) const {
    if (auto id = find(abbreviation)) return *id;
    throw DataNotFound("unknown exchange '" + std::string(abbreviation) + "'");
}

std::vector<ExchangeId> ExchangeRegistry::quoting_venues() const {
    std::vector<ExchangeId> out;
    for (const auto& e : rows_)
        if (e.quotes_allowed) out.push_back(e.id);
    return out;
}

// --------------------------------------------------------------- directory

SymbolDirectory::SymbolDirectory(std::vector<SymbolInfo> rows) {
    for (auto& r : rows) {
        if (r.id != rows_.size()) throw Error("symbol ids must be dense and ordered");
        if (by_ticker_.count(r.ticker)) throw Error("duplicate ticker " + r.ticker);
        by_ticker_.emplace(r.ticker, r.id);
        rows_.push_back(std::move(r));
    }
}

SymbolId SymbolDirectory::add(std::string ticker, Listing listing, bool penny_flag) {
    if (by_ticker_.count(ticker)) throw Error("duplicate ticker " + ticker);
    const auto id = static_cast<SymbolId>(rows_.size());
    by_ticker_.emplace(ticker, id);
    rows_.push_back({id, std::move(ticker), listing, penny_flag});
    return id;
}

const SymbolInfo& SymbolDirectory::at(SymbolId id) const {
    if (!contains(id)) throw DataNotFound("unknown symbol id " + std::to_string(id));
    return rows_[id];
}

std::optional<SymbolId> SymbolDirectory::find(std::string_view ticker) const {
    auto it = by_ticker_.find(std::string(ticker));
    if (it == by_ticker_.end()) return std::nullopt;
    return it->second;
}

} // namespace tapelab
