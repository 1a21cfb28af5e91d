#include "support.hpp"

#include "tapelab/core.hpp"
#include "tapelab/errors.hpp"

#include <doctest.h>

#include <set>

using namespace tapelab;

namespace {

// Independent decimal oracle: integer part and zero-padded fraction.
std::int64_t ticks_by_hand(const std::string& s) {
    const auto dot = s.find('.');
    std::int64_t whole = std::stoll(s.substr(0, dot));
    std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
    frac.resize(4, '0');
    return whole * 10000 + std::stoll(frac);
}

std::string canonical(const std::string& s) {
    auto dot = s.find('.');
    std::string whole = dot == std::string::npos ? s : s.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
    whole.erase(0, std::min(whole.find_first_not_of('0'), whole.size() - 1));
    frac.resize(4, '0');
    while (frac.size() > 2 && frac.back() == '0') frac.pop_back();
    return whole + "." + frac;
}

} // namespace

TEST_CASE("listing groups route to their SIP") {
    CHECK(route_to_sip(Listing::NYSE) == SipId::A);
    CHECK(route_to_sip(Listing::NYSE_ARCA_MKT_BATS_REGIONAL) == SipId::B);
    CHECK(route_to_sip(Listing::NASDAQ) == SipId::C);

    for (Listing l : {Listing::NYSE, Listing::NYSE_ARCA_MKT_BATS_REGIONAL, Listing::NASDAQ}) {
        const SipId first = route_to_sip(l);
        bool stable = true;
        for (int i = 0; i < 1000; ++i) stable = stable && route_to_sip(l) == first;
        CHECK(stable);
    }
}

TEST_CASE("price parsing") {
    CHECK(price_from_decimal("116.00").ticks == 1'160'000);
    CHECK(price_from_decimal("0.0001").ticks == 1);
    CHECK(price_from_decimal("116.015").ticks == ticks_by_hand("116.015"));
    CHECK(price_from_decimal("116.015").ticks == 1'160'150);
    CHECK(price_from_decimal("500000").ticks == 5'000'000'000LL);
    CHECK(price_from_decimal("-0.02").ticks == -200);

    const auto kind_of = [](const char* s) {
        try {
            price_from_decimal(s);
        } catch (const PriceParseError& e) {
            return static_cast<int>(e.kind());
        }
        return -1;
    };
    CHECK(kind_of("12a.5") == static_cast<int>(PriceParseError::Kind::Malformed));
    CHECK(kind_of("") == static_cast<int>(PriceParseError::Kind::Malformed));
    CHECK(kind_of(".") == static_cast<int>(PriceParseError::Kind::Malformed));
    CHECK(kind_of("1.00001") == static_cast<int>(PriceParseError::Kind::TooManyDecimals));
    CHECK(kind_of("999999999999.00") == static_cast<int>(PriceParseError::Kind::Overflow));
}

TEST_CASE("price formatting is canonical") {
    CHECK(price_to_decimal(Price{1'160'000}) == "116.00");
    CHECK(price_to_decimal(Price{1'160'150}) == "116.015");
    CHECK(price_to_decimal(Price{1}) == "0.0001");
    CHECK(price_to_decimal(Price{-200}) == "-0.02");
    CHECK(price_to_decimal(Price{5'000'000'000LL}) == "500000.00");
}

TEST_CASE("price round trip over a generated corpus") {
    RngStream rng(7);
    for (int i = 0; i < 20000; ++i) {
        const auto whole = rng.uniform_int(500'001);
        const auto digits = rng.uniform_int(5);
        std::string s = std::to_string(whole);
        if (digits > 0) {
            s += '.';
            for (std::uint64_t d = 0; d < digits; ++d) s += static_cast<char>('0' + rng.uniform_int(10));
        }
        const Price p = price_from_decimal(s);
        REQUIRE(p.ticks == ticks_by_hand(s));
        REQUIRE(price_to_decimal(p) == canonical(s));
    }
}

TEST_CASE("standard exchange registry") {
    const auto& reg = ExchangeRegistry::standard();
    REQUIRE(reg.size() == 13);
    const std::vector<std::string> abbrevs{"BATS", "BATY", "EDGA", "EDGX", "CHX", "NASD", "NQBS",
                                           "NQPH", "NYSE", "ARCA", "AMEX", "NTRF", "QTRF"};
    std::size_t no_quotes = 0;
    for (std::size_t i = 0; i < abbrevs.size(); ++i) {
        CHECK(reg.at(static_cast<ExchangeId>(i)).abbreviation == abbrevs[i]);
        no_quotes += reg.at(static_cast<ExchangeId>(i)).quotes_allowed ? 0 : 1;
    }
    CHECK(no_quotes == 2);
    CHECK_FALSE(reg.at(venue::NTRF).quotes_allowed);
    CHECK_FALSE(reg.at(venue::QTRF).quotes_allowed);
    CHECK(reg.at(venue::CHX).family == ExchangeFamily::Chicago);
    CHECK(reg.at(venue::NASD).datacenter == Datacenter::Carteret);
    CHECK(reg.at(venue::ARCA).datacenter == Datacenter::Mahwah);
    CHECK(reg.at(venue::EDGX).datacenter == Datacenter::Secaucus);
    CHECK(reg.find("BZX") == venue::BATS);
    CHECK(reg.find("BYX") == venue::BATY);
    CHECK(reg.find("NY-MKT") == venue::AMEX);
    CHECK_FALSE(reg.find("XXXX"));
    CHECK_THROWS_AS(reg.require("XXXX"), DataNotFound);
    CHECK(reg.quoting_venues().size() == 11);
}

TEST_CASE("symbol directory assigns dense ids") {
    SymbolDirectory d;
    CHECK(d.add("AAPL", Listing::NASDAQ, false) == 0);
    CHECK(d.add("BAC", Listing::NYSE, false) == 1);
    CHECK(d.find("BAC") == 1u);
    CHECK_FALSE(d.find("ZZZZ"));
    CHECK(d.sip_of(0) == SipId::C);
    CHECK(d.sip_of(1) == SipId::A);
    CHECK_THROWS(d.add("AAPL", Listing::NYSE, false));
}

TEST_CASE("record latency is signed") {
    auto r = testing::make_record(0, MsgKind::Trade, venue::NASD, 1, 100, 35'000'000'000ULL, 35'000'000'450ULL, 1);
    CHECK(record_latency(r) == 450);
    r.sip_ts = r.exchange_ts;
    CHECK(record_latency(r) == 0);
    r.sip_ts.micros -= 3;
    CHECK(record_latency(r) == -3);
}
