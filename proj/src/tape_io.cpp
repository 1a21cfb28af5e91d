#include "tapelab/tape_io.hpp"

#include "tapelab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tapelab {
namespace fs = std::filesystem;
namespace {

template <typename T>
void store_le(std::uint8_t* p, T value) {
    auto u = static_cast<std::make_unsigned_t<T>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) p[i] = static_cast<std::uint8_t>(u >> (8 * i));
}

template <typename T>
T load_le(const std::uint8_t* p) {
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(p[i]) << (8 * i);
    return static_cast<T>(u);
}

void encode_header(const TapeFileHeader& h, std::uint8_t* out) {
    std::memset(out, 0, kTapeHeaderSize);
    std::memcpy(out, h.magic.data(), 8);
    store_le<std::uint16_t>(out + 8, h.format_version);
    store_le<std::uint64_t>(out + 16, h.record_count);
    store_le<std::uint64_t>(out + 24, h.symbol_directory_offset);
    std::memcpy(out + 32, h.scenario_hash.data(), 32);
}

TapeFileHeader decode_header(const std::uint8_t* in) {
    TapeFileHeader h;
    std::memcpy(h.magic.data(), in, 8);
    h.format_version = load_le<std::uint16_t>(in + 8);
    h.record_count = load_le<std::uint64_t>(in + 16);
    h.symbol_directory_offset = load_le<std::uint64_t>(in + 24);
    std::memcpy(h.scenario_hash.data(), in + 32, 32);
    return h;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::ifstream open_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream create_text(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

} // namespace

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cols.push_back(line.substr(start));
            return cols;
        }
        cols.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

void encode_record(const TapeRecord& r, std::span<std::uint8_t, kTapeRecordSize> out) {
    std::uint8_t* p = out.data();
    std::memset(p, 0, kTapeRecordSize);
    store_le<std::uint32_t>(p + 0, r.symbol_id);
    p[4] = static_cast<std::uint8_t>(r.msg_kind);
    p[5] = r.exchange_id;
    store_le<std::int64_t>(p + 8, r.price.ticks);
    store_le<std::uint32_t>(p + 16, r.size);
    store_le<std::uint64_t>(p + 24, r.exchange_ts.micros);
    store_le<std::uint64_t>(p + 32, r.sip_ts.micros);
    store_le<std::uint64_t>(p + 40, r.sip_seq);
}

TapeRecord decode_record(std::span<const std::uint8_t, kTapeRecordSize> in) {
    const std::uint8_t* p = in.data();
    if (p[4] > 2) throw TapeFormatError(TapeFormatError::Kind::Corrupt, "invalid msg_kind byte");
    TapeRecord r;
    r.symbol_id = load_le<std::uint32_t>(p + 0);
    r.msg_kind = static_cast<MsgKind>(p[4]);
    r.exchange_id = p[5];
    r.price.ticks = load_le<std::int64_t>(p + 8);
    r.size = load_le<std::uint32_t>(p + 16);
    r.exchange_ts.micros = load_le<std::uint64_t>(p + 24);
    r.sip_ts.micros = load_le<std::uint64_t>(p + 32);
    r.sip_seq = load_le<std::uint64_t>(p + 40);
    return r;
}

void check_tape_order(std::span<const TapeRecord> records, const SymbolDirectory* directory) {
    if (directory == nullptr) {
        for (std::size_t i = 1; i < records.size(); ++i)
            if (records[i].sip_seq <= records[i - 1].sip_seq)
                throw OrderingError("sip_seq not strictly increasing at record " + std::to_string(i));
        return;
    }
    std::array<bool, 3> closed{};
    std::optional<SipId> current;
    std::uint64_t last_seq = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const SipId sip = directory->sip_of(records[i].symbol_id);
        if (sip != current) {
            if (closed[sip_index(sip)])
                throw OrderingError("SIP " + std::string(to_string(sip)) + " records not contiguous at record " +
                                    std::to_string(i));
            if (current) closed[sip_index(*current)] = true;
            current = sip;
        } else if (records[i].sip_seq <= last_seq) {
            throw OrderingError("sip_seq not strictly increasing at record " + std::to_string(i));
        }
        last_seq = records[i].sip_seq;
    }
}

std::uint64_t write_tape(std::span<const TapeRecord> records, const fs::path& path, const WriteOptions& options) {
    check_tape_order(records, options.directory);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());

    TapeFileHeader header;
    header.record_count = records.size();
    header.scenario_hash = options.scenario_hash;
    std::array<std::uint8_t, kTapeHeaderSize> head{};
    encode_header(header, head.data());
    out.write(reinterpret_cast<const char*>(head.data()), head.size());

    constexpr std::size_t kChunk = 16384;
    std::vector<std::uint8_t> buf(kChunk * kTapeRecordSize);
    for (std::size_t i = 0; i < records.size(); i += kChunk) {
        const std::size_t n = std::min(kChunk, records.size() - i);
        for (std::size_t j = 0; j < n; ++j)
            encode_record(records[i + j], std::span<std::uint8_t, kTapeRecordSize>(buf.data() + j * kTapeRecordSize,
                                                                                     kTapeRecordSize));
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * kTapeRecordSize));
    }
    out.close();
    if (!out) throw IoError("write failed for " + path.string());

    const auto expected = tape_file_size(records.size());
    if (fs::file_size(path) != expected)
        throw IoError("size check failed for " + path.string() + ": expected " + std::to_string(expected));
    return records.size();
}

TapeContents read_tape(const fs::path& path, const ExchangeRegistry& registry) {
    using K = TapeFormatError::Kind;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto file_size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);

    if (file_size < kTapeHeaderSize) throw TapeFormatError(K::Truncated, path.string() + ": truncated header");
    std::array<std::uint8_t, kTapeHeaderSize> head{};
    in.read(reinterpret_cast<char*>(head.data()), head.size());

    TapeContents tc;
    tc.header = decode_header(head.data());
    if (tc.header.magic != kTapeMagic) throw TapeFormatError(K::BadMagic, path.string() + ": bad magic");
    if (tc.header.format_version != kTapeFormatVersion)
        throw TapeFormatError(K::VersionMismatch, path.string() + ": unsupported format version " +
                                                      std::to_string(tc.header.format_version));
    const auto expected = tape_file_size(tc.header.record_count);
    if (file_size < expected)
        throw TapeFormatError(K::Truncated, path.string() + ": truncated, expected " + std::to_string(expected) +
                                                " bytes, found " + std::to_string(file_size));
    if (file_size > expected) throw TapeFormatError(K::Corrupt, path.string() + ": trailing bytes after records");

    const std::size_t n = tc.header.record_count;
    std::vector<std::uint8_t> body(n * kTapeRecordSize);
    in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
    if (!in) throw IoError("read failed for " + path.string());

    tc.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = tc.records[i] = decode_record(
            std::span<const std::uint8_t, kTapeRecordSize>(body.data() + i * kTapeRecordSize, kTapeRecordSize));
        if (r.sip_ts < r.exchange_ts) tc.issues.push_back({i, ValidationIssue::Kind::NegativeLatency});
        if (!registry.contains(r.exchange_id))
            tc.issues.push_back({i, ValidationIssue::Kind::UnknownExchange});
        else if (is_quote(r.msg_kind) && !registry.at(r.exchange_id).quotes_allowed)
            tc.issues.push_back({i, ValidationIssue::Kind::TrfQuote});
    }
    return tc;
}

// ----------------------------------------------------------------------- CSV

std::vector<TapeRecord> import_csv(const fs::path& path, const SymbolDirectory& directory,
                                   const ExchangeRegistry& registry) {
    using K = CsvImportError::Kind;
    auto in = open_text(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return {};
    ++line_no;
    strip_cr(line);
    if (line.rfind("ticker,", 0) != 0) throw CsvImportError(K::Malformed, 1, "missing header row");

    struct Row {
        TapeRecord rec;
        std::size_t line;
    };
    std::array<std::vector<Row>, 3> by_sip;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 7) throw CsvImportError(K::Malformed, line_no, "expected 7 columns");

        const auto sym = directory.find(cols[0]);
        if (!sym) throw CsvImportError(K::UnknownTicker, line_no, "unknown ticker '" + std::string(cols[0]) + "'");
        const auto kind = parse_kind_code(cols[1]);
        if (!kind) throw CsvImportError(K::Malformed, line_no, "bad kind '" + std::string(cols[1]) + "'");
        const auto exch = registry.find(cols[2]);
        if (!exch)
            throw CsvImportError(K::UnknownExchange, line_no, "unknown exchange '" + std::string(cols[2]) + "'");

        TapeRecord r;
        r.symbol_id = *sym;
        r.msg_kind = *kind;
        r.exchange_id = *exch;
        try {
            r.price = price_from_decimal(cols[3]);
        } catch (const PriceParseError& e) {
            throw CsvImportError(K::Malformed, line_no, e.what());
        }
        if (!parse_int(cols[4], r.size)) throw CsvImportError(K::Malformed, line_no, "bad size");
        if (!parse_int(cols[5], r.exchange_ts.micros) || !parse_int(cols[6], r.sip_ts.micros))
            throw CsvImportError(K::Malformed, line_no, "bad timestamp");
        if (r.exchange_ts.micros >= kSessionEndUs || r.sip_ts.micros >= kSessionEndUs)
            throw CsvImportError(K::TimestampOutOfRange, line_no, "timestamp outside the 04:00-20:00 session");
        by_sip[sip_index(directory.sip_of(r.symbol_id))].push_back({r, line_no});
    }

    std::vector<TapeRecord> out;
    for (auto& rows : by_sip) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.rec.sip_ts < b.rec.sip_ts; });
        std::uint64_t seq = 0;
        for (auto& row : rows) {
            row.rec.sip_seq = ++seq;
            out.push_back(row.rec);
        }
    }
    return out;
}

void export_csv(std::span<const TapeRecord> records, const fs::path& path, const SymbolDirectory& directory,
                const ExchangeRegistry& registry) {
    auto out = create_text(path);
    out << "ticker,kind,exchange,price,size,exchange_ts_us,sip_ts_us\n";
    for (const auto& r : records) {
        out << directory.at(r.symbol_id).ticker << ',' << kind_code(r.msg_kind) << ','
            << registry.at(r.exchange_id).abbreviation << ',' << price_to_decimal(r.price) << ',' << r.size << ','
            << r.exchange_ts.micros << ',' << r.sip_ts.micros << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

SymbolDirectory read_symbol_directory(const fs::path& path) {
    auto in = open_text(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<SymbolInfo> rows;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || line_no == 1) continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 4) throw CsvImportError(CsvImportError::Kind::Malformed, line_no, "expected 4 columns");
        SymbolInfo s;
        s.ticker = std::string(cols[0]);
        const auto listing = parse_listing(cols[2]);
        if (!parse_int(cols[1], s.id) || !listing || (cols[3] != "0" && cols[3] != "1"))
            throw CsvImportError(CsvImportError::Kind::Malformed, line_no, "malformed symbol row");
        s.listing = *listing;
        s.penny_flag = cols[3] == "1";
        rows.push_back(std::move(s));
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return SymbolDirectory(std::move(rows));
}

void write_symbol_directory(const SymbolDirectory& directory, const fs::path& path) {
    auto out = create_text(path);
    out << "ticker,symbol_id,listing_group,penny_flag\n";
    for (const auto& s : directory.rows())
        out << s.ticker << ',' << s.id << ',' << to_string(s.listing) << ',' << (s.penny_flag ? 1 : 0) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

void write_exchange_directory(const ExchangeRegistry& registry, const fs::path& path) {
    auto out = create_text(path);
    out << "exchange_id,abbreviation,name,family,datacenter,quotes_allowed\n";
    for (const auto& e : registry.rows())
        out << static_cast<int>(e.id) << ',' << e.abbreviation << ',' << e.name << ',' << to_string(e.family) << ','
            << to_string(e.datacenter) << ',' << (e.quotes_allowed ? 1 : 0) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

ExchangeRegistry read_exchange_directory(const fs::path& path) {
    auto in = open_text(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<ExchangeInfo> rows;
    const auto bad = [&] { return CsvImportError(CsvImportError::Kind::Malformed, line_no, "malformed exchange row"); };
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || line_no == 1) continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 6) throw bad();
        ExchangeInfo e;
        unsigned id = 0;
        if (!parse_int(cols[0], id) || id > 255) throw bad();
        e.id = static_cast<ExchangeId>(id);
        e.abbreviation = std::string(cols[1]);
        e.name = std::string(cols[2]);
        static constexpr std::array kFamilies{ExchangeFamily::BATS, ExchangeFamily::Chicago, ExchangeFamily::NASDAQ,
                                              ExchangeFamily::NYSE, ExchangeFamily::TRF};
        static constexpr std::array kCenters{Datacenter::Secaucus, Datacenter::Carteret, Datacenter::Mahwah};
        auto fam = std::find_if(kFamilies.begin(), kFamilies.end(), [&](auto f) { return to_string(f) == cols[3]; });
        auto dc = std::find_if(kCenters.begin(), kCenters.end(), [&](auto d) { return to_string(d) == cols[4]; });
        if (fam == kFamilies.end() || dc == kCenters.end()) throw bad();
        e.family = *fam;
        e.datacenter = *dc;
        e.quotes_allowed = cols[5] == "1";
        rows.push_back(std::move(e));
    }
    return ExchangeRegistry(std::move(rows));
}

} // namespace tapelab
