#pragma once

#include "tapelab/core.hpp"
#include "tapelab/digest.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tapelab {

// Binary tape layout (little-endian):
//   header, 64 bytes: magic[8] "NMSTAPE1", version u16, pad[6], record_count u64,
//                     symbol_directory_offset u64, scenario_hash[32]
//   records, 48 bytes each:
//     0-3 symbol_id u32 | 4 msg_kind u8 | 5 exchange_id u8 | 6-7 reserved
//     8-15 price ticks i64 | 16-19 size u32 | 20-23 reserved
//     24-31 exchange_ts u64 | 32-39 sip_ts u64 | 40-47 sip_seq u64
// The symbol directory is not embedded; symbol_directory_offset is 0 and the
// directory travels as a CSV sidecar (see read_symbol_directory).
inline constexpr std::array<char, 8> kTapeMagic{'N', 'M', 'S', 'T', 'A', 'P', 'E', '1'};
inline constexpr std::uint16_t kTapeFormatVersion = 1;
inline constexpr std::size_t kTapeHeaderSize = 64;
inline constexpr std::size_t kTapeRecordSize = 48;

constexpr std::uint64_t tape_file_size(std::uint64_t record_count) {
    return kTapeHeaderSize + kTapeRecordSize * record_count;
}

struct TapeFileHeader {
    std::array<char, 8> magic = kTapeMagic;
    std::uint16_t format_version = kTapeFormatVersion;
    std::uint64_t record_count = 0;
    std::uint64_t symbol_directory_offset = 0;
    Digest scenario_hash{};
};

void encode_record(const TapeRecord& r, std::span<std::uint8_t, kTapeRecordSize> out);
TapeRecord decode_record(std::span<const std::uint8_t, kTapeRecordSize> in);

struct WriteOptions {
    Digest scenario_hash = capture_marker();
    // When set, records may hold several SIPs: each SIP's records must be
    // contiguous with strictly increasing sip_seq. Without a directory the
    // whole sequence must have strictly increasing sip_seq.
    const SymbolDirectory* directory = nullptr;
};

/// Throws OrderingError if records violate the write_tape ordering contract.
void check_tape_order(std::span<const TapeRecord> records, const SymbolDirectory* directory);

/// Returns the number of records written. Throws OrderingError or IoError.
std::uint64_t write_tape(std::span<const TapeRecord> records, const std::filesystem::path& path,
                         const WriteOptions& options = {});

struct ValidationIssue {
    enum class Kind { NegativeLatency, TrfQuote, UnknownExchange };
    std::size_t index = 0;
    Kind kind = Kind::NegativeLatency;
};

struct TapeContents {
    TapeFileHeader header;
    std::vector<TapeRecord> records;
    // Semantic anomalies are reported, not thrown; only structural damage throws.
    std::vector<ValidationIssue> issues;
};

/// Throws TapeFormatError (BadMagic, Truncated, VersionMismatch, Corrupt) or IoError.
TapeContents read_tape(const std::filesystem::path& path,
                       const ExchangeRegistry& registry = ExchangeRegistry::standard());

// CSV interchange: ticker,kind,exchange,price,size,exchange_ts_us,sip_ts_us
// with a header row. Import assigns sip_seq 1.. per SIP after a stable sort by
// sip_ts, and returns records grouped A, B, C.
std::vector<TapeRecord> import_csv(const std::filesystem::path& path, const SymbolDirectory& directory,
                                   const ExchangeRegistry& registry = ExchangeRegistry::standard());
void export_csv(std::span<const TapeRecord> records, const std::filesystem::path& path,
                const SymbolDirectory& directory,
                const ExchangeRegistry& registry = ExchangeRegistry::standard());

// Symbol directory CSV: ticker,symbol_id,listing_group,penny_flag
SymbolDirectory read_symbol_directory(const std::filesystem::path& path);
void write_symbol_directory(const SymbolDirectory& directory, const std::filesystem::path& path);

// Exchange directory CSV: exchange_id,abbreviation,name,family,datacenter,quotes_allowed
void write_exchange_directory(const ExchangeRegistry& registry, const std::filesystem::path& path);
ExchangeRegistry read_exchange_directory(const std::filesystem::path& path);

/// Splits a CSV line on commas (no quoting in any of the formats above).
std::vector<std::string_view> split_csv_line(std::string_view line);

} // namespace tapelab
