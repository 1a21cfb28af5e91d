#include "tapelab/analytics.hpp"
#include "tapelab/cli.hpp"
#include "tapelab/digest.hpp"
#include "tapelab/errors.hpp"
#include "tapelab/scenario.hpp"
#include "tapelab/tape_io.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace tapelab;

namespace {

// Column names shared by read_tape and write_tape.
constexpr const char* kColumns[] = {"symbol_id", "msg_kind", "exchange_id", "price_ticks",
                                    "size",      "exchange_ts", "sip_ts",   "sip_seq"};

template <typename T>
py::array_t<T> column(const std::vector<TapeRecord>& recs, T (*get)(const TapeRecord&)) {
    py::array_t<T> a(static_cast<py::ssize_t>(recs.size()));
    auto out = a.template mutable_unchecked<1>();
    for (std::size_t i = 0; i < recs.size(); ++i) out(static_cast<py::ssize_t>(i)) = get(recs[i]);
    return a;
}

py::dict to_columns(const std::vector<TapeRecord>& recs) {
    py::dict d;
    d["symbol_id"] = column<std::uint32_t>(recs, [](const TapeRecord& r) { return r.symbol_id; });
    d["msg_kind"] = column<std::uint8_t>(recs, [](const TapeRecord& r) { return static_cast<std::uint8_t>(r.msg_kind); });
    d["exchange_id"] = column<std::uint8_t>(recs, [](const TapeRecord& r) { return r.exchange_id; });
    d["price_ticks"] = column<std::int64_t>(recs, [](const TapeRecord& r) { return r.price.ticks; });
    d["size"] = column<std::uint32_t>(recs, [](const TapeRecord& r) { return r.size; });
    d["exchange_ts"] = column<std::uint64_t>(recs, [](const TapeRecord& r) { return r.exchange_ts.micros; });
    d["sip_ts"] = column<std::uint64_t>(recs, [](const TapeRecord& r) { return r.sip_ts.micros; });
    d["sip_seq"] = column<std::uint64_t>(recs, [](const TapeRecord& r) { return r.sip_seq; });
    return d;
}

std::vector<TapeRecord> from_columns(const py::dict& d) {
    const auto get = [&](const char* name) {
        if (!d.contains(name)) throw py::key_error(std::string("missing column ") + name);
        return py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>(d[name]);
    };
    std::vector<py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>> cols;
    for (const char* c : kColumns) cols.push_back(get(c));
    const auto n = cols[0].size();
    for (const auto& c : cols)
        if (c.ndim() != 1 || c.size() != n) throw py::value_error("columns must be 1-D and of equal length");
    std::vector<TapeRecord> recs(static_cast<std::size_t>(n));
    for (py::ssize_t i = 0; i < n; ++i) {
        auto& r = recs[static_cast<std::size_t>(i)];
        r.symbol_id = static_cast<SymbolId>(cols[0].at(i));
        const auto kind = cols[1].at(i);
        if (kind < 0 || kind > 2) throw py::value_error("msg_kind must be 0 (trade), 1 (bid) or 2 (ask)");
        r.msg_kind = static_cast<MsgKind>(kind);
        r.exchange_id = static_cast<ExchangeId>(cols[2].at(i));
        r.price = Price{cols[3].at(i)};
        r.size = static_cast<std::uint32_t>(cols[4].at(i));
        r.exchange_ts = Timestamp{static_cast<std::uint64_t>(cols[5].at(i))};
        r.sip_ts = Timestamp{static_cast<std::uint64_t>(cols[6].at(i))};
        r.sip_seq = static_cast<std::uint64_t>(cols[7].at(i));
    }
    return recs;
}

// JSON crosses the boundary as text; the Python side parses it.
std::string simulate(const std::filesystem::path& out_dir, const std::optional<std::string>& preset,
                     const std::optional<std::string>& config_text, std::optional<std::uint64_t> seed) {
    if (preset.has_value() == config_text.has_value())
        throw ConfigError("scenario", "pass exactly one of preset or config_text");
    SimConfig cfg = preset ? scenario_preset(*preset) : parse_scenario(*config_text);
    if (seed) cfg.seed = *seed;
    std::ostringstream log;
    py::gil_scoped_release release;
    return cmd_simulate(cfg, out_dir, log).dump();
}

std::string analyze(const std::string& subcommand, const std::vector<std::filesystem::path>& tapes,
                    const std::optional<std::filesystem::path>& run, const std::optional<std::string>& symbol,
                    const std::optional<std::filesystem::path>& symbols, bool include_quotes, bool ex_trf,
                    std::int64_t bin_width_cents, const std::string& ordering, const std::string& kinds,
                    const std::string& group, const std::filesystem::path& out_dir) {
    AnalyzeOptions o;
    o.subcommand = subcommand;
    o.tapes = tapes;
    o.run_dir = run;
    o.symbol = symbol;
    o.symbols_path = symbols;
    o.include_quotes = include_quotes;
    o.ex_trf = ex_trf;
    o.bin_width_cents = bin_width_cents;
    o.ordering = ordering;
    o.kinds = kinds;
    o.group = group;
    o.out_dir = out_dir;
    std::ostringstream log;
    py::gil_scoped_release release;
    return cmd_analyze(o, log).dump();
}

std::string report(const std::filesystem::path& run_dir) {
    std::ostringstream log;
    py::gil_scoped_release release;
    return cmd_report(run_dir, log).dump();
}

} // namespace

PYBIND11_MODULE(_tapelab, m) {
    m.doc() = "Consolidated tape simulator and SIP accuracy analytics.";
    m.attr("__version__") = kToolVersion;
    m.attr("TICKS_PER_DOLLAR") = Price::kTicksPerDollar;

    auto base = py::register_exception<Error>(m, "TapelabError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataNotFound>(m, "DataNotFound", base.ptr());
    py::register_exception<OrderingError>(m, "OrderingError", base.ptr());
    py::register_exception<TapeFormatError>(m, "TapeFormatError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<CsvImportError>(m, "CsvImportError", base.ptr());
    py::register_exception<PriceParseError>(m, "PriceParseError", base.ptr());
    py::register_exception<DegenerateFit>(m, "DegenerateFit", base.ptr());

    m.def("price_from_decimal", [](const std::string& s) { return price_from_decimal(s).ticks; },
          "Parse a decimal dollar string into ticks (1/10,000 dollar).");
    m.def("price_to_decimal", [](std::int64_t ticks) { return price_to_decimal(Price{ticks}); });

    m.def(
        "read_tape",
        [](const std::filesystem::path& path) {
            auto contents = read_tape(path);
            py::dict d = to_columns(contents.records);
            d["scenario_hash"] = to_hex(contents.header.scenario_hash);
            py::list issues;
            for (const auto& i : contents.issues) {
                const char* kind = i.kind == ValidationIssue::Kind::NegativeLatency ? "negative_latency"
                                   : i.kind == ValidationIssue::Kind::TrfQuote      ? "trf_quote"
                                                                                    : "unknown_exchange";
                issues.append(py::make_tuple(i.index, kind));
            }
            d["issues"] = issues;
            return d;
        },
        py::arg("path"), "Read a binary tape into a dict of numpy columns.");
    m.def(
        "write_tape",
        [](const std::filesystem::path& path, const py::dict& columns,
           const std::optional<std::filesystem::path>& symbols) {
            const auto recs = from_columns(columns);
            std::optional<SymbolDirectory> dir;
            if (symbols) dir = read_symbol_directory(*symbols);
            return write_tape(recs, path, WriteOptions{capture_marker(), dir ? &*dir : nullptr});
        },
        py::arg("path"), py::arg("columns"), py::arg("symbols") = py::none(),
        "Write numpy columns as a binary tape; returns the record count.");
    m.def("tape_file_size", &tape_file_size, py::arg("record_count"));

    m.def(
        "detect_out_of_sequence",
        [](const std::vector<std::uint64_t>& exchange_ts) {
            std::vector<TapeRecord> trades(exchange_ts.size());
            for (std::size_t i = 0; i < trades.size(); ++i) {
                trades[i].exchange_ts = Timestamp{exchange_ts[i]};
                trades[i].sip_ts = Timestamp{i};
                trades[i].sip_seq = i + 1;
            }
            const auto r = detect_out_of_sequence(trades);
            py::dict d;
            d["total_trades"] = r.total_trades;
            d["oos_count"] = r.oos_count;
            d["oos_fraction"] = r.oos_fraction;
            d["oos_percent"] = r.percent();
            d["max_reversal_us"] = r.max_reversal_us;
            return d;
        },
        py::arg("exchange_ts"), "Out-of-sequence count for exchange timestamps listed in SIP order.");
    m.def(
        "fit_trend",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            if (x.size() != y.size()) throw py::value_error("x and y differ in length");
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < x.size(); ++i) pts.emplace_back(x[i], y[i]);
            const auto f = fit_trend(pts);
            py::dict d;
            d["slope"] = f.slope;
            d["intercept"] = f.intercept;
            d["r_squared"] = f.r_squared;
            d["n_points"] = f.n_points;
            return d;
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "spearman",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            if (x.size() != y.size()) throw py::value_error("x and y differ in length");
            return spearman(x, y);
        },
        py::arg("x"), py::arg("y"));

    m.def("scenario_text", [](const std::string& preset) { return format_scenario(scenario_preset(preset)); },
          py::arg("preset"), "Canonical scenario file text of a built-in preset.");
    m.def("scenario_hash", [](const std::string& text) { return to_hex(scenario_hash(parse_scenario(text))); },
          py::arg("text"));

    m.def("_simulate", &simulate, py::arg("out_dir"), py::arg("preset") = py::none(),
          py::arg("config_text") = py::none(), py::arg("seed") = py::none());
    m.def("_analyze", &analyze, py::arg("subcommand"), py::arg("tapes"), py::arg("run"), py::arg("symbol"),
          py::arg("symbols"), py::arg("include_quotes"), py::arg("ex_trf"), py::arg("bin_width_cents"),
          py::arg("ordering"), py::arg("kinds"), py::arg("group"), py::arg("out_dir"));
    m.def("_report", &report, py::arg("run_dir"));
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> full{"tapelab"};
            full.insert(full.end(), args.begin(), args.end());
            std::ostringstream out, err;
            const int code = run_cli(full, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command line in-process; returns (exit_code, stdout, stderr).");
}
