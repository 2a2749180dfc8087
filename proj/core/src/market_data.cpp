#include "ptl/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ptl/text.hpp"

namespace ptl {

namespace {

using json = nlohmann::ordered_json;

struct Line {
    std::string_view text;
    std::size_t number;  // 1-based
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 1;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back({line, number++});
        if (nl == std::string_view::npos) {
            break;
        }
        text.remove_prefix(nl + 1);
    }
    // A trailing newline does not create a phantom row.
    while (!lines.empty() && lines.back().text.empty()) {
        lines.pop_back();
    }
    return lines;
}

/// Split one CSV row; fields carry their 1-based starting column.
struct Field {
    std::string_view text;
    std::size_t column;
};

std::vector<Field> split_fields(std::string_view line) {
    std::vector<Field> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::size_t end = (comma == std::string_view::npos) ? line.size() : comma;
        fields.push_back({line.substr(start, end - start), start + 1});
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

Date parse_date_field(const Field& field, const std::string& source, std::size_t line) {
    const auto date = Date::parse(field.text);
    if (!date) {
        throw ParseError(source, line, field.column,
                         "bad date '" + std::string(field.text) + "', expected YYYY-MM-DD");
    }
    return *date;
}

double parse_price_field(const Field& field, const char* name, const std::string& source,
                         std::size_t line) {
    double value = 0.0;
    if (!parse_double(trim(field.text), value)) {
        throw ParseError(source, line, field.column,
                         "bad number in field '" + std::string(name) + "': '" +
                             std::string(field.text) + "'");
    }
    return value;
}

void expect_header(const Line& line, std::string_view expected, const std::string& source) {
    if (trim(line.text) != expected) {
        throw ParseError(source, line.number, 1,
                         "header mismatch: expected '" + std::string(expected) + "'");
    }
}

template <typename Row>
void reject_duplicates_sorted(std::vector<Row>& rows, const std::string& source) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    const auto dup = std::adjacent_find(
        rows.begin(), rows.end(),
        [](const Row& a, const Row& b) { return a.date == b.date; });
    if (dup != rows.end()) {
        throw ValidationError(source + ": duplicate date " + dup->date.to_string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path.string(), 0, 0, "cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double json_number(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw ValidationError(std::string("journal line: missing numeric field '") +
                              key + "'");
    }
    return it->get<double>();
}

}  // namespace

std::vector<OhlcBar> parse_ohlc_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text);
    if (lines.empty()) {
        throw ParseError(source, 1, 1, "empty input, expected 'date,open,high,low,close' header");
    }
    expect_header(lines[0], "date,open,high,low,close", source);

    std::vector<OhlcBar> bars;
    bars.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const auto fields = split_fields(line.text);
        if (fields.size() != 5) {
            throw ParseError(source, line.number, 1,
                             "expected 5 fields, got " + std::to_string(fields.size()));
        }
        OhlcBar bar;
        bar.date = parse_date_field(fields[0], source, line.number);
        bar.open = parse_price_field(fields[1], "open", source, line.number);
        bar.high = parse_price_field(fields[2], "high", source, line.number);
        bar.low = parse_price_field(fields[3], "low", source, line.number);
        bar.close = parse_price_field(fields[4], "close", source, line.number);
        if (bar.low <= 0.0) {
            throw ValidationError(source + ": low must be positive", line.number);
        }
        if (bar.low > std::min(bar.open, bar.close) ||
            bar.high < std::max(bar.open, bar.close)) {
            throw ValidationError(
                source + ": bar " + bar.date.to_string() +
                    " violates low <= min(open, close) <= max(open, close) <= high",
                line.number);
        }
        bars.push_back(bar);
    }
    reject_duplicates_sorted(bars, source);
    return bars;
}

std::vector<OhlcBar> load_ohlc(const std::filesystem::path& path) {
    return parse_ohlc_csv(read_file(path), path.string());
}

std::vector<VolPoint> parse_vols_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text);
    if (lines.empty()) {
        throw ParseError(source, 1, 1, "empty input, expected 'date,iv' header");
    }
    expect_header(lines[0], "date,iv", source);

    std::vector<VolPoint> vols;
    vols.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const auto fields = split_fields(line.text);
        if (fields.size() != 2) {
            throw ParseError(source, line.number, 1,
                             "expected 2 fields, got " + std::to_string(fields.size()));
        }
        VolPoint point;
        point.date = parse_date_field(fields[0], source, line.number);
        point.iv = parse_price_field(fields[1], "iv", source, line.number);
        if (point.iv <= 0.0) {
            throw ValidationError(source + ": iv must be positive", line.number);
        }
        vols.push_back(point);
    }
    reject_duplicates_sorted(vols, source);
    return vols;
}

std::vector<VolPoint> load_vols(const std::filesystem::path& path) {
    return parse_vols_csv(read_file(path), path.string());
}

std::string to_csv(std::span<const OhlcBar> bars) {
    std::string out = "date,open,high,low,close\n";
    for (const auto& bar : bars) {
        out += bar.date.to_string();
        out += ',';
        out += fmt_double(bar.open);
        out += ',';
        out += fmt_double(bar.high);
        out += ',';
        out += fmt_double(bar.low);
        out += ',';
        out += fmt_double(bar.close);
        out += '\n';
    }
    return out;
}

std::string to_csv(std::span<const VolPoint> vols) {
    std::string out = "date,iv\n";
    for (const auto& point : vols) {
        out += point.date.to_string();
        out += ',';
        out += fmt_double(point.iv);
        out += '\n';
    }
    return out;
}

std::string to_json_line(const EvaluationRecord& record) {
    json obj;
    obj["date"] = record.date.to_string();
    obj["symbol"] = record.symbol;
    obj["support"] = record.range.support();
    obj["resistance"] = record.range.resistance();
    obj["r"] = record.params.r();
    obj["sigma"] = record.params.sigma();
    if (record.eval) {
        obj["regime"] = to_string(record.eval->regime);
        obj["lambda"] = record.eval->lambda;
        obj["u"] = record.eval->u;
        obj["exponent"] = record.eval->exponent;
        obj["t"] = record.eval->t;
        obj["d"] = record.eval->d;
    } else {
        obj["regime"] = to_string(Regime::NoBarrier);
    }
    return obj.dump();
}

EvaluationRecord evaluation_record_from_json_line(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("journal line: ") + e.what());
    }
    if (!obj.is_object()) {
        throw ValidationError("journal line: expected a JSON object");
    }
    const auto date_it = obj.find("date");
    const auto symbol_it = obj.find("symbol");
    const auto regime_it = obj.find("regime");
    if (date_it == obj.end() || !date_it->is_string() || symbol_it == obj.end() ||
        !symbol_it->is_string() || regime_it == obj.end() || !regime_it->is_string()) {
        throw ValidationError("journal line: missing date/symbol/regime");
    }
    const auto date = Date::parse(date_it->get<std::string>());
    if (!date) {
        throw ValidationError("journal line: bad date");
    }

    try {
        RangeBound range(json_number(obj, "support"), json_number(obj, "resistance"));
        MarketParams params(json_number(obj, "r"), json_number(obj, "sigma"));
        EvaluationRecord record{*date, symbol_it->get<std::string>(), range, params,
                                std::nullopt};
        const std::string regime = regime_it->get<std::string>();
        if (regime != to_string(Regime::NoBarrier)) {
            TunnelEvaluation eval;
            eval.regime = regime == to_string(Regime::Tunneling)
                              ? Regime::Tunneling
                              : Regime::AtTurningPoint;
            if (regime != to_string(eval.regime)) {
                throw ValidationError("journal line: unknown regime '" + regime + "'");
            }
            eval.lambda = json_number(obj, "lambda");
            eval.u = json_number(obj, "u");
            eval.exponent = json_number(obj, "exponent");
            eval.t = json_number(obj, "t");
            eval.d = json_number(obj, "d");
            record.eval = eval;
        }
        return record;
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("journal line: ") + e.what());
    }
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
    RunConfig cfg;
    for (const auto& line : split_lines(text)) {
        const std::string_view stripped = trim(line.text);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(source, line.number, 1, "expected 'key = value'");
        }
        const std::string key{trim(stripped.substr(0, eq))};
        const std::string_view value = trim(stripped.substr(eq + 1));

        const auto number = [&](double lo, double hi, bool open) {
            double v = 0.0;
            if (!parse_double(value, v)) {
                throw ParseError(source, line.number, 1,
                                 "bad numeric value for '" + key + "'");
            }
            const bool in_range = open ? (v > lo && v < hi) : (v >= lo && v <= hi);
            if (!in_range) {
                throw ValidationError(source + ": '" + key + "' out of range",
                                      line.number);
            }
            return v;
        };
        const auto integer = [&](int lo) {
            int v = 0;
            if (!parse_int(value, v) || v < lo) {
                throw ParseError(source, line.number, 1,
                                 "bad integer value for '" + key + "'");
            }
            return v;
        };

        if (key == "risk_free_rate") {
            cfg.risk_free_rate = number(0.0, 1.0, true);
        } else if (key == "t_threshold") {
            cfg.t_threshold = number(0.0, 1.0, true);
        } else if (key == "vol_drop_ratio") {
            // 0 disables the vol-fall gate (threshold-only triggering).
            cfg.vol_drop_ratio = number(0.0, 1.0, false);
            if (cfg.vol_drop_ratio >= 1.0) {
                throw ValidationError(source + ": 'vol_drop_ratio' out of range",
                                      line.number);
            }
        } else if (key == "range_window") {
            cfg.range_window = integer(2);
        } else if (key == "range_touch_count") {
            cfg.range_touch_count = integer(2);
        } else if (key == "range_tolerance") {
            cfg.range_tolerance = number(0.0, 0.05, true);
        } else {
            throw ParseError(source, line.number, 1, "unknown key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_file(path), path.string());
}

std::vector<std::optional<double>> fill_iv_by_bar(std::span<const OhlcBar> bars,
                                                  std::span<const VolPoint> vols) {
    std::vector<std::optional<double>> filled(bars.size());
    std::size_t next_vol = 0;
    std::optional<double> current;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        while (next_vol < vols.size() && vols[next_vol].date <= bars[i].date) {
            current = vols[next_vol].iv;
            ++next_vol;
        }
        filled[i] = current;
    }
    return filled;
}

}  // namespace ptl
