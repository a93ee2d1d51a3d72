#include "gract/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace gract {

namespace {

constexpr char kBinaryMagic[4] = {'T', 'R', 'J', 'B'};
constexpr std::uint64_t kMaxObjectId = std::uint64_t{1} << 26;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line, const char* name) {
    field = trim(field);
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError("line " + std::to_string(line) + ": bad " + name + " '" + std::string(field) + "'");
    }
    return value;
}

std::uint64_t read_uint(std::span<const std::uint8_t> row, std::size_t at, unsigned width) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(row[at + i]) << (8 * i);
    return v;
}

void write_uint(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned width, const char* name) {
    if (width < 8 && (v >> (8 * width)) != 0) {
        throw std::invalid_argument(std::string("write_binary: ") + name + " value " + std::to_string(v) +
                                    " does not fit in " + std::to_string(width) + " bytes");
    }
    for (unsigned i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t to_uint(double v, const char* name) {
    if (!(v >= 0) || v >= 18446744073709551616.0) {
        throw std::invalid_argument(std::string("write_binary: ") + name + " must be a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

struct Sample {
    double tau;
    double x;
    double y;
};

Cell to_cell(double x, double y, double cell_size) {
    return {static_cast<std::int64_t>(std::floor(x / cell_size)), static_cast<std::int64_t>(std::floor(y / cell_size))};
}

Segment interpolate(std::span<const Sample> s, double cell_size) {
    Segment seg;
    const auto first = std::llround(s.front().tau);
    const auto last = std::llround(s.back().tau);
    if (first < 0) throw std::invalid_argument("normalize: record before the time origin");
    seg.start = static_cast<Instant>(first);
    std::size_t j = 0;
    for (long long i = first; i <= last; ++i) {
        const auto ti = static_cast<double>(i);
        while (j + 1 < s.size() && s[j + 1].tau <= ti) ++j;
        double x;
        double y;
        if (ti <= s[j].tau || j + 1 == s.size()) {
            x = s[j].x;
            y = s[j].y;
        } else {
            const double f = (ti - s[j].tau) / (s[j + 1].tau - s[j].tau);
            x = s[j].x + (s[j + 1].x - s[j].x) * f;
            y = s[j].y + (s[j + 1].y - s[j].y) * f;
        }
        seg.cells.push_back(to_cell(x, y, cell_size));
    }
    return seg;
}

}  // namespace

std::vector<RawRecord> parse_csv(std::istream& in, bool has_header) {
    std::vector<RawRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && has_header) continue;
        const std::string_view v = trim(line);
        if (v.empty()) continue;
        std::string_view fields[4];
        std::size_t start = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i <= v.size(); ++i) {
            if (i == v.size() || v[i] == ',') {
                if (n == 4) throw ParseError("line " + std::to_string(lineno) + ": more than 4 columns");
                fields[n++] = v.substr(start, i - start);
                start = i + 1;
            }
        }
        if (n != 4) throw ParseError("line " + std::to_string(lineno) + ": expected 4 columns, got " + std::to_string(n));
        out.push_back({parse_field<std::uint64_t>(fields[0], lineno, "id"), parse_field<double>(fields[1], lineno, "time"),
                       parse_field<double>(fields[2], lineno, "x"), parse_field<double>(fields[3], lineno, "y")});
    }
    return out;
}

std::vector<RawRecord> parse_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || !std::equal(bytes.begin(), bytes.begin() + 4, reinterpret_cast<const std::uint8_t*>(kBinaryMagic))) {
        throw ParseError("offset 0: missing binary header");
    }
    unsigned widths[4];
    std::size_t row = 0;
    for (int c = 0; c < 4; ++c) {
        widths[c] = bytes[4 + c];
        if (widths[c] < 1 || widths[c] > 8) {
            throw ParseError("offset " + std::to_string(4 + c) + ": column width " + std::to_string(widths[c]) +
                             " outside 1..8");
        }
        row += widths[c];
    }
    const auto body = bytes.subspan(8);
    if (body.size() % row != 0) {
        throw ParseError("offset " + std::to_string(8 + body.size() / row * row) + ": truncated row (row size " +
                         std::to_string(row) + ")");
    }
    std::vector<RawRecord> out;
    out.reserve(body.size() / row);
    for (std::size_t at = 0; at < body.size(); at += row) {
        std::size_t p = at;
        RawRecord r;
        r.id = read_uint(body, p, widths[0]);
        p += widths[0];
        r.time = static_cast<double>(read_uint(body, p, widths[1]));
        p += widths[1];
        r.x = static_cast<double>(read_uint(body, p, widths[2]));
        p += widths[2];
        r.y = static_cast<double>(read_uint(body, p, widths[3]));
        out.push_back(r);
    }
    return out;
}

std::vector<std::uint8_t> write_binary(std::span<const RawRecord> records, ColumnWidths widths) {
    std::vector<std::uint8_t> out(kBinaryMagic, kBinaryMagic + 4);
    for (auto w : widths) {
        if (w < 1 || w > 8) throw std::invalid_argument("write_binary: column width outside 1..8");
        out.push_back(w);
    }
    for (const auto& r : records) {
        write_uint(out, r.id, widths[0], "id");
        write_uint(out, to_uint(r.time, "time"), widths[1], "time");
        write_uint(out, to_uint(r.x, "x"), widths[2], "x");
        write_uint(out, to_uint(r.y, "y"), widths[3], "y");
    }
    return out;
}

std::vector<NormalizedSeries> normalize(std::vector<RawRecord> records, const NormalizeParams& params) {
    if (!(params.cell_size > 0) || !(params.time_step > 0)) {
        throw std::invalid_argument("normalize: cell size and time step must be positive");
    }
    if (params.gap_threshold < 2) throw std::invalid_argument("normalize: gap threshold must be at least 2");
    std::stable_sort(records.begin(), records.end(), [](const RawRecord& a, const RawRecord& b) {
        return a.id != b.id ? a.id < b.id : a.time < b.time;
    });

    std::vector<NormalizedSeries> out;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        while (j < records.size() && records[j].id == records[i].id) ++j;

        std::vector<Sample> kept;
        const RawRecord* last = nullptr;
        for (std::size_t r = i; r < j; ++r) {
            const RawRecord& rec = records[r];
            if (last != nullptr) {
                const double dt = rec.time - last->time;
                if (dt <= 0) continue;
                if (std::hypot(rec.x - last->x, rec.y - last->y) / dt > params.speed_cap) continue;
            }
            last = &rec;
            kept.push_back({(rec.time - params.time_origin) / params.time_step, rec.x, rec.y});
        }

        NormalizedSeries series;
        series.id = records[i].id;
        std::size_t a = 0;
        for (std::size_t b = 1; b <= kept.size(); ++b) {
            if (b == kept.size() || kept[b].tau - kept[b - 1].tau >= static_cast<double>(params.gap_threshold)) {
                Segment seg = interpolate(std::span(kept).subspan(a, b - a), params.cell_size);
                if (!series.segments.empty()) {
                    const Segment& prev = series.segments.back();
                    if (seg.start <= prev.start + prev.cells.size() - 1) {
                        throw std::logic_error("normalize: overlapping segments");
                    }
                }
                series.segments.push_back(std::move(seg));
                a = b;
            }
        }
        out.push_back(std::move(series));
        i = j;
    }
    return out;
}

TrajectorySet to_trajectory_set(const std::vector<NormalizedSeries>& series) {
    TrajectorySet data;
    std::uint64_t max_id = 0;
    bool any = false;
    for (const auto& s : series) {
        if (s.id >= kMaxObjectId) throw std::invalid_argument("object id " + std::to_string(s.id) + " too large");
        max_id = std::max(max_id, s.id);
        any = true;
    }
    data.objects.resize(any ? max_id + 1 : 0);
    for (const auto& s : series) {
        auto& fixes = data.objects[s.id];
        for (const auto& seg : s.segments) {
            for (std::size_t k = 0; k < seg.cells.size(); ++k) {
                const Cell& c = seg.cells[k];
                if (c.x < 0 || c.y < 0) {
                    throw std::invalid_argument("object " + std::to_string(s.id) + ": negative cell at instant " +
                                                std::to_string(seg.start + k));
                }
                fixes.push_back({seg.start + k, c});
            }
        }
    }
    data.fit_extent();
    data.validate();
    return data;
}

std::vector<RawRecord> to_records(const TrajectorySet& data, const NormalizeParams& params) {
    std::vector<RawRecord> out;
    for (std::size_t o = 0; o < data.objects.size(); ++o) {
        for (const auto& f : data.objects[o]) {
            out.push_back({o, params.time_origin + static_cast<double>(f.t) * params.time_step,
                           (static_cast<double>(f.cell.x) + 0.5) * params.cell_size,
                           (static_cast<double>(f.cell.y) + 0.5) * params.cell_size});
        }
    }
    return out;
}

}  // namespace gract
