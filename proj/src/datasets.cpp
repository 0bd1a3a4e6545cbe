#include "sensorcast/datasets.hpp"

#include "sensorcast/error.hpp"
#include "sensorcast/evaluation.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace sensorcast::data {

namespace {

struct Layout {
    std::vector<std::string> header;
    int time_col;
    int value_col;
    int id_col; // -1 when the layout has no sensor column
};

Layout layout_for(Family family) {
    switch (family) {
    case Family::Intel:
        return {{"epoch", "moteid", "temperature"}, 0, 2, 1};
    case Family::Sensorscope:
        return {{"station", "epoch", "temperature"}, 1, 2, 0};
    case Family::RunningLatitude:
        return {{"timestamp", "latitude", "longitude"}, 0, 1, -1};
    case Family::RunningLongitude:
        return {{"timestamp", "latitude", "longitude"}, 0, 2, -1};
    case Family::Ball:
        return {{"time", "position"}, 0, 1, -1};
    }
    throw InvalidArgument("unknown dataset family");
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

double parse_number(const std::string& field, const std::filesystem::path& path, std::size_t line) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (!field.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw DataError(fmt::format("{}:{}: malformed number '{}'", path.string(), line, field));
    }
    return v;
}

} // namespace

std::string_view family_name(Family family) noexcept {
    switch (family) {
    case Family::Intel:
        return "intel";
    case Family::Sensorscope:
        return "sensorscope";
    case Family::Ball:
        return "ball";
    case Family::RunningLatitude:
        return "running_latitude";
    case Family::RunningLongitude:
        return "running_longitude";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    for (auto f : {Family::Intel, Family::Sensorscope, Family::Ball, Family::RunningLatitude,
                   Family::RunningLongitude}) {
        if (family_name(f) == name) {
            return f;
        }
    }
    throw InvalidArgument("unknown dataset family '" + std::string(name) + "'");
}

double builtin_threshold(Family family) {
    switch (family) {
    case Family::Intel:
        return 0.01;
    case Family::Sensorscope:
        // 12-bit ADC over the LM20's -55..130 degC span.
        return (130.0 - (-55.0)) / 4096.0;
    case Family::Ball:
        return 0.001;
    case Family::RunningLatitude:
    case Family::RunningLongitude:
        return 8.38e-8;
    }
    throw InvalidArgument("builtin_threshold: unknown family");
}

double default_period(Family family) {
    switch (family) {
    case Family::Intel:
        return 30.0;
    case Family::Sensorscope:
        return 120.0;
    case Family::Ball:
        return 1.0;
    case Family::RunningLatitude:
    case Family::RunningLongitude:
        return 5.0;
    }
    throw InvalidArgument("default_period: unknown family");
}

std::string_view family_unit(Family family) {
    switch (family) {
    case Family::Intel:
    case Family::Sensorscope:
        return "degC";
    case Family::Ball:
        return "meter";
    case Family::RunningLatitude:
    case Family::RunningLongitude:
        return "degree";
    }
    return "";
}

DatasetDescriptor DatasetDescriptor::for_family(Family family, int group) {
    DatasetDescriptor d;
    d.family = family;
    d.group = group;
    d.delta_min = builtin_threshold(family);
    d.expected_period = default_period(family);
    return d;
}

void DatasetDescriptor::validate() const {
    if (!(delta_min > 0.0)) {
        throw InvalidArgument("dataset descriptor: delta_min must be positive");
    }
    if (!(expected_period > 0.0)) {
        throw InvalidArgument("dataset descriptor: expected period must be positive");
    }
}

void BallParams::validate() const {
    if (!(theta0 > 0.0) || !(lambda > 0.0) || !(gamma >= 0.0) || n < 1 || !(dt > 0.0)) {
        throw InvalidArgument("ball parameters: need theta0 > 0, lambda > 0, gamma >= 0, n >= 1, dt > 0");
    }
}

double ball_signal(const BallParams& p, double t) {
    return p.theta0 * std::abs(std::cos(2.0 * std::numbers::pi * p.lambda * t)) / std::exp(p.gamma * t);
}

TimeSeries generate_ball(const BallParams& p) {
    p.validate();
    TimeSeries s;
    s.unit = "meter";
    s.resolution = builtin_threshold(Family::Ball);
    s.timestamps.resize(p.n);
    s.values.resize(p.n);
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t k = 0; k < p.n; ++k) {
        const double t = static_cast<double>(k) * p.dt;
        s.timestamps[k] = t;
        s.values[k] = ball_signal(p, t) + (p.suppress_noise ? 0.0 : noise(rng));
    }
    return s;
}

std::vector<BallParams> standard_ball_configs(std::uint64_t seed) {
    std::vector<BallParams> configs(3);
    configs[0].theta0 = 50.0;
    configs[0].gamma = 0.05;
    configs[1].theta0 = 100.0;
    configs[1].gamma = 0.1;
    configs[2].theta0 = 200.0;
    configs[2].gamma = 0.1;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        configs[i].lambda = 0.1;
        configs[i].dt = 1.0;
        configs[i].n = 2800;
        configs[i].seed = seed + i + 1;
    }
    return configs;
}

TimeSeries load_csv(const std::filesystem::path& path, const DatasetDescriptor& descriptor) {
    descriptor.validate();
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dataset file " + path.string());
    }
    const Layout layout = layout_for(descriptor.family);

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_fields(line);
        for (auto& f : fields) {
            std::transform(f.begin(), f.end(), f.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        }
        if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) {
            fields[0].erase(0, 3);
        }
        if (fields != layout.header) {
            throw DataError(fmt::format("{}:{}: expected header '{}'", path.string(), line_no,
                                        fmt::join(layout.header, ",")));
        }
        have_header = true;
    }
    if (!have_header) {
        throw DataError(path.string() + ": empty file");
    }

    struct Row {
        double time;
        double value;
    };
    std::vector<Row> rows;
    std::set<std::string> ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != layout.header.size()) {
            throw DataError(fmt::format("{}:{}: expected {} fields, found {}", path.string(),
                                        line_no, layout.header.size(), fields.size()));
        }
        if (layout.id_col >= 0) {
            const auto& id = fields[static_cast<std::size_t>(layout.id_col)];
            if (descriptor.sensor_id && id != *descriptor.sensor_id) {
                continue;
            }
            ids.insert(id);
        }
        rows.push_back({parse_number(fields[static_cast<std::size_t>(layout.time_col)], path, line_no),
                        parse_number(fields[static_cast<std::size_t>(layout.value_col)], path, line_no)});
    }
    if (rows.empty()) {
        throw DataError(path.string() + ": no data rows" +
                        (descriptor.sensor_id ? " for sensor " + *descriptor.sensor_id : ""));
    }
    if (ids.size() > 1) {
        throw DataError(path.string() + ": file holds " + std::to_string(ids.size()) +
                        " sensors; select one with a sensor id");
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });
    TimeSeries raw;
    raw.unit = std::string(family_unit(descriptor.family));
    raw.resolution = descriptor.delta_min;
    for (const auto& r : rows) {
        if (!raw.timestamps.empty() && raw.timestamps.back() == r.time) {
            raw.values.back() = r.value;
            continue;
        }
        raw.timestamps.push_back(r.time);
        raw.values.push_back(r.value);
    }
    if (raw.size() < 2) {
        return raw;
    }

    auto filled = interpolate_gaps_with_mask(raw, descriptor.expected_period);
    std::span<const std::uint8_t> mask = filled.inserted;
    if (descriptor.noise_all_values) {
        mask = {};
    } else if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
        return filled.series;
    }
    return add_white_noise(filled.series, descriptor.delta_min, descriptor.noise_seed, mask);
}

void write_ball_csv(const TimeSeries& series, const std::filesystem::path& path) {
    std::string out = "time,position\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += fmt::format("{},{}\n", series.timestamps[i], series.values[i]);
    }
    eval::write_file_atomic(path, out);
}

} // namespace sensorcast::data
