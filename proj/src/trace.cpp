#include "sentinel/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sentinel::sim {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // Trim surrounding whitespace.
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos ? ""
                                                    : field.substr(begin, end - begin + 1));
    }
    return fields;
}

}  // namespace

Trace Trace::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open trace file: " + file.string());
    }
    std::string line;
    std::size_t line_number = 0;

    if (!std::getline(in, line)) {
        throw ParseError("empty trace file", 1);
    }
    ++line_number;
    const auto header = split_csv(line);
    std::size_t time_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "Time") {
            time_col = i;
        }
    }
    if (time_col == header.size()) {
        throw MissingColumn("Time");
    }

    Trace trace;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != time_col) {
            trace.columns_[header[i]] = {};
        }
    }

    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()),
                             line_number);
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(fields[i], &used);
            } catch (const std::exception&) {
                throw ParseError("not a number: '" + fields[i] + "'", line_number);
            }
            if (used != fields[i].size()) {
                throw ParseError("not a number: '" + fields[i] + "'", line_number);
            }
            if (i == time_col) {
                if (v < 0.0) {
                    throw ParseError("negative timestamp", line_number);
                }
                if (!trace.times_.empty() && static_cast<SimTime>(v) < trace.times_.back()) {
                    throw ParseError("timestamps must be non-decreasing", line_number);
                }
                trace.times_.push_back(static_cast<SimTime>(v));
            } else {
                trace.columns_[header[i]].push_back(static_cast<float>(v));
            }
        }
    }
    if (trace.times_.empty()) {
        throw ParseError("trace has no data rows", line_number);
    }
    return trace;
}

const std::vector<float>& Trace::column(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) {
        throw MissingColumn(name);
    }
    return it->second;
}

float Trace::value_at(const std::string& col, SimTime t_ms) const {
    const auto& values = column(col);
    auto it = std::upper_bound(times_.begin(), times_.end(), t_ms);
    if (it == times_.begin()) {
        return values.front();
    }
    const auto idx = static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
    return values[idx];
}

}  // namespace sentinel::sim
