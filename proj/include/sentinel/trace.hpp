#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentinel/types.hpp"

namespace sentinel::sim {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line_number)
        : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    std::size_t line;
};

struct MissingColumn : std::runtime_error {
    explicit MissingColumn(const std::string& name)
        : std::runtime_error("trace is missing column '" + name + "'"), column(name) {}
    std::string column;
};

// A replayed measurement file: comma-separated, header row, a Time column
// in milliseconds plus one named value column per channel.
class Trace {
  public:
    static Trace load(const std::filesystem::path& file);

    bool has_column(const std::string& name) const { return columns_.count(name) != 0; }

    // Zero-order hold over the samples: a query between two rows returns
    // the earlier row's value; queries beyond the last row hold the last
    // value, queries before the first hold the first.
    float value_at(const std::string& column, SimTime t_ms) const;

    std::size_t size() const { return times_.size(); }
    const std::vector<SimTime>& times() const { return times_; }
    const std::vector<float>& column(const std::string& name) const;

  private:
    std::vector<SimTime> times_;
    std::map<std::string, std::vector<float>> columns_;
};

}  // namespace sentinel::sim
