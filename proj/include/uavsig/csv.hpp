#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace uavsig {

/// Shortest text that reads back to the same double.
std::string format_real(double v);
std::string csv_escape(const std::string& cell);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    void row(const std::vector<std::string>& cells);
    /// Flushes and throws if anything failed to reach the file.
    void close();

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace uavsig
