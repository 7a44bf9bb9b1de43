#include "driftflow/pointbatch.hpp"

#include "driftflow/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace driftflow {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const PointBatch& batch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    const int d = batch.dim();
    for (int j = 0; j < d; ++j) out << (j ? ",x" : "x") << j;
    if (batch.labeled()) out << ",label";
    out << "\n";
    for (int i = 0; i < batch.n(); ++i) {
        for (int j = 0; j < d; ++j) {
            if (j) out << ",";
            out << format_double(batch.data(i, j));
        }
        if (batch.labeled()) out << "," << (*batch.labels)(i);
        out << "\n";
    }
    if (!out) throw io_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

PointBatch read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty csv: " + path);

    const auto header = split_line(line);
    bool labeled = !header.empty() && header.back() == "label";
    const int d = static_cast<int>(header.size()) - (labeled ? 1 : 0);
    if (d < 1) throw io_error("csv header has no coordinate columns: " + path);
    for (int j = 0; j < d; ++j) {
        if (header[static_cast<size_t>(j)] != "x" + std::to_string(j))
            throw io_error("unexpected csv header column '" +
                           header[static_cast<size_t>(j)] + "' in " + path);
    }

    std::vector<double> coords;
    std::vector<int> labels;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (static_cast<int>(fields.size()) != d + (labeled ? 1 : 0))
            throw io_error("csv row " + std::to_string(rows + 1) +
                           " has wrong field count in " + path);
        for (int j = 0; j < d; ++j) {
            char* end = nullptr;
            const std::string& f = fields[static_cast<size_t>(j)];
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str()) throw io_error("bad number '" + f + "' in " + path);
            coords.push_back(v);
        }
        if (labeled) labels.push_back(std::atoi(fields.back().c_str()));
        ++rows;
    }

    PointBatch batch;
    batch.data.resize(rows, d);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < d; ++j)
            batch.data(i, j) = coords[static_cast<size_t>(i) * d + j];
    if (labeled) {
        IntVector lv(rows);
        for (int i = 0; i < rows; ++i) lv(i) = labels[static_cast<size_t>(i)];
        batch.labels = lv;
    }
    return batch;
}

} // namespace driftflow
