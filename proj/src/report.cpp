#include "adishort/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adishort::report {

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string version()
{
#ifdef ADISHORT_VERSION
    return ADISHORT_VERSION;
#else
    return "unknown";
#endif
}

void write_csv(const std::string& path, const HeaderBlock& header,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_csv: cannot open " + path);
    }
    out << "# adishort_version = " << version() << "\n";
    for (const auto& [key, value] : header) {
        out << "# " << key << " = " << value << "\n";
    }
    for (size_t c = 0; c < columns.size(); ++c) {
        out << columns[c] << (c + 1 < columns.size() ? "," : "");
    }
    out << "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            out << row[c] << (c + 1 < row.size() ? "," : "");
        }
        out << "\n";
    }
    if (!out) {
        throw std::runtime_error("write_csv: write failed for " + path);
    }
}

void write_schedule_csv(const std::string& path, const schedule::Schedule& sched,
                        const HeaderBlock& extra)
{
    HeaderBlock header;
    header.emplace_back("kind", sched.kind == schedule::ScheduleKind::Shortcut
                                    ? "shortcut"
                                    : "linear");
    header.emplace_back("s", sched.kind == schedule::ScheduleKind::Shortcut
                                 ? g17(sched.s)
                                 : std::string("linear"));
    header.emplace_back("total_time", g17(sched.total_time));
    header.emplace_back("grid", std::to_string(sched.size()));
    header.emplace_back("zero_cost", sched.zero_cost ? "1" : "0");
    for (const auto& kv : extra) {
        header.push_back(kv);
    }

    std::vector<std::vector<std::string>> rows;
    rows.reserve(sched.times.size());
    for (size_t i = 0; i < sched.times.size(); ++i) {
        rows.push_back({g17(sched.times[i]), g17(sched.values[i])});
    }
    write_csv(path, header, {"time", "R"}, rows);
}

schedule::Schedule read_schedule_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_schedule_csv: cannot open " + path);
    }
    schedule::Schedule sched;
    sched.kind = schedule::ScheduleKind::Linear;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key, eq, value;
            ls >> key >> eq >> value;
            if (key == "kind" && value == "shortcut") {
                sched.kind = schedule::ScheduleKind::Shortcut;
            } else if (key == "s" && value != "linear") {
                sched.s = std::strtod(value.c_str(), nullptr);
            } else if (key == "total_time") {
                sched.total_time = std::strtod(value.c_str(), nullptr);
            } else if (key == "zero_cost") {
                sched.zero_cost = value == "1";
            }
            continue;
        }
        if (!header_done) {
            header_done = true; // column row
            continue;
        }
        const size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("read_schedule_csv: malformed row in " + path);
        }
        sched.times.push_back(std::strtod(line.substr(0, comma).c_str(), nullptr));
        sched.values.push_back(std::strtod(line.substr(comma + 1).c_str(), nullptr));
    }
    if (sched.times.size() < 2) {
        throw std::runtime_error("read_schedule_csv: no data rows in " + path);
    }
    if (sched.total_time == 0.0) {
        sched.total_time = sched.times.back();
    }
    return sched;
}

} // namespace adishort::report
