#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adishort/gap_schedule.hpp"

namespace adishort::report {

// 17 significant digits; round-trips exactly through strtod.
std::string g17(double v);

std::string version();

using HeaderBlock = std::vector<std::pair<std::string, std::string>>;

// CSV with the comment header block ("# key = value" lines) followed by the
// column row and data rows.
void write_csv(const std::string& path, const HeaderBlock& header,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

void write_schedule_csv(const std::string& path, const schedule::Schedule& sched,
                        const HeaderBlock& extra = {});

schedule::Schedule read_schedule_csv(const std::string& path);

} // namespace adishort::report
