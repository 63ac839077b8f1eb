#pragma once

#include <string>
#include <vector>

#include "excsim/dynamics.hpp"
#include "excsim/photonics.hpp"

namespace excsim {

/// Writes traces as rows "t_ns,channel_name,value"; invalid bins are skipped.
void write_traces_csv(const std::string& path, const std::vector<TimeTrace>& traces);

/// Reads a trace CSV back, one TimeTrace per channel (bins inferred from
/// the time column, which must be uniform per channel).
std::vector<TimeTrace> read_traces_csv(const std::string& path);

/// Density-matrix trajectory as time plus 18 real columns (row-major
/// re/im pairs of the 3x3 matrix).
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

Trajectory read_trajectory_csv(const std::string& path);

/// Generic numeric table with a header row.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Canonical float formatting used for all CSV output (deterministic).
std::string format_double(double v);

} // namespace excsim
