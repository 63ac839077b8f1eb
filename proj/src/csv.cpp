#include "excsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace excsim {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_traces_csv(const std::string& path, const std::vector<TimeTrace>& traces) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t_ns,channel_name,value\n";
    for (const auto& tr : traces) {
        for (std::size_t i = 0; i < tr.size(); ++i) {
            if (!tr.valid[i]) continue;
            out << format_double(tr.bin_center(i)) << ',' << tr.channel << ','
                << format_double(tr.value[i]) << '\n';
        }
    }
}

std::vector<TimeTrace> read_traces_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t_ns,channel_name,value")
        throw std::runtime_error(path + ": bad trace CSV header");
    std::map<std::string, std::vector<std::pair<double, double>>> data;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string t_s, ch, v_s;
        if (!std::getline(ss, t_s, ',') || !std::getline(ss, ch, ',') || !std::getline(ss, v_s))
            throw std::runtime_error(path + ": malformed row: " + line);
        if (!data.count(ch)) order.push_back(ch);
        data[ch].emplace_back(std::stod(t_s), std::stod(v_s));
    }
    std::vector<TimeTrace> traces;
    for (const auto& ch : order) {
        const auto& pts = data[ch];
        if (pts.size() < 2) throw std::runtime_error(path + ": channel too short: " + ch);
        TimeTrace tr;
        tr.channel = ch;
        tr.bin_width = pts[1].first - pts[0].first;
        tr.t_start = pts[0].first - 0.5 * tr.bin_width;
        for (const auto& [t, v] : pts) {
            tr.value.push_back(v);
            tr.valid.push_back(1);
        }
        traces.push_back(std::move(tr));
    }
    return traces;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t_ns";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            out << ",re_" << r << c << ",im_" << r << c;
    out << '\n';
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        out << format_double(traj.t[i]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out << ',' << format_double(traj.rho[i](r, c).real()) << ','
                    << format_double(traj.rho[i](r, c).imag());
        out << '\n';
    }
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line); // header
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 19) throw std::runtime_error(path + ": malformed trajectory row");
        traj.t.push_back(vals[0]);
        Rho3 rho;
        int k = 1;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c, k += 2) rho(r, c) = complexd(vals[k], vals[k + 1]);
        traj.rho.push_back(rho);
    }
    return traj;
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

} // namespace excsim
