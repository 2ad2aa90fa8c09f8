// run_io.hpp — persistence for run histories and field snapshots.
//
// History rows stream to CSV with a frozen column order:
//   t,mean_u,energy,sup_u,sup_abs_ux,radius_est,scale_norm,dt_used
// (Lagrangian histories append min_gamma_x). Snapshots stream to JSON
// lines, one object per record: {"t":..,"n_modes":N,"coeffs":[[re,im],..]}
// with coefficients ordered n = 0..N/2; Lagrangian runs emit a parallel
// pair of records tagged "which":"displacement" / "which":"zeta", and
// Taylor series export one line per coefficient {"j":..,"which":"u1"|"u2",...}.
// All numbers are shortest-round-trip decimals, so identical runs produce
// byte-identical files.

#pragma once

#include "mhs/eulerian.hpp"
#include "mhs/format.hpp"
#include "mhs/spectral_field.hpp"
#include "mhs/taylor_series.hpp"

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mhs {

inline const char* kHistoryHeader = "t,mean_u,energy,sup_u,sup_abs_ux,radius_est,scale_norm,dt_used";

inline std::string history_csv_row(const RunRecord& r, bool with_min_gamma) {
    std::string row = format_double(r.t) + "," + format_double(r.mean_u) + "," + format_double(r.energy) +
                      "," + format_double(r.sup_u) + "," + format_double(r.sup_abs_ux) + "," +
                      format_double(r.radius_est) + "," + format_double(r.scale_norm) + "," +
                      format_double(r.dt_used);
    if (with_min_gamma) row += "," + format_double(r.min_gamma_x);
    return row;
}

inline void write_history_csv(std::ostream& os, const std::vector<RunRecord>& history, bool with_min_gamma) {
    os << kHistoryHeader;
    if (with_min_gamma) os << ",min_gamma_x";
    os << "\n";
    for (const RunRecord& r : history) os << history_csv_row(r, with_min_gamma) << "\n";
}

namespace detail {

inline void append_coeff_array(std::string& line, const SpectralField& f) {
    line += "[";
    const auto& c = f.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k) line += ",";
        line += "[" + format_double(c[k].real()) + "," + format_double(c[k].imag()) + "]";
    }
    line += "]";
}

} // namespace detail

inline std::string snapshot_jsonl_line(double t, const SpectralField& f) {
    std::string line = "{\"t\":" + format_double(t) + ",\"n_modes\":" + std::to_string(f.n_modes()) +
                       ",\"coeffs\":";
    detail::append_coeff_array(line, f);
    line += "}";
    return line;
}

inline std::string snapshot_jsonl_line(double t, const char* which, const SpectralField& f) {
    std::string line = "{\"t\":" + format_double(t) + ",\"n_modes\":" + std::to_string(f.n_modes()) +
                       ",\"which\":\"" + which + "\",\"coeffs\":";
    detail::append_coeff_array(line, f);
    line += "}";
    return line;
}

inline std::string series_jsonl_line(int j, const char* which, const SpectralField& f) {
    std::string line = "{\"j\":" + std::to_string(j) + ",\"which\":\"" + std::string(which) +
                       "\",\"n_modes\":" + std::to_string(f.n_modes()) + ",\"coeffs\":";
    detail::append_coeff_array(line, f);
    line += "}";
    return line;
}

inline void write_series_jsonl(std::ostream& os, const TaylorSeries& ts) {
    for (int j = 0; j <= ts.order; ++j) {
        os << series_jsonl_line(j, "u1", ts.u1[std::size_t(j)]) << "\n";
        os << series_jsonl_line(j, "u2", ts.u2[std::size_t(j)]) << "\n";
    }
}

struct Snapshot {
    double t = 0.0;
    std::string which; // empty for plain field snapshots
    SpectralField field{2};
};

/// Read a JSONL snapshot stream (any of the record shapes above).
inline std::vector<Snapshot> read_snapshots(std::istream& is) {
    std::vector<Snapshot> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        Snapshot s;
        s.t = j.value("t", 0.0);
        s.which = j.value("which", std::string{});
        const int n = j.at("n_modes").get<int>();
        std::vector<cplx> half;
        for (const auto& pair : j.at("coeffs"))
            half.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        s.field = SpectralField::from_coeffs(n, std::move(half));
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<Snapshot> read_snapshots_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
    return read_snapshots(in);
}

} // namespace mhs
