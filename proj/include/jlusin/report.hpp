#pragma once

#include <string>
#include <vector>

#include "jlusin/verify.hpp"

namespace jlusin {

// One JSON object per line. gamma = NaN is written as null; runtimeMs is the only timing field.
std::string report_to_line(const VerificationReport& r);
VerificationReport report_from_line(const std::string& line);

// Appends one line per report.
void emit_report(const VerificationReport& r, const std::string& path);
void emit_reports(const std::vector<VerificationReport>& rs, const std::string& path);
std::vector<VerificationReport> read_reports(const std::string& path);

// Process exit code for a verify run: 2 when any suite is violated, else 0.
int verify_exit_code(const std::vector<VerificationReport>& rs);

struct GridRow {
    double theta;
    double phi;
    double t;
    double value;
};

// Header theta,phi,t,value; overwrites path. Values use round-trip precision.
void write_grid_csv(const std::vector<GridRow>& rows, const std::string& path);
std::vector<GridRow> read_grid_csv(const std::string& path);

}  // namespace jlusin
