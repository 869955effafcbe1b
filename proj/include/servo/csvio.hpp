#pragma once

#include <span>
#include <string>
#include <vector>

#include "servo/sim.hpp"

namespace servo {

/// %.17g: enough digits to round-trip any double, identical bytes for
/// identical values.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable parse_csv(const std::string& text);       // throws CsvError
CsvTable read_csv_file(const std::string& path);   // throws CsvError

// step,x_mm,y_mm,heading_deg,gt_x,gt_theta,mu_x,R_x,mu_theta,R_theta,
// kf_x,P_x,kf_theta,P_theta,cmd_normal,cmd_yaw,term_reason
// (kf columns empty in unfiltered mode)
std::string trajectory_csv(const Trajectory& trajectory);
std::vector<Point2> trajectory_positions_from_csv(const CsvTable& table);

// index,gt_x,gt_theta,mu_x,R_x,mu_theta,R_theta,kf_x,P_x,kf_theta,P_theta
std::string offline_series_csv(const OfflineSeries& series);

// index,gt_x,gt_theta,u_x_<t>,v_x_<t>,u_theta_<t>,v_theta_<t> for t in [0, n)
std::string offline_records_csv(std::span<const OfflineRecord> records);

/// Parse either the raw-batch layout written by offline_records_csv or the
/// pre-fused layout (index,gt_x,gt_theta,mu_x,R_x,mu_theta,R_theta).
std::vector<FusedRecord> fused_records_from_csv(const CsvTable& table);

/// Debug dump of raw batches, one sample per row: step,param,t,u_t,v_t.
std::string mc_trace_csv(std::span<const OfflineRecord> records);

// scale,nll,mae_x,mae_theta
std::string calibration_csv(const CalibrationResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Polyline vertices from a CSV with header x_mm,y_mm.
std::vector<Point2> polyline_vertices_from_csv(const std::string& path);

}  // namespace servo
