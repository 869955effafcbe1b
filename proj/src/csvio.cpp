#include "servo/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "servo/errors.hpp"

namespace servo {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

double parse_double(const CsvTable& table, std::size_t row, int col,
                    const std::string& name) {
  const std::string& cell = table.rows[row][static_cast<std::size_t>(col)];
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw CsvError("row " + std::to_string(row + 2) + ", column '" + name +
                   "': cannot parse '" + cell + "' as a number");
  }
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvError("empty CSV input");
  }
  table.header = split_row(line);
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != table.header.size()) {
      throw CsvError("row " + std::to_string(row_no) + ": expected " +
                     std::to_string(table.header.size()) + " columns, found " +
                     std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  return parse_csv(read_text_file(path));
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out =
      "step,x_mm,y_mm,heading_deg,gt_x,gt_theta,mu_x,R_x,mu_theta,R_theta,"
      "kf_x,P_x,kf_theta,P_theta,cmd_normal,cmd_yaw,term_reason\n";
  const std::string term = to_string(trajectory.termination);
  for (const TrajectoryStep& s : trajectory.steps) {
    out += std::to_string(s.step);
    out += ',' + format_double(s.pose.origin.x);
    out += ',' + format_double(s.pose.origin.y);
    out += ',' + format_double(rad_to_deg(s.pose.heading));
    out += ',' + format_double(s.ground_truth.x_mm);
    out += ',' + format_double(s.ground_truth.theta_deg);
    out += ',' + format_double(s.measurement.x.mu);
    out += ',' + format_double(s.measurement.x.r);
    out += ',' + format_double(s.measurement.theta.mu);
    out += ',' + format_double(s.measurement.theta.r);
    if (s.kf_x) {
      out += ',' + format_double(s.kf_x->x_hat);
      out += ',' + format_double(s.kf_x->p);
      out += ',' + format_double(s.kf_theta->x_hat);
      out += ',' + format_double(s.kf_theta->p);
    } else {
      out += ",,,,";
    }
    out += ',' + format_double(s.command.d_normal_mm);
    out += ',' + format_double(s.command.d_yaw_deg);
    out += ',' + term;
    out += '\n';
  }
  return out;
}

std::vector<Point2> trajectory_positions_from_csv(const CsvTable& table) {
  const int cx = table.column("x_mm");
  const int cy = table.column("y_mm");
  if (cx < 0 || cy < 0) {
    throw CsvError("trajectory CSV must have x_mm and y_mm columns");
  }
  std::vector<Point2> pts;
  pts.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    pts.push_back({parse_double(table, i, cx, "x_mm"),
                   parse_double(table, i, cy, "y_mm")});
  }
  return pts;
}

std::string offline_series_csv(const OfflineSeries& series) {
  std::string out =
      "index,gt_x,gt_theta,mu_x,R_x,mu_theta,R_theta,kf_x,P_x,kf_theta,P_theta\n";
  for (std::size_t i = 0; i < series.steps.size(); ++i) {
    const OfflineStep& s = series.steps[i];
    out += std::to_string(i);
    out += ',' + format_double(s.truth.x_mm);
    out += ',' + format_double(s.truth.theta_deg);
    out += ',' + format_double(s.measurement.x.mu);
    out += ',' + format_double(s.measurement.x.r);
    out += ',' + format_double(s.measurement.theta.mu);
    out += ',' + format_double(s.measurement.theta.r);
    out += ',' + format_double(s.kf_x.x_hat);
    out += ',' + format_double(s.kf_x.p);
    out += ',' + format_double(s.kf_theta.x_hat);
    out += ',' + format_double(s.kf_theta.p);
    out += '\n';
  }
  return out;
}

std::string offline_records_csv(std::span<const OfflineRecord> records) {
  if (records.empty()) {
    throw CsvError("cannot serialize an empty record list");
  }
  const std::size_t n = records.front().batch.x.u.size();
  std::string out = "index,gt_x,gt_theta";
  for (std::size_t t = 0; t < n; ++t) out += ",u_x_" + std::to_string(t);
  for (std::size_t t = 0; t < n; ++t) out += ",v_x_" + std::to_string(t);
  for (std::size_t t = 0; t < n; ++t) out += ",u_theta_" + std::to_string(t);
  for (std::size_t t = 0; t < n; ++t) out += ",v_theta_" + std::to_string(t);
  out += '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const OfflineRecord& r = records[i];
    out += std::to_string(i);
    out += ',' + format_double(r.truth.x_mm);
    out += ',' + format_double(r.truth.theta_deg);
    for (double v : r.batch.x.u) out += ',' + format_double(v);
    for (double v : r.batch.x.v) out += ',' + format_double(v);
    for (double v : r.batch.theta.u) out += ',' + format_double(v);
    for (double v : r.batch.theta.v) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<FusedRecord> fused_records_from_csv(const CsvTable& table) {
  const int gx = table.column("gt_x");
  const int gt = table.column("gt_theta");
  if (gx < 0 || gt < 0) {
    throw CsvError("series CSV must have gt_x and gt_theta columns");
  }
  if (table.rows.empty()) {
    throw CsvError("series CSV has no data rows");
  }

  std::vector<FusedRecord> out;
  out.reserve(table.rows.size());

  if (table.column("mu_x") >= 0) {
    // Pre-fused layout.
    const int cols[4] = {table.column("mu_x"), table.column("R_x"),
                         table.column("mu_theta"), table.column("R_theta")};
    const char* names[4] = {"mu_x", "R_x", "mu_theta", "R_theta"};
    for (int c = 0; c < 4; ++c) {
      if (cols[c] < 0) {
        throw CsvError(std::string("fused series CSV is missing column '") +
                       names[c] + "'");
      }
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      FusedRecord rec;
      rec.truth = {parse_double(table, i, gx, "gt_x"),
                   parse_double(table, i, gt, "gt_theta")};
      rec.measurement.x = {parse_double(table, i, cols[0], "mu_x"),
                           parse_double(table, i, cols[1], "R_x")};
      rec.measurement.theta = {parse_double(table, i, cols[2], "mu_theta"),
                               parse_double(table, i, cols[3], "R_theta")};
      out.push_back(rec);
    }
    return out;
  }

  // Raw batch layout: collect u/v columns per parameter, fuse here.
  auto collect = [&](const std::string& prefix) {
    std::vector<int> cols;
    for (std::size_t t = 0;; ++t) {
      const int c = table.column(prefix + std::to_string(t));
      if (c < 0) break;
      cols.push_back(c);
    }
    return cols;
  };
  const std::vector<int> ux = collect("u_x_");
  const std::vector<int> vx = collect("v_x_");
  const std::vector<int> ut = collect("u_theta_");
  const std::vector<int> vt = collect("v_theta_");
  if (ux.size() < 2 || ux.size() != vx.size() || ux.size() != ut.size() ||
      ux.size() != vt.size()) {
    throw CsvError(
        "series CSV needs either mu/R columns or matching u_*/v_* batch "
        "columns with n >= 2");
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    OfflineRecord rec;
    rec.truth = {parse_double(table, i, gx, "gt_x"),
                 parse_double(table, i, gt, "gt_theta")};
    for (std::size_t t = 0; t < ux.size(); ++t) {
      rec.batch.x.u.push_back(parse_double(table, i, ux[t], "u_x"));
      rec.batch.x.v.push_back(parse_double(table, i, vx[t], "v_x"));
      rec.batch.theta.u.push_back(parse_double(table, i, ut[t], "u_theta"));
      rec.batch.theta.v.push_back(parse_double(table, i, vt[t], "v_theta"));
    }
    out.push_back({rec.truth, fuse_pose_batch(rec.batch)});
  }
  return out;
}

std::string mc_trace_csv(std::span<const OfflineRecord> records) {
  std::string out = "step,param,t,u_t,v_t\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const OfflineRecord& r = records[i];
    for (std::size_t t = 0; t < r.batch.x.u.size(); ++t) {
      out += std::to_string(i) + ",x," + std::to_string(t) + ',' +
             format_double(r.batch.x.u[t]) + ',' +
             format_double(r.batch.x.v[t]) + '\n';
    }
    for (std::size_t t = 0; t < r.batch.theta.u.size(); ++t) {
      out += std::to_string(i) + ",theta," + std::to_string(t) + ',' +
             format_double(r.batch.theta.u[t]) + ',' +
             format_double(r.batch.theta.v[t]) + '\n';
    }
  }
  return out;
}

std::string calibration_csv(const CalibrationResult& result) {
  std::string out = "scale,nll,mae_x,mae_theta\n";
  for (const CalibrationPoint& p : result.points) {
    out += format_double(p.scale) + ',' + format_double(p.nll) + ',' +
           format_double(p.mae_x) + ',' + format_double(p.mae_theta) + '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CsvError("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write file: " + path);
  }
  out << text;
}

std::vector<Point2> polyline_vertices_from_csv(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  const int cx = table.column("x_mm");
  const int cy = table.column("y_mm");
  if (cx < 0 || cy < 0) {
    throw CsvError("polyline CSV must have header x_mm,y_mm");
  }
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    pts.push_back({parse_double(table, i, cx, "x_mm"),
                   parse_double(table, i, cy, "y_mm")});
  }
  return pts;
}

}  // namespace servo
