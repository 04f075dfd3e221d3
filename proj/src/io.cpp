#include "hjsm/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hjsm {

std::string format_double(double v) {
  char buf[40];
  // Shortest representation that round-trips: try increasing precision.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const MatrixXd& rows) {
  if (static_cast<Eigen::Index>(columns.size()) != rows.cols())
    throw std::invalid_argument("write_csv: header/column mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << columns[c];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (c) out << ',';
      out << format_double(rows(r, c));
    }
    out << '\n';
  }
}

ordered_json matrix_to_json(const MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

MatrixXd matrix_from_json(const ordered_json& j) {
  const auto rows = j.size();
  if (rows == 0) return MatrixXd(0, 0);
  const auto cols = j.at(0).size();
  MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  return m;
}

ordered_json to_json(const TransformData& td) {
  ordered_json j;
  j["A"] = matrix_to_json(td.A);
  j["Q"] = matrix_to_json(td.Q);
  j["R0"] = matrix_to_json(td.R0);
  j["P"] = matrix_to_json(td.P);
  j["S"] = matrix_to_json(td.S);
  j["B"] = matrix_to_json(td.B);
  j["T"] = matrix_to_json(td.T);
  j["T_inv"] = matrix_to_json(td.T_inv);
  return j;
}

TransformData transform_from_json(const ordered_json& j) {
  TransformData td;
  td.A = matrix_from_json(j.at("A"));
  td.Q = matrix_from_json(j.at("Q"));
  td.R0 = matrix_from_json(j.at("R0"));
  td.P = matrix_from_json(j.at("P"));
  td.S = matrix_from_json(j.at("S"));
  td.B = matrix_from_json(j.at("B"));
  td.T = matrix_from_json(j.at("T"));
  td.T_inv = matrix_from_json(j.at("T_inv"));
  return td;
}

ordered_json to_json(const ConvergenceCertificate& cert) {
  ordered_json j;
  j["a"] = cert.a;
  j["b"] = cert.b;
  j["L"] = cert.L;
  j["M"] = cert.M;
  j["rho"] = cert.rho;
  j["xi_norm"] = cert.xi_norm;
  j["g"] = cert.g;
  j["alpha_bound"] = cert.alpha_bound;
  j["beta_bound"] = cert.beta_bound;
  j["contraction"] = cert.contraction;
  j["C_x"] = cert.C_x;
  j["C_y"] = cert.C_y;
  j["enlarged_ball"] = cert.enlarged_ball;
  j["alpha_seq"] = cert.alpha_seq;
  j["beta_seq"] = cert.beta_seq;
  j["gamma_seq"] = cert.gamma_seq;  // index 0 is k = 1
  j["eps_seq"] = cert.eps_seq;
  return j;
}

ordered_json to_json(const PolynomialController& ctrl) {
  ordered_json j;
  j["degree"] = ctrl.degree();
  j["dim"] = ctrl.dim();
  j["origin_constrained"] = ctrl.origin_constrained();
  ordered_json comps = ordered_json::array();
  for (int k = 0; k < ctrl.dim(); ++k) {
    ordered_json comp;
    comp["C"] = matrix_to_json(ctrl.raw_coefficients(k));
    comps.push_back(comp);
  }
  j["components"] = comps;
  j["rms_residual"] = ctrl.rms_residual;
  j["max_residual"] = ctrl.max_residual;
  ordered_json lo = ordered_json::array(), hi = ordered_json::array();
  for (int i = 0; i < ctrl.domain_lo.size(); ++i) {
    lo.push_back(ctrl.domain_lo(i));
    hi.push_back(ctrl.domain_hi(i));
  }
  j["domain_lo"] = lo;
  j["domain_hi"] = hi;
  return j;
}

PolynomialController controller_from_json(const ordered_json& j) {
  const int degree = j.at("degree").get<int>();
  const int d = j.at("dim").get<int>();
  const bool constrained = j.at("origin_constrained").get<bool>();
  if (d != 2) throw std::invalid_argument("controller_from_json: layout defined for d = 2");
  int terms = (degree + 1) * (degree + 1);
  if (constrained) terms -= 1;
  MatrixXd coeff(d, terms);
  for (int comp = 0; comp < d; ++comp) {
    const MatrixXd C = matrix_from_json(j.at("components").at(comp).at("C"));
    for (int term = 0; term < terms; ++term) {
      const int raw = constrained ? term + 1 : term;
      const int i = raw / (degree + 1);
      const int jj = raw % (degree + 1);
      coeff(comp, term) = C(i, jj);
    }
  }
  PolynomialController ctrl(degree, VectorXd::Ones(d), coeff, constrained);
  ctrl.rms_residual = j.value("rms_residual", 0.0);
  ctrl.max_residual = j.value("max_residual", 0.0);
  if (j.contains("domain_lo")) {
    const auto& lo = j.at("domain_lo");
    const auto& hi = j.at("domain_hi");
    ctrl.domain_lo.resize(lo.size());
    ctrl.domain_hi.resize(hi.size());
    for (size_t i = 0; i < lo.size(); ++i) {
      ctrl.domain_lo(i) = lo.at(i).get<double>();
      ctrl.domain_hi(i) = hi.at(i).get<double>();
    }
  }
  return ctrl;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_json: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

SvgPlot::SvgPlot(double width, double height) : width_(width), height_(height) {}

void SvgPlot::add_series(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& color, const std::string& label) {
  series_.push_back({xs, ys, color, label, false});
}

void SvgPlot::add_polygon(const std::vector<Eigen::Vector2d>& vertices, const std::string& color,
                          const std::string& label) {
  Series s;
  for (const auto& v : vertices) {
    s.xs.push_back(v.x());
    s.ys.push_back(v.y());
  }
  s.color = color;
  s.label = label;
  s.closed = true;
  series_.push_back(std::move(s));
}

void SvgPlot::write(const std::filesystem::path& path, const std::string& x_label,
                    const std::string& y_label) const {
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  bool first = true;
  for (const auto& s : series_) {
    for (size_t i = 0; i < s.xs.size(); ++i) {
      if (first) {
        xlo = xhi = s.xs[i];
        ylo = yhi = s.ys[i];
        first = false;
      }
      xlo = std::min(xlo, s.xs[i]);
      xhi = std::max(xhi, s.xs[i]);
      ylo = std::min(ylo, s.ys[i]);
      yhi = std::max(yhi, s.ys[i]);
    }
  }
  if (xhi - xlo < 1e-300) xhi = xlo + 1;
  if (yhi - ylo < 1e-300) yhi = ylo + 1;
  const double margin = 50;
  const double pw = width_ - 2 * margin, ph = height_ - 2 * margin;
  auto px = [&](double x) { return margin + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return height_ - margin - (y - ylo) / (yhi - ylo) * ph; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("SvgPlot: cannot open " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
      << height_ << "\">\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 10
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << height_ / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 14 " << height_ / 2 << ")\">" << y_label << "</text>\n";
  // Corner coordinates as tick labels.
  out << "<text x=\"" << margin << "\" y=\"" << height_ - margin + 16 << "\" font-size=\"11\">"
      << format_double(xlo) << "</text>\n";
  out << "<text x=\"" << margin + pw << "\" y=\"" << height_ - margin + 16
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(xhi) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << height_ - margin
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(ylo) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << margin + 6
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(yhi) << "</text>\n";

  double legend_y = margin + 14;
  for (const auto& s : series_) {
    out << (s.closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.2\" points=\"";
    for (size_t i = 0; i < s.xs.size(); ++i)
      out << px(s.xs[i]) << ',' << py(s.ys[i]) << ' ';
    out << "\"/>\n";
    if (!s.label.empty()) {
      out << "<text x=\"" << margin + pw - 6 << "\" y=\"" << legend_y
          << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label
          << "</text>\n";
      legend_y += 16;
    }
  }
  out << "</svg>\n";
}

void write_local_curve_csv(const std::filesystem::path& path, const LocalCurve& curve) {
  const int d = static_cast<int>(curve.xbar.cols());
  const int n = static_cast<int>(curve.times.size());
  std::vector<std::string> cols = {"t"};
  for (int i = 1; i <= d; ++i) cols.push_back("xbar_" + std::to_string(i));
  for (int i = 1; i <= d; ++i) cols.push_back("pbar_" + std::to_string(i));
  for (int i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
  for (int i = 1; i <= d; ++i) cols.push_back("p_" + std::to_string(i));
  cols.push_back("H");
  MatrixXd rows(n, 4 * d + 2);
  for (int r = 0; r < n; ++r) {
    rows(r, 0) = curve.times[r];
    rows.block(r, 1, 1, d) = curve.xbar.row(r);
    rows.block(r, 1 + d, 1, d) = curve.pbar.row(r);
    rows.block(r, 1 + 2 * d, 1, d) = curve.x.row(r);
    rows.block(r, 1 + 3 * d, 1, d) = curve.p.row(r);
    rows(r, 4 * d + 1) = curve.ham(r);
  }
  write_csv(path, cols, rows);
}

void write_manifold_curve_csv(const std::filesystem::path& path, const ManifoldCurve& curve) {
  const int d = static_cast<int>(curve.x.cols());
  const int n = static_cast<int>(curve.times.size());
  std::vector<std::string> cols = {"t"};
  for (int i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
  for (int i = 1; i <= d; ++i) cols.push_back("p_" + std::to_string(i));
  cols.push_back("H");
  MatrixXd rows(n, 2 * d + 2);
  for (int r = 0; r < n; ++r) {
    rows(r, 0) = curve.times[r];
    rows.block(r, 1, 1, d) = curve.x.row(r);
    rows.block(r, 1 + d, 1, d) = curve.p.row(r);
    rows(r, 2 * d + 1) = curve.ham(r);
  }
  write_csv(path, cols, rows);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  if (traj.states.empty()) throw std::invalid_argument("write_trajectory_csv: empty trajectory");
  const int d = traj.states.front().dim();
  const int n = static_cast<int>(traj.times.size());
  std::vector<std::string> cols = {"t"};
  for (int i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
  for (int i = 1; i <= d; ++i) cols.push_back("p_" + std::to_string(i));
  cols.push_back("H");
  MatrixXd rows(n, 2 * d + 2);
  for (int r = 0; r < n; ++r) {
    rows(r, 0) = traj.times[r];
    rows.block(r, 1, 1, d) = traj.states[r].x.transpose();
    rows.block(r, 1 + d, 1, d) = traj.states[r].p.transpose();
    rows(r, 2 * d + 1) = traj.ham[r];
  }
  write_csv(path, cols, rows);
  // Stop-reason footer record.
  std::ofstream out(path, std::ios::app);
  out << "# stop_reason=" << to_string(traj.stop_reason) << " stop_time="
      << format_double(traj.stop_time) << '\n';
}

}  // namespace hjsm
