#include "dooc/csv.hpp"

#include "dooc/errors.hpp"

#include <charconv>
#include <fstream>

namespace dooc {

std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

namespace {

void append_padded(std::string& out, const Eigen::MatrixXd& series, Eigen::Index row, int width) {
    for (int k = 0; k < width; ++k) {
        out += ',';
        if (k < series.cols()) out += format_double(series(row, k));
    }
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out =
        "t,agent,y,y_r,u,theta_tilde,eta_ff,z1,x1,x2,x3,xt1,xt2,xt3,"
        "eta1,eta2,eta3,zeta,xi_ii,xi_rowsum,v1,v2\n";
    const Eigen::Index rows = traj.t.size();
    const int n = static_cast<int>(traj.y_r.cols());
    const bool closed_loop = !traj.agents.empty();
    for (Eigen::Index row = 0; row < rows; ++row) {
        for (int i = 0; i < n; ++i) {
            out += format_double(traj.t(row));
            out += ',';
            out += std::to_string(i + 1);
            if (closed_loop) {
                const auto& series = traj.agents[static_cast<std::size_t>(i)];
                out += ',';
                out += format_double(series.y(row));
                out += ',';
                out += format_double(traj.y_r(row, i));
                out += ',';
                out += format_double(series.u(row));
                out += ',';
                out += format_double(series.theta(row));
                out += ',';
                out += format_double(series.eta_ff(row));
                append_padded(out, series.z, row, 1);
                append_padded(out, series.x, row, 3);
                append_padded(out, series.x_tilde, row, 3);
                append_padded(out, series.eta, row, 3);
            } else {
                out += ",,";
                out += format_double(traj.y_r(row, i));
                out += ",,,";           // u, theta_tilde, eta_ff
                out += ",,,,,,,,,,";    // z1, x1..x3, xt1..xt3, eta1..eta3
            }
            out += ',';
            out += format_double(traj.zeta(row, i));
            out += ',';
            out += format_double(traj.xi_diag(row, i));
            out += ',';
            out += format_double(traj.xi_rowsum(row, i));
            for (int k = 0; k < 2; ++k) {
                out += ',';
                if (k < traj.v.cols()) out += format_double(traj.v(row, k));
            }
            out += '\n';
        }
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ValidationError("cannot open for writing: " + path);
    file << content;
    if (!file) throw ValidationError("failed writing: " + path);
}

}  // namespace dooc
