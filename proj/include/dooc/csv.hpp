#pragma once

#include "dooc/sim.hpp"

#include <string>

namespace dooc {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Fixed-layout trajectory table, one row per agent per recorded step:
///   t,agent,y,y_r,u,theta_tilde,eta_ff,z1,x1,x2,x3,xt1,xt2,xt3,
///   eta1,eta2,eta3,zeta,xi_ii,xi_rowsum,v1,v2
/// Cells that do not apply to a run (plant columns in coordinator-only mode,
/// x3 for a length-2 chain, ...) are left empty.
std::string trajectory_to_csv(const Trajectory& traj);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dooc
