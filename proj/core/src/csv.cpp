#include "dem/csv.hpp"

#include <iomanip>

namespace dem {

namespace {

struct PrecisionGuard {
  explicit PrecisionGuard(std::ostream& os) : os_(os), precision_(os.precision(12)) {}
  ~PrecisionGuard() { os_.precision(precision_); }
  std::ostream& os_;
  std::streamsize precision_;
};

}  // namespace

void write_solution_csv(std::ostream& out, const OdeSolution& sol) {
  PrecisionGuard guard(out);
  out << 't';
  for (std::size_t k = 1; k <= sol.dimension(); ++k) out << ",y_" << k;
  out << '\n';
  for (std::size_t j = 0; j < sol.size(); ++j) {
    out << sol.grid()[j];
    for (double v : sol.row(j)) out << ',' << v;
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  PrecisionGuard guard(out);
  const std::size_t a = traj.dimension;
  out << 'i';
  for (std::size_t k = 1; k <= a; ++k) out << ",Y_" << k;
  for (std::size_t k = 1; k <= a; ++k) out << ",drift_" << k;
  out << ",flags\n";
  for (std::size_t row = 0; row < traj.rows(); ++row) {
    out << traj.indices[row];
    for (auto v : traj.state(row)) out << ',' << v;
    if (row < traj.flags.size()) {
      for (double d : traj.drift(row)) out << ',' << d;
      out << ',' << static_cast<int>(traj.flags[row]);
    } else {
      for (std::size_t k = 0; k <= a; ++k) out << ',';
    }
    out << '\n';
  }
}

}  // namespace dem
