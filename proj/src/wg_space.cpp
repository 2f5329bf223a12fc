#include "wgstokes/wg_space.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wgs {

WgSpace::WgSpace(std::shared_ptr<const Mesh> mesh, int k) : mesh_(std::move(mesh)), k_(k) {
  if (!mesh_) throw std::invalid_argument("WgSpace: null mesh");
  if (k_ < 1 || k_ > 3) throw std::invalid_argument("WgSpace: degree k must satisfy 1 <= k <= 3");
  n_interior_ = mesh_->num_cells() * interior_dofs_per_cell();
  edge_offsets_.assign(mesh_->edges.size(), -1);
  int next = n_interior_;
  for (const auto& e : mesh_->edges) {
    if (e.boundary) continue;
    edge_offsets_[static_cast<std::size_t>(e.id)] = next;
    next += edge_dofs_per_edge();
  }
  n_edge_ = next - n_interior_;
  n_pressure_ = mesh_->num_cells() * pressure_dofs_per_cell();
}

std::vector<int> WgSpace::local_velocity_dofs(int cell) const {
  std::vector<int> dofs;
  dofs.reserve(static_cast<std::size_t>(local_size()));
  const int base = interior_offset(cell);
  for (int i = 0; i < interior_dofs_per_cell(); ++i) dofs.push_back(base + i);
  for (int le = 0; le < 3; ++le) {
    const int off = edge_offset(mesh_->cells[static_cast<std::size_t>(cell)].edges[le]);
    for (int i = 0; i < edge_dofs_per_edge(); ++i) dofs.push_back(off < 0 ? -1 : off + i);
  }
  return dofs;
}

std::vector<int> WgSpace::local_pressure_dofs(int cell) const {
  std::vector<int> dofs;
  for (int i = 0; i < pressure_dofs_per_cell(); ++i) dofs.push_back(pressure_offset(cell) + i);
  return dofs;
}

GammaSchedule GammaSchedule::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const bool has_arg = colon != std::string::npos;
  auto arg = [&]() -> double {
    std::size_t used = 0;
    const std::string tail = text.substr(colon + 1);
    double v = 0.0;
    try {
      v = std::stod(tail, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("gamma: cannot parse number in '" + text + "'");
    }
    if (used != tail.size()) throw std::invalid_argument("gamma: trailing characters in '" + text + "'");
    return v;
  };
  if (head == "const") {
    const double c = has_arg ? arg() : 1.0;
    if (!(c > 0.0)) throw std::invalid_argument("gamma: constant must be positive");
    return constant(c);
  }
  if (head == "pow") {
    if (!has_arg) throw std::invalid_argument("gamma: pow requires an exponent, e.g. pow:0.1");
    const double e = arg();
    if (!(e > 0.0)) throw std::invalid_argument("gamma: pow exponent must be positive");
    return power(e);
  }
  if (head == "log" && !has_arg) return log();
  throw std::invalid_argument("gamma: expected const[:c], pow:<eps> or log, got '" + text + "'");
}

std::string GammaSchedule::to_string() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind) {
    case Kind::Constant: os << "const:" << parameter; break;
    case Kind::Power: os << "pow:" << parameter; break;
    case Kind::Log: os << "log"; break;
  }
  return os.str();
}

double GammaSchedule::operator()(double h) const {
  if (!(h > 0.0)) throw std::invalid_argument("gamma: mesh size must be positive");
  switch (kind) {
    case Kind::Constant: return parameter;
    case Kind::Power: return std::pow(h, parameter);
    case Kind::Log:
      if (!(h < 1.0)) throw std::invalid_argument("gamma: log schedule needs h < 1");
      return -1.0 / std::log(h);
  }
  return parameter;
}

Stabilizer Stabilizer::skeletal(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("stabilizer: alpha must be >= 0");
  return {Variant::Skeletal, alpha};
}

Stabilizer Stabilizer::parse(const std::string& text) {
  if (text == "standard") return standard();
  const std::string prefix = "skeletal:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string tail = text.substr(prefix.size());
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(tail, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("stabilizer: cannot parse alpha in '" + text + "'");
    }
    if (used != tail.size()) throw std::invalid_argument("stabilizer: trailing characters in '" + text + "'");
    return skeletal(a);
  }
  throw std::invalid_argument("stabilizer: expected standard or skeletal:<alpha>, got '" + text + "'");
}

std::string Stabilizer::to_string() const {
  if (variant == Variant::Standard) return "standard";
  std::ostringstream os;
  os.precision(12);
  os << "skeletal:" << alpha;
  return os.str();
}

}  // namespace wgs
