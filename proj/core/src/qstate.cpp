#include "rqpap/qstate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace rqpap {

bool DensityMatrix::valid(double tol) const {
  if (m.rows() != m.cols()) return false;
  if (m.rows() != (1L << qubits)) return false;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(m.trace().real() - 1.0) > tol || std::abs(m.trace().imag()) > tol)
    return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

std::size_t DensityMatrix::fingerprint() const {
  std::size_t h = static_cast<std::size_t>(qubits) * 0x100000001b3ull;
  auto mixin = [&h](long long v) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      mixin(std::llround(m(i, j).real() * 1e9));
      mixin(std::llround(m(i, j).imag() * 1e9));
    }
  return h;
}

bool DensityMatrix::approx_equal(const DensityMatrix& o, double tol) const {
  return qubits == o.qubits && (m - o.m).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix bell_state(int i) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  const double s = 1.0 / std::sqrt(2.0);
  switch (i) {
    case 1: v(0) = s; v(3) = s; break;
    case 2: v(0) = s; v(3) = -s; break;
    case 3: v(1) = s; v(2) = s; break;
    case 4: v(1) = s; v(2) = -s; break;
    default: throw std::invalid_argument("bell_state: index must be 1..4");
  }
  DensityMatrix d;
  d.qubits = 2;
  d.m = v * v.adjoint();
  return d;
}

DensityMatrix ground_state(int qubits) {
  if (qubits < 1 || qubits > 16) throw std::invalid_argument("ground_state: bad size");
  DensityMatrix d;
  d.qubits = qubits;
  d.m = Mat::Zero(1L << qubits, 1L << qubits);
  d.m(0, 0) = 1.0;
  return d;
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  DensityMatrix d;
  d.qubits = a.qubits + b.qubits;
  d.m = Mat::Zero(a.m.rows() * b.m.rows(), a.m.cols() * b.m.cols());
  for (Eigen::Index i = 0; i < a.m.rows(); ++i)
    for (Eigen::Index j = 0; j < a.m.cols(); ++j)
      d.m.block(i * b.m.rows(), j * b.m.cols(), b.m.rows(), b.m.cols()) = a.m(i, j) * b.m;
  return d;
}

Mat builtin_matrix(const std::string& name) {
  const double s = 1.0 / std::sqrt(2.0);
  const Cplx I(0, 1);
  if (name == "hadamard") {
    Mat m(2, 2);
    m << s, s, s, -s;
    return m;
  }
  if (name == "pauli_x") {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }
  if (name == "pauli_y") {
    Mat m(2, 2);
    m << 0, -I, I, 0;
    return m;
  }
  if (name == "pauli_z") {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
  }
  if (name == "cnot") {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = 1; m(1, 1) = 1; m(2, 3) = 1; m(3, 2) = 1;
    return m;
  }
  if (name == "identity") return Mat::Identity(2, 2);
  throw std::invalid_argument("unknown builtin matrix: " + name);
}

QuantumEffect QuantumEffect::unitary(Mat u, std::vector<int> targets) {
  QuantumEffect e;
  e.kind = Kind::Unitary;
  const Eigen::Index want = 1L << targets.size();
  if (u.rows() != want || u.cols() != want)
    throw std::invalid_argument("unitary: matrix size does not match target count");
  e.u = std::move(u);
  e.targets = std::move(targets);
  return e;
}

QuantumEffect QuantumEffect::measure_std(std::vector<int> targets) {
  QuantumEffect e;
  e.kind = Kind::Measure;
  e.targets = std::move(targets);
  return e;
}

namespace {

// Extracts the bits of `basis` at the target positions (qubit 0 = most
// significant register bit) into a k-bit sub-index, and the rest unchanged.
int sub_index(int basis, const std::vector<int>& targets, int qubits) {
  int s = 0;
  for (int t : targets) s = (s << 1) | ((basis >> (qubits - 1 - t)) & 1);
  return s;
}

bool off_target_equal(int b1, int b2, const std::vector<int>& targets, int qubits) {
  int mask = (1 << qubits) - 1;
  for (int t : targets) mask &= ~(1 << (qubits - 1 - t));
  return (b1 & mask) == (b2 & mask);
}

// Lifts a 2^k x 2^k operator on the target qubits to the full register.
Mat lift(const Mat& op, const std::vector<int>& targets, int qubits) {
  const Eigen::Index dim = 1L << qubits;
  Mat full = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (!off_target_equal(static_cast<int>(i), static_cast<int>(j), targets, qubits))
        continue;
      full(i, j) = op(sub_index(static_cast<int>(i), targets, qubits),
                      sub_index(static_cast<int>(j), targets, qubits));
    }
  return full;
}

}  // namespace

DensityMatrix apply_effect(const DensityMatrix& rho, const QuantumEffect& e) {
  if (e.kind == QuantumEffect::Kind::Identity) return rho;
  for (int t : e.targets)
    if (t < 0 || t >= rho.qubits)
      throw std::invalid_argument("apply_effect: target qubit out of range");
  DensityMatrix out;
  out.qubits = rho.qubits;
  if (e.kind == QuantumEffect::Kind::Unitary) {
    const Mat u = lift(e.u, e.targets, rho.qubits);
    out.m = u * rho.m * u.adjoint();
    return out;
  }
  // Non-selective standard-basis measurement: rho' = sum_o P_o rho P_o.
  const int k = static_cast<int>(e.targets.size());
  out.m = Mat::Zero(rho.m.rows(), rho.m.cols());
  for (int o = 0; o < (1 << k); ++o) {
    Mat p = Mat::Zero(1L << k, 1L << k);
    p(o, o) = 1.0;
    const Mat po = lift(p, e.targets, rho.qubits);
    out.m += po * rho.m * po;
  }
  return out;
}

bool rho_equal(const Rho& a, const Rho& b, double tol) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<SymbolicRho>(a)) return true;
  return std::get<DensityMatrix>(a).approx_equal(std::get<DensityMatrix>(b), tol);
}

std::size_t rho_fingerprint(const Rho& r) {
  if (std::holds_alternative<SymbolicRho>(r)) return 0x5ca1ab1e;
  return std::get<DensityMatrix>(r).fingerprint();
}

bool is_symbolic(const Rho& r) { return std::holds_alternative<SymbolicRho>(r); }

}  // namespace rqpap
