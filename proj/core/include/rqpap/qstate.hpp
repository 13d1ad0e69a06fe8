// ============================================================================
//  rqpap/qstate.hpp — density matrices, effects, and the two state backends
//
//  Quantum configurations pair a process term with a state-space valuation.
//  Two backends:
//   * Symbolic — the valuation is an opaque token; every effect is formal.
//     All purely structural reasoning (bisimulation of terms, normalization)
//     runs here.
//   * Concrete — an explicit density matrix over n qubits; quantum operations
//     apply completely positive trace-preserving maps (unitaries and
//     non-selective projective measurements).
// ============================================================================
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rqpap {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Validation/compare tolerance for density matrices.
inline constexpr double kRhoTol = 1e-9;

struct DensityMatrix {
  int qubits = 0;
  Mat m;  // 2^qubits x 2^qubits

  std::size_t dim() const { return static_cast<std::size_t>(m.rows()); }

  /// Hermitian within tol, trace 1 within tol, positive semidefinite
  /// (eigenvalues >= -tol).
  bool valid(double tol = kRhoTol) const;

  /// Quantized fingerprint at 1e-9 resolution (state identity in LTSs).
  std::size_t fingerprint() const;
  bool approx_equal(const DensityMatrix& o, double tol = kRhoTol) const;
};

/// |b_i><b_i| for the four Bell states, i in 1..4:
///   b1 = (|00>+|11>)/sqrt2,  b2 = (|00>-|11>)/sqrt2,
///   b3 = (|01>+|10>)/sqrt2,  b4 = (|01>-|10>)/sqrt2.
DensityMatrix bell_state(int i);

/// n-qubit |0...0><0...0|.
DensityMatrix ground_state(int qubits);

/// Tensor product (a occupies the high-order qubit positions).
DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);

/// Named single/two-qubit matrices: hadamard, pauli_x, pauli_y, pauli_z,
/// cnot, identity.  Throws std::invalid_argument on unknown names.
Mat builtin_matrix(const std::string& name);

struct QuantumEffect {
  enum class Kind { Identity, Unitary, Measure } kind = Kind::Identity;
  Mat u;                     ///< Unitary: 2^k x 2^k on the target qubits
  std::vector<int> targets;  ///< qubit indices, 0 = leftmost / most significant

  static QuantumEffect identity() { return {}; }
  static QuantumEffect unitary(Mat u, std::vector<int> targets);
  /// Non-selective measurement in the standard basis of the target qubits:
  /// rho' = sum_o P_o rho P_o.
  static QuantumEffect measure_std(std::vector<int> targets);
};

/// Applies the effect to rho (lifting the target-qubit operator to the whole
/// register).  Throws std::invalid_argument if a target is out of range.
DensityMatrix apply_effect(const DensityMatrix& rho, const QuantumEffect& e);

/// The symbolic valuation token (all states identical; effects formal).
struct SymbolicRho {
  friend bool operator==(SymbolicRho, SymbolicRho) { return true; }
};

using Rho = std::variant<SymbolicRho, DensityMatrix>;

bool rho_equal(const Rho& a, const Rho& b, double tol = kRhoTol);
std::size_t rho_fingerprint(const Rho& r);
bool is_symbolic(const Rho& r);

}  // namespace rqpap
