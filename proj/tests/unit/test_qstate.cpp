#include "doctest.h"

#include <cmath>
#include <random>

#include "rqpap/qstate.hpp"

using namespace rqpap;

namespace {

constexpr double kExact = 1e-12;

/// Random 2-qubit density matrix: normalized A A^dagger + eps I.
DensityMatrix random_rho2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = Cplx(g(rng), g(rng));
  Mat p = a * a.adjoint() + 1e-3 * Mat::Identity(4, 4);
  DensityMatrix d;
  d.qubits = 2;
  d.m = p / p.trace();
  return d;
}

/// Random 2x2 unitary from a QR decomposition.
Mat random_u2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) a(r, c) = Cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ();
}

QuantumEffect random_effect(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return QuantumEffect::unitary(random_u2(rng), {(int)(rng() % 2)});
    case 1: return QuantumEffect::unitary(builtin_matrix("cnot"), {0, 1});
    case 2: return QuantumEffect::measure_std({(int)(rng() % 2)});
    default: return QuantumEffect::measure_std({0, 1});
  }
}

}  // namespace

TEST_CASE("bell states match their closed forms") {
  const double h = 0.5;
  DensityMatrix b1 = bell_state(1);
  REQUIRE(b1.qubits == 2);
  CHECK(std::abs(b1.m(0, 0).real() - h) < kExact);
  CHECK(std::abs(b1.m(0, 3).real() - h) < kExact);
  CHECK(std::abs(b1.m(3, 0).real() - h) < kExact);
  CHECK(std::abs(b1.m(3, 3).real() - h) < kExact);
  CHECK(std::abs(b1.m(1, 1)) < kExact);
  CHECK(std::abs(b1.m(2, 2)) < kExact);

  DensityMatrix b2 = bell_state(2);  // (|00> - |11>)/sqrt2
  CHECK(std::abs(b2.m(0, 3).real() + h) < kExact);
  CHECK(std::abs(b2.m(0, 0).real() - h) < kExact);

  DensityMatrix b3 = bell_state(3);  // (|01> + |10>)/sqrt2
  CHECK(std::abs(b3.m(1, 1).real() - h) < kExact);
  CHECK(std::abs(b3.m(1, 2).real() - h) < kExact);
  CHECK(std::abs(b3.m(0, 0)) < kExact);

  DensityMatrix b4 = bell_state(4);  // (|01> - |10>)/sqrt2
  CHECK(std::abs(b4.m(1, 2).real() + h) < kExact);
  CHECK(std::abs(b4.m(2, 1).real() + h) < kExact);

  for (int i = 1; i <= 4; ++i) CHECK(bell_state(i).valid());
  CHECK_THROWS_AS(bell_state(0), std::invalid_argument);
  CHECK_THROWS_AS(bell_state(5), std::invalid_argument);
}

TEST_CASE("ground state and tensor order") {
  DensityMatrix g2 = ground_state(2);
  CHECK(g2.dim() == 4);
  CHECK(std::abs(g2.m(0, 0).real() - 1.0) < kExact);
  CHECK(g2.valid());

  // kron(a, b): a occupies the high-order positions.  excited (x) ground
  // = |10><10|, basis index 2.
  DensityMatrix excited;
  excited.qubits = 1;
  excited.m = Mat::Zero(2, 2);
  excited.m(1, 1) = 1.0;
  DensityMatrix hi = kron(excited, ground_state(1));
  CHECK(std::abs(hi.m(2, 2).real() - 1.0) < kExact);
  DensityMatrix lo = kron(ground_state(1), excited);
  CHECK(std::abs(lo.m(1, 1).real() - 1.0) < kExact);
  CHECK(hi.qubits == 2);
}

TEST_CASE("builtin matrices are unitary") {
  for (const char* name :
       {"hadamard", "pauli_x", "pauli_y", "pauli_z", "cnot", "identity"}) {
    CAPTURE(name);
    Mat u = builtin_matrix(name);
    Mat should_be_id = u * u.adjoint();
    CHECK((should_be_id - Mat::Identity(u.rows(), u.cols())).norm() < kExact);
  }
  CHECK_THROWS_AS(builtin_matrix("warp"), std::invalid_argument);
}

TEST_CASE("unitary application is conjugation on the lifted operator") {
  // hadamard on the high qubit of |00>: rho' has 1/2 at (0,0),(0,2),(2,0),(2,2)
  DensityMatrix rho = ground_state(2);
  DensityMatrix out =
      apply_effect(rho, QuantumEffect::unitary(builtin_matrix("hadamard"), {0}));
  CHECK(std::abs(out.m(0, 0).real() - 0.5) < kExact);
  CHECK(std::abs(out.m(0, 2).real() - 0.5) < kExact);
  CHECK(std::abs(out.m(2, 2).real() - 0.5) < kExact);
  CHECK(out.valid());

  // hadamard then cnot on |00> is the first bell state
  DensityMatrix bell =
      apply_effect(out, QuantumEffect::unitary(builtin_matrix("cnot"), {0, 1}));
  CHECK(bell.approx_equal(bell_state(1), kExact));
}

TEST_CASE("effects preserve trace and positivity on random inputs") {
  std::mt19937_64 rng(20260815);
  for (int i = 0; i < 100; ++i) {
    DensityMatrix rho = random_rho2(rng);
    REQUIRE(rho.valid());
    DensityMatrix out = apply_effect(rho, random_effect(rng));
    CHECK(std::abs(out.m.trace().real() - 1.0) < kRhoTol);
    CHECK(out.valid(kRhoTol));
  }
}

TEST_CASE("non-selective measurement is idempotent") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 25; ++i) {
    DensityMatrix rho = random_rho2(rng);
    for (auto targets : {std::vector<int>{0}, std::vector<int>{1},
                         std::vector<int>{0, 1}}) {
      QuantumEffect m = QuantumEffect::measure_std(targets);
      DensityMatrix once = apply_effect(rho, m);
      DensityMatrix twice = apply_effect(once, m);
      CHECK(twice.approx_equal(once, kRhoTol));
    }
  }
  // measuring both qubits of a bell pair yields the classical mixture
  DensityMatrix mixed =
      apply_effect(bell_state(1), QuantumEffect::measure_std({0, 1}));
  CHECK(std::abs(mixed.m(0, 0).real() - 0.5) < kExact);
  CHECK(std::abs(mixed.m(3, 3).real() - 0.5) < kExact);
  CHECK(std::abs(mixed.m(0, 3)) < kExact);
}

TEST_CASE("effect validation") {
  CHECK_THROWS_AS(
      apply_effect(ground_state(1),
                   QuantumEffect::unitary(builtin_matrix("hadamard"), {3})),
      std::invalid_argument);
  // identity leaves the state untouched
  DensityMatrix rho = bell_state(3);
  CHECK(apply_effect(rho, QuantumEffect::identity()).approx_equal(rho, kExact));
}

TEST_CASE("valuation variant: symbolic vs concrete") {
  Rho s1 = SymbolicRho{};
  Rho s2 = SymbolicRho{};
  CHECK(is_symbolic(s1));
  CHECK(rho_equal(s1, s2));
  CHECK(rho_fingerprint(s1) == rho_fingerprint(s2));

  Rho c1 = bell_state(1);
  Rho c2 = bell_state(2);
  CHECK_FALSE(is_symbolic(c1));
  CHECK_FALSE(rho_equal(s1, c1));
  CHECK_FALSE(rho_equal(c1, c2));
  CHECK(rho_equal(c1, Rho(bell_state(1))));
  CHECK(rho_fingerprint(c1) == rho_fingerprint(Rho(bell_state(1))));
}

TEST_CASE("approx_equal respects its tolerance") {
  DensityMatrix a = ground_state(1);
  DensityMatrix b = a;
  b.m(0, 0) += 0.5e-10;
  b.m(1, 1) -= 0.5e-10;
  CHECK(a.approx_equal(b));  // inside 1e-9
  DensityMatrix c = a;
  c.m(0, 0) += 1e-6;
  c.m(1, 1) -= 1e-6;
  CHECK_FALSE(a.approx_equal(c));
}
