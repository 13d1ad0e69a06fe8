#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "rqpap/qstate.hpp"
#include "rqpap/term.hpp"

namespace rqpap {

// A Model collects the declarations a process definition file can make:
// which names are classical communication actions, which are quantum
// operations, the synchronisation function gamma, the concrete quantum
// effect attached to each quantum operation, recursive specifications,
// and named top-level terms.
struct Model {
  std::set<std::string> comm_actions;
  std::set<std::string> quantum_ops;
  // Symmetric: both orderings are inserted on declaration.
  std::map<std::pair<std::string, std::string>, std::string> gamma;
  std::map<std::string, QuantumEffect> effects;
  std::map<std::string, RecSpecPtr> specs;
  std::map<std::string, TermPtr> terms;
  // Number of qubits in the concrete register, if a concrete initial state
  // was declared; otherwise the model runs symbolically.
  std::optional<DensityMatrix> initial_rho;

  bool is_comm(const std::string& name) const { return comm_actions.count(name) > 0; }
  bool is_qop(const std::string& name) const { return quantum_ops.count(name) > 0; }

  LabelKind classify(const std::string& name) const {
    if (name == "tau") return LabelKind::Tau;
    if (name == "delta") return LabelKind::Delta;
    if (is_qop(name)) return LabelKind::QuantumOp;
    return LabelKind::CommAction;
  }

  void declare_comm(const std::string& name) {
    if (is_qop(name))
      throw std::invalid_argument("name declared both comm and qop: " + name);
    comm_actions.insert(name);
  }

  void declare_qop(const std::string& name) {
    if (is_comm(name))
      throw std::invalid_argument("name declared both comm and qop: " + name);
    quantum_ops.insert(name);
  }

  void declare_gamma(const std::string& a, const std::string& b, const std::string& result) {
    gamma[{a, b}] = result;
    gamma[{b, a}] = result;
  }

  // Result of synchronising two classical actions, if gamma is defined there.
  std::optional<std::string> gamma_lookup(const std::string& a, const std::string& b) const {
    auto it = gamma.find({a, b});
    if (it == gamma.end()) return std::nullopt;
    return it->second;
  }

  // Quantum operations without a declared effect act as the identity.
  const QuantumEffect& effect_of(const std::string& qop) const {
    static const QuantumEffect id = QuantumEffect::identity();
    auto it = effects.find(qop);
    return it == effects.end() ? id : it->second;
  }
};

}  // namespace rqpap
