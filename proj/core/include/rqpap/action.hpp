// ============================================================================
//  rqpap/action.hpp — action labels of the reversible quantum process algebra
//
//  A label is either an atomic quantum operation, a communication action, the
//  silent step tau, or the deadlock constant delta.  Executed actions carry a
//  history key: `a[3]` is the action `a` stamped with key 3.  Abstraction
//  produces *keyless* executed markers, rendered `a[~]` (key slot 0): they are
//  done but irreversible and never participate in the key order.
// ============================================================================
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace rqpap {

using KeyT = std::uint32_t;

/// Marker value used internally for keyless executed stamps (rendered `~`).
inline constexpr KeyT kKeylessMarker = 0;

enum class LabelKind : std::uint8_t {
  QuantumOp,   ///< atomic quantum operation (applies an effect to the state)
  CommAction,  ///< classical communication action (state untouched)
  Tau,         ///< silent step
  Delta,       ///< deadlock / unsuccessful termination
};

/// An action label as used both inside terms (atoms) and on transitions.
struct ActionLabel {
  LabelKind kind = LabelKind::QuantumOp;
  std::string name;          ///< empty for tau / delta
  std::optional<KeyT> key;   ///< nullopt = fresh; 0 = keyless marker; >=1 = history

  ActionLabel() = default;
  ActionLabel(LabelKind k, std::string n) : kind(k), name(std::move(n)) {}
  ActionLabel(LabelKind k, std::string n, KeyT m)
      : kind(k), name(std::move(n)), key(m) {}

  static ActionLabel quantum(std::string n) { return {LabelKind::QuantumOp, std::move(n)}; }
  static ActionLabel comm(std::string n) { return {LabelKind::CommAction, std::move(n)}; }
  static ActionLabel tau() { return {LabelKind::Tau, ""}; }
  static ActionLabel delta() { return {LabelKind::Delta, ""}; }

  bool is_fresh() const { return !key.has_value(); }
  bool is_history() const { return key.has_value() && *key >= 1; }
  bool is_keyless_marker() const { return key.has_value() && *key == kKeylessMarker; }
  bool is_executed() const { return key.has_value(); }
  bool is_tau() const { return kind == LabelKind::Tau; }
  bool is_delta() const { return kind == LabelKind::Delta; }

  /// Same label with the key removed (the fresh base action).
  ActionLabel base() const { return ActionLabel(kind, name); }
  /// Same label stamped with key m.
  ActionLabel with_key(KeyT m) const { return ActionLabel(kind, name, m); }

  /// Renders `a`, `a[3]`, `a[~]`, `tau`, `delta`.
  std::string render() const;

  friend bool operator==(const ActionLabel& a, const ActionLabel& b) {
    return a.kind == b.kind && a.key == b.key && a.name == b.name;
  }
  friend bool operator!=(const ActionLabel& a, const ActionLabel& b) { return !(a == b); }

  /// Structural total order (kind, name, keyed-ness, key).
  int cmp(const ActionLabel& o) const;
  friend bool operator<(const ActionLabel& a, const ActionLabel& b) { return a.cmp(b) < 0; }

  std::size_t hash() const;
};

}  // namespace rqpap

template <>
struct std::hash<rqpap::ActionLabel> {
  std::size_t operator()(const rqpap::ActionLabel& l) const { return l.hash(); }
};
