#include "rqpap/action.hpp"

namespace rqpap {

std::string ActionLabel::render() const {
  std::string out;
  switch (kind) {
    case LabelKind::Tau: out = "tau"; break;
    case LabelKind::Delta: out = "delta"; break;
    default: out = name; break;
  }
  if (key.has_value()) {
    out += '[';
    if (*key == kKeylessMarker)
      out += '~';
    else
      out += std::to_string(*key);
    out += ']';
  }
  return out;
}

int ActionLabel::cmp(const ActionLabel& o) const {
  if (kind != o.kind) return kind < o.kind ? -1 : 1;
  if (int c = name.compare(o.name); c != 0) return c < 0 ? -1 : 1;
  const bool hk = key.has_value(), ohk = o.key.has_value();
  if (hk != ohk) return hk ? 1 : -1;  // fresh labels order before executed ones
  if (hk && *key != *o.key) return *key < *o.key ? -1 : 1;
  return 0;
}

std::size_t ActionLabel::hash() const {
  std::size_t h = std::hash<std::string>{}(name);
  h ^= static_cast<std::size_t>(kind) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  const std::size_t k = key.has_value() ? (static_cast<std::size_t>(*key) + 2) : 1;
  h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

}  // namespace rqpap
