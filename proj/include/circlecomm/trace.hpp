#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "json.hpp"

namespace circlecomm {

using Vertex = std::size_t;

enum class ImpulseKind { sequential, instantaneous };

/// How an instantaneous broadcast turns into edges.
enum class BroadcastEdges { clique, star };

/// Record of one simulated information exchange.
///
/// Sequential: `contacts` is the ordered call chain, callee of step t is the
/// caller of step t+1. Instantaneous: `center` plus `recipients`, the center
/// never being a recipient.
struct ImpulseTrace {
  ImpulseKind kind = ImpulseKind::sequential;
  std::vector<std::pair<Vertex, Vertex>> contacts;
  Vertex center = 0;
  std::vector<Vertex> recipients;

  /// Checks the chain / center invariants.
  bool well_formed() const;

  friend bool operator==(const ImpulseTrace&, const ImpulseTrace&) = default;
};

nlohmann::json to_json(const ImpulseTrace& trace);
ImpulseTrace trace_from_json(const nlohmann::json& doc);

/// JSON lines, one trace per line.
void write_traces(std::ostream& out, const std::vector<ImpulseTrace>& traces);
std::vector<ImpulseTrace> read_traces(std::istream& in);

}  // namespace circlecomm
