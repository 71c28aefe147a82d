#include "circlecomm/trace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "circlecomm/error.hpp"

namespace circlecomm {

bool ImpulseTrace::well_formed() const {
  if (kind == ImpulseKind::sequential) {
    for (std::size_t t = 1; t < contacts.size(); ++t)
      if (contacts[t].first != contacts[t - 1].second) return false;
    return true;
  }
  return std::find(recipients.begin(), recipients.end(), center) == recipients.end();
}

nlohmann::json to_json(const ImpulseTrace& trace) {
  if (trace.kind == ImpulseKind::sequential) {
    nlohmann::json contacts = nlohmann::json::array();
    for (auto [a, b] : trace.contacts) contacts.push_back({a, b});
    return {{"kind", "sequential"}, {"contacts", contacts}};
  }
  return {{"kind", "instantaneous"}, {"center", trace.center}, {"recipients", trace.recipients}};
}

ImpulseTrace trace_from_json(const nlohmann::json& doc) {
  ImpulseTrace t;
  try {
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "sequential") {
      t.kind = ImpulseKind::sequential;
      for (const auto& c : doc.at("contacts"))
        t.contacts.emplace_back(c.at(0).get<Vertex>(), c.at(1).get<Vertex>());
    } else if (kind == "instantaneous") {
      t.kind = ImpulseKind::instantaneous;
      t.center = doc.at("center").get<Vertex>();
      t.recipients = doc.at("recipients").get<std::vector<Vertex>>();
    } else {
      throw ParseError("unknown impulse kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid impulse trace: ") + e.what());
  }
  if (!t.well_formed()) throw ParseError("impulse trace violates its chain/center invariant");
  return t;
}

void write_traces(std::ostream& out, const std::vector<ImpulseTrace>& traces) {
  for (const auto& t : traces) out << to_json(t).dump() << '\n';
}

std::vector<ImpulseTrace> read_traces(std::istream& in) {
  std::vector<ImpulseTrace> traces;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      traces.push_back(trace_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), lineno);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return traces;
}

}  // namespace circlecomm
