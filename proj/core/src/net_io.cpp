#include <sstream>

#include "escape.hpp"
#include "powl/wfnet.hpp"

namespace powl2 {

using detail::dot_escape;
using detail::escape_xml;

namespace {

// Source first, sink last, the rest in id order.
std::vector<PlaceId> place_order(const WfNet& net) {
  std::vector<PlaceId> order{net.source()};
  for (PlaceId p = 0; p < net.places().size(); ++p)
    if (p != net.source() && p != net.sink()) order.push_back(p);
  if (net.sink() != net.source()) order.push_back(net.sink());
  return order;
}

std::string place_id(PlaceId p) { return "p" + std::to_string(p); }
std::string transition_id(TransitionId t) { return "t" + std::to_string(t); }

}  // namespace

std::string export_pnml(const WfNet& net, const ActivityTable& activities) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<pnml>\n"
      << "  <net id=\"net\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n"
      << "    <page id=\"page\">\n";
  for (PlaceId p : place_order(net)) {
    out << "      <place id=\"" << place_id(p) << "\">\n        <name><text>";
    escape_xml(out, net.places()[p].name);
    out << "</text></name>\n";
    if (p == net.source()) out << "        <initialMarking><text>1</text></initialMarking>\n";
    out << "      </place>\n";
  }
  for (TransitionId t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transitions()[t];
    out << "      <transition id=\"" << transition_id(t) << "\">\n        <name><text>";
    if (tr.label) escape_xml(out, activities.label(*tr.label));
    out << "</text></name>\n      </transition>\n";
  }
  std::size_t arc = 0;
  for (TransitionId t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transitions()[t];
    for (PlaceId p : tr.inputs) {
      out << "      <arc id=\"a" << arc++ << "\" source=\"" << place_id(p) << "\" target=\"" << transition_id(t)
          << "\"/>\n";
    }
    for (PlaceId p : tr.outputs) {
      out << "      <arc id=\"a" << arc++ << "\" source=\"" << transition_id(t) << "\" target=\"" << place_id(p)
          << "\"/>\n";
    }
  }
  out << "    </page>\n"
      << "    <finalmarkings>\n      <marking>\n        <place idref=\"" << place_id(net.sink())
      << "\"><text>1</text></place>\n      </marking>\n    </finalmarkings>\n"
      << "  </net>\n</pnml>\n";
  return out.str();
}

std::string export_net_dot(const WfNet& net, const ActivityTable& activities) {
  std::ostringstream out;
  out << "digraph wfnet {\n  rankdir=LR;\n";
  for (PlaceId p : place_order(net)) {
    out << "  " << place_id(p) << " [shape=circle, label=\"\"";
    if (p == net.source()) out << ", style=filled, fillcolor=\"#a8d5a2\"";
    if (p == net.sink()) out << ", peripheries=2";
    out << ", xlabel=\"" << dot_escape(net.places()[p].name) << "\"];\n";
  }
  for (TransitionId t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transitions()[t];
    out << "  " << transition_id(t);
    if (tr.label) {
      out << " [shape=box, label=\"" << dot_escape(activities.label(*tr.label)) << "\"];\n";
    } else {
      out << " [shape=box, style=filled, fillcolor=black, width=0.1, height=0.4, label=\"\"];\n";
    }
  }
  for (TransitionId t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transitions()[t];
    for (PlaceId p : tr.inputs) out << "  " << place_id(p) << " -> " << transition_id(t) << ";\n";
    for (PlaceId p : tr.outputs) out << "  " << transition_id(t) << " -> " << place_id(p) << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_net(const WfNet& net, const ActivityTable& activities, NetFormat format) {
  return format == NetFormat::kPnml ? export_pnml(net, activities) : export_net_dot(net, activities);
}

}  // namespace powl2
