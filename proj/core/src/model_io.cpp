#include "powl/model_io.hpp"

#include <sstream>

#include "json.hpp"
#include "escape.hpp"
#include "powl/error.hpp"

namespace powl2 {

using detail::dot_escape;

using nlohmann::json;

namespace {

json ref_to_json(NodeRef r) {
  if (r.is_start()) return "start";
  if (r.is_end()) return "end";
  return r.index();
}

json to_json(const Node& node, const ActivityTable& activities) {
  if (auto a = node.as<Activity>()) return {{"type", "activity"}, {"label", activities.label(a->label)}};
  if (node.is<Silent>()) return {{"type", "silent"}};
  if (auto loop = node.as<Loop>()) {
    return {{"type", "loop"}, {"do", to_json(*loop->body, activities)}, {"redo", to_json(*loop->redo, activities)}};
  }
  if (auto po = node.as<PartialOrder>()) {
    json children = json::array();
    for (const auto& c : po->children) children.push_back(to_json(*c, activities));
    json order = json::array();
    for (auto [i, j] : po->order.closure().pairs()) order.push_back({i, j});
    return {{"type", "partial_order"}, {"children", std::move(children)}, {"order", std::move(order)}};
  }
  const auto& graph = *node.as<ChoiceGraph>();
  json children = json::array();
  for (const auto& c : graph.children) children.push_back(to_json(*c, activities));
  json edges = json::array();
  for (const auto& [from, to] : graph.edges) edges.push_back({ref_to_json(from), ref_to_json(to)});
  return {{"type", "choice_graph"}, {"children", std::move(children)}, {"edges", std::move(edges)}};
}

class Reader {
 public:
  explicit Reader(ActivityTable& activities) : activities_(activities) {}

  NodePtr read(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto type_it = j.find("type");
    if (type_it == j.end() || !type_it->is_string()) fail(path + "/type", "missing node type");
    const std::string type = *type_it;

    if (type == "activity") {
      const json& label = field(j, "label", path);
      if (!label.is_string()) fail(path + "/label", "label must be a string");
      return make_activity(activities_.intern(label.get<std::string>()));
    }
    if (type == "silent") return make_silent();
    if (type == "loop") return make_loop(read(field(j, "do", path), path + "/do"), read(field(j, "redo", path), path + "/redo"));
    if (type == "partial_order") {
      auto children = read_children(j, path);
      const json& order = field(j, "order", path);
      if (!order.is_array()) fail(path + "/order", "expected an array of index pairs");
      std::vector<Relation::Pair> pairs;
      for (std::size_t k = 0; k < order.size(); ++k) {
        std::string p = path + "/order/" + std::to_string(k);
        const json& pair = order[k];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned()) {
          fail(p, "expected [i, j] with non-negative integer indices");
        }
        auto a = pair[0].get<std::size_t>(), b = pair[1].get<std::size_t>();
        if (a >= children.size() || b >= children.size()) fail(p, "order index out of range");
        pairs.emplace_back(a, b);
      }
      try {
        return make_partial_order(std::move(children), pairs);
      } catch (const ContractError& e) {
        fail(path + "/order", e.what());
      }
    }
    if (type == "choice_graph") {
      auto children = read_children(j, path);
      const json& edges = field(j, "edges", path);
      if (!edges.is_array()) fail(path + "/edges", "expected an array of edges");
      std::set<ChoiceEdge> out;
      for (std::size_t k = 0; k < edges.size(); ++k) {
        std::string p = path + "/edges/" + std::to_string(k);
        const json& edge = edges[k];
        if (!edge.is_array() || edge.size() != 2) fail(p, "expected [from, to]");
        out.insert({read_ref(edge[0], children.size(), p + "/0"), read_ref(edge[1], children.size(), p + "/1")});
      }
      return make_choice_graph(std::move(children), std::move(out));
    }
    fail(path + "/type", "unknown node type '" + type + "'");
  }

 private:
  ActivityTable& activities_;

  [[noreturn]] static void fail(const std::string& path, const std::string& message) {
    throw SchemaError("model JSON at " + (path.empty() ? std::string("/") : path) + ": " + message);
  }

  static const json& field(const json& j, const char* name, const std::string& path) {
    auto it = j.find(name);
    if (it == j.end()) fail(path + "/" + name, "missing field");
    return *it;
  }

  std::vector<NodePtr> read_children(const json& j, const std::string& path) {
    const json& children = field(j, "children", path);
    if (!children.is_array()) fail(path + "/children", "expected an array");
    std::vector<NodePtr> out;
    for (std::size_t k = 0; k < children.size(); ++k) {
      out.push_back(read(children[k], path + "/children/" + std::to_string(k)));
    }
    return out;
  }

  static NodeRef read_ref(const json& j, std::size_t n, const std::string& path) {
    if (j.is_string()) {
      if (j == "start") return NodeRef::start();
      if (j == "end") return NodeRef::end();
      fail(path, "edge endpoint must be \"start\", \"end\" or an index");
    }
    if (!j.is_number_unsigned()) fail(path, "edge endpoint must be \"start\", \"end\" or an index");
    auto index = j.get<std::size_t>();
    if (index >= n) fail(path, "edge endpoint index out of range");
    return NodeRef::child(index);
  }
};

// ---------------------------------------------------------------------------
// DOT

class DotWriter {
 public:
  explicit DotWriter(const ActivityTable& activities) : activities_(activities) {}

  std::string render(const Node& root) {
    out_ << "digraph powl {\n";
    out_ << "  rankdir=LR;\n  compound=true;\n";
    out_ << "  node [fontname=\"Helvetica\", fontsize=11];\n  edge [arrowsize=0.7];\n";
    emit(root, 1);
    out_ << "}\n";
    return out_.str();
  }

 private:
  // A rendered node: the graphviz node id edges attach to, plus the cluster
  // name when the model node is drawn as a cluster.
  struct Anchor {
    std::string node;
    std::string cluster;
  };

  const ActivityTable& activities_;
  std::ostringstream out_;
  std::size_t next_id_ = 0;

  std::string fresh(const char* prefix) { return prefix + std::to_string(next_id_++); }

  void indent(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "  ";
  }

  void edge(int depth, const Anchor& from, const Anchor& to, const std::string& style) {
    indent(depth);
    out_ << from.node << " -> " << to.node << " [" << style;
    if (!from.cluster.empty()) out_ << ",ltail=" << from.cluster;
    if (!to.cluster.empty()) out_ << ",lhead=" << to.cluster;
    out_ << "];\n";
  }

  Anchor emit(const Node& node, int depth) {
    if (auto a = node.as<Activity>()) {
      auto id = fresh("n");
      indent(depth);
      out_ << id << " [shape=box, style=rounded, label=\"" << dot_escape(activities_.label(a->label)) << "\"];\n";
      return {id, ""};
    }
    if (node.is<Silent>()) {
      auto id = fresh("n");
      indent(depth);
      out_ << id << " [shape=box, style=filled, fillcolor=black, label=\"\", width=0.15, height=0.3];\n";
      return {id, ""};
    }

    auto cluster = fresh("cluster_");
    indent(depth);
    out_ << "subgraph " << cluster << " {\n";
    Anchor anchor;
    if (auto loop = node.as<Loop>()) {
      indent(depth + 1);
      out_ << "label=\"loop\";\n";
      indent(depth + 1);
      out_ << "style=rounded;\n";
      Anchor body = emit(*loop->body, depth + 1);
      Anchor redo = emit(*loop->redo, depth + 1);
      edge(depth + 1, body, redo, "style=dotted,label=\"redo\"");
      edge(depth + 1, redo, body, "style=dotted");
      anchor = {body.node, cluster};
    } else if (auto po = node.as<PartialOrder>()) {
      indent(depth + 1);
      out_ << "label=\"\";\n";
      indent(depth + 1);
      out_ << "style=solid;\n";
      std::vector<Anchor> kids;
      for (const auto& c : po->children) kids.push_back(emit(*c, depth + 1));
      for (auto [i, j] : po->order.reduction().pairs()) edge(depth + 1, kids[i], kids[j], "color=black");
      anchor = {kids.empty() ? fresh("n") : kids.front().node, cluster};
    } else {
      const auto& graph = *node.as<ChoiceGraph>();
      indent(depth + 1);
      out_ << "label=\"\";\n";
      indent(depth + 1);
      out_ << "style=dashed;\n";
      indent(depth + 1);
      out_ << "color=blue;\n";
      Anchor start{fresh("s"), ""};
      Anchor end{fresh("e"), ""};
      indent(depth + 1);
      out_ << start.node << " [shape=circle, style=filled, fillcolor=green, label=\"\", width=0.15];\n";
      indent(depth + 1);
      out_ << end.node << " [shape=square, style=filled, fillcolor=red, label=\"\", width=0.15];\n";
      std::vector<Anchor> kids;
      for (const auto& c : graph.children) kids.push_back(emit(*c, depth + 1));
      auto at = [&](NodeRef r) { return r.is_start() ? start : r.is_end() ? end : kids[r.index()]; };
      for (const auto& [from, to] : graph.edges) edge(depth + 1, at(from), at(to), "style=dashed,color=blue");
      anchor = {start.node, cluster};
    }
    indent(depth);
    out_ << "}\n";
    return anchor;
  }
};

}  // namespace

std::string serialize_model(const Node& model, const ActivityTable& activities) {
  return to_json(model, activities).dump(2) + "\n";
}

NodePtr deserialize_model(std::string_view text, ActivityTable& activities) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
  return Reader(activities).read(doc, "");
}

std::string export_model_dot(const Node& model, const ActivityTable& activities) {
  return DotWriter(activities).render(model);
}

}  // namespace powl2
