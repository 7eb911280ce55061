#include "sqfn/json_io.hpp"

#include <fstream>
#include <sstream>

#include "sqfn/error.hpp"

namespace sqfn {

Json tree_to_json(const FiltrationTree& tree) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < tree.atom_count(); ++i) {
    const Atom& a = tree.atoms()[i];
    Json n;
    n["level"] = a.level;
    n["measure"] = a.measure;
    n["fraction"] = a.fraction;
    Json children = Json::array();
    for (AtomId c : tree.children(static_cast<AtomId>(i))) children.push_back(c);
    n["children"] = std::move(children);
    if (tree.has_exact()) n["exact"] = tree.exact_measure(static_cast<AtomId>(i)).get_str();
    nodes.push_back(std::move(n));
  }
  Json j;
  j["depth"] = tree.depth();
  j["nodes"] = std::move(nodes);
  return j;
}

TreePtr tree_from_json(const Json& j) {
  try {
    const int depth = j.at("depth").get<int>();
    const Json& nodes = j.at("nodes");
    if (!nodes.is_array() || nodes.empty()) throw PreconditionError("tree JSON needs a nonempty node list");
    const bool exact = nodes.at(0).contains("exact");
    TreeBuilder builder = exact ? TreeBuilder::exact(depth) : TreeBuilder(depth);
    // JSON ids map to builder indices; nodes are visited breadth-first from the root.
    std::vector<std::size_t> local(nodes.size(), static_cast<std::size_t>(-1));
    std::vector<char> seen(nodes.size(), 0);
    std::vector<std::size_t> queue{0};
    local[0] = 0;
    seen[0] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t id = queue[head];
      const Json& node = nodes.at(id);
      const Json& children = node.at("children");
      if (children.empty()) continue;
      std::vector<std::size_t> ids;
      for (const auto& c : children) {
        const auto cid = c.get<std::size_t>();
        if (cid >= nodes.size() || seen[cid]) throw PreconditionError("tree JSON has an invalid child id");
        seen[cid] = 1;
        ids.push_back(cid);
      }
      std::size_t first = 0;
      if (exact) {
        const mpq_class parent(node.at("exact").get<std::string>());
        std::vector<mpq_class> fr;
        for (std::size_t cid : ids) {
          mpq_class m(nodes.at(cid).at("exact").get<std::string>());
          m.canonicalize();
          fr.emplace_back(m / parent);
        }
        first = builder.add_children_exact(local[id], fr);
      } else {
        std::vector<double> fr;
        const double pm = node.at("measure").get<double>();
        for (std::size_t cid : ids) {
          const Json& c = nodes.at(cid);
          fr.push_back(c.contains("fraction") ? c.at("fraction").get<double>() : c.at("measure").get<double>() / pm);
        }
        first = builder.add_children(local[id], fr);
      }
      for (std::size_t k = 0; k < ids.size(); ++k) {
        local[ids[k]] = first + k;
        queue.push_back(ids[k]);
      }
    }
    if (queue.size() != nodes.size()) throw PreconditionError("tree JSON has unreachable nodes");
    return builder.finish();
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed tree JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw PreconditionError(std::string("malformed tree JSON: ") + e.what());
  }
}

Json function_to_json(const StepFunction& f) {
  Json j;
  j["tree"] = tree_to_json(f.tree());
  j["values"] = std::vector<double>(f.values().begin(), f.values().end());
  return j;
}

StepFunction function_from_json(const Json& j, const std::filesystem::path& base) {
  try {
    const Json& t = j.at("tree");
    TreePtr tree = t.is_string() ? tree_from_json(read_json_file(base / t.get<std::string>())) : tree_from_json(t);
    return StepFunction(std::move(tree), j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed function JSON: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

StepFunction load_function(const std::filesystem::path& path) {
  return function_from_json(read_json_file(path), path.parent_path());
}

namespace {

Json number_or_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

}  // namespace

Json report_to_json(const InequalityReport& r) {
  Json j;
  j["name"] = r.name;
  j["alpha"] = number_or_null(r.alpha);
  j["lambda"] = number_or_null(r.lambda);
  j["epsilon"] = number_or_null(r.epsilon);
  j["p"] = number_or_null(r.p);
  j["lhs"] = number_or_null(r.lhs);
  j["rhs"] = number_or_null(r.rhs);
  j["margin"] = number_or_null(r.margin);
  j["mode"] = to_string(r.mode);
  j["status"] = r.status == ReportStatus::Ratio ? "ratio" : to_string(r.status);
  j["tolerance"] = r.tolerance;
  if (!r.note.empty()) j["note"] = r.note;
  for (const auto& [k, v] : r.extras) j["extras"][k] = number_or_null(v);
  return j;
}

Json certificate_to_json(const ScalarCertificate& c) {
  Json j;
  j["name"] = c.name;
  for (const auto& [k, v] : c.params) j["params"][k] = v;
  j["worst_margin"] = c.worst_margin;
  for (const auto& [k, v] : c.worst_location) j["worst_location"][k] = v;
  j["evaluations"] = c.evaluations;
  j["certified"] = c.certified();
  return j;
}

}  // namespace sqfn
