#include "viscobem/mesh_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "viscobem/csv.hpp"
#include "viscobem/error.hpp"

namespace viscobem {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::InvalidGeometry, "mesh line " + std::to_string(line) + ": " + msg);
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  enum class Section { None, Nodes, Elements } section = Section::None;
  int expected = 0;
  int line_no = 0;
  std::map<long, int> node_index;
  std::map<int, std::string> names;
  int max_group = -1;
  Mesh mesh;

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      std::istringstream c(line.substr(hash + 1));
      std::string kw, name;
      int id = 0;
      if (c >> kw && kw == "group" && c >> id >> name) names[id] = name;
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "NODES" || first == "ELEMENTS") {
      if (expected != 0) fail(line_no, "previous section is incomplete");
      if (!(ls >> expected) || expected < 0) fail(line_no, "missing count");
      section = first == "NODES" ? Section::Nodes : Section::Elements;
      continue;
    }
    if (section == Section::None || expected == 0) fail(line_no, "unexpected data");
    long id = 0;
    try {
      id = std::stol(first);
    } catch (const std::exception&) {
      fail(line_no, "bad id '" + first + "'");
    }
    if (section == Section::Nodes) {
      double x = 0, y = 0;
      if (!(ls >> x >> y)) fail(line_no, "expected 'id x y'");
      if (!node_index.emplace(id, mesh.num_nodes()).second) fail(line_no, "duplicate node id");
      mesh.nodes.emplace_back(x, y);
    } else {
      long a = 0, b = 0;
      int region = 0, group = 0;
      if (!(ls >> a >> b >> region >> group)) fail(line_no, "expected 'id n1 n2 region group'");
      auto ia = node_index.find(a), ib = node_index.find(b);
      if (ia == node_index.end() || ib == node_index.end()) fail(line_no, "unknown node id");
      if (group < 0) fail(line_no, "negative group id");
      mesh.elements.push_back({ia->second, ib->second, region, group});
      max_group = std::max(max_group, group);
    }
    --expected;
  }
  if (expected != 0) fail(line_no, "file ends inside a section");
  mesh.group_names.resize(static_cast<std::size_t>(max_group + 1));
  for (int g = 0; g <= max_group; ++g) {
    auto it = names.find(g);
    mesh.group_names[g] = it != names.end() ? it->second : std::to_string(g);
  }
  return mesh;
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  for (std::size_t g = 0; g < mesh.group_names.size(); ++g) {
    out << "# group " << g << ' ' << mesh.group_names[g] << '\n';
  }
  out << "NODES " << mesh.num_nodes() << '\n';
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    out << i << ' ' << format_double(mesh.nodes[i].x()) << ' ' << format_double(mesh.nodes[i].y())
        << '\n';
  }
  out << "ELEMENTS " << mesh.num_elements() << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    out << e << ' ' << el.n1 << ' ' << el.n2 << ' ' << el.region << ' ' << el.group << '\n';
  }
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_mesh(out, mesh);
}

}  // namespace viscobem
