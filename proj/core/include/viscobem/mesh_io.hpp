#pragma once

#include <iosfwd>
#include <string>

#include "viscobem/model.hpp"

namespace viscobem {

/// Text format:
///   NODES n      followed by n lines "id x y"
///   ELEMENTS m   followed by m lines "id n1 n2 region group"
/// '#' starts a comment; "# group <id> <name>" names a bc-group.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);

void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);

}  // namespace viscobem
