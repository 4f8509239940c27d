#ifndef POLYTUBE_POLYTOPE_IO_HPP
#define POLYTUBE_POLYTOPE_IO_HPP

#include <string>

#include "polytube/geometry.hpp"

namespace ptb {

// File format:
//   { "dim": n, "name": "...",
//     "halfspaces": [ { "normal": [...], "offset": o }, ... ] }
// Normals need not be unit in the file; they are normalized on load.
ConvexPolytope load_polytope_json(const std::string& text,
                                  double tol = kDefaultTol);
ConvexPolytope load_polytope_file(const std::string& path,
                                  double tol = kDefaultTol);
std::string polytope_to_json(const ConvexPolytope& P);

}  // namespace ptb

#endif
