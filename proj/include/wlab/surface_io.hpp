#ifndef WLAB_SURFACE_IO_HPP
#define WLAB_SURFACE_IO_HPP

#include <string>

#include "wlab/immersion.hpp"

namespace wlab {

/// Writes the surface as a JSON document
///   {"nTheta": .., "nPhi": .., "points": [[x,y,z,w], ...]}
/// with points row-major in theta and 17 significant digits per coordinate.
void write_surface(const std::string& path, const Immersion& f);

/// Reads a surface document written by write_surface.
/// Throws ConfigError on malformed input.
Immersion read_surface(const std::string& path);

} // namespace wlab

#endif
