#pragma once

#include <iosfwd>
#include <string>

#include "microlocal/grid.hpp"

namespace microlocal {

/// MFLD1 serialization: ASCII header (`MFLD1`, `dim=`, `samples=`,
/// `extent=`, `channels=`), a blank line, then channel-major row-major
/// samples as little-endian (real, imag) float64 pairs.
void write_field(std::ostream& out, const GridField& u);
GridField read_field(std::istream& in);

void save_field(const std::string& path, const GridField& u);
GridField load_field(const std::string& path);

}  // namespace microlocal
