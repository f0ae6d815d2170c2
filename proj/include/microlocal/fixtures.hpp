#pragma once

#include <vector>

#include "microlocal/cutoff.hpp"
#include "microlocal/defect.hpp"
#include "microlocal/grid.hpp"
#include "microlocal/wavefront.hpp"

namespace microlocal::fixtures {

/// 2-D box of side 8 pi with 1024 samples per axis.
GridSpec jump_grid();
/// Periodic step 1/2 + sum_{k odd, |xi_k| < Xi} 2/(pi k) sin(xi_k x_axis),
/// the lattice-exact band-limited square wave with jumps at 0 and -L/2.
GridField band_limited_step(const GridSpec& spec, int axis = 0);
/// Gaussian of width 2.5 times the band-limited step in x_1: a jump across
/// the line x_1 = 0 with conormal directions +-e_1.
GridField jump_field(const GridSpec& spec = jump_grid());
/// The same Gaussian without the jump.
GridField smooth_control(const GridSpec& spec = jump_grid());
/// Windows (r_in 0.5, r_out 4.5) centred on {-4.5, 0, 4.5}^2 times eight
/// caps of half angle 0.42 around the directions k pi / 4.
ScanLattice jump_lattice();
/// Window used for single-patch profiles of the jump and 1-D fields.
BumpCutoff wide_window(int dim);

/// 1-D box of side 8 pi with 1024 samples.
GridSpec line_grid();

/// 2-D box of side 2 pi with 512 samples.
GridSpec oscillation_grid();
/// Compactly supported smooth bump: 1 on |x| <= 0.05, 0 beyond 0.35.
GridField oscillation_profile();
/// b e^{i m x_1} for m in freqs.
SequenceSpec oscillation_fixture(std::vector<int> freqs = {8, 16, 32, 64});
/// Anisotropic Gaussian exp(-y_1^2/2 - 2 y_2^2) scaled to unit L2 norm.
PointFunction concentration_profile();
/// n^{d/2} b(n (x - x0)) with x0 = (0.1, -0.1) on the oscillation grid.
SequenceSpec concentration_fixture(std::vector<int> scales = {4, 8, 16, 32});
/// Cells of side 1.2 centred on {-1.2, 0, 1.2}^2, overlap 0.2, eight sectors.
DefectBins oscillation_bins();
/// Scan lattice matched to oscillation_bins: windows (0.4, 0.9), caps 0.42.
ScanLattice oscillation_lattice();

}  // namespace microlocal::fixtures
