#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "opdyn/model.hpp"
#include "opdyn/sim.hpp"

namespace opdyn {

// Cell-centered uniform grid on [z_min,z_max] x [eta_min,eta_max].
struct Grid2D {
    double z_min = -2.0, z_max = 2.0;
    double eta_min = -2.0, eta_max = 2.0;
    double h = 0.05;
    int nz = 0, neta = 0;

    static Grid2D make(double z_min, double z_max, double eta_min,
                       double eta_max, double h);
    double z_center(int i) const { return z_min + (i + 0.5) * h; }
    double eta_center(int j) const { return eta_min + (j + 0.5) * h; }
};

struct DensityField {
    std::vector<double> values;  // nz * neta, row-major in z
    Grid2D grid;
    double time = 0.0;

    double& at(int iz, int ie) { return values[iz * grid.neta + ie]; }
    double at(int iz, int ie) const { return values[iz * grid.neta + ie]; }
    double mass() const;
    double max_value() const;
};

struct CoefficientFields {
    std::vector<double> u;        // spatial drift U(z, eta, mu)
    std::vector<double> v;        // opinion drift V(z, eta, mu)
    std::vector<double> sig_sp;   // spatial diffusion amplitude
    std::vector<double> sig_op;   // opinion diffusion amplitude
    Grid2D grid;
};

struct StabilityError : std::runtime_error {
    double bound;
    StabilityError(double dt, double b)
        : std::runtime_error("dt = " + std::to_string(dt) +
                             " exceeds explicit stability bound " +
                             std::to_string(b)),
          bound(b) {}
};

// Kernel support quantized to the grid: columns with |iz - jz| <= halfwidth
// interact, where halfwidth*h is the largest grid multiple not above R.
int stencil_halfwidth(const Grid2D& grid, double radius);

// Nonlocal drift and diffusion coefficients by midpoint quadrature of the
// pair kernels against rho. Exact (up to rounding) restriction to the
// compact-support stencil.
CoefficientFields nonlocal_coefficients(const DensityField& rho,
                                        const ModelParams& p,
                                        const NoiseSpec& noise);

// Conservative flux-form RHS: upwind advection, centered diffusion of
// rho*sigma^2, zero flux through every boundary face.
std::vector<double> pde_rhs(const DensityField& rho,
                            const CoefficientFields& coeff);

struct PdeResult {
    std::vector<DensityField> snapshots;
    double clipped_mass = 0.0;          // cumulative mass removed by clipping
    std::vector<double> mass_history;   // per snapshot, h^2 * sum(values)
};

PdeResult pde_integrate(const DensityField& rho0, double t_end, double dt,
                        const ModelParams& p, const NoiseSpec& noise,
                        int coeff_stride = 1, int snapshot_stride = 1);

DensityField init_gaussian_mixture(
    const Grid2D& grid, const std::vector<MixtureComponent>& components);

}  // namespace opdyn
