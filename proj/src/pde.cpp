#include "opdyn/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>

namespace opdyn {

namespace {
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }
}

Grid2D Grid2D::make(double z_min, double z_max, double eta_min, double eta_max,
                    double h) {
    if (h <= 0.0) throw std::invalid_argument("grid spacing must be > 0");
    Grid2D g{z_min, z_max, eta_min, eta_max, h, 0, 0};
    const double fz = (z_max - z_min) / h, fe = (eta_max - eta_min) / h;
    g.nz = static_cast<int>(std::lround(fz));
    g.neta = static_cast<int>(std::lround(fe));
    if (g.nz < 1 || g.neta < 1 || std::abs(fz - g.nz) > 1e-9 ||
        std::abs(fe - g.neta) > 1e-9)
        throw std::invalid_argument("domain extent must be a multiple of h");
    return g;
}

double DensityField::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.h * grid.h;
}

double DensityField::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

int stencil_halfwidth(const Grid2D& grid, double radius) {
    return static_cast<int>(std::floor(radius / grid.h + 1e-9));
}

CoefficientFields nonlocal_coefficients(const DensityField& rho,
                                        const ModelParams& p,
                                        const NoiseSpec& noise) {
    const Grid2D& g = rho.grid;
    const int nz = g.nz, ne = g.neta;
    const double h2 = g.h * g.h;
    const int W = stencil_halfwidth(g, p.radius);

    CoefficientFields out;
    out.grid = g;
    out.u.assign(static_cast<std::size_t>(nz) * ne, 0.0);
    out.v.assign(static_cast<std::size_t>(nz) * ne, 0.0);
    out.sig_sp.assign(static_cast<std::size_t>(nz) * ne, 0.0);
    out.sig_op.assign(static_cast<std::size_t>(nz) * ne, 0.0);

    // Column reductions over eta; the pair kernels depend on theta only
    // through sgn(theta) (spatial) and linearly (opinion), so the quadrature
    // factorizes into per-column masses and moments.
    std::vector<double> col_mass(nz, 0.0), col_mom(nz, 0.0), col_sgn(nz, 0.0);
    for (int jz = 0; jz < nz; ++jz) {
        double m = 0.0, mom = 0.0, sg = 0.0;
        for (int jt = 0; jt < ne; ++jt) {
            const double r = rho.at(jz, jt) * h2;
            const double th = g.eta_center(jt);
            m += r;
            mom += th * r;
            sg += sgn(th) * r;
        }
        col_mass[jz] = m;
        col_mom[jz] = mom;
        col_sgn[jz] = sg;
    }

    const double total_mass = std::accumulate(col_mass.begin(), col_mass.end(),
                                              0.0);

    for (int iz = 0; iz < nz; ++iz) {
        const double z = g.z_center(iz);
        const int lo = std::max(0, iz - W), hi = std::min(nz - 1, iz + W);
        double a_sgn = 0.0, s0 = 0.0, s1 = 0.0;
        for (int jz = lo; jz <= hi; ++jz) {
            a_sgn += (g.z_center(jz) - z) * col_sgn[jz];
            s0 += col_mass[jz];
            s1 += col_mom[jz];
        }
        for (int ie = 0; ie < ne; ++ie) {
            const double eta = g.eta_center(ie);
            out.u[iz * ne + ie] = p.scaling * p.beta * sgn(eta) * a_sgn;
            out.v[iz * ne + ie] = p.scaling * p.alpha * (s1 - eta * s0);
        }

        switch (noise.kind) {
            case NoiseKind::Additive:
                for (int ie = 0; ie < ne; ++ie) {
                    out.sig_sp[iz * ne + ie] = noise.sigma_sp;
                    out.sig_op[iz * ne + ie] = noise.sigma_op;
                }
                break;
            case NoiseKind::KernelAveraged: {
                auto fill = [&](std::vector<double>& dst, PairSigmaKernel kern,
                                double amp) {
                    switch (kern) {
                        case PairSigmaKernel::Constant:
                            for (int ie = 0; ie < ne; ++ie)
                                dst[iz * ne + ie] = amp * total_mass;
                            break;
                        case PairSigmaKernel::Indicator:
                            for (int ie = 0; ie < ne; ++ie)
                                dst[iz * ne + ie] = amp * s0;
                            break;
                        case PairSigmaKernel::OpinionGap: {
                            // sum_theta |eta - theta| * w(theta) via prefix
                            // mass/moment of the in-stencil eta profile.
                            std::vector<double> w(ne, 0.0);
                            for (int jz = lo; jz <= hi; ++jz)
                                for (int jt = 0; jt < ne; ++jt)
                                    w[jt] += rho.at(jz, jt) * h2;
                            std::vector<double> pm(ne + 1, 0.0),
                                pq(ne + 1, 0.0);
                            for (int jt = 0; jt < ne; ++jt) {
                                pm[jt + 1] = pm[jt] + w[jt];
                                pq[jt + 1] =
                                    pq[jt] + g.eta_center(jt) * w[jt];
                            }
                            for (int ie = 0; ie < ne; ++ie) {
                                const double eta = g.eta_center(ie);
                                // bins jt <= ie have centers <= eta
                                const double below =
                                    eta * pm[ie + 1] - pq[ie + 1];
                                const double above = (pq[ne] - pq[ie + 1]) -
                                                     eta * (pm[ne] - pm[ie + 1]);
                                dst[iz * ne + ie] = amp * (below + above);
                            }
                            break;
                        }
                    }
                };
                fill(out.sig_sp, noise.sp_kernel, noise.sp_amp);
                fill(out.sig_op, noise.op_kernel, noise.op_amp);
                break;
            }
            case NoiseKind::MultiplicativeMin:
                throw std::invalid_argument(
                    "MultiplicativeMin noise has no mean-field counterpart; "
                    "the PDE solver supports additive and kernel-averaged "
                    "noise only");
        }
    }
    return out;
}

std::vector<double> pde_rhs(const DensityField& rho,
                            const CoefficientFields& coeff) {
    const Grid2D& g = rho.grid;
    const int nz = g.nz, ne = g.neta;
    const double h = g.h;
    std::vector<double> rhs(static_cast<std::size_t>(nz) * ne, 0.0);

    // g = 1/2 rho sigma^2, so the diffusive face flux is -(g_R - g_L)/h.
    auto gsp = [&](int iz, int ie) {
        const double s = coeff.sig_sp[iz * ne + ie];
        return 0.5 * rho.at(iz, ie) * s * s;
    };
    auto gop = [&](int iz, int ie) {
        const double s = coeff.sig_op[iz * ne + ie];
        return 0.5 * rho.at(iz, ie) * s * s;
    };

    // z-direction interior faces
    for (int iz = 0; iz + 1 < nz; ++iz)
        for (int ie = 0; ie < ne; ++ie) {
            const double uf =
                0.5 * (coeff.u[iz * ne + ie] + coeff.u[(iz + 1) * ne + ie]);
            const double adv =
                uf > 0.0 ? uf * rho.at(iz, ie) : uf * rho.at(iz + 1, ie);
            const double dif = -(gsp(iz + 1, ie) - gsp(iz, ie)) / h;
            const double f = adv + dif;
            rhs[iz * ne + ie] -= f / h;
            rhs[(iz + 1) * ne + ie] += f / h;
        }
    // eta-direction interior faces
    for (int iz = 0; iz < nz; ++iz)
        for (int ie = 0; ie + 1 < ne; ++ie) {
            const double vf =
                0.5 * (coeff.v[iz * ne + ie] + coeff.v[iz * ne + ie + 1]);
            const double adv =
                vf > 0.0 ? vf * rho.at(iz, ie) : vf * rho.at(iz, ie + 1);
            const double dif = -(gop(iz, ie + 1) - gop(iz, ie)) / h;
            const double f = adv + dif;
            rhs[iz * ne + ie] -= f / h;
            rhs[iz * ne + ie + 1] += f / h;
        }
    return rhs;
}

PdeResult pde_integrate(const DensityField& rho0, double t_end, double dt,
                        const ModelParams& p, const NoiseSpec& noise,
                        int coeff_stride, int snapshot_stride) {
    if (dt <= 0.0 || t_end <= 0.0)
        throw std::invalid_argument("pde_integrate: dt and t_end must be > 0");
    if (coeff_stride < 1 || snapshot_stride < 1)
        throw std::invalid_argument("strides must be >= 1");

    DensityField rho = rho0;
    CoefficientFields coeff = nonlocal_coefficients(rho, p, noise);

    double maxvel = 0.0, maxsig2 = 0.0;
    for (std::size_t i = 0; i < coeff.u.size(); ++i) {
        maxvel = std::max({maxvel, std::abs(coeff.u[i]), std::abs(coeff.v[i])});
        maxsig2 = std::max({maxsig2, coeff.sig_sp[i] * coeff.sig_sp[i],
                            coeff.sig_op[i] * coeff.sig_op[i]});
    }
    const double h = rho.grid.h;
    double bound = std::numeric_limits<double>::infinity();
    if (maxvel > 0.0) bound = std::min(bound, 0.4 * h / maxvel);
    if (maxsig2 > 0.0) bound = std::min(bound, 0.4 * h * h / (4.0 * maxsig2));
    if (dt > bound) throw StabilityError(dt, bound);

    const long steps = std::lround(t_end / dt);
    const double max0 = rho.max_value();

    PdeResult res;
    res.snapshots.push_back(rho);
    res.mass_history.push_back(rho.mass());

    for (long step = 0; step < steps; ++step) {
        if (step > 0 && step % coeff_stride == 0)
            coeff = nonlocal_coefficients(rho, p, noise);
        const auto rhs = pde_rhs(rho, coeff);
        for (std::size_t i = 0; i < rho.values.size(); ++i)
            rho.values[i] += dt * rhs[i];

        double clipped = 0.0;
        for (double& v : rho.values)
            if (v < 0.0) {
                clipped -= v;
                v = 0.0;
            }
        res.clipped_mass += clipped * h * h;
        const double m = rho.mass();
        if (clipped > 0.0 && m > 0.0)
            for (double& v : rho.values) v /= m;

        rho.time = rho0.time + (step + 1) * dt;
        if (rho.max_value() > 1e3 * max0)
            throw BlowUpError(step);
        if ((step + 1) % snapshot_stride == 0 || step + 1 == steps) {
            res.snapshots.push_back(rho);
            res.mass_history.push_back(m);
        }
    }
    return res;
}

DensityField init_gaussian_mixture(
    const Grid2D& grid, const std::vector<MixtureComponent>& components) {
    if (components.empty())
        throw std::invalid_argument("mixture needs at least one component");
    DensityField f;
    f.grid = grid;
    f.values.assign(static_cast<std::size_t>(grid.nz) * grid.neta, 0.0);
    for (const auto& c : components) {
        if (c.stddev <= 0.0)
            throw std::invalid_argument("mixture stddev must be > 0");
        if (c.weight <= 0.0)
            throw std::invalid_argument("mixture weight must be > 0");
        const double inv2s2 = 1.0 / (2.0 * c.stddev * c.stddev);
        for (int iz = 0; iz < grid.nz; ++iz) {
            const double dz = grid.z_center(iz) - c.mean_pos;
            for (int ie = 0; ie < grid.neta; ++ie) {
                const double de = grid.eta_center(ie) - c.mean_op;
                f.at(iz, ie) +=
                    c.weight * std::exp(-(dz * dz + de * de) * inv2s2);
            }
        }
    }
    const double m = f.mass();
    if (m <= 0.0)
        throw std::invalid_argument("mixture has no mass on the grid");
    for (double& v : f.values) v /= m;
    return f;
}

}  // namespace opdyn
