//! Peng-Robinson equation of state, Maxwell coexistence construction, bulk and
//! nonlocal chemical potential, and the fourth-order finite-difference stencils
//! used to evaluate the nonideal force.

use crate::error::{CoreError, Result};
use crate::grid::{Grid, NodeKind};
use crate::lattice::CS2;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Thermodynamic parameters in lattice units, plus quantities derived at
/// construction: the critical point, the working temperature and the cached
/// temperature function alpha(T).
#[derive(Debug, Clone)]
pub struct ThermoParams {
    /// Attraction parameter of the PR EOS.
    pub a: f64,
    /// Co-volume parameter.
    pub b: f64,
    /// Gas constant.
    pub r_gas: f64,
    /// Acentric factor.
    pub omega: f64,
    /// Gradient coefficient of the mesh-space chemical potential.
    pub kappa_hat: f64,
    /// Mesh-space length scaling k (mesh spacing = k * lattice spacing).
    pub k_scale: f64,
    /// Reduced temperature T/T_c.
    pub t_r: f64,
    /// Critical temperature (derived).
    pub t_c: f64,
    /// Critical density (derived).
    pub rho_c: f64,
    /// Working temperature t_r * t_c.
    pub t: f64,
    /// alpha(T), cached once per run.
    pub alpha_t: f64,
}

pub const A_DEFAULT: f64 = 2.0 / 49.0;
pub const B_DEFAULT: f64 = 2.0 / 21.0;
pub const R_DEFAULT: f64 = 1.0;
pub const OMEGA_WATER: f64 = 0.344;
pub const KAPPA_HAT_DEFAULT: f64 = 0.01;
pub const K_SCALE_DEFAULT: f64 = 1.0 / 6.0;

impl ThermoParams {
    /// Water-like defaults: a = 2/49, b = 2/21, R = 1, omega = 0.344,
    /// kappa_hat = 0.01, k = 1/6.
    pub fn new(t_r: f64) -> Result<Self> {
        Self::with(
            A_DEFAULT,
            B_DEFAULT,
            R_DEFAULT,
            OMEGA_WATER,
            KAPPA_HAT_DEFAULT,
            K_SCALE_DEFAULT,
            t_r,
        )
    }

    pub fn with(
        a: f64,
        b: f64,
        r_gas: f64,
        omega: f64,
        kappa_hat: f64,
        k_scale: f64,
        t_r: f64,
    ) -> Result<Self> {
        if a <= 0.0 || b <= 0.0 || r_gas <= 0.0 || kappa_hat <= 0.0 || k_scale <= 0.0 {
            return Err(CoreError::Config(
                "thermo parameters a, b, R, kappa_hat, k must be positive".into(),
            ));
        }
        if t_r <= 0.0 || !t_r.is_finite() {
            return Err(CoreError::Config(format!("invalid reduced temperature {t_r}")));
        }
        let (rho_c, t_c) = critical_point(a, b, r_gas)?;
        let t = t_r * t_c;
        let m = 0.37464 + 1.54226 * omega - 0.26992 * omega * omega;
        let alpha_t = {
            let s = 1.0 + m * (1.0 - (t / t_c).sqrt());
            s * s
        };
        Ok(Self {
            a,
            b,
            r_gas,
            omega,
            kappa_hat,
            k_scale,
            t_r,
            t_c,
            rho_c,
            t,
            alpha_t,
        })
    }

    /// a * alpha(T), the temperature-corrected attraction.
    #[inline]
    pub fn a_alpha(&self) -> f64 {
        self.a * self.alpha_t
    }

    #[inline]
    pub fn rt(&self) -> f64 {
        self.r_gas * self.t
    }

    /// k^2, the EOS scaling into mesh space.
    #[inline]
    pub fn k2(&self) -> f64 {
        self.k_scale * self.k_scale
    }

    /// Gradient coefficient in the lattice-unit energy functional,
    /// kappa = kappa_hat / k^2.
    #[inline]
    pub fn kappa(&self) -> f64 {
        self.kappa_hat / self.k2()
    }

    #[inline]
    pub fn rho_max(&self) -> f64 {
        1.0 / self.b
    }

    fn check_domain(&self, rho: f64) -> Result<()> {
        if !(rho > 0.0 && rho < self.rho_max()) && rho.is_finite() {
            return Err(CoreError::Domain(format!(
                "density {rho} outside (0, {})",
                self.rho_max()
            )));
        }
        if !rho.is_finite() {
            return Err(CoreError::Domain(format!("non-finite density {rho}")));
        }
        Ok(())
    }

    /// Bulk pressure p0(rho) (unchecked).
    #[inline]
    pub fn p0(&self, rho: f64) -> f64 {
        let br = self.b * rho;
        let d = 1.0 + 2.0 * br - br * br;
        self.rt() * rho / (1.0 - br) - self.a_alpha() * rho * rho / d
    }

    /// dp0/drho (unchecked).
    #[inline]
    pub fn dp_drho(&self, rho: f64) -> f64 {
        let br = self.b * rho;
        let omb = 1.0 - br;
        let d = 1.0 + 2.0 * br - br * br;
        self.rt() / (omb * omb) - 2.0 * self.a_alpha() * rho * (1.0 + br) / (d * d)
    }

    /// d2p0/drho2 (unchecked).
    #[inline]
    pub fn d2p_drho2(&self, rho: f64) -> f64 {
        let br = self.b * rho;
        let omb = 1.0 - br;
        let d = 1.0 + 2.0 * br - br * br;
        let dp = 2.0 * self.b * (1.0 - br); // dD/drho
        let num = (1.0 + 2.0 * br) * d - 2.0 * rho * (1.0 + br) * dp;
        2.0 * self.b * self.rt() / (omb * omb * omb) - 2.0 * self.a_alpha() * num / (d * d * d)
    }

    /// Local (bulk) part of the chemical potential, mu0(rho) (unchecked).
    #[inline]
    pub fn mu0(&self, rho: f64) -> f64 {
        let br = self.b * rho;
        let omb = 1.0 - br;
        let d = 1.0 + 2.0 * br - br * br;
        let aa = self.a_alpha();
        let rt = self.rt();
        rt * (rho / omb).ln() - aa / (2.0 * SQRT2 * self.b) * ((SQRT2 - 1.0 + br) / (SQRT2 + 1.0 - br)).ln()
            + rt / omb
            - aa * rho / d
    }

    /// Bulk free-energy density psi(rho) with the integration constant set to
    /// zero; satisfies p0 = rho * mu0 - psi.
    #[inline]
    pub fn psi(&self, rho: f64) -> f64 {
        let br = self.b * rho;
        let omb = 1.0 - br;
        let aa = self.a_alpha();
        rho * (self.rt() * (rho / omb).ln()
            - aa / (2.0 * SQRT2 * self.b) * ((SQRT2 - 1.0 + br) / (SQRT2 + 1.0 - br)).ln())
    }
}

/// Peng-Robinson pressure with domain checking.
pub fn pr_pressure(rho: f64, params: &ThermoParams) -> Result<f64> {
    params.check_domain(rho)?;
    Ok(params.p0(rho))
}

/// Local part of the chemical potential with domain checking.
pub fn bulk_chemical_potential(rho: f64, params: &ThermoParams) -> Result<f64> {
    params.check_domain(rho)?;
    Ok(params.mu0(rho))
}

/// Locate the critical point of the alpha = 1 EOS: the (rho, T) where both
/// dp/drho and d2p/drho2 vanish. Nested bisection: for each T the inflection
/// of minimal slope is found, then T is bisected until that slope is zero.
fn critical_point(a: f64, b: f64, r_gas: f64) -> Result<(f64, f64)> {
    let p = |rho: f64, t: f64| -> f64 {
        let br = b * rho;
        let d = 1.0 + 2.0 * br - br * br;
        r_gas * t * rho / (1.0 - br) - a * rho * rho / d
    };
    let dp = |rho: f64, t: f64| -> f64 {
        let br = b * rho;
        let omb = 1.0 - br;
        let d = 1.0 + 2.0 * br - br * br;
        r_gas * t / (omb * omb) - 2.0 * a * rho * (1.0 + br) / (d * d)
    };
    let _ = p;

    // Minimum of dp/drho over the physical density range at fixed T.
    let min_dp = |t: f64| -> (f64, f64) {
        let n = 4096;
        let mut best = (0.0, f64::INFINITY);
        for i in 1..n {
            let rho = (i as f64 / n as f64) * (1.0 - 1e-9) / b;
            let v = dp(rho, t);
            if v < best.1 {
                best = (rho, v);
            }
        }
        // Golden-section refinement around the coarse minimum.
        let step = (1.0 - 1e-9) / (b * n as f64);
        let (mut lo, mut hi) = ((best.0 - step).max(1e-12), best.0 + step);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = dp(x1, t);
        let mut f2 = dp(x2, t);
        for _ in 0..120 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = dp(x1, t);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = dp(x2, t);
            }
        }
        let rho = 0.5 * (lo + hi);
        (rho, dp(rho, t))
    };

    // Bracket T_c: min slope is negative below T_c, positive above.
    let t_guess = 0.17 * a / (b * r_gas);
    let mut t_lo = 0.5 * t_guess;
    let mut t_hi = 1.5 * t_guess;
    for _ in 0..60 {
        if min_dp(t_lo).1 < 0.0 {
            break;
        }
        t_lo *= 0.5;
    }
    for _ in 0..60 {
        if min_dp(t_hi).1 > 0.0 {
            break;
        }
        t_hi *= 1.5;
    }
    if !(min_dp(t_lo).1 < 0.0 && min_dp(t_hi).1 > 0.0) {
        return Err(CoreError::NoConvergence {
            what: "critical temperature bracket".into(),
            residual: min_dp(t_lo).1,
        });
    }
    for _ in 0..200 {
        let tm = 0.5 * (t_lo + t_hi);
        if min_dp(tm).1 < 0.0 {
            t_lo = tm;
        } else {
            t_hi = tm;
        }
        if (t_hi - t_lo) < 1e-16 * t_hi {
            break;
        }
    }
    let t_c = 0.5 * (t_lo + t_hi);
    let rho_guess = min_dp(t_c).0;
    // At the slope minimum the curvature d2p/drho2 changes sign; bisect it
    // for a machine-precision rho_c.
    let d2p = |rho: f64| -> f64 {
        let br = b * rho;
        let omb = 1.0 - br;
        let d = 1.0 + 2.0 * br - br * br;
        let dd = 2.0 * b * (1.0 - br);
        let num = (1.0 + 2.0 * br) * d - 2.0 * rho * (1.0 + br) * dd;
        2.0 * b * r_gas * t_c / (omb * omb * omb) - 2.0 * a * num / (d * d * d)
    };
    let mut span = 1e-4 * rho_guess;
    let rho_c = loop {
        let (lo, hi) = (rho_guess - span, rho_guess + span);
        if d2p(lo) < 0.0 && d2p(hi) > 0.0 {
            break bisect(d2p, lo, hi);
        }
        span *= 2.0;
        if span > 0.5 * rho_guess {
            break rho_guess;
        }
    };
    let residual = dp(rho_c, t_c).abs().max(d2p(rho_c).abs());
    if residual > 1e-10 {
        return Err(CoreError::NoConvergence {
            what: "critical point".into(),
            residual,
        });
    }
    Ok((rho_c, t_c))
}

/// Gas and liquid coexistence densities with the saturation pressure.
#[derive(Debug, Clone, Copy)]
pub struct CoexistenceDensities {
    pub rho_g: f64,
    pub rho_l: f64,
    pub p_sat: f64,
}

impl CoexistenceDensities {
    /// Mean of the two coexistence densities; the iso-density level that
    /// defines the liquid-gas interface.
    #[inline]
    pub fn rho_mean(&self) -> f64 {
        0.5 * (self.rho_g + self.rho_l)
    }
}

/// Spinodal densities (gas-side, liquid-side): the zero crossings of dp/drho.
pub fn spinodal_densities(params: &ThermoParams) -> Result<(f64, f64)> {
    if params.t_r >= 1.0 {
        return Err(CoreError::NoTwoPhase { t_r: params.t_r });
    }
    let rho_max = params.rho_max() * (1.0 - 1e-9);
    let n = 20_000;
    let mut prev_rho = rho_max * 1e-9;
    let mut prev = params.dp_drho(prev_rho);
    let mut down = None;
    let mut up = None;
    for i in 1..=n {
        let rho = rho_max * i as f64 / n as f64;
        let v = params.dp_drho(rho);
        if prev > 0.0 && v <= 0.0 && down.is_none() {
            down = Some(bisect(|r| params.dp_drho(r), prev_rho, rho));
        }
        if prev < 0.0 && v >= 0.0 && up.is_none() {
            up = Some(bisect(|r| params.dp_drho(r), prev_rho, rho));
        }
        prev = v;
        prev_rho = rho;
    }
    match (down, up) {
        (Some(g), Some(l)) => Ok((g, l)),
        _ => Err(CoreError::NoTwoPhase { t_r: params.t_r }),
    }
}

/// Bisection on a bracketed sign change; runs to floating-point exhaustion.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Antiderivative of p0 with respect to volume v = 1/rho:
/// I(v) = RT ln(v - b) - a alpha/(2 sqrt2 b) ln((v + b(1 - sqrt2))/(v + b(1 + sqrt2))).
fn pressure_volume_integral(params: &ThermoParams, v: f64) -> f64 {
    let b = params.b;
    params.rt() * (v - b).ln()
        - params.a_alpha() / (2.0 * SQRT2 * b)
            * ((v + b * (1.0 - SQRT2)) / (v + b * (1.0 + SQRT2))).ln()
}

/// Maxwell equal-area construction at the params' reduced temperature.
///
/// The saturation pressure is bisected on the analytic equal-area residual
/// psi(p) = p (v_g - v_l) - [I(v_g) - I(v_l)], with the outer stable-branch
/// densities recovered by bracketed root finding of p0(rho) = p.
pub fn maxwell_coexistence(params: &ThermoParams) -> Result<CoexistenceDensities> {
    if params.t_r >= 1.0 {
        return Err(CoreError::NoTwoPhase { t_r: params.t_r });
    }
    let (sp_g, sp_l) = spinodal_densities(params)?;
    let p_hi = params.p0(sp_g);
    let p_lo_raw = params.p0(sp_l);
    if p_hi <= 0.0 {
        return Err(CoreError::NoConvergence {
            what: "saturation bracket (gas spinodal pressure non-positive)".into(),
            residual: p_hi,
        });
    }
    let p_lo = if p_lo_raw > 0.0 { p_lo_raw } else { p_hi * 1e-300_f64.max(1e-18) };

    let gas_root = |p: f64| -> f64 { bisect(|r| params.p0(r) - p, 1e-300, sp_g) };
    let liq_root = |p: f64| -> f64 {
        bisect(
            |r| params.p0(r) - p,
            sp_l,
            params.rho_max() * (1.0 - 1e-12),
        )
    };
    let residual = |p: f64| -> f64 {
        let vg = 1.0 / gas_root(p);
        let vl = 1.0 / liq_root(p);
        p * (vg - vl) - (pressure_volume_integral(params, vg) - pressure_volume_integral(params, vl))
    };

    let (mut lo, mut hi) = (p_lo, p_hi * (1.0 - 1e-14));
    let rlo = residual(lo);
    let rhi = residual(hi);
    if rlo.signum() == rhi.signum() {
        return Err(CoreError::NoConvergence {
            what: "equal-area residual bracket".into(),
            residual: rlo.min(rhi),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if residual(mid).signum() == rlo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p_sat = 0.5 * (lo + hi);
    let rho_g = gas_root(p_sat);
    let rho_l = liq_root(p_sat);

    let out = CoexistenceDensities { rho_g, rho_l, p_sat };
    // Invariants: ordering and equal pressures.
    if !(rho_g > 0.0 && rho_g < params.rho_c && params.rho_c < rho_l && rho_l < params.rho_max()) {
        return Err(CoreError::NoConvergence {
            what: format!("coexistence ordering (rho_g={rho_g}, rho_l={rho_l})"),
            residual: 0.0,
        });
    }
    let dp = (params.p0(rho_g) - params.p0(rho_l)).abs();
    if dp > 1e-10 * p_sat.abs().max(1e-12) {
        return Err(CoreError::NoConvergence {
            what: "equal saturation pressures".into(),
            residual: dp,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Fourth-order centered stencils (five points per axis, unit spacing).
// ---------------------------------------------------------------------------

#[inline(always)]
pub fn deriv4(vm2: f64, vm1: f64, vp1: f64, vp2: f64) -> f64 {
    (vm2 - 8.0 * vm1 + 8.0 * vp1 - vp2) / 12.0
}

#[inline(always)]
pub fn second4(vm2: f64, vm1: f64, v0: f64, vp1: f64, vp2: f64) -> f64 {
    (-vm2 + 16.0 * vm1 - 30.0 * v0 + 16.0 * vp1 - vp2) / 12.0
}

/// Fourth-order Laplacian at (x, y), periodic wrap.
pub fn laplacian_4th(field: &[f64], grid: Grid, x: usize, y: usize) -> f64 {
    let v0 = field[grid.idx(x, y)];
    let xm2 = field[grid.nbr(x, y, -2, 0)];
    let xm1 = field[grid.nbr(x, y, -1, 0)];
    let xp1 = field[grid.nbr(x, y, 1, 0)];
    let xp2 = field[grid.nbr(x, y, 2, 0)];
    let ym2 = field[grid.nbr(x, y, 0, -2)];
    let ym1 = field[grid.nbr(x, y, 0, -1)];
    let yp1 = field[grid.nbr(x, y, 0, 1)];
    let yp2 = field[grid.nbr(x, y, 0, 2)];
    second4(xm2, xm1, v0, xp1, xp2) + second4(ym2, ym1, v0, yp1, yp2)
}

/// Fourth-order gradient at (x, y), periodic wrap.
pub fn gradient_4th(field: &[f64], grid: Grid, x: usize, y: usize) -> [f64; 2] {
    let xm2 = field[grid.nbr(x, y, -2, 0)];
    let xm1 = field[grid.nbr(x, y, -1, 0)];
    let xp1 = field[grid.nbr(x, y, 1, 0)];
    let xp2 = field[grid.nbr(x, y, 2, 0)];
    let ym2 = field[grid.nbr(x, y, 0, -2)];
    let ym1 = field[grid.nbr(x, y, 0, -1)];
    let yp1 = field[grid.nbr(x, y, 0, 1)];
    let yp2 = field[grid.nbr(x, y, 0, 2)];
    [deriv4(xm2, xm1, xp1, xp2), deriv4(ym2, ym1, yp1, yp2)]
}

// ---------------------------------------------------------------------------
// Field-level thermodynamics.
// ---------------------------------------------------------------------------

/// Mesh-space chemical potential field: mu_hat = k^2 mu0(rho) - kappa_hat lap(rho)
/// on fluid nodes. Solid nodes keep their assigned wetting values.
///
/// Requires the solid-layer densities to be filled first so near-wall stencils
/// are well defined.
pub fn chemical_potential_field(
    rho: &[f64],
    kind: &[NodeKind],
    grid: Grid,
    params: &ThermoParams,
    mu_out: &mut [f64],
) -> Result<()> {
    let (nx, ny) = (grid.nx, grid.ny);
    let k2 = params.k2();
    let kap = params.kappa_hat;
    let rho_max = params.rho_max();
    for y in 0..ny {
        let row = y * nx;
        let rm1 = grid.wrap_y(y as i64 - 1) * nx;
        let rm2 = grid.wrap_y(y as i64 - 2) * nx;
        let rp1 = grid.wrap_y(y as i64 + 1) * nx;
        let rp2 = grid.wrap_y(y as i64 + 2) * nx;
        for x in 0..nx {
            let idx = row + x;
            if kind[idx] != NodeKind::Fluid {
                continue;
            }
            let r0 = rho[idx];
            if !(r0 > 0.0 && r0 < rho_max) {
                let (cx, cy) = grid.coords(idx);
                return Err(CoreError::Domain(format!(
                    "density {r0} outside (0, {rho_max}) at node ({cx}, {cy})"
                )));
            }
            let (xm1, xm2, xp1, xp2) = if x >= 2 && x + 2 < nx {
                (x - 1, x - 2, x + 1, x + 2)
            } else {
                (
                    grid.wrap_x(x as i64 - 1),
                    grid.wrap_x(x as i64 - 2),
                    grid.wrap_x(x as i64 + 1),
                    grid.wrap_x(x as i64 + 2),
                )
            };
            let lap = second4(rho[row + xm2], rho[row + xm1], r0, rho[row + xp1], rho[row + xp2])
                + second4(rho[rm2 + x], rho[rm1 + x], r0, rho[rp1 + x], rho[rp2 + x]);
            mu_out[idx] = k2 * params.mu0(r0) - kap * lap;
        }
    }
    Ok(())
}

/// Nonideal force at one node: F = -rho grad(mu) + cs2 grad(rho).
pub fn nonideal_force(
    rho: &[f64],
    mu: &[f64],
    grid: Grid,
    x: usize,
    y: usize,
) -> [f64; 2] {
    let gm = gradient_4th(mu, grid, x, y);
    let gr = gradient_4th(rho, grid, x, y);
    let r = rho[grid.idx(x, y)];
    [-r * gm[0] + CS2 * gr[0], -r * gm[1] + CS2 * gr[1]]
}

/// Total free-energy functional over fluid nodes (diagnostic):
/// sum of psi(rho) + (kappa/2) |grad rho|^2 with kappa = kappa_hat / k^2.
pub fn free_energy_total(rho: &[f64], kind: &[NodeKind], grid: Grid, params: &ThermoParams) -> f64 {
    let kap_half = 0.5 * params.kappa();
    let mut total = 0.0;
    for y in 0..grid.ny {
        for x in 0..grid.nx {
            let idx = grid.idx(x, y);
            if kind[idx] != NodeKind::Fluid {
                continue;
            }
            let g = gradient_4th(rho, grid, x, y);
            total += params.psi(rho[idx]) + kap_half * (g[0] * g[0] + g[1] * g[1]);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(t_r: f64) -> ThermoParams {
        ThermoParams::new(t_r).unwrap()
    }

    #[test]
    fn critical_point_zeroes_both_derivatives() {
        // At T = T_c the cached alpha is exactly 1, so the params' analytic
        // derivatives probe the same EOS the solver worked on.
        let p = params(1.0);
        assert!((p.t - p.t_c).abs() < 1e-15 && (p.alpha_t - 1.0).abs() < 1e-15);
        assert!(p.dp_drho(p.rho_c).abs() < 1e-10, "dp = {}", p.dp_drho(p.rho_c));
        assert!(
            p.d2p_drho2(p.rho_c).abs() < 1e-10,
            "d2p = {}",
            p.d2p_drho2(p.rho_c)
        );
        // Spec example: centered finite difference of p0 at the critical point.
        let h = 1e-5;
        let fd = (p.p0(p.rho_c + h) - p.p0(p.rho_c - h)) / (2.0 * h);
        assert!(fd.abs() < 1e-8, "fd dp = {fd}");
    }

    #[test]
    fn critical_point_matches_reduced_solve() {
        // Independent algebraic route in reduced variables eta = b rho,
        // tau = R T b / a. The two stationarity conditions each give tau as a
        // closed-form function of eta; their crossing is the critical point.
        let d = |eta: f64| 1.0 + 2.0 * eta - eta * eta;
        let tau_from_slope = |eta: f64| {
            let dd = d(eta);
            2.0 * eta * (1.0 + eta) * (1.0 - eta) * (1.0 - eta) / (dd * dd)
        };
        let tau_from_curvature = |eta: f64| {
            let dd = d(eta);
            let ddp = 2.0 * (1.0 - eta);
            let omb = 1.0 - eta;
            ((1.0 + 2.0 * eta) * dd - 2.0 * eta * (1.0 + eta) * ddp) * omb * omb * omb
                / (dd * dd * dd)
        };
        let gap = |eta: f64| tau_from_slope(eta) - tau_from_curvature(eta);
        let eta_c = bisect(gap, 0.1, 0.4);
        let tau_c = tau_from_slope(eta_c);

        let p = params(0.6);
        let t_c_scaled = tau_c * p.a / (p.b * p.r_gas);
        let rho_c_scaled = eta_c / p.b;
        assert!(
            (t_c_scaled - p.t_c).abs() / p.t_c < 1e-9,
            "{t_c_scaled} vs {}",
            p.t_c
        );
        assert!(
            (rho_c_scaled - p.rho_c).abs() / p.rho_c < 1e-9,
            "{rho_c_scaled} vs {}",
            p.rho_c
        );
        // Rounded literature coefficients 0.0778 / 0.45724 land within 1e-4.
        let t_c_lit = (0.0778 / 0.45724) * p.a / (p.b * p.r_gas);
        assert!(
            (t_c_lit - p.t_c).abs() / p.t_c < 1e-4,
            "literature T_c {t_c_lit} vs solved {}",
            p.t_c
        );
    }

    #[test]
    fn ideal_gas_limit() {
        let p = params(0.6);
        let rho = 1e-8;
        let ratio = p.p0(rho) / (rho * p.rt());
        assert!((ratio - 1.0).abs() < 1e-6, "p/(rho R T) = {ratio}");
    }

    #[test]
    fn pressure_domain_errors() {
        let p = params(0.6);
        assert!(pr_pressure(-1.0, &p).is_err());
        assert!(pr_pressure(1.0 / p.b, &p).is_err());
        assert!(pr_pressure(0.1, &p).is_ok());
    }

    #[test]
    fn pressure_identity_with_psi_and_mu0() {
        // Eq. p0 = rho mu0 - psi must hold analytically.
        let p = params(0.7);
        for i in 1..40 {
            let rho = i as f64 / 40.0 * 0.95 * p.rho_max();
            let lhs = p.p0(rho);
            let rhs = rho * p.mu0(rho) - p.psi(rho);
            assert!(
                (lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0),
                "rho={rho}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn gibbs_duhem_cross_validation() {
        // rho dmu0/drho == dp0/drho, both via centered differences.
        let p = params(0.6);
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let rho = (0.01 + 0.97 * next()) * p.rho_max() * 0.99;
            let h = 1e-6 * rho;
            let dmu = (p.mu0(rho + h) - p.mu0(rho - h)) / (2.0 * h);
            let dp = (p.p0(rho + h) - p.p0(rho - h)) / (2.0 * h);
            let lhs = rho * dmu;
            let scale = dp.abs().max(1e-3);
            assert!(
                (lhs - dp).abs() / scale < 1e-5,
                "rho={rho}: rho dmu={lhs} dp={dp}"
            );
        }
    }

    #[test]
    fn mu0_monotone_outside_spinodals() {
        let p = params(0.6);
        let (sp_g, sp_l) = spinodal_densities(&p).unwrap();
        let mut prev = p.mu0(1e-6);
        let mut rho = 2e-6;
        while rho < sp_g * 0.999 {
            let v = p.mu0(rho);
            assert!(v > prev, "mu0 not increasing below gas spinodal at {rho}");
            prev = v;
            rho *= 1.5;
        }
        let n = 50;
        let hi = p.rho_max() * 0.999;
        let mut prev = p.mu0(sp_l * 1.001);
        for i in 1..=n {
            let r = sp_l * 1.001 + (hi - sp_l * 1.001) * i as f64 / n as f64;
            let v = p.mu0(r);
            assert!(v > prev, "mu0 not increasing above liquid spinodal at {r}");
            prev = v;
        }
    }

    /// Brute-force equal-area oracle: scan p_sat, integrate the area
    /// difference with Simpson quadrature on a log-spaced volume grid, and
    /// bisect the scan interval.
    fn maxwell_oracle(p: &ThermoParams) -> (f64, f64, f64) {
        let (sp_g, sp_l) = spinodal_densities(p).unwrap();
        let gas_root = |ps: f64| bisect(|r| p.p0(r) - ps, 1e-300, sp_g);
        let liq_root = |ps: f64| bisect(|r| p.p0(r) - ps, sp_l, p.rho_max() * (1.0 - 1e-12));
        let area = |ps: f64| -> f64 {
            let vg = 1.0 / gas_root(ps);
            let vl = 1.0 / liq_root(ps);
            // Simpson on uniform-in-ln(v) grid: integral of (ps - p0(1/v)) dv.
            let n = 40_000; // even
            let lnl = vl.ln();
            let h = (vg.ln() - lnl) / n as f64;
            let f = |j: usize| -> f64 {
                let v = (lnl + h * j as f64).exp();
                (ps - p.p0(1.0 / v)) * v // dv = v dln v
            };
            let mut s = f(0) + f(n);
            for j in 1..n {
                s += f(j) * if j % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        let p_hi = p.p0(sp_g) * (1.0 - 1e-12);
        let mut lo = p_hi * 1e-12;
        let mut hi = p_hi;
        let alo = area(lo);
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if area(mid).signum() == alo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let ps = 0.5 * (lo + hi);
        (gas_root(ps), liq_root(ps), ps)
    }

    #[test]
    fn maxwell_matches_brute_force_oracle() {
        let p = params(0.6);
        let got = maxwell_coexistence(&p).unwrap();
        let (og, ol, ops) = maxwell_oracle(&p);
        assert!((got.rho_g - og).abs() < 1e-8, "rho_g {} vs {og}", got.rho_g);
        assert!((got.rho_l - ol).abs() < 1e-8, "rho_l {} vs {ol}", got.rho_l);
        assert!((got.p_sat - ops).abs() < 1e-8 * ops.max(1e-9));
    }

    #[test]
    fn maxwell_near_critical_merges() {
        // Mean-field scaling gives drho ~ sqrt(1 - T_r), so the gap closes
        // slowly: 0.68 rho_c at T_r = 0.99 and below 0.2 rho_c by 0.9999.
        let mut prev = f64::INFINITY;
        for t_r in [0.9, 0.99, 0.999, 0.9999] {
            let p = params(t_r);
            let c = maxwell_coexistence(&p).unwrap();
            let gap = c.rho_l - c.rho_g;
            assert!(gap < prev, "gap must shrink toward T_c");
            prev = gap;
        }
        let p = params(0.9999);
        let c = maxwell_coexistence(&p).unwrap();
        assert!(c.rho_l - c.rho_g < 0.2 * p.rho_c);
    }

    #[test]
    fn maxwell_rejects_supercritical() {
        let p = ThermoParams::new(1.2).unwrap();
        assert!(matches!(
            maxwell_coexistence(&p),
            Err(CoreError::NoTwoPhase { .. })
        ));
    }

    #[test]
    fn coexistence_sweep_consistency() {
        for t_r in [0.5, 0.6, 0.7, 0.8, 0.9] {
            let p = params(t_r);
            let c = maxwell_coexistence(&p).unwrap();
            assert!(0.0 < c.rho_g && c.rho_g < p.rho_c && p.rho_c < c.rho_l && c.rho_l < p.rho_max());
            let dp = (p.p0(c.rho_g) - p.p0(c.rho_l)).abs();
            assert!(dp < 1e-8, "t_r={t_r}: pressure mismatch {dp}");
            let dmu = (p.mu0(c.rho_g) - p.mu0(c.rho_l)).abs();
            assert!(dmu < 1e-8, "t_r={t_r}: mu mismatch {dmu}");
        }
    }

    #[test]
    fn stencils_exact_on_polynomials() {
        let grid = Grid::new(16, 16);
        let mut quad = grid.scalar();
        let mut lin = grid.scalar();
        for y in 0..16 {
            for x in 0..16 {
                quad[grid.idx(x, y)] = (x * x + y * y) as f64;
                lin[grid.idx(x, y)] = 3.0 * x as f64 - 2.0 * y as f64;
            }
        }
        // Interior nodes only: the polynomial is not periodic.
        for y in 2..14 {
            for x in 2..14 {
                let lap = laplacian_4th(&quad, grid, x, y);
                assert_eq!(lap, 4.0, "laplacian at ({x},{y})");
                let g = gradient_4th(&lin, grid, x, y);
                assert_eq!(g[0], 3.0);
                assert_eq!(g[1], -2.0);
            }
        }
    }

    #[test]
    fn stencil_convergence_order() {
        let err = |n: usize| -> f64 {
            let grid = Grid::new(n, 5);
            let mut f = grid.scalar();
            let k = 2.0 * std::f64::consts::PI / n as f64;
            for x in 0..n {
                let v = (k * x as f64).sin();
                for y in 0..5 {
                    f[grid.idx(x, y)] = v;
                }
            }
            let mut worst: f64 = 0.0;
            for x in 0..n {
                let lap = laplacian_4th(&f, grid, x, 2);
                let exact = -k * k * (k * x as f64).sin();
                worst = worst.max((lap - exact).abs());
            }
            worst
        };
        let e32 = err(32);
        let e64 = err(64);
        let order = (e32 / e64).log2();
        assert!(order >= 3.8, "observed order {order}");
    }

    #[test]
    fn mu_field_uniform_density() {
        let grid = Grid::new(12, 10);
        let p = params(0.6);
        let rho0 = 1.7;
        let rho = grid.scalar_filled(rho0);
        let kind = vec![NodeKind::Fluid; grid.len()];
        let mut mu = grid.scalar();
        chemical_potential_field(&rho, &kind, grid, &p, &mut mu).unwrap();
        let expect = p.k2() * p.mu0(rho0);
        for v in &mu {
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn mu_field_reports_node_on_domain_error() {
        let grid = Grid::new(8, 8);
        let p = params(0.6);
        let mut rho = grid.scalar_filled(1.0);
        rho[grid.idx(3, 5)] = -0.5;
        let kind = vec![NodeKind::Fluid; grid.len()];
        let mut mu = grid.scalar();
        let err = chemical_potential_field(&rho, &kind, grid, &p, &mut mu).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(3, 5)"), "{msg}");
    }

    #[test]
    fn nonideal_force_zero_on_uniform_field() {
        let grid = Grid::new(10, 10);
        let p = params(0.6);
        let rho = grid.scalar_filled(2.2);
        let kind = vec![NodeKind::Fluid; grid.len()];
        let mut mu = grid.scalar();
        chemical_potential_field(&rho, &kind, grid, &p, &mut mu).unwrap();
        for y in 0..10 {
            for x in 0..10 {
                let f = nonideal_force(&rho, &mu, grid, x, y);
                assert!(f[0].abs() < 1e-14 && f[1].abs() < 1e-14);
            }
        }
    }

    #[test]
    fn free_energy_uniform_and_gradient_penalty() {
        let grid = Grid::new(10, 8);
        let p = params(0.6);
        let rho0 = 2.0;
        let rho = grid.scalar_filled(rho0);
        let kind = vec![NodeKind::Fluid; grid.len()];
        let base = free_energy_total(&rho, &kind, grid, &p);
        let expect = grid.len() as f64 * p.psi(rho0);
        assert!((base - expect).abs() < 1e-9 * expect.abs());
        // Perturbing the field adds gradient energy (and bulk curvature).
        let mut bumpy = rho.clone();
        for y in 0..8 {
            for x in 0..10 {
                bumpy[grid.idx(x, y)] = rho0 + 0.05 * ((x as f64) * 0.7).sin();
            }
        }
        let with_grad = free_energy_total(&bumpy, &kind, grid, &p);
        assert!(with_grad > base);
    }
}
