//! D2Q9 lattice storage, MRT collision, streaming and moment computation.
//!
//! Nine velocity directions on the square lattice:
//! ```text
//!   6   2   5
//!    \  |  /
//!   3 - 0 - 1
//!    /  |  \
//!   7   4   8
//! ```

use crate::error::{CoreError, Result};
use crate::grid::Grid;

pub const Q: usize = 9;

/// Discrete velocities e_i, lattice units per step.
pub const E: [[i32; 2]; Q] = [
    [0, 0],
    [1, 0],
    [0, 1],
    [-1, 0],
    [0, -1],
    [1, 1],
    [-1, 1],
    [-1, -1],
    [1, -1],
];

/// Quadrature weights.
pub const W: [f64; Q] = [
    4.0 / 9.0,
    1.0 / 9.0,
    1.0 / 9.0,
    1.0 / 9.0,
    1.0 / 9.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
];

/// Index of the opposite direction for each i.
pub const OPP: [usize; Q] = [0, 3, 4, 1, 2, 7, 8, 5, 6];

/// Lattice sound speed squared c_s^2.
pub const CS2: f64 = 1.0 / 3.0;

/// Equilibrium distribution f_i^eq = w_i rho [1 + 3 e·u + 9/2 (e·u)^2 - 3/2 u^2].
#[inline]
pub fn equilibrium(rho: f64, ux: f64, uy: f64) -> [f64; Q] {
    let uu = 1.5 * (ux * ux + uy * uy);
    let mut f = [0.0; Q];
    for i in 0..Q {
        let eu = E[i][0] as f64 * ux + E[i][1] as f64 * uy;
        f[i] = W[i] * rho * (1.0 + 3.0 * eu + 4.5 * eu * eu - uu);
    }
    f
}

/// Contract-checking wrapper around [`equilibrium`].
pub fn equilibrium_checked(rho: f64, ux: f64, uy: f64) -> Result<[f64; Q]> {
    if !(rho.is_finite() && ux.is_finite() && uy.is_finite()) {
        return Err(CoreError::InvalidState(format!(
            "non-finite equilibrium input rho={rho} u=({ux},{uy})"
        )));
    }
    if rho <= 0.0 {
        return Err(CoreError::InvalidState(format!("non-positive density {rho}")));
    }
    Ok(equilibrium(rho, ux, uy))
}

/// Exact-difference body-force term: F_i = f^eq(rho, u + F/rho) - f^eq(rho, u).
///
/// The nine components sum to zero and their first moment equals (fx, fy).
#[inline]
pub fn exact_difference_forcing(rho: f64, ux: f64, uy: f64, fx: f64, fy: f64) -> [f64; Q] {
    let dux = fx / rho;
    let duy = fy / rho;
    let fa = equilibrium(rho, ux + dux, uy + duy);
    let fb = equilibrium(rho, ux, uy);
    let mut out = [0.0; Q];
    for i in 0..Q {
        out[i] = fa[i] - fb[i];
    }
    out
}

/// Algebraically expanded form of [`exact_difference_forcing`], used by the
/// run loop; identical up to round-off at the cost of one equilibrium
/// evaluation instead of two.
#[inline]
pub fn edm_forcing(rho: f64, ux: f64, uy: f64, fx: f64, fy: f64) -> [f64; Q] {
    let dux = fx / rho;
    let duy = fy / rho;
    let c1 = ux * dux + uy * duy;
    let c2 = dux * dux + duy * duy;
    let common = -1.5 * (2.0 * c1 + c2);
    let mut out = [0.0; Q];
    for i in 0..Q {
        let ex = E[i][0] as f64;
        let ey = E[i][1] as f64;
        let eu = ex * ux + ey * uy;
        let ed = ex * dux + ey * duy;
        out[i] = W[i] * rho * (3.0 * ed + 4.5 * ed * (2.0 * eu + ed) + common);
    }
    out
}

/// Contract-checking wrapper around [`exact_difference_forcing`].
pub fn exact_difference_forcing_checked(
    rho: f64,
    ux: f64,
    uy: f64,
    fx: f64,
    fy: f64,
) -> Result<[f64; Q]> {
    if rho <= 0.0 || !rho.is_finite() {
        return Err(CoreError::InvalidState(format!(
            "exact-difference forcing needs rho > 0, got {rho}"
        )));
    }
    Ok(exact_difference_forcing(rho, ux, uy, fx, fy))
}

/// Raw moments of a population set: (rho, ux, uy) with u the pre-force velocity.
#[inline]
pub fn node_moments(f: &[f64; Q]) -> (f64, f64, f64) {
    let mut rho = 0.0;
    let mut jx = 0.0;
    let mut jy = 0.0;
    for i in 0..Q {
        rho += f[i];
        jx += f[i] * E[i][0] as f64;
        jy += f[i] * E[i][1] as f64;
    }
    (rho, jx / rho, jy / rho)
}

/// Moments with the half-force velocity correction: v = u + F/(2 rho).
pub fn moments(f: &[f64; Q], fx: f64, fy: f64) -> Result<(f64, [f64; 2], [f64; 2])> {
    if f.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidState("non-finite population".into()));
    }
    let (rho, ux, uy) = node_moments(f);
    if rho <= 0.0 {
        return Err(CoreError::InvalidState(format!("non-positive density {rho}")));
    }
    let v = [ux + 0.5 * fx / rho, uy + 0.5 * fy / rho];
    Ok((rho, [ux, uy], v))
}

/// Relaxation rates of the MRT collision, s_v = 1/tau.
#[derive(Debug, Clone, Copy)]
pub struct RelaxationSettings {
    pub s_e: f64,
    pub s_eps: f64,
    pub s_q: f64,
    pub tau: f64,
}

impl Default for RelaxationSettings {
    fn default() -> Self {
        Self {
            s_e: 1.64,
            s_eps: 1.54,
            s_q: 1.9,
            tau: 1.0,
        }
    }
}

impl RelaxationSettings {
    pub fn s_v(&self) -> f64 {
        1.0 / self.tau
    }

    /// All non-conserved rates must lie in (0, 2) for linear stability.
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [
            ("s_e", self.s_e),
            ("s_eps", self.s_eps),
            ("s_q", self.s_q),
            ("s_v", self.s_v()),
        ] {
            if !(s > 0.0 && s < 2.0) {
                return Err(CoreError::Config(format!(
                    "relaxation rate {name}={s} outside (0, 2)"
                )));
            }
        }
        Ok(())
    }

    /// Kinematic viscosity implied by tau.
    pub fn viscosity(&self) -> f64 {
        CS2 * (self.tau - 0.5)
    }
}

/// Moment ordering: density, energy, energy squared, momentum x, heat flux x,
/// momentum y, heat flux y, diagonal stress, off-diagonal stress.
const M_RAW: [[f64; Q]; Q] = [
    [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [-4.0, -1.0, -1.0, -1.0, -1.0, 2.0, 2.0, 2.0, 2.0],
    [4.0, -2.0, -2.0, -2.0, -2.0, 1.0, 1.0, 1.0, 1.0],
    [0.0, 1.0, 0.0, -1.0, 0.0, 1.0, -1.0, -1.0, 1.0],
    [0.0, -2.0, 0.0, 2.0, 0.0, 1.0, -1.0, -1.0, 1.0],
    [0.0, 0.0, 1.0, 0.0, -1.0, 1.0, 1.0, -1.0, -1.0],
    [0.0, 0.0, -2.0, 0.0, 2.0, 1.0, 1.0, -1.0, -1.0],
    [0.0, 1.0, -1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0],
];

/// Multiple-relaxation-time collision operator.
///
/// Relaxes each velocity moment toward its equilibrium at its own rate:
/// m' = m - S (m - m_eq), with the conserved moments (density, momentum)
/// relaxed at rate zero. The forcing term is added in population space after
/// the back-transform.
#[derive(Debug, Clone)]
pub struct MrtOperator {
    m: [[f64; Q]; Q],
    minv: [[f64; Q]; Q],
    s: [f64; Q],
}

impl MrtOperator {
    pub fn new(rs: &RelaxationSettings) -> Result<Self> {
        rs.validate()?;
        let m = M_RAW;
        // Rows of M are mutually orthogonal, so M^-1 = M^T D^-1 with
        // D = diag(row norms squared).
        let mut norms = [0.0; Q];
        for (k, row) in m.iter().enumerate() {
            norms[k] = row.iter().map(|v| v * v).sum();
        }
        let mut minv = [[0.0; Q]; Q];
        for j in 0..Q {
            for k in 0..Q {
                minv[j][k] = m[k][j] / norms[k];
            }
        }
        // Construction-time invertibility check.
        let mut err: f64 = 0.0;
        for i in 0..Q {
            for j in 0..Q {
                let mut acc = 0.0;
                for k in 0..Q {
                    acc += m[i][k] * minv[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                err = err.max((acc - expect).abs());
            }
        }
        if err > 1e-12 {
            return Err(CoreError::Config(format!(
                "MRT transform is not invertible (residual {err:e})"
            )));
        }
        let s = [
            0.0,
            rs.s_e,
            rs.s_eps,
            0.0,
            rs.s_q,
            0.0,
            rs.s_q,
            rs.s_v(),
            rs.s_v(),
        ];
        Ok(Self { m, minv, s })
    }

    /// One MRT collision on a single node. Returns the post-collision,
    /// pre-streaming populations including the forcing term.
    #[inline]
    pub fn collide_node(
        &self,
        f: &[f64; Q],
        rho: f64,
        ux: f64,
        uy: f64,
        forcing: &[f64; Q],
    ) -> [f64; Q] {
        let feq = equilibrium(rho, ux, uy);
        self.collide_with_eq(f, &feq, forcing)
    }

    /// Collision with a caller-supplied equilibrium (shared with the
    /// exact-difference forcing evaluation in the run loop).
    ///
    /// The transform pair is expanded against the integer moment basis; the
    /// conserved rows (density, momentum) have rate zero and are skipped.
    #[inline]
    pub fn collide_with_eq(&self, f: &[f64; Q], feq: &[f64; Q], forcing: &[f64; Q]) -> [f64; Q] {
        let g: [f64; Q] = std::array::from_fn(|i| f[i] - feq[i]);
        // Non-conserved moments of the deviation g.
        let s_ax = (g[1] + g[3]) + (g[2] + g[4]);
        let s_di = (g[5] + g[7]) + (g[6] + g[8]);
        let a13 = g[1] - g[3];
        let a24 = g[2] - g[4];
        let p = g[5] - g[7];
        let q = g[6] - g[8];
        let m_e = self.s[1] * (-4.0 * g[0] - s_ax + 2.0 * s_di);
        let m_eps = self.s[2] * (4.0 * g[0] - 2.0 * s_ax + s_di);
        let m_qx = self.s[4] * (-2.0 * a13 + (p - q));
        let m_qy = self.s[6] * (-2.0 * a24 + (p + q));
        let m_pxx = self.s[7] * ((g[1] + g[3]) - (g[2] + g[4]));
        let m_pxy = self.s[8] * ((g[5] + g[7]) - (g[6] + g[8]));
        // Back-transform of the relaxed deviation (conserved rows are zero).
        let e = m_e / 36.0;
        let eps = m_eps / 36.0;
        let qx = m_qx / 12.0;
        let qy = m_qy / 12.0;
        let pxx = m_pxx / 4.0;
        let pxy = m_pxy / 4.0;
        let ax = -e - 2.0 * eps;
        let di = 2.0 * e + eps;
        let d = [
            4.0 * (eps - e),
            ax - 2.0 * qx + pxx,
            ax - 2.0 * qy - pxx,
            ax + 2.0 * qx + pxx,
            ax + 2.0 * qy - pxx,
            di + qx + qy + pxy,
            di - qx + qy - pxy,
            di - qx - qy + pxy,
            di + qx - qy - pxy,
        ];
        std::array::from_fn(|i| f[i] - d[i] + forcing[i])
    }

    /// Reference implementation of the collision through the explicit matrix
    /// pair; the expanded form above must reproduce it to round-off.
    pub fn collide_matrix_reference(
        &self,
        f: &[f64; Q],
        feq: &[f64; Q],
        forcing: &[f64; Q],
    ) -> [f64; Q] {
        let mut md = [0.0; Q];
        for k in 0..Q {
            let row = &self.m[k];
            let mut a = 0.0;
            let mut b = 0.0;
            for i in 0..Q {
                a += row[i] * f[i];
                b += row[i] * feq[i];
            }
            md[k] = self.s[k] * (a - b);
        }
        let mut out = [0.0; Q];
        for i in 0..Q {
            let col = &self.minv[i];
            let mut d = 0.0;
            for k in 0..Q {
                d += col[k] * md[k];
            }
            out[i] = f[i] - d + forcing[i];
        }
        out
    }
}

/// Double-buffered D2Q9 population storage, plane-major: plane i holds f_i for
/// every node. `f` is the state at the start of a step (post-streaming),
/// `post` receives the post-collision values that streaming then propagates.
#[derive(Debug, Clone)]
pub struct LatticeField {
    pub grid: Grid,
    pub f: Vec<f64>,
    pub post: Vec<f64>,
}

impl LatticeField {
    pub fn new(grid: Grid) -> Self {
        let n = grid.len() * Q;
        Self {
            grid,
            f: vec![0.0; n],
            post: vec![0.0; n],
        }
    }

    #[inline]
    pub fn plane(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.f[i * n..(i + 1) * n]
    }

    #[inline]
    pub fn node(&self, idx: usize) -> [f64; Q] {
        let n = self.grid.len();
        std::array::from_fn(|i| self.f[i * n + idx])
    }

    #[inline]
    pub fn post_node(&self, idx: usize) -> [f64; Q] {
        let n = self.grid.len();
        std::array::from_fn(|i| self.post[i * n + idx])
    }

    #[inline]
    pub fn set_node(&mut self, idx: usize, v: &[f64; Q]) {
        let n = self.grid.len();
        for i in 0..Q {
            self.f[i * n + idx] = v[i];
        }
    }

    #[inline]
    pub fn set_post_node(&mut self, idx: usize, v: &[f64; Q]) {
        let n = self.grid.len();
        for i in 0..Q {
            self.post[i * n + idx] = v[i];
        }
    }

    /// Initialize both buffers to the equilibrium of (rho, u) per node.
    pub fn init_equilibrium(&mut self, rho: &[f64], ux: &[f64], uy: &[f64]) {
        let n = self.grid.len();
        for idx in 0..n {
            let feq = equilibrium(rho[idx], ux[idx], uy[idx]);
            for i in 0..Q {
                self.f[i * n + idx] = feq[i];
                self.post[i * n + idx] = feq[i];
            }
        }
    }

    /// Periodic advection: f_i(x + e_i, t+1) = post_i(x, t).
    ///
    /// Pure data movement over the whole grid; populations entering fluid
    /// nodes from solid neighbors are garbage here and must be overwritten by
    /// the boundary reconstruction pass.
    pub fn stream(&mut self) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let n = self.grid.len();
        for i in 0..Q {
            let src = &self.post[i * n..(i + 1) * n];
            let dst = &mut self.f[i * n..(i + 1) * n];
            let ex = E[i][0];
            let ey = E[i][1];
            for y in 0..ny {
                let ys = (y as i64 - ey as i64).rem_euclid(ny as i64) as usize;
                let srow = &src[ys * nx..(ys + 1) * nx];
                let drow = &mut dst[y * nx..(y + 1) * nx];
                match ex {
                    0 => drow.copy_from_slice(srow),
                    1 => {
                        drow[1..].copy_from_slice(&srow[..nx - 1]);
                        drow[0] = srow[nx - 1];
                    }
                    -1 => {
                        drow[..nx - 1].copy_from_slice(&srow[1..]);
                        drow[nx - 1] = srow[0];
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    /// Total mass in the `f` buffer over the nodes selected by `mask`.
    pub fn total_mass_where(&self, mask: impl Fn(usize) -> bool) -> f64 {
        let n = self.grid.len();
        let mut total = 0.0;
        for idx in 0..n {
            if mask(idx) {
                for i in 0..Q {
                    total += self.f[i * n + idx];
                }
            }
        }
        total
    }
}

/// Numerical check of the D2Q9 quadrature identities:
/// sum w = 1, sum w e = 0, sum w e_a e_b = c_s^2 delta_ab, and closure of the
/// velocity set under negation.
pub fn validate_lattice_model() -> Result<()> {
    let sum_w: f64 = W.iter().sum();
    let mut first = [0.0; 2];
    let mut second = [[0.0; 2]; 2];
    for i in 0..Q {
        for a in 0..2 {
            first[a] += W[i] * E[i][a] as f64;
            for b in 0..2 {
                second[a][b] += W[i] * (E[i][a] * E[i][b]) as f64;
            }
        }
        let o = OPP[i];
        if E[o][0] != -E[i][0] || E[o][1] != -E[i][1] {
            return Err(CoreError::Config(format!("direction {i} has no opposite")));
        }
    }
    let mut err = (sum_w - 1.0).abs();
    for a in 0..2 {
        err = err.max(first[a].abs());
        for b in 0..2 {
            let expect = if a == b { CS2 } else { 0.0 };
            err = err.max((second[a][b] - expect).abs());
        }
    }
    if err > 1e-12 {
        return Err(CoreError::Config(format!(
            "lattice quadrature identities violated (residual {err:e})"
        )));
    }
    Ok(())
}
