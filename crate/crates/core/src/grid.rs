//! Rectangular periodic grid and flat scalar/vector field storage.

/// Per-node classification. Solid layers 1 and 2 carry extrapolated densities
/// and assigned wetting chemical potentials; deep solid is never read by any
/// fluid-node stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum NodeKind {
    Fluid = 0,
    SolidLayer1 = 1,
    SolidLayer2 = 2,
    DeepSolid = 3,
}

impl NodeKind {
    #[inline]
    pub fn is_solid(self) -> bool {
        self != NodeKind::Fluid
    }
}

/// Dimensions of a 2D lattice with periodic index wrapping.
///
/// Fields are stored row-major: `idx = y * nx + x`. Solid regions embedded in
/// the domain provide any non-periodic physics; the index arithmetic itself
/// always wraps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(nx: usize, ny: usize) -> Self {
        assert!(nx >= 5 && ny >= 5, "grid must be at least 5x5 for stencil support");
        Self { nx, ny }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny);
        y * self.nx + x
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    /// Wrap a signed x coordinate into [0, nx).
    #[inline]
    pub fn wrap_x(&self, x: i64) -> usize {
        x.rem_euclid(self.nx as i64) as usize
    }

    /// Wrap a signed y coordinate into [0, ny).
    #[inline]
    pub fn wrap_y(&self, y: i64) -> usize {
        y.rem_euclid(self.ny as i64) as usize
    }

    /// Index of the periodic neighbor at signed offset (dx, dy) from (x, y).
    #[inline]
    pub fn nbr(&self, x: usize, y: usize, dx: i64, dy: i64) -> usize {
        let xn = self.wrap_x(x as i64 + dx);
        let yn = self.wrap_y(y as i64 + dy);
        self.idx(xn, yn)
    }

    /// Allocate a zeroed scalar field over this grid.
    pub fn scalar(&self) -> Vec<f64> {
        vec![0.0; self.len()]
    }

    /// Allocate a scalar field filled with `v`.
    pub fn scalar_filled(&self, v: f64) -> Vec<f64> {
        vec![v; self.len()]
    }
}
