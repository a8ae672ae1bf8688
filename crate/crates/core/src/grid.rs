//! Periodic uniform grid, cell-average projection and state snapshots.
//!
//! Cell `j` is centred at `x_j = j h` and spans `[(j - 1/2) h, (j + 1/2) h)`,
//! so the computational domain is `[-h/2, L - h/2)`. With this layout the
//! centres of a coarse grid coincide with centres of every dyadic refinement
//! of it, which the L1 error sampling relies on.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sub-points per cell for the midpoint rule on tabulated profiles.
const MIDPOINT_SUBCELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    n_cells: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(length: f64, n_cells: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be > 0, got {length}")));
        }
        if n_cells == 0 {
            return Err(Error::InvalidGrid("at least one cell is required".into()));
        }
        Ok(Self {
            length,
            n_cells,
            h: length / n_cells as f64,
        })
    }

    /// Grid with cell width `h`; `length / h` must be an integer to 1e-9 relative.
    pub fn with_spacing(length: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("h must be > 0, got {h}")));
        }
        let ratio = length / h;
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > 1e-9 * ratio {
            return Err(Error::InvalidGrid(format!(
                "length / h = {ratio} is not a positive integer"
            )));
        }
        let mut grid = Self::new(length, m as usize)?;
        // keep the caller's h bit-for-bit so kernels built from it match
        grid.h = h;
        Ok(grid)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn center(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(|j| self.center(j))
    }

    /// `(j + offset) mod M` for any signed offset.
    #[inline]
    pub fn wrap(&self, j: usize, offset: isize) -> usize {
        (j as isize + offset).rem_euclid(self.n_cells as isize) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub grid: Grid1D,
    pub time: f64,
    pub rho: Vec<f64>,
}

impl GridState {
    pub fn new(grid: Grid1D, rho: Vec<f64>) -> Result<Self> {
        if rho.len() != grid.n_cells() {
            return Err(Error::InvalidGrid(format!(
                "state has {} entries, grid has {} cells",
                rho.len(),
                grid.n_cells()
            )));
        }
        if let Some(x) = rho.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite density {x}")));
        }
        Ok(Self { grid, time: 0.0, rho })
    }

    pub fn uniform(grid: Grid1D, value: f64) -> Self {
        Self {
            grid,
            time: 0.0,
            rho: vec![value; grid.n_cells()],
        }
    }

    pub fn min(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Profile CSV with header `x,rho`.
    pub fn write_profile_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,rho")?;
        for (x, r) in self.grid.centers().zip(&self.rho) {
            writeln!(out, "{x},{r}")?;
        }
        Ok(())
    }
}

/// `h * sum_j rho_j`, summed left to right.
pub fn total_mass(state: &GridState) -> f64 {
    state.grid.h() * state.rho.iter().sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// Periodic step function. Each `(position, value)` pair starts a piece
    /// that runs to the next position; the last piece wraps to the first.
    PiecewiseConstant { breakpoints: Vec<(f64, f64)> },
    /// Uniform samples `values[i] = rho0(i L / n)`, linearly interpolated
    /// with periodic wrap.
    Tabulated { values: Vec<f64> },
}

impl InitialData {
    /// Three-plateau datum: `1` on `[1/3, 2/3]`, `1/3` elsewhere, on `[0, 1)`.
    pub fn jam_plateau(plateau: f64) -> Self {
        InitialData::PiecewiseConstant {
            breakpoints: vec![(0.0, 1.0 / 3.0), (1.0 / 3.0, plateau), (2.0 / 3.0, 1.0 / 3.0)],
        }
    }

    pub fn constant(value: f64) -> Self {
        InitialData::PiecewiseConstant {
            breakpoints: vec![(0.0, value)],
        }
    }

    /// Pointwise shift of every value.
    pub fn shifted(&self, delta: f64) -> Self {
        match self {
            InitialData::PiecewiseConstant { breakpoints } => InitialData::PiecewiseConstant {
                breakpoints: breakpoints.iter().map(|&(x, v)| (x, v + delta)).collect(),
            },
            InitialData::Tabulated { values } => InitialData::Tabulated {
                values: values.iter().map(|v| v + delta).collect(),
            },
        }
    }

    pub fn validate(&self, length: f64, rho_max: f64) -> Result<()> {
        let in_range = |v: f64| v.is_finite() && (0.0..=rho_max).contains(&v);
        match self {
            InitialData::PiecewiseConstant { breakpoints } => {
                if breakpoints.is_empty() {
                    return Err(Error::InvalidInitialData("no breakpoints".into()));
                }
                for w in breakpoints.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::InvalidInitialData("breakpoints must be strictly increasing".into()));
                    }
                }
                for &(x, v) in breakpoints {
                    if !(0.0..length).contains(&x) {
                        return Err(Error::InvalidInitialData(format!("breakpoint {x} outside [0, {length})")));
                    }
                    if !in_range(v) {
                        return Err(Error::InvalidInitialData(format!("value {v} outside [0, {rho_max}]")));
                    }
                }
            }
            InitialData::Tabulated { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidInitialData("empty table".into()));
                }
                if let Some(v) = values.iter().find(|v| !in_range(**v)) {
                    return Err(Error::InvalidInitialData(format!("value {v} outside [0, {rho_max}]")));
                }
            }
        }
        Ok(())
    }

    /// Pointwise value at `x`, periodic in the domain length.
    pub fn eval(&self, x: f64, length: f64) -> f64 {
        let x = x.rem_euclid(length);
        match self {
            InitialData::PiecewiseConstant { breakpoints } => breakpoints
                .iter()
                .rev()
                .find(|(p, _)| *p <= x)
                .or(breakpoints.last())
                .map(|(_, v)| *v)
                .unwrap_or(0.0),
            InitialData::Tabulated { values } => {
                let n = values.len();
                let s = x / length * n as f64;
                let i = (s.floor() as usize).min(n - 1);
                let t = s - i as f64;
                values[i] * (1.0 - t) + values[(i + 1) % n] * t
            }
        }
    }

    /// Pieces `(start, end, value)` covering `[0, length)`.
    fn pieces(breakpoints: &[(f64, f64)], length: f64) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(breakpoints.len() + 1);
        let last = breakpoints.last().map(|b| b.1).unwrap_or(0.0);
        if breakpoints[0].0 > 0.0 {
            out.push((0.0, breakpoints[0].0, last));
        }
        for (i, &(x, v)) in breakpoints.iter().enumerate() {
            let end = breakpoints.get(i + 1).map(|b| b.0).unwrap_or(length);
            out.push((x, end, v));
        }
        out
    }
}

/// Cell averages of the initial datum.
///
/// Piecewise-constant data are integrated exactly by intersecting pieces
/// with the cell; tabulated data use a composite midpoint rule.
pub fn project_initial(data: &InitialData, grid: &Grid1D) -> Result<GridState> {
    let h = grid.h();
    let length = grid.length();
    let rho = match data {
        InitialData::PiecewiseConstant { breakpoints } => {
            if breakpoints.is_empty() {
                return Err(Error::InvalidInitialData("no breakpoints".into()));
            }
            let pieces = InitialData::pieces(breakpoints, length);
            (0..grid.n_cells())
                .map(|j| {
                    let a = (j as f64 - 0.5) * h;
                    let b = (j as f64 + 0.5) * h;
                    // only cell 0 straddles the periodic seam
                    let spans = if a < 0.0 {
                        [(a + length, length), (0.0, b)]
                    } else {
                        [(a, b), (0.0, 0.0)]
                    };
                    let mut integral = 0.0;
                    let mut width = 0.0;
                    for (lo, hi) in spans {
                        if hi <= lo {
                            continue;
                        }
                        width += hi - lo;
                        for &(s, e, v) in &pieces {
                            let overlap = hi.min(e) - lo.max(s);
                            if overlap > 0.0 {
                                integral += v * overlap;
                            }
                        }
                    }
                    integral / width
                })
                .collect()
        }
        InitialData::Tabulated { .. } => (0..grid.n_cells())
            .map(|j| {
                let a = (j as f64 - 0.5) * h;
                let sub = h / MIDPOINT_SUBCELLS as f64;
                (0..MIDPOINT_SUBCELLS)
                    .map(|k| data.eval(a + (k as f64 + 0.5) * sub, length))
                    .sum::<f64>()
                    / MIDPOINT_SUBCELLS as f64
            })
            .collect(),
    };
    GridState::new(*grid, rho)
}
