//! Conformal moduli of connecting curve families: a capacity solver on slit
//! domains, disk quadrilateral moduli and two-sided bounds.

mod analytic;
pub mod grid;
pub mod solver;

use serde::Serialize;

pub use crate::trajectories::vertical_family_modulus;
pub use analytic::{
    disk_box_modulus, disk_box_with_modulus, excess_for_modulus, liouville_for_modulus,
    mod_liouville_gap, quadrilateral_modulus, quadrilateral_modulus_excess, relative_distance,
    reldist_bound, reldist_bound_from_delta, slit_bounds,
};
pub use grid::{BoundaryFace, CellClass, FaceDir, FaceLabel, Grid};
pub use solver::{Multigrid, Operator, SolveStats};

use crate::error::Result;
use crate::flat_geometry::{boundary_complement, BoundarySet, SlitDomain};
use crate::scalar::{Coord, Real};

#[derive(Clone, Copy, Debug)]
pub struct ModulusOptions {
    /// Relative residual at which CG stops.
    pub rtol: f64,
    pub max_iter: usize,
    /// Solve the conjugate family and report the reciprocity gap.
    pub conjugate: bool,
    /// Also solve on the 2h and 4h grids and extrapolate.
    pub richardson: bool,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            max_iter: 1_000_000,
            conjugate: true,
            richardson: true,
        }
    }
}

/// Result of a grid modulus computation.
#[derive(Clone, Debug, Serialize)]
pub struct ModulusResult {
    /// Discrete energy on the finest grid.
    pub value: f64,
    /// Cell width of the finest grid.
    pub h: f64,
    /// `|value · conjugate − 1|` when the conjugate family was solved.
    pub reciprocity_gap: Option<f64>,
    pub extrapolated: f64,
    /// Infinite when no coarser grid resolves the configuration.
    pub error_bar: f64,
    /// Modulus of the conjugate family on the finest grid.
    #[serde(skip)]
    pub conjugate: Option<f64>,
    /// Observed convergence order, when fitted.
    #[serde(skip)]
    pub order: Option<f64>,
    #[serde(skip)]
    pub iterations: usize,
}

impl ModulusResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain record")
    }

    /// `[extrapolated − error_bar, extrapolated + error_bar]`.
    pub fn interval(&self) -> (f64, f64) {
        (
            self.extrapolated - self.error_bar,
            self.extrapolated + self.error_bar,
        )
    }
}

/// Energy of the discrete potential and CG statistics on one grid.
pub fn solve_grid<T: Real, C: Coord>(
    grid: &Grid<C>,
    opts: &ModulusOptions,
) -> Result<(f64, SolveStats)> {
    let (op, b) = grid.system::<T>();
    let mg = Multigrid::new(op)?;
    let (u, stats) = solver::pcg(&mg, &b, opts.rtol, opts.max_iter)?;
    Ok((grid.energy(mg.fine(), &u), stats))
}

/// Modulus of the family of curves joining `e` to `f` in `dom`, on square
/// cells of side `h`.
pub fn grid_modulus<C: Coord>(
    dom: &SlitDomain<C>,
    e: &BoundarySet<C>,
    f: &BoundarySet<C>,
    h: &C,
) -> Result<ModulusResult> {
    grid_modulus_with::<f64, C>(dom, e, f, h, h, &ModulusOptions::default())
}

/// As [`grid_modulus`] with `hx × hy` cells, solver scalar `T` and options.
pub fn grid_modulus_with<T: Real, C: Coord>(
    dom: &SlitDomain<C>,
    e: &BoundarySet<C>,
    f: &BoundarySet<C>,
    hx: &C,
    hy: &C,
    opts: &ModulusOptions,
) -> Result<ModulusResult> {
    let fine = Grid::with_cells(dom, e, f, hx, hy, true)?;
    let two = C::from_i64(2);
    let four = C::from_i64(4);
    let coarse = |m: &C| {
        Grid::with_cells(
            dom,
            e,
            f,
            &(hx.clone() * m.clone()),
            &(hy.clone() * m.clone()),
            false,
        )
        .ok()
    };

    let (fine_result, (coarse_values, conj)) = rayon::join(
        || solve_grid::<T, C>(&fine, opts),
        || {
            let coarse_values = if opts.richardson {
                let g2 = coarse(&two);
                let g4 = g2.as_ref().and_then(|_| coarse(&four));
                let v2 = g2
                    .map(|g| solve_grid::<T, C>(&g, opts).map(|r| r.0))
                    .transpose();
                let v4 = g4
                    .map(|g| solve_grid::<T, C>(&g, opts).map(|r| r.0))
                    .transpose();
                (v2, v4)
            } else {
                (Ok(None), Ok(None))
            };
            let conj = if opts.conjugate {
                conjugate_value::<T, C>(dom, e, f, hx, hy, opts)
            } else {
                Ok(None)
            };
            (coarse_values, conj)
        },
    );
    let (value, stats) = fine_result?;
    let v2 = coarse_values.0?;
    let v4 = coarse_values.1?;
    let conj = conj?;
    let (extrapolated, error_bar, order) = richardson(value, v2, v4);
    Ok(ModulusResult {
        value,
        h: hx.to_f64(),
        reciprocity_gap: conj.map(|c| (value * c - 1.0).abs()),
        conjugate: conj,
        extrapolated,
        error_bar,
        order,
        iterations: stats.iterations,
    })
}

/// Modulus of the conjugate family: Dirichlet data on the two components of
/// the boundary minus `e ∪ f`.
fn conjugate_value<T: Real, C: Coord>(
    dom: &SlitDomain<C>,
    e: &BoundarySet<C>,
    f: &BoundarySet<C>,
    hx: &C,
    hy: &C,
    opts: &ModulusOptions,
) -> Result<Option<f64>> {
    if !dom.is_simply_connected() {
        return Ok(None);
    }
    let Ok(gaps) = boundary_complement(dom, e, f) else {
        return Ok(None);
    };
    if gaps.len() != 2 {
        return Ok(None);
    }
    let grid = Grid::with_cells(dom, &gaps[0], &gaps[1], hx, hy, true)?;
    Ok(Some(solve_grid::<T, C>(&grid, opts)?.0))
}

/// Extrapolated value, error bar and fitted order from the `h`, `2h`, `4h`
/// values.
pub fn richardson(f1: f64, f2: Option<f64>, f4: Option<f64>) -> (f64, f64, Option<f64>) {
    let Some(f2) = f2 else {
        return (f1, f64::INFINITY, None);
    };
    let d12 = f1 - f2;
    if d12 == 0.0 {
        return (f1, 0.0, None);
    }
    let p = match f4 {
        Some(f4) => {
            let d24 = f2 - f4;
            if d24 == 0.0 || d24.signum() != d12.signum() {
                // Non-monotone refinement: no extrapolation.
                return (f1, 1.25 * d12.abs().max(d24.abs()), None);
            }
            (d24 / d12).log2().clamp(0.5, 4.0)
        }
        None => 1.0,
    };
    let corr = d12 / (2f64.powf(p) - 1.0);
    (f1 + corr, 1.25 * corr.abs(), Some(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_geometry::{build_rectangle, Facing};
    use crate::scalar::Exact;

    fn q(p: i64, d: i64) -> Exact {
        Exact::new(p, d)
    }

    #[test]
    fn unit_square() {
        let dom = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let e = BoundarySet::facing(&dom, Facing::Left).unwrap();
        let f = BoundarySet::facing(&dom, Facing::Right).unwrap();
        let r = grid_modulus(&dom, &e, &f, &q(1, 32)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.reciprocity_gap.unwrap() < 1e-8);
    }

    #[test]
    fn wide_rectangle() {
        let dom = build_rectangle(q(2, 1), q(1, 1)).unwrap();
        let e = BoundarySet::facing(&dom, Facing::Left).unwrap();
        let f = BoundarySet::facing(&dom, Facing::Right).unwrap();
        let r = grid_modulus(&dom, &e, &f, &q(1, 16)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn richardson_fits_order() {
        // f(h) = 1 + h²
        let (x, bar, p) = richardson(
            1.0 + 1.0 / 64.0,
            Some(1.0 + 4.0 / 64.0),
            Some(1.0 + 16.0 / 64.0),
        );
        assert!((x - 1.0).abs() < 1e-12);
        assert!((bar - 1.25 / 64.0).abs() < 1e-12);
        assert!((p.unwrap() - 2.0).abs() < 1e-12);
    }
}
