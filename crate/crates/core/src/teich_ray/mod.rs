//! The Teichmüller ray of `dz²` on a slit domain, realised as the vertical
//! squeeze `(x, y) ↦ (x, εy)`, with convergence experiments and the uniform
//! weak* non-convergence certificate for the comb.

mod criterion;

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::comb_counterexample::{build_comb, comb_sets};
use crate::error::{invalid, Result};
use crate::flat_geometry::{BoundarySet, SlitDomain};
use crate::modulus::{
    grid_modulus_with, relative_distance, reldist_bound_from_delta, ModulusOptions, ModulusResult,
};
use crate::scalar::Coord;
use crate::trajectories::vertical_family_modulus;

pub use criterion::{
    comb_boxes, criterion_check, ArcBox, BoxMeasure, CombMeasure, CriterionBoxes,
    CriterionConstants, LiouvilleCurrent,
};

/// Image of `dom` under `(x, y) ↦ (x, εy)`.
pub fn squeeze<C: Coord>(dom: &SlitDomain<C>, eps: &C) -> Result<SlitDomain<C>> {
    check_eps(eps)?;
    dom.affine(&C::one(), &C::zero(), eps, &C::zero())
}

/// A boundary set of `dom` carried to `image = squeeze(dom, eps)`.
pub fn squeeze_set<C: Coord>(
    set: &BoundarySet<C>,
    image: &SlitDomain<C>,
    eps: &C,
) -> Result<BoundarySet<C>> {
    set.transport(image, &C::one(), eps)
}

fn check_eps<C: Coord>(eps: &C) -> Result<()> {
    if *eps <= C::zero() || *eps > C::one() {
        return invalid("squeeze factor must lie in (0, 1]");
    }
    Ok(())
}

/// `ε · mod(T_ε Γ(e, f))` on the cells `h × εh`, the images of the square
/// cells of side `h`. Value, extrapolation and error bar are scaled by `ε`;
/// `conjugate` stays the unscaled conjugate modulus of the squeezed family.
pub fn ray_modulus<C: Coord>(
    dom: &SlitDomain<C>,
    e: &BoundarySet<C>,
    f: &BoundarySet<C>,
    eps: &C,
    h: &C,
) -> Result<ModulusResult> {
    ray_modulus_with(dom, e, f, eps, h, &ModulusOptions::default())
}

pub fn ray_modulus_with<C: Coord>(
    dom: &SlitDomain<C>,
    e: &BoundarySet<C>,
    f: &BoundarySet<C>,
    eps: &C,
    h: &C,
    opts: &ModulusOptions,
) -> Result<ModulusResult> {
    let image = squeeze(dom, eps)?;
    let se = squeeze_set(e, &image, eps)?;
    let sf = squeeze_set(f, &image, eps)?;
    let hy = h.clone() * eps.clone();
    let mut r = grid_modulus_with::<f64, C>(&image, &se, &sf, h, &hy, opts)?;
    let s = eps.to_f64();
    r.value *= s;
    r.extrapolated *= s;
    r.error_bar *= s;
    Ok(r)
}

/// One row of a convergence report.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SqueezeSample {
    pub eps: f64,
    /// `ε · mod(T_ε Γ)`, extrapolated.
    pub eps_mod: f64,
    pub target: f64,
    pub gap: f64,
    pub error_bar: f64,
}

/// A squeeze schedule for one family.
#[derive(Clone, Debug)]
pub struct SqueezeExperiment<C> {
    pub domain: SlitDomain<C>,
    pub e: BoundarySet<C>,
    pub f: BoundarySet<C>,
    pub epsilons: Vec<C>,
    pub h: C,
    pub target: C,
    pub results: Vec<SqueezeSample>,
}

/// Flags of a finished experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<SqueezeSample>,
    /// Gaps shrink along the schedule up to the error bars.
    pub monotone: bool,
    /// Gap at the smallest `ε`.
    pub final_gap: f64,
    /// `ε · mod ≥ target − error_bar` at every `ε`.
    pub lower_bound_ok: bool,
}

impl<C: Coord> SqueezeExperiment<C> {
    pub fn new(
        domain: SlitDomain<C>,
        e: BoundarySet<C>,
        f: BoundarySet<C>,
        epsilons: Vec<C>,
        h: C,
    ) -> Result<Self> {
        if epsilons.is_empty() {
            return invalid("empty squeeze schedule");
        }
        for eps in &epsilons {
            check_eps(eps)?;
        }
        if epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("squeeze schedule must be strictly decreasing");
        }
        let target = vertical_family_modulus(&domain, &e, &f);
        Ok(Self {
            domain,
            e,
            f,
            epsilons,
            h,
            target,
            results: Vec::new(),
        })
    }

    /// Dyadic schedule `ε = 2^-j`, `j = 1..=n`.
    pub fn dyadic(
        domain: SlitDomain<C>,
        e: BoundarySet<C>,
        f: BoundarySet<C>,
        n: u32,
        h: C,
    ) -> Result<Self> {
        if n == 0 || n > 40 {
            return invalid("dyadic schedule length must lie in 1..=40");
        }
        let eps = (1..=n).map(|j| C::from_ratio(1, 1i64 << j)).collect();
        Self::new(domain, e, f, eps, h)
    }
}

/// Runs every `ε` of the schedule and fills `exp.results`.
pub fn run_convergence<C: Coord>(exp: &mut SqueezeExperiment<C>) -> Result<ConvergenceReport> {
    let target = exp.target.to_f64();
    let rows = exp
        .epsilons
        .par_iter()
        .map(|eps| {
            let r = ray_modulus(&exp.domain, &exp.e, &exp.f, eps, &exp.h)?;
            Ok(SqueezeSample {
                eps: eps.to_f64(),
                eps_mod: r.extrapolated,
                target,
                gap: (r.extrapolated - target).abs(),
                error_bar: r.error_bar,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    exp.results = rows.clone();
    let slack = 1e-8 * target.abs().max(1.0);
    let monotone = rows
        .windows(2)
        .all(|w| w[1].gap <= w[0].gap + w[0].error_bar + w[1].error_bar + slack);
    let lower_bound_ok = rows
        .iter()
        .all(|r| r.eps_mod >= target - r.error_bar - slack);
    Ok(ConvergenceReport {
        final_gap: rows.last().map_or(f64::NAN, |r| r.gap),
        rows,
        monotone,
        lower_bound_ok,
    })
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,eps_mod,target,gap,error_bar\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.eps, r.eps_mod, r.target, r.gap, r.error_bar
            );
        }
        s
    }
}

/// Constants of the comb certificate.
pub const C1_PRIME: f64 = 9.0 * PI / 4.0;
pub const C2_PRIME: f64 = 1.0 / 3.0;
pub const DELTA_PRIME: f64 = 1.0 / (25.0 * PI);
pub const C3_PRIME: f64 = 1.0 / 3.0;

/// The five conditions at one level `k`.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateRecord {
    pub k: u32,
    pub a_val: f64,
    pub a_err: f64,
    pub a_bound: f64,
    /// Relative distance of `E_k` and `F_k`.
    pub a_reldist: f64,
    pub a_pass: bool,
    pub b_val: f64,
    pub b_err: f64,
    pub b_bound: f64,
    pub b_pass: bool,
    /// `(E¹,F¹)`, `(E¹,F²)`, `(E²,F¹)`, `(E²,F²)`.
    pub c_vals: [f64; 4],
    pub c_errs: [f64; 4],
    pub c_bound: f64,
    pub c_pass: bool,
    pub d_val: f64,
    pub d_bound: f64,
    pub d_pass: bool,
    pub e_eps: f64,
    pub e_val: f64,
    pub e_err: f64,
    pub e_bound: f64,
    /// `ε / mod` of the squeezed conjugate family.
    pub e_conjugate: Option<f64>,
    pub e_pass: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniformWeakStarCertificate {
    pub k_max: u32,
    pub h: f64,
    pub records: Vec<CertificateRecord>,
}

impl UniformWeakStarCertificate {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    /// The records as a JSON array.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("plain records")
    }
}

/// Checks the five conditions on the comb with levels `1..=k_max` at cell
/// width `h`. Levels run in parallel; records come back in `k` order.
pub fn certify_counterexample<C: Coord>(k_max: u32, h: &C) -> Result<UniformWeakStarCertificate> {
    let dom = build_comb::<C>(k_max)?;
    let records = (1..=k_max)
        .into_par_iter()
        .map(|k| certify_level(&dom, k_max, k, h))
        .collect::<Result<Vec<_>>>()?;
    Ok(UniformWeakStarCertificate {
        k_max,
        h: h.to_f64(),
        records,
    })
}

fn certify_level<C: Coord>(
    dom: &SlitDomain<C>,
    k_max: u32,
    k: u32,
    h: &C,
) -> Result<CertificateRecord> {
    let s = comb_sets(dom, k_max, k)?;
    let opts = ModulusOptions::default();
    let solve = |e: &BoundarySet<C>, f: &BoundarySet<C>| {
        grid_modulus_with::<f64, C>(dom, e, f, h, h, &opts)
    };

    let a = solve(&s.e, &s.f)?;
    let a_reldist = relative_distance(&s.e, &s.f)?;
    let a_bound = C1_PRIME;
    let b = solve(&s.e_prime, &s.f_prime)?;
    let mixed = [
        (&s.e1, &s.f1),
        (&s.e1, &s.f2),
        (&s.e2, &s.f1),
        (&s.e2, &s.f2),
    ]
    .par_iter()
    .map(|(e, f)| solve(e, f))
    .collect::<Result<Vec<_>>>()?;
    let c_vals = [0, 1, 2, 3].map(|i| mixed[i].extrapolated);
    let c_errs = [0, 1, 2, 3].map(|i| mixed[i].error_bar);
    let d = vertical_family_modulus(dom, &s.f, &s.e);
    let d_bound = C::from_ratio(1, 1i64 << k);
    let eps = C::from_ratio(1, 1i64 << k);
    let e = ray_modulus_with(dom, &s.f_prime, &s.e_prime, &eps, h, &opts)?;
    let e_eps = eps.to_f64();

    let a_pass = a.extrapolated + a.error_bar < a_bound
        && reldist_bound_from_delta(a_reldist)? <= a_bound + 1e-12;
    let b_pass = b.extrapolated - b.error_bar > C2_PRIME;
    let c_pass = (0..4).all(|i| c_vals[i] - c_errs[i] > DELTA_PRIME);
    let d_pass = d.same(&d_bound);
    let e_pass = e.extrapolated - e.error_bar > C3_PRIME;
    Ok(CertificateRecord {
        k,
        a_val: a.extrapolated,
        a_err: a.error_bar,
        a_bound,
        a_reldist,
        a_pass,
        b_val: b.extrapolated,
        b_err: b.error_bar,
        b_bound: C2_PRIME,
        b_pass,
        c_vals,
        c_errs,
        c_bound: DELTA_PRIME,
        c_pass,
        d_val: d.to_f64(),
        d_bound: d_bound.to_f64(),
        d_pass,
        e_eps,
        e_val: e.extrapolated,
        e_err: e.error_bar,
        e_bound: C3_PRIME,
        e_conjugate: e.conjugate.map(|c| e_eps / c),
        e_pass,
        pass: a_pass && b_pass && c_pass && d_pass && e_pass,
    })
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
    fn squeeze_square() {
        let dom = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let s = squeeze(&dom, &q(1, 2)).unwrap();
        assert_eq!(s.bbox(), (q(0, 1), q(0, 1), q(1, 1), q(1, 2)));
        assert_eq!(squeeze(&dom, &q(1, 1)).unwrap().outer(), dom.outer());
        assert!(squeeze(&dom, &q(0, 1)).is_err());
        assert!(squeeze(&dom, &q(3, 2)).is_err());
    }

    #[test]
    fn rectangle_ray_is_constant() {
        let dom = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let e = BoundarySet::facing(&dom, Facing::Bottom).unwrap();
        let f = BoundarySet::facing(&dom, Facing::Top).unwrap();
        for j in [0, 2, 5] {
            let r = ray_modulus(&dom, &e, &f, &q(1, 1 << j), &q(1, 16)).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "{j}: {r:?}");
        }
    }

    #[test]
    fn schedule_validation() {
        let dom = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let e = BoundarySet::facing(&dom, Facing::Bottom).unwrap();
        let f = BoundarySet::facing(&dom, Facing::Top).unwrap();
        let bad = SqueezeExperiment::new(
            dom.clone(),
            e.clone(),
            f.clone(),
            vec![q(1, 4), q(1, 2)],
            q(1, 8),
        );
        assert!(bad.is_err());
        let mut exp = SqueezeExperiment::dyadic(dom, e, f, 3, q(1, 8)).unwrap();
        let rep = run_convergence(&mut exp).unwrap();
        assert_eq!(exp.results.len(), 3);
        assert!(rep.monotone && rep.lower_bound_ok && rep.final_gap < 1e-8);
        assert_eq!(rep.to_csv().lines().count(), 4);
    }
}
