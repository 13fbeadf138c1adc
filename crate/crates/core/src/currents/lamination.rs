use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use super::boxes::{DiskMobius, GeodesicBox};
use crate::error::{invalid, Error, Result};
use crate::flat_geometry::{BoundarySet, SlitDomain};
use crate::qd_analytic::PolynomialQD;
use crate::scalar::{Coord, Real};
use crate::trajectories::{endpoint_pair, fibers, sample_strips, FiberEnd, TraceOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LaminationKind {
    /// Weights `Δx / l(x)`.
    Mu,
    /// Weights `Δx`.
    Nu,
    /// Any other atomic measure on geodesics.
    Other,
}

/// Weighted geodesic with endpoints `ends.0 ≤ ends.1` (angles).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom<T> {
    pub ends: (T, T),
    pub weight: T,
    /// φ-length of the sampled leaf, infinite when unknown.
    pub length: T,
}

/// Finite atomic sample of a measured lamination or current.
#[derive(Clone, Debug)]
pub struct SampledLamination<T> {
    atoms: Vec<Atom<T>>,
    pub kind: LaminationKind,
    pub source: String,
    /// Samples dropped for ending at a zero or at the length budget.
    pub skipped: usize,
}

fn normalize<T: Real>(x: T, y: T) -> (T, T) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

impl<T: Real> SampledLamination<T> {
    /// Builds a lamination, merging atoms with identical endpoint pairs.
    pub fn from_atoms(
        atoms: Vec<Atom<T>>,
        kind: LaminationKind,
        source: impl Into<String>,
    ) -> Result<Self> {
        let mut atoms: Vec<Atom<T>> = atoms
            .into_iter()
            .map(|a| Atom {
                ends: normalize(a.ends.0, a.ends.1),
                ..a
            })
            .collect();
        for a in &atoms {
            if !(a.weight >= T::zero()) || !a.weight.is_finite() {
                return invalid("atom weights must be finite and nonnegative");
            }
        }
        atoms.sort_by(|u, v| {
            u.ends
                .partial_cmp(&v.ends)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut merged: Vec<Atom<T>> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(m) if m.ends == a.ends => m.weight = m.weight + a.weight,
                _ => merged.push(a),
            }
        }
        Ok(Self {
            atoms: merged,
            kind,
            source: source.into(),
            skipped: 0,
        })
    }

    pub fn empty() -> Self {
        Self {
            atoms: Vec::new(),
            kind: LaminationKind::Other,
            source: String::new(),
            skipped: 0,
        }
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn total_mass(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| acc + a.weight)
    }

    /// Mass of the atoms whose geodesic lies in the box.
    pub fn box_mass(&self, b: &GeodesicBox<T>) -> T {
        self.atoms
            .iter()
            .filter(|a| b.contains(a.ends.0, a.ends.1))
            .fold(T::zero(), |acc, a| acc + a.weight)
    }
}

/// Mass of a box.
pub fn box_mass<T: Real>(lam: &SampledLamination<T>, b: &GeodesicBox<T>) -> T {
    lam.box_mass(b)
}

/// Raw leaf sample `(endpoints, Δx, φ-length)`.
struct Leaf<T> {
    ends: (T, T),
    dx: T,
    length: T,
}

fn build<T: Real>(
    leaves: &[Leaf<T>],
    kind: LaminationKind,
    source: &str,
    skipped: usize,
) -> Result<SampledLamination<T>> {
    let atoms = leaves
        .iter()
        .map(|l| Atom {
            ends: l.ends,
            weight: match kind {
                LaminationKind::Mu if l.length.is_finite() && l.length > T::zero() => {
                    l.dx / l.length
                }
                LaminationKind::Mu => T::zero(),
                _ => l.dx,
            },
            length: l.length,
        })
        .collect();
    let mut lam = SampledLamination::from_atoms(atoms, kind, source)?;
    lam.skipped = skipped;
    Ok(lam)
}

fn disk_leaves<T: Real>(
    qd: &PolynomialQD<T>,
    transversals: &[Vec<Complex<T>>],
    n: usize,
    opts: &TraceOptions,
) -> Result<(Vec<Leaf<T>>, usize)> {
    let strips = sample_strips(qd, transversals, n, opts)?;
    let mut leaves = Vec::new();
    let mut skipped = 0;
    for s in &strips {
        for (_, traj) in &s.samples {
            match endpoint_pair(traj) {
                Ok(ends) => leaves.push(Leaf {
                    ends,
                    dx: s.dx,
                    length: traj.phi_length,
                }),
                Err(_) => skipped += 1,
            }
        }
    }
    Ok((leaves, skipped))
}

fn describe<T: Real>(qd: &PolynomialQD<T>) -> String {
    let cs: Vec<String> = qd
        .coeffs()
        .iter()
        .map(|c| format!("({}, {})", c.re, c.im))
        .collect();
    format!("polynomial [{}]", cs.join(", "))
}

/// `μ_φ` sampled on `n` leaves crossing horizontal transversals.
pub fn sample_mu<T: Real>(
    qd: &PolynomialQD<T>,
    transversals: &[Vec<Complex<T>>],
    n: usize,
    opts: &TraceOptions,
) -> Result<SampledLamination<T>> {
    let (leaves, skipped) = disk_leaves(qd, transversals, n, opts)?;
    build(&leaves, LaminationKind::Mu, &describe(qd), skipped)
}

/// `ν_φ` sampled on the same leaves as [`sample_mu`].
pub fn sample_nu<T: Real>(
    qd: &PolynomialQD<T>,
    transversals: &[Vec<Complex<T>>],
    n: usize,
    opts: &TraceOptions,
) -> Result<SampledLamination<T>> {
    let (leaves, skipped) = disk_leaves(qd, transversals, n, opts)?;
    build(&leaves, LaminationKind::Nu, &describe(qd), skipped)
}

/// Both laminations from one tracing pass.
pub fn sample_mu_nu<T: Real>(
    qd: &PolynomialQD<T>,
    transversals: &[Vec<Complex<T>>],
    n: usize,
    opts: &TraceOptions,
) -> Result<(SampledLamination<T>, SampledLamination<T>)> {
    let (leaves, skipped) = disk_leaves(qd, transversals, n, opts)?;
    let src = describe(qd);
    Ok((
        build(&leaves, LaminationKind::Mu, &src, skipped)?,
        build(&leaves, LaminationKind::Nu, &src, skipped)?,
    ))
}

/// Circle coordinate `2π s / L ∈ (−π, π]` of outer-loop position `s`.
pub fn loop_angle<C: Coord>(dom: &SlitDomain<C>, s: &C) -> f64 {
    let len = dom.loops()[0].length.to_f64();
    let t = TAU * s.to_f64() / len;
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Box spanned by two single-arc boundary sets on the outer loop.
pub fn flat_box<C: Coord>(
    dom: &SlitDomain<C>,
    e: &BoundarySet<C>,
    f: &BoundarySet<C>,
) -> Result<GeodesicBox<f64>> {
    let [ea] = e.arcs() else {
        return invalid("box sides must be single arcs");
    };
    let [fa] = f.arcs() else {
        return invalid("box sides must be single arcs");
    };
    if ea.component != 0 || fa.component != 0 {
        return invalid("box sides must lie on the outer boundary");
    }
    GeodesicBox::new(
        loop_angle(dom, &ea.s0),
        loop_angle(dom, &ea.s1),
        loop_angle(dom, &fa.s0),
        loop_angle(dom, &fa.s1),
    )
}

fn flat_leaves<C: Coord, T: Real>(
    dom: &SlitDomain<C>,
    range: Option<(C, C)>,
    n: usize,
) -> Result<(Vec<Leaf<T>>, usize)> {
    if n == 0 {
        return invalid("need at least one sample");
    }
    let (bx0, _, bx1, _) = dom.bbox();
    let (x0, x1) = range.unwrap_or((bx0, bx1));
    if x1 <= x0 {
        return invalid("empty abscissa range");
    }
    let dx = (x1.clone() - x0.clone()) / C::from_i64(n as i64);
    let mut leaves = Vec::new();
    let mut skipped = 0;
    let end_angle = |e: &Option<FiberEnd<C>>| -> Option<f64> {
        let e = e.as_ref()?;
        (e.component == 0).then(|| loop_angle(dom, &e.s))
    };
    for k in 0..n {
        let x = x0.clone() + dx.clone() * (C::from_i64(k as i64) + C::half());
        for seg in fibers(dom, &x) {
            match (end_angle(&seg.bottom), end_angle(&seg.top)) {
                (Some(a), Some(b)) => leaves.push(Leaf {
                    ends: normalize(T::lit(a), T::lit(b)),
                    dx: T::lit(dx.to_f64()),
                    length: T::lit(seg.length().to_f64()),
                }),
                _ => skipped += 1,
            }
        }
    }
    Ok((leaves, skipped))
}

/// `μ` of the vertical foliation of a flat slit domain, sampled at `n`
/// abscissae of `range` (default: the whole domain).
pub fn sample_mu_flat<C: Coord, T: Real>(
    dom: &SlitDomain<C>,
    range: Option<(C, C)>,
    n: usize,
) -> Result<SampledLamination<T>> {
    let (leaves, skipped) = flat_leaves(dom, range, n)?;
    build(&leaves, LaminationKind::Mu, "flat slit domain", skipped)
}

pub fn sample_nu_flat<C: Coord, T: Real>(
    dom: &SlitDomain<C>,
    range: Option<(C, C)>,
    n: usize,
) -> Result<SampledLamination<T>> {
    let (leaves, skipped) = flat_leaves(dom, range, n)?;
    build(&leaves, LaminationKind::Nu, "flat slit domain", skipped)
}

/// `Σ (ν/μ)·ν` over shared atoms: the `L¹` norm of φ.
pub fn reconstruct_l1<T: Real>(mu: &SampledLamination<T>, nu: &SampledLamination<T>) -> Result<T> {
    if mu.atoms.len() != nu.atoms.len() {
        return invalid("laminations have different supports");
    }
    let mut total = T::zero();
    for (m, v) in mu.atoms.iter().zip(&nu.atoms) {
        if m.ends != v.ends {
            return invalid("laminations have different supports");
        }
        total = total
            + if m.weight > T::zero() {
                v.weight / m.weight * v.weight
            } else {
                v.length * v.weight
            };
    }
    Ok(total)
}

/// Masses of `[a−δ_j, a+δ_j) × [c, d)` for `δ_j` halving from a quarter of
/// the distance between `a` and the arc.
pub fn atom_test<T: Real>(
    lam: &SampledLamination<T>,
    a: T,
    cd: (T, T),
    levels: usize,
) -> Result<Vec<T>> {
    let (c, d) = cd;
    if super::boxes::in_arc(c, d, a) || a == d {
        return invalid("the point must lie off the arc");
    }
    let gap = super::boxes::arc_offset(d, a).min(super::boxes::arc_offset(a, c));
    let mut delta = gap * T::lit(0.25);
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        let b = GeodesicBox::new(a - delta, a + delta, c, d)?;
        out.push(lam.box_mass(&b));
        delta = delta * T::lit(0.5);
    }
    Ok(out)
}

/// Sampled log-2 box and its mass.
#[derive(Clone, Debug, Serialize)]
pub struct BoxSample {
    pub theta: f64,
    pub w: (f64, f64),
    pub mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThurstonEstimate {
    pub norm: f64,
    pub seed: u64,
    pub boxes: Vec<BoxSample>,
}

/// Hyperbolic radius bound of the sampled Möbius centres.
const MAX_RADIUS: f64 = 1.5;

/// The `samples` log-2 boxes used by [`thurston_norm`].
pub fn log2_boxes<T: Real>(samples: usize, seed: u64) -> Vec<(DiskMobius<T>, GeodesicBox<T>)> {
    log2_boxes_within(samples, seed, MAX_RADIUS)
}

/// Log-2 boxes transported by Möbius maps moving the origin at most
/// hyperbolic distance `radius`.
pub fn log2_boxes_within<T: Real>(
    samples: usize,
    seed: u64,
    radius: f64,
) -> Vec<(DiskMobius<T>, GeodesicBox<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let theta: f64 = rng.gen_range(0.0..TAU);
        let rho: f64 = rng.gen_range(0.0..radius);
        let psi: f64 = rng.gen_range(0.0..TAU);
        let w = Complex::from_polar((rho * 0.5).tanh(), psi);
        let Ok(m) = DiskMobius::new(T::lit(theta), Complex::new(T::lit(w.re), T::lit(w.im))) else {
            continue;
        };
        if let Ok(b) = GeodesicBox::standard().transport(&m) {
            out.push((m, b));
        }
    }
    out
}

fn log2_box_at<T: Real>(lam: &SampledLamination<T>, theta: f64, w: Complex<f64>) -> Option<f64> {
    let m = DiskMobius::new(T::lit(theta), Complex::new(T::lit(w.re), T::lit(w.im))).ok()?;
    let b = GeodesicBox::standard().transport(&m).ok()?;
    Some(lam.box_mass(&b).as_f64())
}

/// Number of best samples refined by compass search.
const REFINED: usize = 32;

/// Compass search in `(θ, w)` from a sampled box, keeping `w` within the
/// sampling radius. Only strict improvements are accepted.
fn refine<T: Real>(lam: &SampledLamination<T>, start: &BoxSample) -> BoxSample {
    let w_max = (MAX_RADIUS * 0.5).tanh();
    let (mut theta, mut w, mut best) =
        (start.theta, Complex::new(start.w.0, start.w.1), start.mass);
    let mut step = 0.25;
    while step > 1e-4 {
        let mut moved = false;
        let s = step * (1.0 - w.norm_sqr());
        for (dt, dw) in [
            (step, Complex::new(0.0, 0.0)),
            (-step, Complex::new(0.0, 0.0)),
            (0.0, Complex::new(s, 0.0)),
            (0.0, Complex::new(-s, 0.0)),
            (0.0, Complex::new(0.0, s)),
            (0.0, Complex::new(0.0, -s)),
        ] {
            let (t1, w1) = (theta + dt, w + dw);
            if w1.norm() > w_max {
                continue;
            }
            if let Some(m) = log2_box_at(lam, t1, w1) {
                if m > best {
                    (theta, w, best) = (t1, w1, m);
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    BoxSample {
        theta: theta.rem_euclid(TAU),
        w: (w.re, w.im),
        mass: best,
    }
}

/// Largest mass among `samples` pseudorandom boxes of Liouville measure
/// `log 2`, the best few refined by local search, with the boxes used.
pub fn thurston_estimate<T: Real>(
    lam: &SampledLamination<T>,
    samples: usize,
    seed: u64,
) -> Result<ThurstonEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one box".into()));
    }
    let mut boxes: Vec<BoxSample> = log2_boxes::<T>(samples, seed)
        .into_iter()
        .map(|(m, b)| BoxSample {
            theta: m.theta.as_f64(),
            w: (m.w.re.as_f64(), m.w.im.as_f64()),
            mass: lam.box_mass(&b).as_f64(),
        })
        .collect();
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&i, &j| boxes[j].mass.total_cmp(&boxes[i].mass).then(i.cmp(&j)));
    let refined: Vec<BoxSample> = order
        .iter()
        .take(REFINED)
        .map(|&i| refine(lam, &boxes[i]))
        .collect();
    boxes.extend(refined);
    let norm = boxes.iter().map(|b| b.mass).fold(0.0, f64::max);
    Ok(ThurstonEstimate { norm, seed, boxes })
}

/// Lower bound on the Thurston norm `sup_{L(box) = log 2} mass(box)`.
pub fn thurston_norm<T: Real>(
    lam: &SampledLamination<T>,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    Ok(thurston_estimate(lam, samples, seed)?.norm)
}

/// The Liouville current on an `n × n` grid of endpoint cells, each cell
/// carrying its exact Liouville measure at its centre.
pub fn discretized_liouville<T: Real>(n: usize) -> Result<SampledLamination<T>> {
    if n < 4 {
        return invalid("need at least four cells");
    }
    let step = TAU / n as f64;
    let mut atoms = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                // Cells touching the diagonal have infinite measure.
                continue;
            }
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            let (c, d) = (j as f64 * step, (j + 1) as f64 * step);
            let cell = GeodesicBox::new(a, b, c, d)?;
            let mid = |x: f64, y: f64| {
                let m = 0.5 * (x + y);
                if m > PI {
                    m - TAU
                } else {
                    m
                }
            };
            atoms.push(Atom {
                ends: (T::lit(mid(a, b)), T::lit(mid(c, d))),
                weight: T::lit(cell.liouville()),
                length: T::infinity(),
            });
        }
    }
    SampledLamination::from_atoms(atoms, LaminationKind::Other, "liouville")
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
    fn flat_square_masses() {
        let dom = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let mu: SampledLamination<f64> = sample_mu_flat(&dom, None, 37).unwrap();
        let nu: SampledLamination<f64> = sample_nu_flat(&dom, None, 37).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!((nu.total_mass() - 1.0).abs() < 1e-12);
        assert!((reconstruct_l1(&mu, &nu).unwrap() - 1.0).abs() < 1e-12);
        let b = flat_box(
            &dom,
            &BoundarySet::facing(&dom, Facing::Bottom).unwrap(),
            &BoundarySet::facing(&dom, Facing::Top).unwrap(),
        )
        .unwrap();
        assert!((mu.box_mass(&b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn merging_and_empty() {
        let atoms = vec![
            Atom {
                ends: (1.0, 0.5),
                weight: 0.25,
                length: 1.0,
            },
            Atom {
                ends: (0.5, 1.0),
                weight: 0.5,
                length: 1.0,
            },
        ];
        let lam = SampledLamination::from_atoms(atoms, LaminationKind::Other, "t").unwrap();
        assert_eq!(lam.atoms().len(), 1);
        assert_eq!(lam.total_mass(), 0.75);
        let z = SampledLamination::<f64>::empty();
        assert_eq!(thurston_norm(&z, 10, 1).unwrap(), 0.0);
        assert!(SampledLamination::from_atoms(
            vec![Atom {
                ends: (0.0, 1.0),
                weight: -1.0,
                length: 1.0
            }],
            LaminationKind::Other,
            ""
        )
        .is_err());
    }

    #[test]
    fn seeded_boxes_repeat() {
        let a = log2_boxes::<f64>(5, 7);
        let b = log2_boxes::<f64>(5, 7);
        for ((_, x), (_, y)) in a.iter().zip(&b) {
            assert_eq!(x, y);
            assert!((x.liouville() - 2f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn liouville_current_log2_boxes() {
        let lam = discretized_liouville::<f64>(256).unwrap();
        let m = lam.box_mass(&GeodesicBox::standard());
        assert!((m - 2f64.ln()).abs() < 1e-9, "{m}");
    }
}
