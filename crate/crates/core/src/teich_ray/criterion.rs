use crate::comb_counterexample::CombSets;
use crate::currents::{GeodesicBox, SampledLamination};
use crate::error::{invalid, Result};
use crate::flat_geometry::{BoundarySet, SlitDomain};
use crate::modulus::{grid_modulus, liouville_for_modulus};
use crate::scalar::Coord;
use crate::trajectories::vertical_family_modulus;

use super::ray_modulus;

/// A measure on boxes of type `B`, returned as a certified interval
/// `(lo, hi)`.
pub trait BoxMeasure<B> {
    fn measure(&self, b: &B) -> Result<(f64, f64)>;
}

impl BoxMeasure<GeodesicBox<f64>> for SampledLamination<f64> {
    fn measure(&self, b: &GeodesicBox<f64>) -> Result<(f64, f64)> {
        let m = self.box_mass(b);
        Ok((m, m))
    }
}

/// The Liouville current of the disk.
#[derive(Clone, Copy, Debug, Default)]
pub struct LiouvilleCurrent;

impl BoxMeasure<GeodesicBox<f64>> for LiouvilleCurrent {
    fn measure(&self, b: &GeodesicBox<f64>) -> Result<(f64, f64)> {
        let m = b.liouville();
        Ok((m, m))
    }
}

/// A box `Q_k`, its sub-box `Q′_k` and the four margin boxes
/// `[a,a′]×[c,d]`, `[b′,b]×[c,d]`, `[a,b]×[c,c′]`, `[a,b]×[d′,d]`.
#[derive(Clone, Debug)]
pub struct CriterionBoxes<B> {
    pub q: B,
    pub q_prime: B,
    pub margins: [B; 4],
}

impl CriterionBoxes<GeodesicBox<f64>> {
    /// Boxes with `q_prime` nested in `q`.
    pub fn nested(q: GeodesicBox<f64>, q_prime: GeodesicBox<f64>) -> Result<Self> {
        let (o, p) = (q, q_prime);
        let margins = [
            GeodesicBox::new(o.a, p.a, o.c, o.d)?,
            GeodesicBox::new(p.b, o.b, o.c, o.d)?,
            GeodesicBox::new(o.a, o.b, o.c, p.c)?,
            GeodesicBox::new(o.a, o.b, p.d, o.d)?,
        ];
        Ok(Self {
            q,
            q_prime,
            margins,
        })
    }
}

/// Constants of the criterion. `zero_tol` bounds `α(Q_k)` at the last
/// level.
#[derive(Clone, Copy, Debug)]
pub struct CriterionConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub delta: f64,
    pub zero_tol: f64,
}

impl CriterionConstants {
    /// `zero_tol = c3 / 2`.
    pub fn new(c1: f64, c2: f64, c3: f64, delta: f64) -> Self {
        Self {
            c1,
            c2,
            c3,
            delta,
            zero_tol: c3 / 2.0,
        }
    }
}

/// Whether the boxes witness that `family[k]` (the current `α_{n_k}`) does
/// not converge uniformly to `limit`, measured against `liouville`:
/// `L(Q_k) ≤ C1`, `L(Q′_k) ≥ C2`, every margin `≥ δ`, `α_{n_k}(Q′_k) ≥ C3`
/// and `α(Q_k)` decreasing to at most `zero_tol`.
pub fn criterion_check<B, L, M, A>(
    liouville: &L,
    family: &[M],
    limit: &A,
    boxes: &[CriterionBoxes<B>],
    consts: &CriterionConstants,
) -> Result<bool>
where
    L: BoxMeasure<B> + ?Sized,
    M: BoxMeasure<B>,
    A: BoxMeasure<B> + ?Sized,
{
    if !(consts.delta > 0.0) {
        return invalid("margin constant must be positive");
    }
    if !(consts.c2 > 0.0 && consts.c3 > 0.0) {
        return invalid("lower bounds must be positive");
    }
    if family.len() != boxes.len() || boxes.is_empty() {
        return invalid("family and boxes must be matched and nonempty");
    }
    let mut limit_hi = Vec::with_capacity(boxes.len());
    for (alpha, bx) in family.iter().zip(boxes) {
        if liouville.measure(&bx.q)?.1 > consts.c1 || liouville.measure(&bx.q_prime)?.0 < consts.c2
        {
            return Ok(false);
        }
        for m in &bx.margins {
            if liouville.measure(m)?.0 < consts.delta {
                return Ok(false);
            }
        }
        if alpha.measure(&bx.q_prime)?.0 < consts.c3 {
            return Ok(false);
        }
        limit_hi.push(limit.measure(&bx.q)?.1);
    }
    let last = limit_hi[limit_hi.len() - 1];
    Ok(last <= consts.zero_tol && limit_hi.iter().all(|&v| v >= last))
}

/// A box of curves joining two boundary sets of a flat domain.
#[derive(Clone, Debug)]
pub struct ArcBox<C> {
    pub e: BoundarySet<C>,
    pub f: BoundarySet<C>,
}

/// The boxes of level `k` of the comb.
pub fn comb_boxes<C: Coord>(s: &CombSets<C>) -> CriterionBoxes<ArcBox<C>> {
    let pair = |e: &BoundarySet<C>, f: &BoundarySet<C>| ArcBox {
        e: e.clone(),
        f: f.clone(),
    };
    CriterionBoxes {
        q: pair(&s.e, &s.f),
        q_prime: pair(&s.e_prime, &s.f_prime),
        margins: [
            pair(&s.e1, &s.f),
            pair(&s.e2, &s.f),
            pair(&s.e, &s.f1),
            pair(&s.e, &s.f2),
        ],
    }
}

/// Measures of comb boxes from moduli on `domain` at cell width `h`.
#[derive(Clone, Debug)]
pub enum CombMeasure<'a, C> {
    /// Liouville measure: the box measure of the disk box with the same
    /// modulus.
    Liouville { domain: &'a SlitDomain<C>, h: C },
    /// `ε · mod(T_ε Γ)`, the modulus form of `ε T_ε^* L`.
    Ray {
        domain: &'a SlitDomain<C>,
        h: C,
        eps: C,
    },
    /// `mod Γ_v`, the modulus form of the vertical measured lamination.
    Vertical { domain: &'a SlitDomain<C> },
}

impl<C: Coord> BoxMeasure<ArcBox<C>> for CombMeasure<'_, C> {
    fn measure(&self, b: &ArcBox<C>) -> Result<(f64, f64)> {
        match self {
            Self::Liouville { domain, h } => {
                let (lo, hi) = grid_modulus(domain, &b.e, &b.f, h)?.interval();
                // The Liouville measure increases with the modulus.
                let low = if lo > 0.0 {
                    liouville_for_modulus(lo)?
                } else {
                    0.0
                };
                Ok((low, liouville_for_modulus(hi)?))
            }
            Self::Ray { domain, h, eps } => Ok(ray_modulus(domain, &b.f, &b.e, eps, h)?.interval()),
            Self::Vertical { domain } => {
                let v = vertical_family_modulus(domain, &b.e, &b.f).to_f64();
                Ok((v, v))
            }
        }
    }
}
