//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extremal_rays::comb_counterexample::{build_comb, comb_sets};
use extremal_rays::currents::{
    atom_test, discretized_liouville, flat_box, reconstruct_l1, sample_mu, sample_mu_flat,
    sample_mu_nu, sample_nu, sample_nu_flat, thurston_norm, Atom, LaminationKind,
    SampledLamination,
};
use extremal_rays::flat_geometry::io::domain_to_json;
use extremal_rays::flat_geometry::{
    build_rectangle, build_slit_rectangle, BoundarySet, Facing, Point,
};
use extremal_rays::modulus::{
    disk_box_with_modulus, grid_modulus, mod_liouville_gap, reldist_bound, slit_bounds,
};
use extremal_rays::teich_ray::{
    certify_counterexample, run_convergence, squeeze, SqueezeExperiment,
};
use extremal_rays::trajectories::TraceOptions;
use extremal_rays::{Coord, Exact, ExactDomain, Qd64};

type Check = Result<String, String>;

fn q(p: i64, d: i64) -> Exact {
    Exact::new(p, d)
}

fn edge_index(dom: &ExactDomain, pred: impl Fn(&Point<Exact>, &Point<Exact>) -> bool) -> usize {
    (0..dom.edge_count())
        .find(|&i| {
            let (a, b) = dom.edge(i);
            pred(a, b)
        })
        .expect("edge present")
}

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let dom = build_rectangle(q(1, 1), q(1, 1)).unwrap();
    let e = BoundarySet::facing(&dom, Facing::Left).unwrap();
    let f = BoundarySet::facing(&dom, Facing::Right).unwrap();
    let r = grid_modulus(&dom, &e, &f, &q(1, 256)).map_err(|e| e.to_string())?;
    let gap = r.reciprocity_gap.unwrap_or(f64::INFINITY);
    let secs = t.elapsed().as_secs_f64();
    ensure(
        (r.value - 1.0).abs() < 0.01 && gap < 0.02 && secs < 5.0,
        format!(
            "unit square modulus {:.12}, reciprocity gap {gap:.2e}, {secs:.2} s",
            r.value
        ),
    )
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (a, b, c, n) in [
        (1, 1, q(1, 2), 2),
        (1, 1, q(1, 2), 4),
        (1, 1, q(1, 2), 8),
        (1, 1, q(1, 4), 8),
    ] {
        let (a, b) = (q(a, 1), q(b, 1));
        let dom = build_slit_rectangle(a, b, c, n).unwrap();
        let zero = q(0, 1);
        let left = edge_index(&dom, |p, r| p.x == zero && r.x == zero);
        let right = edge_index(&dom, |p, r| p.x == a && r.x == a);
        let e = BoundarySet::on_edge(&dom, left, b - c, b).unwrap();
        let f = BoundarySet::on_edge(&dom, right, zero, c).unwrap();
        let r = grid_modulus(&dom, &e, &f, &q(1, 512)).map_err(|e| e.to_string())?;
        let (lo, hi) = slit_bounds(&a, &b, &c, n).unwrap();
        let (lo, hi) = (lo.to_f64(), hi.to_f64());
        let inside = r.extrapolated >= lo - r.error_bar && r.extrapolated <= hi + r.error_bar;
        ok &= inside && r.error_bar < 0.01;
        lines.push(format!(
            "N={n} c={c}: {:.5}±{:.1e} in [{lo}, {hi}]",
            r.extrapolated, r.error_bar
        ));
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(
        ok && secs < 60.0,
        format!("{}; {secs:.1} s", lines.join("; ")),
    )
}

/// Two disjoint axis-parallel segments on the quarter lattice of
/// `[2, 6]²`, at distance at least 1/4.
fn random_pair(rng: &mut ChaCha8Rng) -> ExactDomain {
    let big = |p: (i64, i64)| Point::new(q(p.0, 1), q(p.1, 1));
    let outer = vec![big((0, 0)), big((8, 0)), big((8, 8)), big((0, 8))];
    loop {
        let mut seg = || {
            let (x, y) = (rng.gen_range(8..=24), rng.gen_range(8..=24));
            let len = rng.gen_range(1..=8);
            let (x2, y2) = if rng.gen_bool(0.5) {
                (x + len, y)
            } else {
                (x, y + len)
            };
            (Point::new(q(x, 4), q(y, 4)), Point::new(q(x2, 4), q(y2, 4)))
        };
        let (s1, s2) = (seg(), seg());
        let Ok(dom) = ExactDomain::new(outer.clone(), vec![s1, s2]) else {
            continue;
        };
        if dom.loops().len() != 3 {
            continue;
        }
        let e = BoundarySet::whole_component(&dom, 1).unwrap();
        let f = BoundarySet::whole_component(&dom, 2).unwrap();
        if e.dist_sq(&f) >= q(1, 16) {
            return dom;
        }
    }
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20240531);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dom = random_pair(&mut rng);
        let e = BoundarySet::whole_component(&dom, 1).unwrap();
        let f = BoundarySet::whole_component(&dom, 2).unwrap();
        let r = grid_modulus(&dom, &e, &f, &q(1, 16)).map_err(|e| e.to_string())?;
        let bound = reldist_bound(&e, &f).unwrap();
        if r.extrapolated > bound {
            violations += 1;
        }
        worst = worst.max(r.extrapolated / bound);
    }
    ensure(
        violations == 0,
        format!("100 segment pairs, {violations} violations, largest value/bound {worst:.3}"),
    )
}

fn criterion_4() -> Check {
    let t = Instant::now();
    let cert = certify_counterexample::<Exact>(4, &q(1, 1024)).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let mut parts = Vec::new();
    for r in &cert.records {
        let c_min = (0..4)
            .map(|i| r.c_vals[i] - r.c_errs[i])
            .fold(f64::INFINITY, f64::min);
        parts.push(format!(
            "k={} a={:.3} b={:.3} c_min={:.3} d={} e={:.3}{}",
            r.k,
            r.a_val + r.a_err,
            r.b_val - r.b_err,
            c_min,
            r.d_val,
            r.e_val - r.e_err,
            if r.pass { "" } else { " FAIL" }
        ));
    }
    ensure(
        cert.all_pass() && secs < 900.0,
        format!("{}; {secs:.0} s", parts.join("; ")),
    )
}

fn experiment(
    dom: ExactDomain,
    e: BoundarySet<Exact>,
    f: BoundarySet<Exact>,
    h: Exact,
) -> Result<extremal_rays::teich_ray::ConvergenceReport, String> {
    let mut exp = SqueezeExperiment::dyadic(dom, e, f, 8, h).map_err(|e| e.to_string())?;
    run_convergence(&mut exp).map_err(|e| e.to_string())
}

fn criterion_5() -> Check {
    let rect = build_rectangle(q(1, 1), q(1, 1)).unwrap();
    let bottom = BoundarySet::facing(&rect, Facing::Bottom).unwrap();
    let top = BoundarySet::facing(&rect, Facing::Top).unwrap();
    let r = experiment(rect, bottom, top, q(1, 32))?;
    let rect_gap = r.rows.iter().map(|x| x.gap).fold(0.0, f64::max);

    let pts = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)];
    let lshape = ExactDomain::new(
        pts.iter()
            .map(|&(x, y)| Point::new(q(x, 2), q(y, 2)))
            .collect(),
        vec![],
    )
    .unwrap();
    let bottom = BoundarySet::facing(&lshape, Facing::Bottom).unwrap();
    let top = BoundarySet::facing(&lshape, Facing::Top).unwrap();
    let l = experiment(lshape, bottom, top, q(1, 64))?;

    let comb = build_comb::<Exact>(3).unwrap();
    let s = comb_sets(&comb, 3, 3).unwrap();
    let c = experiment(comb, s.f, s.e, q(1, 256))?;
    let descending = c
        .rows
        .windows(2)
        .all(|w| w[1].eps_mod <= w[0].eps_mod + w[0].error_bar + w[1].error_bar);
    ensure(
        rect_gap < 1e-8 && l.final_gap < 0.05 && l.lower_bound_ok && c.monotone && c.lower_bound_ok && descending,
        format!(
            "rectangle max gap {rect_gap:.1e}; L-shape gap {:.2e} at 2^-8; comb k=3 {:.4} at 2^-8 toward 0.125, monotone {}",
            l.final_gap,
            c.rows.last().unwrap().eps_mod,
            c.monotone && descending
        ),
    )
}

fn criterion_6() -> Check {
    let mut gaps = Vec::new();
    for m in 2..=8 {
        let b = disk_box_with_modulus(m as f64).map_err(|e| e.to_string())?;
        gaps.push(mod_liouville_gap(&b).map_err(|e| e.to_string())?.abs());
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = *gaps.last().unwrap();
    ensure(
        decreasing && last < 0.01,
        format!("gaps {:.2e} at mod 2 down to {last:.2e} at mod 8", gaps[0]),
    )
}

fn disk_one() -> (Qd64, Vec<Vec<Complex64>>) {
    let qd = Qd64::from_real(&[1.0]).unwrap();
    let diameter = (0..=64)
        .map(|i| Complex64::new(-1.0 + 1e-9 + (2.0 - 2e-9) * i as f64 / 64.0, 0.0))
        .collect();
    (qd, vec![diameter])
}

fn criterion_7() -> Check {
    let comb = build_comb::<Exact>(3).unwrap();
    let mu_comb: SampledLamination<f64> =
        sample_mu_flat(&comb, None, 10_000).map_err(|e| e.to_string())?;
    // Slit feet split the top edge; take its longest piece.
    let top = BoundarySet::facing(&comb, Facing::Top).unwrap();
    let piece = top
        .arcs()
        .iter()
        .max_by(|x, y| (x.s1 - x.s0).cmp(&(y.s1 - y.s0)))
        .unwrap()
        .clone();
    let top = BoundarySet::arc(&comb, piece.component, piece.s0, piece.s1).unwrap();
    let bottom = BoundarySet::facing(&comb, Facing::Bottom).unwrap();
    let b = flat_box(&comb, &top, &bottom).map_err(|e| e.to_string())?;
    let a = b.a + 0.3 * extremal_rays::currents::arc_offset(b.a, b.b);
    let comb_seq = atom_test(&mu_comb, a, (b.c, b.d), 12).map_err(|e| e.to_string())?;

    let (qd, tr) = disk_one();
    let mu_disk =
        sample_mu(&qd, &tr, 10_000, &TraceOptions::default()).map_err(|e| e.to_string())?;
    let cd = (-PI + 0.5, -0.5);
    let disk_seq = atom_test(&mu_disk, PI / 2.0, cd, 12).map_err(|e| e.to_string())?;

    let mut atoms = mu_disk.atoms().to_vec();
    atoms.push(Atom {
        ends: (-PI / 2.0, PI / 2.0),
        weight: 1.0,
        length: 2.0,
    });
    let with_atom = SampledLamination::from_atoms(atoms, LaminationKind::Other, "control").unwrap();
    let control = atom_test(&with_atom, PI / 2.0, cd, 12).map_err(|e| e.to_string())?;

    let (lc, ld) = (*comb_seq.last().unwrap(), *disk_seq.last().unwrap());
    let lowest = control.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(
        lc < 1e-3 && ld < 1e-3 && lowest >= 1.0,
        format!(
            "comb {lc:.1e}, disk {ld:.1e} after 12 halvings; atom control stays at {lowest:.3}"
        ),
    )
}

fn criterion_8() -> Check {
    let n = 10_000;
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, dom) in [
        ("square", build_rectangle(q(1, 1), q(1, 1)).unwrap()),
        ("comb", build_comb::<Exact>(3).unwrap()),
    ] {
        let mu: SampledLamination<f64> =
            sample_mu_flat(&dom, None, n).map_err(|e| e.to_string())?;
        let nu: SampledLamination<f64> =
            sample_nu_flat(&dom, None, n).map_err(|e| e.to_string())?;
        let l1 = reconstruct_l1(&mu, &nu).map_err(|e| e.to_string())?;
        let area = dom.area().to_f64();
        ok &= ((l1 - area) / area).abs() < 0.01;
        parts.push(format!("{name} {l1:.6} vs area {area}"));
    }
    let (one, tr) = disk_one();
    let z = Qd64::from_real(&[0.0, 1.0]).unwrap();
    // Horizontal critical rays of z dz².
    let rays = (0..3)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / 3.0;
            (0..=64)
                .map(|i| Complex64::from_polar(1e-6 + (1.0 - 2e-6) * i as f64 / 64.0, th))
                .collect()
        })
        .collect::<Vec<_>>();
    for (name, qd, tr) in [("phi=1", one, tr), ("phi=z", z, rays)] {
        let (mu, nu) =
            sample_mu_nu(&qd, &tr, n, &TraceOptions::default()).map_err(|e| e.to_string())?;
        let l1 = reconstruct_l1(&mu, &nu).map_err(|e| e.to_string())?;
        let norm = qd.l1_norm();
        ok &= ((l1 - norm) / norm).abs() < 0.02;
        parts.push(format!("{name} {l1:.6} vs {norm:.6}"));
    }
    ensure(ok, parts.join("; "))
}

fn criterion_9() -> Check {
    let lv = discretized_liouville::<f64>(512).map_err(|e| e.to_string())?;
    let norm = thurston_norm(&lv, 500, 1).map_err(|e| e.to_string())?;
    let ratio = norm / 2f64.ln();
    let comb = build_comb::<Exact>(3).unwrap();
    let m1: SampledLamination<f64> =
        sample_mu_flat(&comb, None, 4000).map_err(|e| e.to_string())?;
    let m2: SampledLamination<f64> =
        sample_mu_flat(&comb, None, 8000).map_err(|e| e.to_string())?;
    let t1 = thurston_norm(&m1, 1000, 3).map_err(|e| e.to_string())?;
    let t2 = thurston_norm(&m2, 2000, 3).map_err(|e| e.to_string())?;
    let stable = t1.is_finite() && t2.is_finite() && ((t2 - t1) / t1).abs() < 0.05;
    ensure(
        (0.95..=1.05).contains(&ratio) && stable,
        format!("discretized Liouville {ratio:.4}·log 2; comb {t1:.4} then {t2:.4} after doubling"),
    )
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = q(1, 32);
    let (mut mono, mut sub, mut over) = (0, 0, 0);
    for _ in 0..50 {
        let w = q(rng.gen_range(4..=8), 4);
        let eighths = (w * q(8, 1)).to_integer();
        let x0 = rng.gen_range(0..eighths - 2);
        let x1 = rng.gen_range(x0 + 1..eighths - 1);
        let x2 = rng.gen_range(x1 + 1..=eighths);
        // F leaves room on the top edge for the slit.
        let (f0, f1) = loop {
            let f0 = rng.gen_range(0..eighths - 1);
            let f1 = rng.gen_range(f0 + 1..=eighths);
            if f0 >= 2 || f1 <= eighths - 2 {
                break (f0, f1);
            }
        };
        let plain = build_rectangle(w, q(1, 1)).unwrap();
        let slit_x = loop {
            let s = rng.gen_range(1..eighths);
            // Slits hang from the top outside F.
            if eighths - s < f0 || eighths - s > f1 {
                break q(s, 8);
            }
        };
        let depth = q(rng.gen_range(1..=6), 8);
        let slitted = ExactDomain::new(
            plain.outer().to_vec(),
            vec![(
                Point::new(slit_x, q(1, 1) - depth),
                Point::new(slit_x, q(1, 1)),
            )],
        )
        .unwrap();
        let zero = q(0, 1);
        let sets = |dom: &ExactDomain, a: i64, b: i64| {
            let bottom = edge_index(dom, |p, r| p.y == zero && r.y == zero);
            let top = edge_index(dom, |p, r| p.y == q(1, 1) && r.y == q(1, 1));
            (
                BoundarySet::on_edge(dom, bottom, q(a, 8), q(b, 8)).unwrap(),
                BoundarySet::on_edge(dom, top, q(f0, 8), q(f1, 8)).unwrap(),
            )
        };
        let solve = |dom: &ExactDomain, a: i64, b: i64| {
            let (e, f) = sets(dom, a, b);
            grid_modulus(dom, &e, &f, &h).map(|r| (r.extrapolated, r.error_bar))
        };
        let (m1, e1) = solve(&plain, x0, x1).map_err(|e| e.to_string())?;
        let (m2, e2) = solve(&plain, x1, x2).map_err(|e| e.to_string())?;
        let (m, e) = solve(&plain, x0, x2).map_err(|e| e.to_string())?;
        let (ms, es) = solve(&slitted, x0, x2).map_err(|e| e.to_string())?;
        mono += usize::from(m1 > m + 2.0 * (e1 + e));
        sub += usize::from(m > m1 + m2 + 2.0 * (e + e1 + e2));
        over += usize::from(ms > m + 2.0 * (es + e));
    }

    let comb = build_comb::<Exact>(3).unwrap();
    let (a, b) = (q(1, 2), q(3, 16));
    let composed = squeeze(&squeeze(&comb, &a).unwrap(), &b).unwrap();
    let direct = squeeze(&comb, &(a * b)).unwrap();
    let squeeze_exact = domain_to_json(&composed) == domain_to_json(&direct);

    let qd = Qd64::from_real(&[1.0, 0.3]).unwrap();
    let c = 2.25;
    let scaled = qd.scaled(Complex64::new(c, 0.0)).unwrap();
    let (_, tr) = disk_one();
    let opts = TraceOptions::default();
    let mu = sample_mu(&qd, &tr, 200, &opts).map_err(|e| e.to_string())?;
    let mu_c = sample_mu(&scaled, &tr, 200, &opts).map_err(|e| e.to_string())?;
    let nu = sample_nu(&qd, &tr, 200, &opts).map_err(|e| e.to_string())?;
    let nu_c = sample_nu(&scaled, &tr, 200, &opts).map_err(|e| e.to_string())?;
    let rel = |x: f64, y: f64| ((x - y) / y.abs().max(1e-300)).abs();
    let same_len = mu.atoms().len() == mu_c.atoms().len() && nu.atoms().len() == nu_c.atoms().len();
    let mu_err = mu
        .atoms()
        .iter()
        .zip(mu_c.atoms())
        .map(|(x, y)| rel(y.weight, x.weight))
        .fold(0.0, f64::max);
    let nu_err = nu
        .atoms()
        .iter()
        .zip(nu_c.atoms())
        .map(|(x, y)| rel(y.weight, c.sqrt() * x.weight))
        .fold(0.0, f64::max);

    let ok = mono == 0
        && sub == 0
        && over == 0
        && squeeze_exact
        && same_len
        && mu_err <= 1e-12
        && nu_err <= 1e-12;
    ensure(
        ok,
        format!(
            "50 instances: {mono} monotonicity, {sub} subadditivity, {over} overflow failures; squeeze composition exact {squeeze_exact}; μ invariance {mu_err:.1e}; ν scaling {nu_err:.1e}"
        ),
    )
}

fn main() {
    let args: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria: [(usize, fn() -> Check); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (i, check) in criteria {
        if !args.is_empty() && !args.iter().any(|a| a == &i.to_string()) {
            continue;
        }
        match check() {
            Ok(msg) => println!("criterion {i:>2} PASS: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {i:>2} FAIL: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
