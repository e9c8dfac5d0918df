//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! ```text
//! cargo test --release --test acceptance
//! ```

mod common;

use common::*;
use pdfast::corrections::{offset_between, SurfaceCorrectionDiag};
use pdfast::fracture::{seed_cracks, Crack};
use pdfast::grid::classify_regions;
use pdfast::kernel::volume_correction;
use pdfast::reference::DenseModel;
use pdfast::sim::bench::{bench, MemoryProbe};
use pdfast::sim::{analysis, presets, run_with, Method};
use pdfast::stepping::{FastBackend, ForceBackend, Simulation};
use pdfast::{BondLedger, Grid, HorizonSpec, KernelStack, MaterialParams, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static BASELINE: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOC: Counting = Counting;

struct AllocProbe;

impl MemoryProbe for AllocProbe {
    fn reset(&self) {
        let now = CURRENT.load(Ordering::Relaxed);
        BASELINE.store(now, Ordering::Relaxed);
        PEAK.store(now, Ordering::Relaxed);
    }

    fn peak_bytes(&self) -> usize {
        PEAK.load(Ordering::Relaxed).saturating_sub(BASELINE.load(Ordering::Relaxed))
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome, f64);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn oracle_2d() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for dims in [[16, 12], [32, 32], [40, 20]] {
        for m in 2..=4 {
            for _ in 0..4 {
                let c = random_case(&mut rng, &dims, m, 50);
                assert!(band_ok(&c.grid, &c.ledger, m));
                worst = worst.max(unconstrained_rel_err(&c, &fast_force(&c), &dense_force(&c)));
                cases += 1;
            }
        }
    }
    outcome(worst <= 1e-10, format!("{cases} cases, worst relative error {worst:.2e} (limit 1e-10)"))
}

fn oracle_3d() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for dims in [[8, 8, 8], [12, 10, 8], [16, 16, 16]] {
        for m in 2..=4 {
            if dims.iter().any(|&n| 2 * n < 2 * m + 2) {
                continue;
            }
            let c = random_case(&mut rng, &dims, m, 50);
            worst = worst.max(unconstrained_rel_err(&c, &fast_force(&c), &dense_force(&c)));
            cases += 1;
        }
    }
    outcome(worst <= 1e-10, format!("{cases} cases, worst relative error {worst:.2e} (limit 1e-10)"))
}

/// Random crack segments plus loose random broken bonds on an `n × n` grid.
fn cracked_ledger(rng: &mut impl Rng, grid: &Grid, horizon: &HorizonSpec, extra: usize) -> BondLedger {
    let l = grid.dims()[0] as f64 * grid.h();
    let cracks: Vec<Crack> = (0..3)
        .map(|_| {
            let a = [rng.gen_range(0.0..l), rng.gen_range(0.0..l)];
            let b = [rng.gen_range(0.0..l), rng.gen_range(0.0..l)];
            Crack::segment(a, b)
        })
        .collect();
    let mut ledger = seed_cracks(&cracks, grid, horizon);
    let offsets = horizon.half_offsets(grid.dim());
    for _ in 0..extra {
        let p = rng.gen_range(0..grid.len());
        let o = offsets[rng.gen_range(0..offsets.len())];
        if let Some(q) = grid.offset_node(p, o.d) {
            ledger.insert(p, q);
        }
    }
    ledger
}

fn decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut broken = 0;
    for m in [2, 3] {
        let grid = build_grid(&[20, 20], 0.001);
        let horizon = HorizonSpec::new(m as f64 * 0.001, 0.001).unwrap();
        let material = MaterialParams::steel();
        let ledger = cracked_ledger(&mut rng, &grid, &horizon, 20);
        broken += ledger.len();
        let kernels = KernelStack::build(&grid, &horizon, &material).unwrap();
        let regions = classify_regions(&grid, &horizon, &[], Some(&ledger));
        let de = SurfaceCorrectionDiag::build(&grid, &regions, &kernels);
        let dense = DenseModel::new(&grid, &horizon, &material).unwrap().to_dense(&ledger);
        let (n, dim) = (grid.len(), grid.dim());

        // Â + Dᵉ + Dᶠ assembled from kernel entries, row/column order a·N + p.
        let mut a = vec![0.0; (dim * n) * (dim * n)];
        let at = |r: usize, c: usize| r * dim * n + c;
        for p in 0..n {
            for d in kernels.stencil() {
                let Some(q) = grid.offset_node(p, d) else { continue };
                for ra in 0..dim {
                    for cb in 0..dim {
                        a[at(ra * n + p, cb * n + q)] += kernels.get(ra, cb, d);
                    }
                }
            }
            for ra in 0..dim {
                for cb in 0..dim {
                    a[at(ra * n + p, cb * n + p)] += de.get(p, ra, cb);
                }
            }
        }
        for (p, q) in ledger.iter() {
            for (s, t) in [(p, q), (q, p)] {
                let d = offset_between(&grid, s, t);
                for ra in 0..dim {
                    for cb in 0..dim {
                        let k = kernels.get(ra, cb, d);
                        a[at(ra * n + s, cb * n + s)] += k;
                        a[at(ra * n + s, cb * n + t)] -= k;
                    }
                }
            }
        }
        for r in 0..dim * n {
            let row = dense.row(r);
            let norm: f64 = row.iter().map(|x| x.abs()).sum();
            let tol = 8.0 * f64::EPSILON * norm;
            for (c, &x) in row.iter().enumerate() {
                worst = worst.max((a[at(r, c)] - x).abs() / tol);
            }
        }
    }
    outcome(
        worst <= 1.0,
        format!("20×20, M ∈ {{2,3}}, {broken} broken bonds; worst entry error {worst:.3} × (8ε‖row‖₁)"),
    )
}

fn rigid_translation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for dims in [vec![24, 18], vec![10, 9, 8]] {
        for cracked in [false, true] {
            let grid = build_grid(&dims, 0.001);
            let horizon = HorizonSpec::new(0.003, 0.001).unwrap();
            let kernels = KernelStack::build(&grid, &horizon, &MaterialParams::steel()).unwrap();
            let ledger = if cracked && grid.dim() == 2 {
                cracked_ledger(&mut rng, &grid, &horizon, 40)
            } else if cracked {
                let mut l = BondLedger::new(grid.len());
                let offsets = horizon.half_offsets(3);
                while l.len() < 60 {
                    let p = rng.gen_range(0..grid.len());
                    if let Some(q) = grid.offset_node(p, offsets[rng.gen_range(0..offsets.len())].d) {
                        l.insert(p, q);
                    }
                }
                l
            } else {
                BondLedger::new(grid.len())
            };
            let regions = classify_regions(&grid, &horizon, &[], Some(&ledger));
            let mut fast = FastBackend::new(&grid, &kernels, regions).unwrap();
            let c: Vec<f64> = (0..grid.dim()).map(|_| rng.gen_range(-1e-3..1e-3)).collect();
            let u = VectorField::constant(grid.dim(), grid.len(), &c);
            let mut f = VectorField::zeros(grid.dim(), grid.len());
            fast.force(&u, &ledger, &mut f).unwrap();
            let ksum: f64 = kernels.tensors().iter().flatten().map(|k| k.abs()).sum();
            let cmax = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let rel = f.max_abs() / (cmax * ksum);
            worst = worst.max(rel);
            lines.push(format!("{}D{} {rel:.1e}", grid.dim(), if cracked { "+cracks" } else { "" }));
        }
    }
    outcome(worst <= 1e-12, format!("max |f| / (|c|·Σ|K|): {} (limit 1e-12)", lines.join(", ")))
}

fn trajectory() -> Outcome {
    let cfg = presets::precracked_plate_at(100);
    let mut setup = cfg.setup().unwrap();
    setup.method = Method::Fast;
    let mut fast = Simulation::new(&setup).unwrap();
    setup.method = Method::Dense;
    let mut dense = Simulation::new(&setup).unwrap();
    let mut worst = 0.0f64;
    let mut same = fast.ledger().pairs() == dense.ledger().pairs();
    for _ in 0..200 {
        fast.step().unwrap();
        dense.step().unwrap();
        let (uf, ud) = (&fast.state().u, &dense.state().u);
        worst = worst.max(uf.max_abs_diff(ud) / ud.max_abs().max(f64::MIN_POSITIVE));
        same &= fast.ledger().pairs() == dense.ledger().pairs();
    }
    outcome(
        worst <= 1e-8 && same,
        format!(
            "100×100 plate, 200 VV steps: worst relative L∞ {worst:.2e} (limit 1e-8), ledgers identical: {same} ({} bonds)",
            dense.ledger().len()
        ),
    )
}

fn scaling() -> Outcome {
    let ladders = [(Method::Fast, vec![64, 128, 256, 512]), (Method::Dense, vec![64, 128, 256])];
    let report = bench(&ladders, 5, Some(&AllocProbe)).unwrap();
    let e = &report.exponents;
    let (fs, fm, da) = (e.fast_stepping.unwrap(), e.fast_memory.unwrap(), e.dense_assembly.unwrap());
    let pass = (0.9..=1.4).contains(&fs) && (1.7..=2.3).contains(&da) && fm <= 1.2;
    outcome(
        pass,
        format!(
            "fast stepping {fs:.3} (0.9..1.4), dense assembly {da:.3} (1.7..2.3), fast peak memory {fm:.3} (≤ 1.2)"
        ),
    )
}

fn quasi_static() -> Outcome {
    let mut cfg = presets::plate_tension_at(100, 50);
    cfg.solver.steps = 3000;
    let out = run_with(&cfg, |_| {}).unwrap();
    let probe: Vec<f64> = out.monitors.chunks(cfg.output.monitors.len()).map(|rows| rows[0].u[0]).collect();
    let tail = analysis::tail_relative_change(&probe, 0.1);
    let grid = cfg.grid().unwrap();
    let centre = grid.nearest_node(&[0.5, 0.25]);
    let strain = analysis::axial_strain(&grid, &out.u, centre, 0, 5);
    let ratio = strain / (2.0e8 / cfg.material.e);
    outcome(
        tail < 1e-3 && (ratio - 1.0).abs() <= 0.25,
        format!("100×50, 3000 ADR steps: tail change {tail:.2e} (< 1e-3), centre strain / (p0/E) = {ratio:.4} (1 ± 0.25)"),
    )
}

fn fracture() -> Outcome {
    // Central crack at 150 × 150.
    let mut cfg = presets::precracked_plate_at(150);
    cfg.solver.steps = 1350;
    let l = 0.05;
    let mut asym = 0.0f64;
    let mut tips: Vec<(f64, f64)> = Vec::new();
    let mut lost_tip = false;
    run_with(&cfg, |sim| {
        let phi = sim.damage();
        asym = asym.max(analysis::damage_asymmetry(sim.grid(), &phi, &[0, 1]));
        if sim.state().step % 10 == 0 {
            match analysis::crack_tips(sim.grid(), &phi, 0.5 * l, 0.5 * l, 0.3) {
                Some(t) => tips.push(t),
                None => lost_tip = true,
            }
        }
    })
    .unwrap();
    let monotone = !lost_tip && tips.windows(2).all(|w| w[1].0 <= w[0].0 && w[1].1 >= w[0].1);
    let (first, last) = (tips[0], *tips.last().unwrap());
    let advanced = last.0 < first.0 && last.1 > first.1;
    let plate_ok = asym <= 0.02 && monotone && advanced;
    println!(
        "    precracked 150×150: max asymmetry {asym:.2e} (≤ 0.02), tips ({:.4}, {:.4}) → ({:.4}, {:.4}), monotone {monotone}",
        first.0, first.1, last.0, last.1
    );

    // Kalthoff-Winkler, coarse lattice.
    let cfg = presets::kalthoff_winkler_coarse();
    let delta = cfg.horizon.delta;
    let notch_tips = [[0.075, 0.05], [0.125, 0.05]];
    let mut initial = Vec::new();
    let mut seeded = 0;
    let mut first_dist: Option<f64> = None;
    let out = run_with(&cfg, |sim| {
        if sim.state().step == 0 {
            initial = sim.damage();
            seeded = sim.ledger().len();
        } else if first_dist.is_none() && sim.ledger().len() > seeded {
            let phi = sim.damage();
            let mut far = 0.0f64;
            for (p, (a, b)) in phi.iter().zip(&initial).enumerate() {
                if a > b {
                    let x = sim.grid().position(p);
                    let near = notch_tips.iter().map(|t| (x[0] - t[0]).hypot(x[1] - t[1])).fold(f64::INFINITY, f64::min);
                    far = far.max(near);
                }
            }
            first_dist = Some(far);
        }
    })
    .unwrap();
    let grid = cfg.grid().unwrap();
    let growth: Vec<f64> = out.damage.iter().zip(&initial).map(|(a, b)| a - b).collect();
    let first_ok = first_dist.is_some_and(|d| d <= delta);
    let angles: Vec<Option<f64>> = notch_tips
        .iter()
        .map(|t| {
            analysis::lobe_centroid(&grid, &growth, *t, 0.03, 1e-9)
                .map(|c| analysis::angle_between([0.0, 1.0], [c[0] - t[0], c[1] - t[1]]))
        })
        .collect();
    let angles_ok = angles.iter().all(|a| a.is_some_and(|a| (a - 135.0).abs() <= 15.0));
    println!(
        "    kalthoff-winkler coarse: first new damage within {} of a tip (≤ δ = {delta}), {} new bonds, lobe angles {:?} (135 ± 15)",
        first_dist.map_or("never".into(), |d| format!("{d:.4} m")),
        out.broken_bonds - seeded,
        angles.iter().map(|a| a.map(|a| format!("{a:.1}°"))).collect::<Vec<_>>()
    );
    outcome(
        plate_ok && first_ok && angles_ok,
        format!("precracked plate {}, KW first breaks {}, KW angles {}", ok(plate_ok), ok(first_ok), ok(angles_ok)),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn kernel_properties() -> Outcome {
    let mut failures = Vec::new();
    for dims in [vec![20, 20], vec![10, 10, 10]] {
        for m in 1..=4 {
            let h = 0.001;
            let grid = build_grid(&dims, h);
            let horizon = HorizonSpec::new(m as f64 * h, h).unwrap();
            let k = KernelStack::build(&grid, &horizon, &MaterialParams::steel()).unwrap();
            let dim = grid.dim();
            let tag = format!("{dim}D M={m}");
            for a in 0..dim {
                for b in 0..dim {
                    let terms: Vec<f64> = k.stencil().map(|d| k.get(a, b, d)).collect();
                    let sum: f64 = terms.iter().sum();
                    let scale: f64 = terms.iter().map(|x| x.abs()).sum();
                    if sum.abs() > terms.len() as f64 * f64::EPSILON * scale {
                        failures.push(format!("{tag} row sum {a}{b} = {sum:e}"));
                    }
                    if k.tensor(a, b) != k.tensor(b, a) {
                        failures.push(format!("{tag} K^{a}{b} != K^{b}{a}"));
                    }
                    for d in k.stencil() {
                        let v = k.get(a, b, d);
                        if v != k.get(a, b, [-d[0], -d[1], -d[2]]) {
                            failures.push(format!("{tag} parity {a}{b} at {d:?}"));
                        }
                        if a == b && d != [0, 0, 0] && v < 0.0 {
                            failures.push(format!("{tag} negative diagonal entry at {d:?}"));
                        }
                    }
                }
            }
            let shifted = KernelStack::build(&grid.with_origin([0.37, -1.2, 5.0]), &horizon, &MaterialParams::steel()).unwrap();
            if shifted.tensors() != k.tensors() {
                failures.push(format!("{tag} translation changed the kernel"));
            }
        }
    }
    let (delta, h) = (0.003, 0.001);
    for (dist, expect) in [(0.5 * h, 1.0), (delta - 0.5 * h, 1.0), (delta, 0.5), (delta + 0.5 * h, 0.0), (2.0 * delta, 0.0)] {
        let got = volume_correction(dist, delta, h);
        if got != expect {
            failures.push(format!("λ({dist}) = {got}, expected {expect}"));
        }
    }
    let detail = if failures.is_empty() {
        "row sums, symmetry, parity, sign, translation invariance, λ branches for 2D/3D M=1..4".to_string()
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("2D oracle equivalence", oracle_2d, 5.0),
        ("3D oracle equivalence", oracle_3d, 30.0),
        ("decomposition identity", decomposition, f64::INFINITY),
        ("rigid-translation null force", rigid_translation, f64::INFINITY),
        ("fast/dense trajectory equivalence", trajectory, 600.0),
        ("scaling exponents", scaling, f64::INFINITY),
        ("quasi-static convergence", quasi_static, f64::INFINITY),
        ("fracture qualitative checks", fracture, f64::INFINITY),
        ("kernel property suite", kernel_properties, 1.0),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let Outcome { pass, detail } = run();
        let secs = t0.elapsed().as_secs_f64();
        let in_time = secs <= *budget;
        let pass = pass && in_time;
        let limit = if budget.is_finite() { format!(", limit {budget} s") } else { String::new() };
        println!("{} {id}. {name}: {detail} [{secs:.1} s{limit}]", if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
