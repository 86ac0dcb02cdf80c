//! End-to-end acceptance checks. Prints one `[criterion N] PASS|FAIL` line
//! per criterion and exits nonzero if any fails.

use std::time::Instant;

use crdd::control::{
    bang_bang_trace, chi1, classify_symmetry, control_trace, control_traces, propagate, verify_first_order,
    ControlTrace, ErrorMatrix, PropagateOptions, Relation, Target, AXES,
};
use crdd::decay::{bootstrap_mean_ci, fit_decay, time_avg_survival};
use crdd::harness::{default_plan, fit_dataset, run_experiment, summarize, write_summary, DEFAULT_TAU_P_S};
use crdd::io::{write_fits, write_results};
use crdd::linalg::rotation;
use crdd::sequence::{
    catalog_phases, cr_variant, pad_k, sim_k, sim_variant, ColoredSchedule, Padding, PulseShape, QubitGraph, Sequence,
};
use crdd::sim::{CycleEvolver, DeviceModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};

const S: usize = 256;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion1() -> Outcome {
    let tp = DEFAULT_TAU_P_S;
    let mut notes = Vec::new();
    let mut pass = true;
    for shape in [PulseShape::drag(), PulseShape::Square] {
        let named = |r: &str, b: &str| ColoredSchedule::named(r, b, tp, shape.clone()).unwrap();
        let cr_xy4 = named("XY4", "XY4");
        let mut cases = vec![
            ("CR-XY4".to_string(), cr_xy4.clone()),
            ("CR-KDD".into(), named("KDD", "KDD")),
            ("CR-UR10".into(), named("UR10", "UR10")),
            ("CR-RGA64c".into(), named("RGA64c", "RGA64c")),
            ("CR-(XY4,UR12)".into(), named("XY4", "UR12")),
        ];
        for k in [2, 4] {
            for mode in [Padding::Symmetric, Padding::Asymmetric] {
                cases.push((
                    format!("CR-XY4-{k}{}", mode.suffix()),
                    pad_k(&cr_xy4, k, mode).unwrap(),
                ));
            }
        }
        let mut worst = 0.0f64;
        for (label, sched) in &cases {
            let r = verify_first_order(Target::Schedule(sched), PropagateOptions::samples(S), 1e-8).unwrap();
            if !r.pass {
                pass = false;
                notes.push(format!("{label} ({}) max|chi2|/tau_c = {:e}", shape.kind(), r.max_residual));
            }
            worst = worst.max(r.max_residual);
        }
        notes.push(format!("{} worst CR max|chi2|/tau_c = {worst:.2e}", shape.kind()));
    }
    let k = 2;
    let sim = sim_k("XY4", tp, k, PulseShape::Square).unwrap();
    let r = verify_first_order(Target::Simultaneous(&sim), PropagateOptions::samples(S), 1e-8).unwrap();
    let fails = r.failures();
    let tau_d = (k - 1) as f64 * tp;
    let expect = 4.0 * tau_d + 2.0 * tp;
    let zz = r.chi2.values[(2, 2)];
    let sim_ok = !r.pass
        && fails.contains(&("X", "X"))
        && fails.contains(&("Z", "Z"))
        && (zz - expect).abs() <= 1e-6 * r.duration;
    pass &= sim_ok;
    notes.push(format!(
        "SIM-XY4-2 fails at {fails:?}, chi2_ZZ = {zz:e} vs 4tau_d+2tau_p = {expect:e}"
    ));
    outcome(pass, notes.join("; "))
}

/// Entries of `χ₁` above `tol·τ_c`, as `(μ, α)` labels.
fn support(m: &ErrorMatrix, tol: f64) -> Vec<(&'static str, &'static str)> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if m.values[(i, j)].abs() > tol * m.duration {
                out.push((AXES[i], AXES[j]));
            }
        }
    }
    out
}

fn chi1_pair(s: &ColoredSchedule) -> [ErrorMatrix; 2] {
    let tr = control_traces(&[&s.red, &s.blue], PropagateOptions::samples(S)).unwrap();
    [chi1(&tr[0]), chi1(&tr[1])]
}

fn criterion2() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let cases: [(&str, &[(&str, &str)]); 2] = [
        ("XY4", &[("X", "Z"), ("Y", "Z")]),
        ("UR10", &[("X", "X"), ("X", "Y"), ("Y", "X"), ("Y", "Y")]),
    ];
    for (name, pattern) in cases {
        let s = ColoredSchedule::named(name, name, DEFAULT_TAU_P_S, PulseShape::Square).unwrap();
        for (color, m) in ["red", "blue"].iter().zip(chi1_pair(&s)) {
            let sup = support(&m, 1e-8);
            let off: Vec<_> = sup.iter().filter(|e| !pattern.contains(e)).collect();
            let ok = off.is_empty() && !sup.is_empty();
            pass &= ok;
            notes.push(format!("CR-{name} {color}: nonzero at {sup:?}"));
        }
    }
    outcome(pass, notes.join("; "))
}

fn criterion3() -> Outcome {
    let tp = DEFAULT_TAU_P_S;
    let mut ratios = Vec::new();
    for shape in [PulseShape::Square, PulseShape::drag(), PulseShape::gaussian()] {
        let max_chi1 = |name: &str, reps: usize| {
            let s = ColoredSchedule::named(name, name, tp, shape.clone()).unwrap();
            let s = ColoredSchedule::new(s.red.repeat(reps), s.blue.repeat(reps)).unwrap();
            chi1_pair(&s).iter().map(|m| m.max_abs()).fold(0.0, f64::max)
        };
        // 20 pulses each
        ratios.push((shape.kind(), max_chi1("UR10", 2) / max_chi1("XY4", 5)));
    }
    let square = ratios[0].1;
    outcome(
        (1.48..=2.22).contains(&square),
        format!(
            "max|chi1(CR-UR10)|/max|chi1(CR-XY4)| at 20 pulses: {}",
            ratios
                .iter()
                .map(|(k, r)| format!("{k} {r:.3}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn criterion4() -> Outcome {
    let tp = DEFAULT_TAU_P_S;
    let tol = 1e-6;
    let traces = |s: &ColoredSchedule| control_traces(&[&s.red, &s.blue], PropagateOptions::samples(S)).unwrap();
    let check = |tr: &ControlTrace, mu: usize, alpha: usize, rel: Relation| {
        let rep = classify_symmetry(tr, mu, alpha, tol).unwrap();
        (rep.has(rel), rep.residual(rel))
    };
    let mut pass = true;
    let mut notes = Vec::new();
    let xy4 = traces(&ColoredSchedule::named("XY4", "XY4", tp, PulseShape::Square).unwrap());
    for (color, tr) in ["red", "blue"].iter().zip(&xy4) {
        for (mu, alpha, rel, label) in [
            (2, 2, Relation::DisplacementSymmetric, "ZZ displacement symmetric"),
            (2, 0, Relation::DisplacementAntisymmetric, "ZX displacement antisymmetric"),
        ] {
            let (ok, res) = check(tr, mu, alpha, rel);
            pass &= ok && res <= tol;
            notes.push(format!("CR-XY4 {color} R^{label}: residual {res:.1e}"));
        }
    }
    let ur12 = catalog_phases("UR12").unwrap();
    let s = cr_variant(&ur12, &ur12, tp, PulseShape::Square).unwrap();
    let tr = traces(&s);
    for (alpha, label) in [(0, "ZX"), (1, "ZY")] {
        let (ok, res) = check(&tr[1], 2, alpha, Relation::DisplacementAntisymmetric);
        pass &= ok && res <= tol;
        notes.push(format!("CR-UR12 blue R^{label} displacement antisymmetric: residual {res:.1e}"));
    }
    outcome(pass, notes.join("; "))
}

/// `min_φ ‖e^{−iφ} U − U₀‖_F` for the two-qubit cycle at coupling `j`.
fn cycle_error(seqs: &[&Sequence], j: f64) -> f64 {
    let dev = |j: f64| DeviceModel {
        graph: QubitGraph::path(2),
        couplings: vec![j],
        fields: vec![[0.0; 3]; 2],
        tau_p_s: seqs[0].tau_p,
    };
    let u0 = CycleEvolver::new(&dev(0.0), seqs, S).unwrap().cycle_unitary();
    let u = CycleEvolver::new(&dev(j), seqs, S).unwrap().cycle_unitary();
    let overlap = (u0.adjoint() * &u).trace();
    let phase = overlap / overlap.norm();
    (u / phase - u0).norm()
}

fn criterion5() -> Outcome {
    let tp = DEFAULT_TAU_P_S;
    let sim = sim_k("XY4", tp, 1, PulseShape::Ideal).unwrap();
    // With ideal pulses the staggered toggling-frame Hamiltonian stays ∝ ZZ
    // and commutes with itself, so CR-XY4 is exact to all orders; finite
    // pulses rotate Z through the equator and leave a second-order term.
    let cr = ColoredSchedule::named("XY4", "XY4", tp, PulseShape::Square).unwrap();
    let js: Vec<f64> = (0..9).map(|i| 10f64.powf(-4.0 + 0.25 * i as f64)).collect();
    let slope = |seqs: &[&Sequence]| {
        let tc = seqs[0].duration();
        let x: Vec<f64> = js.iter().map(|j| j / tc).collect();
        let y: Vec<f64> = x.iter().map(|&j| cycle_error(seqs, j)).collect();
        loglog_slope(&x, &y)
    };
    let (a, b) = (slope(&[&sim, &sim]), slope(&[&cr.red, &cr.blue]));
    outcome(
        (a - 1.0).abs() <= 0.1 && (b - 2.0).abs() <= 0.1,
        format!("log-log slope of cycle error vs J over [1e-4, 1e-2]/tau_c: SIM-XY4 (ideal) {a:.3}, CR-XY4 (square) {b:.3}"),
    )
}

fn criterion6() -> Outcome {
    let plan = default_plan(2024).unwrap();
    let data = run_experiment(&plan).unwrap();
    let fits = fit_dataset(&data.rows).unwrap();
    let summary = summarize(&fits).unwrap();
    let get = |m: &str| summary.iter().find(|r| r.method == m).unwrap();
    let (cr, sim, idle) = (get("CR-XY4"), get("SIM-XY4-2"), get("IDLE"));
    let ratio = cr.ratio_cr_sim.unwrap_or(f64::NAN);
    let unresolved = fits
        .iter()
        .filter(|f| f.method == "CR-XY4" && f.fit.tau_gamma.is_infinite())
        .count();
    outcome(
        ratio >= 3.0,
        format!(
            "median tau: CR-XY4 {:e} s, SIM-XY4-2 {:e} s, IDLE {:e} s; CR/SIM = {ratio:e}; \
             {unresolved}/{} CR embeddings show no decay distinguishable from shot noise, \
             so the ratio is a lower bound; {} failed cells",
            cr.median_tau_s,
            sim.median_tau_s,
            idle.median_tau_s,
            cr.embeddings,
            data.failures.len()
        ),
    )
}

fn criterion7() -> Outcome {
    let (a, gamma, c) = (0.45, 2.0e4, 0.5);
    let t: Vec<f64> = (0..=20).map(|i| i as f64 * 1e-5).collect();
    let model = |x: f64| a * (-gamma * x).exp() + c;
    let exact: Vec<(f64, f64)> = t.iter().map(|&x| (x, model(x))).collect();
    let f = fit_decay(&exact).unwrap();
    let rel = [(f.a - a) / a, (f.gamma - gamma) / gamma, (f.c - c) / c]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut gammas: Vec<f64> = (0..100u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<(f64, f64)> = t
                .iter()
                .map(|&x| {
                    let k = Binomial::new(1000, model(x)).unwrap().sample(&mut rng);
                    (x, k as f64 / 1000.0)
                })
                .collect();
            fit_decay(&pts).unwrap().gamma
        })
        .collect();
    gammas.sort_by(f64::total_cmp);
    let median = 0.5 * (gammas[49] + gammas[50]);
    let gamma_err = (median - gamma).abs() / gamma;

    let trials = 1000;
    let normal = Normal::new(0.7, 0.1).unwrap();
    let mut covered = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + trial);
        let xs: Vec<f64> = (0..100).map(|_| normal.sample(&mut rng)).collect();
        let ci = bootstrap_mean_ci(&xs, 10_000, 0.95, trial).unwrap();
        if ci.lower <= 0.7 && 0.7 <= ci.upper {
            covered += 1;
        }
    }
    let coverage = covered as f64 / trials as f64;
    outcome(
        rel <= 1e-8 && gamma_err <= 0.05 && coverage >= 0.93,
        format!(
            "noiseless max rel err {rel:.1e}; 1000-shot median gamma off by {:.2}%; \
             bootstrap 95% CI coverage {:.1}% over {trials} trials",
            100.0 * gamma_err,
            100.0 * coverage
        ),
    )
}

fn criterion8() -> Outcome {
    let mut worst = 0.0f64;
    for (a, gamma, c) in [(0.5, 0.5, 0.5), (0.5, 1.0, 0.5), (0.8, 2.0, 0.2), (0.45, 4.0, 0.5)] {
        let tmax = 1.0;
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let t = tmax * i as f64 / 19.0;
                (t, a * (-gamma * t).exp() + c)
            })
            .collect();
        let got = time_avg_survival(&pts, tmax).unwrap();
        let exact = (a * (1.0 - (-gamma * tmax).exp()) / gamma + c * tmax) / (tmax * (a + c));
        worst = worst.max((got - exact).abs() / exact);
    }
    outcome(
        worst <= 0.01,
        format!("worst relative error {worst:.2e} over gamma*T in [0.5, 4]"),
    )
}

fn pipeline_bytes(threads: usize) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let plan = default_plan(7).unwrap();
        let data = run_experiment(&plan).unwrap();
        let fits = fit_dataset(&data.rows).unwrap();
        let (mut r, mut f, mut s) = (Vec::new(), Vec::new(), Vec::new());
        write_results(&mut r, &data.rows).unwrap();
        write_fits(&mut f, &fits).unwrap();
        write_summary(&mut s, &summarize(&fits).unwrap()).unwrap();
        (r, f, s)
    })
}

fn criterion9() -> Outcome {
    let a = pipeline_bytes(1);
    let b = pipeline_bytes(4);
    outcome(
        a == b,
        format!(
            "results {} bytes, fits {} bytes, summary {} bytes; 1-thread and 4-thread runs identical: {}",
            a.0.len(),
            a.1.len(),
            a.2.len(),
            a == b
        ),
    )
}

/// `∫ ‖R_square − R_bang‖_F dt` on the square trace's grid.
fn trace_l1(sq: &ControlTrace, bb: &ControlTrace) -> f64 {
    let diff = |i: usize| {
        let t = sq.grid.times[i];
        (sq.r[i] - bb.r[bb.node_at(t)]).norm()
    };
    let mut total = 0.0;
    for i in 1..sq.grid.times.len() {
        let dt = sq.grid.times[i] - sq.grid.times[i - 1];
        total += 0.5 * dt * (diff(i - 1) + diff(i));
    }
    total
}

fn criterion10() -> Outcome {
    let phases = catalog_phases("XY4").unwrap();
    let tau_d = 1.0;
    let eps: Vec<f64> = (0..5).map(|i| 0.1 / 2f64.powi(i)).collect();
    let errs: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let sq = sim_variant(&phases, e, tau_d, PulseShape::Square).unwrap();
            let id = sim_variant(&phases, e, tau_d, PulseShape::Ideal).unwrap();
            trace_l1(&control_trace(&sq, S).unwrap(), &bang_bang_trace(&id, S).unwrap())
        })
        .collect();
    let order = loglog_slope(&eps, &errs);

    let tp = DEFAULT_TAU_P_S;
    let seq = sim_variant(&phases, tp, tp, PulseShape::Square).unwrap();
    let p = propagate(&seq, S).unwrap();
    let mut before = crdd::linalg::identity2();
    let mut mid_err = 0.0f64;
    for (start, end, phase, flip) in seq.pulse_windows() {
        let n = [phase.cos(), phase.sin(), 0.0];
        let mid = 0.5 * (start + end);
        let i = p
            .grid
            .times
            .iter()
            .position(|&t| (t - mid).abs() <= 1e-9 * tp)
            .expect("grid node at pulse centre");
        let exact = rotation(n, flip / 2.0) * before;
        mid_err = mid_err.max((p.unitaries[i] - exact).norm());
        before = rotation(n, flip) * before;
    }
    outcome(
        (order - 1.0).abs() <= 0.1 && mid_err <= 1e-10,
        format!("trace L1 convergence order {order:.3} (errors {}); mid-pulse propagator error {mid_err:.1e}",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
        (10, criterion10),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let start = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[criterion {n}] {verdict} ({:.1} s) {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
