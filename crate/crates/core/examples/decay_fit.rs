//! Fit A·exp(−γt) + c to shot-noisy survival data and put a bootstrap
//! interval on a mean survival value.

use crdd::decay::{bootstrap_mean_ci, characteristic_time, fit_decay};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

fn main() -> crdd::Result<()> {
    let (a, gamma, c) = (0.45, 5e4, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<(f64, f64)> = (0..=20)
        .map(|i| {
            let t = i as f64 * 4e-6;
            let p = a * (-gamma * t).exp() + c;
            (t, Binomial::new(1000, p).unwrap().sample(&mut rng) as f64 / 1000.0)
        })
        .collect();
    let f = fit_decay(&pts)?;
    println!("A = {:.4} ± {:.4}", f.a, f.std_err[0]);
    println!("gamma = {:.4e} ± {:.1e} 1/s (true {gamma:e})", f.gamma, f.std_err[1]);
    println!("c = {:.4} ± {:.4}", f.c, f.std_err[2]);
    println!("tau_gamma = {:.3} µs, flag {}", characteristic_time(&f)? * 1e6, f.flag.as_str());

    let flat: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.97)).collect();
    println!("constant data -> {}", fit_decay(&flat)?.flag.as_str());

    let finals: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let ci = bootstrap_mean_ci(&finals, 10_000, 0.95, 1)?;
    println!("mean p0 {:.4}, 95% CI [{:.4}, {:.4}]", ci.mean, ci.lower, ci.upper);
    Ok(())
}
