//! Spline time average of a survival curve on a coarse grid compared with
//! the exponential closed form.

use crdd::decay::time_avg_survival;

fn main() -> crdd::Result<()> {
    let (a, c, tmax) = (0.5, 0.5, 1.0);
    for gamma in [0.5, 1.0, 2.0, 4.0] {
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let t = tmax * i as f64 / 19.0;
                (t, a * (-gamma * t).exp() + c)
            })
            .collect();
        let spline = time_avg_survival(&pts, tmax)?;
        let exact = (a * (1.0 - (-gamma * tmax).exp()) / gamma + c * tmax) / (tmax * (a + c));
        println!("gamma T = {gamma:3.1}: spline {spline:.6}, exact {exact:.6}, rel err {:.1e}", (spline - exact).abs() / exact);
    }
    Ok(())
}
