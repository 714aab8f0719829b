//! The difference chain of two inclusion particles: detailed balance,
//! uniformization with its window check, and simulated paths.
//!
//! ```bash
//! cargo run --release -p sipcond --example difference_chain
//! ```

use sipcond::difference_chain::{
    detailed_balance_residual, simulate_path, transition_column, DiffChainParams, TruncationWindow,
};
use sipcond::rng::par_replicas;
use sipcond::FiniteRangeKernel;

fn main() -> sipcond::Result<()> {
    let params = DiffChainParams::new(0.5, FiniteRangeKernel::range_two())?;
    let worst = (-6..=6)
        .flat_map(|w| params.kernel.jumps().into_iter().map(move |r| (w, r)))
        .map(|(w, r)| detailed_balance_residual(w, r, &params).abs())
        .fold(0.0, f64::max);
    println!("max detailed-balance residual near 0: {worst:.1e}");

    let t = 2.0;
    let window = TruncationWindow::auto(&params, t);
    let col = transition_column(&params, t, window, 1e-8)?;
    println!("window M = {}, error bound {:.1e}", col.m, col.error_bound);

    // the column is p_t(w, 0): paths start at w and must end at 0
    let reps = 50_000;
    println!("{:>4} {:>10} {:>10}", "w", "p_t(w,0)", "MC");
    for w in -3..=3 {
        let hits = par_replicas(reps, (w + 10) as u64, |_, r| simulate_path(w, &params, t, r) == 0);
        let freq = hits.iter().filter(|&&h| h).count() as f64 / reps as f64;
        println!("{w:>4} {:>10.5} {freq:>10.5}", col.get(w));
    }
    Ok(())
}
