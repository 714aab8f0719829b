//! Exact simulation of the inclusion process on a torus. With small k the
//! particles pile up: the mean maximal occupancy grows while the density
//! stays fixed. The stationary product measure keeps its site variance.
//!
//! ```bash
//! cargo run --release -p sipcond --example sip_simulation
//! ```

use sipcond::rng::par_replicas;
use sipcond::sip_lattice::{sample_stationary_product, simulate_in_place, stationary_marginal_pmf, SipParams};
use sipcond::stats::MeanVar;
use sipcond::FiniteRangeKernel;

fn main() -> sipcond::Result<()> {
    let (l, rho, reps) = (64, 2.0, 200);
    println!("{:>6} {:>10} {:>14} {:>14}", "k", "t", "max occupancy", "site variance");
    for k in [10.0, 1.0, 0.1] {
        let params = SipParams::new(k, FiniteRangeKernel::nearest_neighbor(), l)?;
        for t in [0.0, 5.0] {
            let stats = par_replicas(reps, 7, |_, r| {
                let mut c = sample_stationary_product(rho, k, l, r);
                simulate_in_place(&mut c, &params, t, r);
                let occ = c.occupancies();
                let var = occ.iter().map(|&n| (n as f64 - rho).powi(2)).sum::<f64>() / l as f64;
                (*occ.iter().max().unwrap() as f64, var)
            });
            let max: MeanVar = stats.iter().map(|s| s.0).collect();
            let var: MeanVar = stats.iter().map(|s| s.1).collect();
            println!("{k:>6} {t:>10} {:>14.2} {:>14.3}", max.mean(), var.mean());
        }
        // negative binomial marginal: variance ρ + ρ²/k
        println!("{:>6} {:>10} {:>14} {:>14.3}", "", "exact", "", rho + rho * rho / k);
    }
    let total: f64 = (0..400).map(|n| stationary_marginal_pmf(n, rho, 0.1)).sum();
    println!("Σ μ_ρ(η_x = n) over n < 400 at k = 0.1: {total:.12}");
    Ok(())
}
