//! Sticky Brownian motion: the transition kernel in both conventions, its
//! semigroup residual at the atom, and a path built by time change.
//!
//! ```bash
//! cargo run --release -p sipcond --example sticky_bm
//! ```

use sipcond::rng::rng;
use sipcond::sticky_bm::{average_mass, time_change_path, StickyKernel};

fn main() -> sipcond::Result<()> {
    let gamma = 1.0;
    for k in [StickyKernel::printed(gamma), StickyKernel::reversible(gamma)] {
        println!("{:?}: θ = {:.4}", k.convention, k.theta());
        for t in [0.1, 1.0, 10.0] {
            println!(
                "  t = {t:>4}: atom {:.5}, density(0.5) {:.5}, normalization error {:.1e}",
                k.mass(t),
                k.density(0.5, t),
                k.normalization_error(t)?
            );
        }
        println!("  Chapman-Kolmogorov residual at the atom, s = t = 0.5: {:.2e}", k.semigroup_residual(0.5, 0.5)?);
    }

    // time spent at 0 by a simulated path against the kernel's atom
    let t_end = 1.0;
    let mut r = rng(5);
    let mut frac = 0.0;
    let paths = 200;
    for _ in 0..paths {
        let p = time_change_path(t_end, gamma, 1e-4, &mut r)?;
        frac += p.x.iter().filter(|x| x.abs() <= p.band).count() as f64 / p.x.len() as f64;
    }
    println!(
        "fraction of time near 0 over {paths} paths: {:.3}; (1/t)∫m(s)ds = {:.3}",
        frac / paths as f64,
        average_mass(&StickyKernel::reversible(gamma), t_end)?
    );
    Ok(())
}
