//! The scaled difference chain p_{α(N,t)}(⌊vN⌋, 0) against sticky Brownian
//! motion. The chain settles on the kernel whose stickiness is the weight
//! √2γ of the atom in its reversible measure; the printed closed form stays
//! away.
//!
//! ```bash
//! cargo run --release -p sipcond --example sticky_convergence
//! ```

use sipcond::difference_chain::{scaled_column, ScaledDiffParams};
use sipcond::sticky_bm::StickyKernel;
use sipcond::FiniteRangeKernel;

fn main() -> sipcond::Result<()> {
    let (gamma, t) = (1.0, 0.5);
    let printed = StickyKernel::printed(gamma);
    let reversible = StickyKernel::reversible(gamma);
    let target = |k: &StickyKernel, v: f64| if v == 0.0 { k.mass(t) } else { k.hit_zero_prob(v, t) };
    println!("{:>5} {:>6} {:>10} {:>10} {:>10}", "N", "v", "chain", "printed", "reversible");
    for n in [25u32, 50, 100] {
        let sp = ScaledDiffParams::new(n, gamma, FiniteRangeKernel::nearest_neighbor())?;
        let col = scaled_column(t, &sp, 1e-8)?;
        for v in [0.0, 0.25, 0.5] {
            let p = col.get((v * n as f64).floor() as i64);
            println!("{n:>5} {v:>6} {p:>10.5} {:>10.5} {:>10.5}", target(&printed, v), target(&reversible, v));
        }
    }
    Ok(())
}
