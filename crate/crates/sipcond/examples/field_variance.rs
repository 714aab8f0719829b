//! Variance of the density fluctuation field: the finite-N duality formula
//! against the N → ∞ limit, for both sticky-kernel conventions.
//!
//! ```bash
//! cargo run --release -p sipcond --example field_variance
//! ```

use sipcond::fluctuation_field::{finite_variance, limit_variance_alt_with, limit_variance_with, VarianceInputs};
use sipcond::sticky_bm::StickyKernel;
use sipcond::test_function::TestFunction;
use sipcond::FiniteRangeKernel;

fn main() -> sipcond::Result<()> {
    let phi = TestFunction::raised_cosine(0.0, 1.0);
    let (gamma, rho, t) = (1.0, 1.0, 0.1);
    let kernel = FiniteRangeKernel::nearest_neighbor();
    let printed = StickyKernel::printed(gamma);
    let reversible = StickyKernel::reversible(gamma);

    let lim_p = limit_variance_with(t, &phi, rho, &printed)?.value;
    let lim_r = limit_variance_with(t, &phi, rho, &reversible)?.value;
    let alt_r = limit_variance_alt_with(t, &phi, rho, &reversible)?.value;
    println!("limit (printed kernel)    {lim_p:.8}");
    println!("limit (reversible kernel) {lim_r:.8}  alt route {alt_r:.8}");

    println!("{:>5} {:>12} {:>12} {:>12}", "N", "finite", "err printed", "err revers.");
    for n in [10u32, 20, 40, 80] {
        let v = finite_variance(n, t, &phi, VarianceInputs::poisson(rho)?, gamma, &kernel, 1e-8)?.value;
        println!("{n:>5} {v:>12.8} {:>12.3e} {:>12.3e}", (v - lim_p).abs(), (v - lim_r).abs());
    }
    Ok(())
}
