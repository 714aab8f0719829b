//! Jump kernels: presets, a custom kernel, χ, irreducibility and the rescaled
//! support sets.
//!
//! ```bash
//! cargo run --release -p sipcond --example kernel_info
//! ```

use sipcond::{Error, FiniteRangeKernel};

fn main() -> sipcond::Result<()> {
    let kernels = [
        ("nearest neighbour", FiniteRangeKernel::nearest_neighbor()),
        ("range two", FiniteRangeKernel::range_two()),
        ("custom", FiniteRangeKernel::new(vec![0.1, 0.0, 0.3])?),
    ];
    for (name, k) in &kernels {
        println!("{name:<18} R = {}  Σp = {:.3}  χ = {:.3}", k.range(), k.total_weight(), k.chi());
        let sets = k.support_sets(10);
        println!("{:<18} A_N = {:?}", "", sets.a);
    }

    // weights on even jumps only: the walk lives on 2ℤ
    match FiniteRangeKernel::new(vec![0.0, 0.5]) {
        Err(Error::NonIrreducible { gcd }) => println!("p(2) only: rejected, support gcd {gcd}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
