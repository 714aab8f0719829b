//! The potential kernel of the walk and the dual form ℛ_N* computed by a
//! linear solve and by Fourier quadrature.
//!
//! ```bash
//! cargo run --release -p sipcond --example dual_form
//! ```

use sipcond::dirichlet_forms::{default_window, dual_form_rw, dual_limit_of_derivative, phi_n, potential_kernel, GridFunction};
use sipcond::test_function::TestFunction;
use sipcond::FiniteRangeKernel;

fn main() -> sipcond::Result<()> {
    for (name, kernel) in [("nn", FiniteRangeKernel::nearest_neighbor()), ("range2", FiniteRangeKernel::range_two())] {
        let a: Vec<String> = (0..=6).map(|n| potential_kernel(n, &kernel).map(|v| format!("{v:.4}"))).collect::<Result<_, _>>()?;
        println!("{name:<7} a(0..6) = [{}]; |n|/(2χ) slope {:.4}", a.join(", "), 1.0 / (2.0 * kernel.chi()));
    }

    let kernel = FiniteRangeKernel::nearest_neighbor();
    let base = TestFunction::raised_cosine(0.0, 1.0);
    let df = TestFunction::derivative_of(base.clone());
    println!("{:>5} {:>14} {:>14}", "N", "Legendre", "Fourier");
    for n in [16u32, 64, 256] {
        let g = phi_n(&df, n, default_window(&df, &kernel, n));
        let d = dual_form_rw(&g, &kernel)?;
        println!("{n:>5} {:>14.10} {:>14.10}", d.legendre, d.fourier);
    }
    println!("limit ∫f²/(4χ) = {:.10}", dual_limit_of_derivative(&base, &kernel));

    let lump = GridFunction::new(16, 0, vec![1.0]);
    println!("nonzero mean: ℛ_N* = {}", dual_form_rw(&lump, &kernel)?.legendre);
    Ok(())
}
