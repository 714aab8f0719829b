//! Dirichlet forms of the scaled walk and of the inclusion pair: the
//! domination gap, and the recovery sequence ℰ_N(Ψ_N f) → χ∫(f')².
//!
//! ```bash
//! cargo run --release -p sipcond --example dirichlet_forms
//! ```

use sipcond::dirichlet_forms::{
    continuum_forms, default_window, form_e_n, form_r_n, inclusion_gap, mosco2_sequence, phi_n, FormParams,
};
use sipcond::test_function::TestFunction;
use sipcond::FiniteRangeKernel;

fn main() -> sipcond::Result<()> {
    let kernel = FiniteRangeKernel::nearest_neighbor();
    let gamma = 1.0;
    // off-centre so that f'(0) ≠ 0 and Φ_N f pays the gap
    let f = TestFunction::raised_cosine(0.25, 1.0);

    for n in [16u32, 64] {
        let params = FormParams::new(gamma, kernel.clone(), n)?;
        let g = phi_n(&f, n, default_window(&f, &kernel, n));
        println!(
            "N = {n:>3}: ℛ_N(Φ_N f) = {:.5}, ℰ_N(Φ_N f) = {:.5}, gap = {:.5}",
            form_r_n(&g, &kernel),
            form_e_n(&g, &params),
            inclusion_gap(&g, &params)
        );
    }

    let table = mosco2_sequence(&f, &[32, 64, 128, 256, 512], gamma, &kernel)?;
    println!("{:>5} {:>12} {:>12}", "N", "ℰ_N(Ψ_N f)", "ℛ_N(Φ_N f)");
    for row in &table.rows {
        println!("{:>5} {:>12.6} {:>12.6}", row.n, row.e_psi, row.r_phi);
    }
    let (bm, sbm) = continuum_forms(&f, kernel.chi())?;
    println!("extrapolated {:.6}, χ∫f'² = {:.6}, order {:.3}", table.extrapolated, table.derived_limit, table.observed_order);
    println!("(χ/2)∫f'² = {:.6}; continuum forms ℰ_bm = {bm:.6}, ℰ_sbm = {sbm:.6}", table.paper_limit);
    Ok(())
}
