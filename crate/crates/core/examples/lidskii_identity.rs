//! Nuclear trace against the eigenvalue sum on random finite-rank operators.

use nuclear_trace::harness::{generate, Family, FamilySpec};
use nuclear_trace::spectral_report;

fn main() -> nuclear_trace::Result<()> {
    println!("{:>4} {:>4} {:>5} {:>14} {:>14} {:>10}", "p", "dim", "terms", "trace", "Σλ", "residual");
    for (case, p) in ["2", "3", "inf"].iter().cycle().take(9).enumerate() {
        let rep = generate(&FamilySpec {
            family: Family::RandomUnit,
            p: p.parse()?,
            dim: 16 + 8 * case,
            terms: 4 + 2 * case,
            exponent_multiplier: 1.1,
            seed: 11,
            stream: case as u64,
        })?;
        let r = spectral_report(&rep)?;
        println!(
            "{p:>4} {:>4} {:>5} {:>14.10} {:>14.10} {:>10.2e}",
            r.dim,
            rep.len(),
            r.nuclear_trace,
            r.eigen_sum.re,
            r.lidskii_residual
        );
    }
    Ok(())
}
