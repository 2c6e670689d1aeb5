//! On `ℓ₂`: `Σ|λ_n| ≤ Σσ_n ≤ Σμ_k` for a few random representations.

use nuclear_trace::harness::{generate, Family, FamilySpec};
use nuclear_trace::spectra::weyl_check;

fn main() -> nuclear_trace::Result<()> {
    println!("{:>10} {:>10} {:>10}  pass", "Σ|λ|", "Σσ", "Σμ");
    for stream in 0..8 {
        let rep = generate(&FamilySpec {
            family: Family::RandomUnit,
            p: "2".parse()?,
            dim: 32,
            terms: 12,
            exponent_multiplier: 1.1,
            seed: 5,
            stream,
        })?;
        let w = weyl_check(&rep)?;
        println!("{:>10.6} {:>10.6} {:>10.6}  {}", w.abs_sum, w.singular_sum, w.nuclear_bound, w.pass);
    }
    Ok(())
}
