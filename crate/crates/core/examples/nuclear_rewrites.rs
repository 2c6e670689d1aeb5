//! One operator, many representations: random split/merge/rotate chains move
//! the coefficients around but leave the nuclear trace and the operator fixed.

use nuclear_trace::harness::{generate, Family, FamilySpec};
use nuclear_trace::nuclear::equivalent;

fn main() -> nuclear_trace::Result<()> {
    let rep = generate(&FamilySpec {
        family: Family::SharedFunctionalRotations,
        p: "3".parse()?,
        dim: 12,
        terms: 6,
        exponent_multiplier: 1.1,
        seed: 7,
        stream: 0,
    })?;
    println!("start: {} terms, trace {:.15}", rep.len(), rep.nuclear_trace());
    for seed in 0..5 {
        let (out, steps) = rep.rewrite_chain(10, seed)?;
        let names: Vec<String> = steps.iter().map(ToString::to_string).collect();
        println!(
            "chain {seed}: {:>2} terms, trace {:.15}, same operator {}  [{}]",
            out.len(),
            out.nuclear_trace(),
            equivalent(&rep, &out, 1e-12)?,
            names.join(" ")
        );
    }
    Ok(())
}
