//! The exact (p, s, r) triples and the Hölder chain `1/r + 1/2 + 1/p = 1`.
//!
//!     cargo run --example exponent_table -- 7/3 5

use nuclear_trace::exponents::{check_holder_chain, exponent_budget, reduce_to_p_ge_2};
use nuclear_trace::Exponent;

fn main() -> nuclear_trace::Result<()> {
    let mut ps: Vec<String> = std::env::args().skip(1).collect();
    if ps.is_empty() {
        ps = ["1", "4/3", "2", "3", "4", "inf"].map(String::from).to_vec();
    }
    println!("{:>6} {:>6} {:>6} {:>6}  chain", "p", "p≥2", "s", "r");
    for p in ps {
        let p: Exponent = p.parse()?;
        let t = exponent_budget(p);
        let chain = check_holder_chain(&[t.r, Exponent::TWO, reduce_to_p_ge_2(p)]);
        println!("{:>6} {:>6} {:>6} {:>6}  {chain}", p.to_string(), t.p.to_string(), t.s.to_string(), t.r.to_string());
    }
    Ok(())
}
