//! Eigenvalue sums along a truncation ladder, as CSV on stdout.
//!
//!     cargo run --example summability_ladder -- [diagonal|random_unit|shared_functional_rotations] [p]

use nuclear_trace::exponents::s_from_p;
use nuclear_trace::harness::{generate, Family, FamilySpec};
use nuclear_trace::spectra::{ladder_csv, summability_ladder};
use nuclear_trace::{Error, Exponent};

fn main() -> nuclear_trace::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = serde_json::from_value(serde_json::Value::String(
        args.first().cloned().unwrap_or_else(|| "diagonal".into()),
    ))
    .map_err(|e| Error::Config(e.to_string()))?;
    let p: Exponent = args.get(1).map_or("2", String::as_str).parse()?;
    let rows = summability_ladder(
        |n| {
            generate(&FamilySpec {
                family,
                p,
                dim: n,
                terms: n,
                exponent_multiplier: 1.1,
                seed: 1,
                stream: 0,
            })
        },
        &[64, 128, 256, 512],
        s_from_p(p),
    )?;
    print!("{}", ladder_csv(&rows));
    for w in rows.windows(2) {
        eprintln!("S_{} - S_{} = {:.6e}", w[1].level, w[0].level, w[1].abs_sum - w[0].abs_sum);
    }
    Ok(())
}
