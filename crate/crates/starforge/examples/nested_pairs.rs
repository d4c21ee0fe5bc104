// The p = 2 pair algebra sits inside the p = 1 one, and the inclusion is
// not flat.

use starforge::compare::{compare_stars, nonflatness_witness};
use starforge::star::congruence_pair;

pub fn run_example() -> starforge::Result<()> {
    let (a, b) = (congruence_pair(1)?, congruence_pair(2)?);
    let rep = compare_stars(&a, &b)?;
    println!("verdict: {:?}", rep.verdict);
    for c in &rep.checks {
        println!("  {c}");
    }
    let w = nonflatness_witness(&b, &a)?;
    println!("u = {}, v = {}", w.u, w.v);
    println!("uv = 0: {}, phi(u x v) = {}", w.uv_zero, w.phi);
    println!("certified: {}", w.certified());
    Ok(())
}

fn main() {
    run_example().expect("nested pairs example");
}
