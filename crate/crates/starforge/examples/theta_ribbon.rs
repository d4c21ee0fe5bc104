// θ_μ acts as x ↦ x + μt; two of them that agree below t^{p−1} differ on
// the ribbon of a pair by a shear.

use starforge::deform::{induced_cocycle, ribbon_check, ThetaAutomorphism};
use starforge::kernel::BiPoly;

pub fn run_example() -> starforge::Result<()> {
    let (p, xdeg) = (2, 4);
    let mu = BiPoly::from_int_rows(xdeg, p, &[&[1, 0], &[0, 1]]);
    let th = ThetaAutomorphism::new(p, &mu);
    let x2 = BiPoly::from_int_rows(xdeg, p + 1, &[&[0], &[0], &[1]]);
    println!("theta(x^2) = {}", th.apply(&x2)?);

    let rib = ribbon_check(p, xdeg)?;
    println!("ribbon map certified: {}", rib.certified());

    let mu2 = BiPoly::from_int_rows(xdeg, p, &[&[1, 3], &[0, 1]]);
    let rec = induced_cocycle(p, &mu, &mu2)?;
    println!(
        "tau has {} coefficients, cocycle holds: {}",
        rec.tau.len(),
        rec.holds()
    );
    Ok(())
}

fn main() {
    run_example().expect("theta example");
}
