// Three planes y = c_i x in the (x, y, t) picture, one constant extension
// step, and the star recovered from the t-only members.

use starforge::build::{extend_star, ExtensionStep};
use starforge::deform::{extend_deformation, extract_star, planes, DeformStep};
use starforge::kernel::int;
use starforge::star::lines;

pub fn run_example() -> starforge::Result<()> {
    let c = [int(0), int(1), int(2)];
    let d = planes(&c, 3)?;
    println!("planes: q = {:?}, dim = {}", d.q(), d.dim());
    println!("{}", d.curve_ideal_check()?);

    let ex = extract_star(&d)?;
    println!("extracted star equals lines: {}", ex.star == lines(&c)?);

    let step = ExtensionStep::constant(vec![1, 1, 1], &[1, 2, 3]);
    let ext = extend_deformation(&d, &DeformStep::from_star_step(&step, 3))?;
    println!("quotient certified: {}", ext.report.certified());
    if let Some(d2) = ext.completion {
        let s2 = extend_star(&lines(&c)?, &step)?;
        println!(
            "extend then extract matches: {}",
            extract_star(&d2)?.star == s2
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("planes example");
}
