// Three lines through the origin with slopes 0, 1, 2: the spectrum, the
// λ-invariant and the unit constants of their local ring.

use starforge::kernel::int;
use starforge::kernel::scalar::display_scalar;
use starforge::star::lines;

pub fn run_example() -> starforge::Result<()> {
    let s = lines(&[int(0), int(1), int(2)])?;
    println!("levels q = {:?}, dim B = {}", s.q(), s.dim());
    println!("spectrum:\n{}", s.spectrum()?);

    let lambda = s.lambda()?;
    let shown: Vec<String> = lambda.iter().map(display_scalar).collect();
    println!("lambda = ({})", shown.join(", "));

    let table = s.unit_constants()?;
    for i in 0..s.n() {
        for j in (0..s.n()).filter(|&j| j != i) {
            let row: Vec<String> = (0..s.n())
                .filter(|&m| m != i && m != j)
                .map(|m| format!("b^({}) = {}", m + 1, display_scalar(table.get(i, j, m))))
                .collect();
            println!("pair ({}, {}): {}", i + 1, j + 1, row.join(", "));
        }
    }
    Ok(())
}

fn main() {
    run_example().expect("lines example");
}
