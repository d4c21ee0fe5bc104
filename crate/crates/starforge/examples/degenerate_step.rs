// The extension u = (β_i t^{p_in}) of the p = 1 pair star fails exactly
// when λ_1/β_1 + λ_2/β_2 vanishes. With λ = (1, −1) that is β_1 = β_2.

use starforge::build::{analyze_quotient, extend_star, ExtensionStep};
use starforge::kernel::scalar::display_scalar;
use starforge::star::congruence_pair;
use starforge::Error;

pub fn run_example() -> starforge::Result<()> {
    let s = congruence_pair(1)?;
    for beta in [[1, 2], [1, 1], [3, -1]] {
        let step = ExtensionStep::constant(vec![1, 1], &beta);
        let rep = analyze_quotient(&s, &step)?;
        let value: Vec<String> = rep.nondegeneracy.iter().map(display_scalar).collect();
        print!("beta = {beta:?}: sum lambda/beta = {}, ", value.join(" "));
        match extend_star(&s, &step) {
            Ok(ext) => println!("extends to levels {:?}", ext.q()),
            Err(Error::DegenerateExtension { .. }) => println!("refused as degenerate"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn main() {
    run_example().expect("degenerate step example");
}
