// Grow a random four-component star from a congruence pair and print the
// builder script that reproduces it.

use starforge::build::random_tower_script;
use starforge::io::{emit_document, Document, ScriptDocument};

pub fn run_example() -> starforge::Result<()> {
    let seed = 2024;
    let script = random_tower_script(seed, 4, 3)?;
    for (k, s) in script.build_all()?.iter().enumerate() {
        println!(
            "stage {k}: n = {}, q = {:?}, oblate = {}",
            s.n(),
            s.q(),
            s.is_oblate()?
        );
    }
    let star = script.build()?;
    println!("spectrum of the top star:\n{}", star.spectrum()?);

    let doc = Document::BuilderScript(ScriptDocument::from_tower(&script, Some(seed)));
    print!("{}", emit_document(&doc));
    Ok(())
}

fn main() {
    run_example().expect("tower example");
}
