// Drive the command line in-process: write a star document, analyze it,
// and run a short verify suite.

use starforge::cli::run;
use starforge::io::{emit_document, Document};
use starforge::star::congruence_pair;

pub fn run_example() -> starforge::Result<()> {
    let path = std::env::temp_dir().join(format!("starforge-example-{}.json", std::process::id()));
    let doc = Document::from_star(&congruence_pair(3)?, None);
    std::fs::write(&path, emit_document(&doc))
        .map_err(|e| starforge::Error::Usage(e.to_string()))?;

    let file = path.display().to_string();
    let out = run(["starforge", "analyze", "--format", "text", file.as_str()]);
    print!("{}", out.stdout);
    println!("exit code {}", out.code);

    let out = run([
        "starforge",
        "verify",
        "ultrametric",
        "--trials",
        "3",
        "--format",
        "text",
    ]);
    print!("{}", out.stdout);
    let _ = std::fs::remove_file(&path);
    Ok(())
}

fn main() {
    run_example().expect("cli example");
}
