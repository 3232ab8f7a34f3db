use std::process::ExitCode;

use fastmdp::runner::{parse_cli, run_trials};

fn main() -> ExitCode {
    let manifest = match parse_cli(std::env::args_os()) {
        Ok(m) => m,
        Err(e) => e.exit(),
    };
    match run_trials(&manifest) {
        Ok(report) => {
            print!("{}", report.render_text());
            println!(
                "summary written to {}",
                manifest.out_dir.join("summary.json").display()
            );
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("fastmdp: {e}");
            ExitCode::FAILURE
        }
    }
}
