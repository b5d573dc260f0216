//! Regenerate the frozen volume-polynomial table.
//!
//! ```text
//! wpsys-tablegen [--m-max N] [--out PATH]
//! ```
//!
//! Writes the table JSON to PATH (stdout when omitted).

use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut m_max = 4u32;
    let mut out_path: Option<String> = None;

    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--m-max" => match args.next().and_then(|v| v.parse().ok()) {
                Some(v) if v >= 1 => m_max = v,
                _ => return usage("--m-max expects a positive integer"),
            },
            "--out" => match args.next() {
                Some(p) => out_path = Some(p),
                None => return usage("--out expects a path"),
            },
            other => return usage(&format!("unknown argument `{other}`")),
        }
    }

    let table = wpsys_tablegen::generate_table(m_max);
    let text = wpsys_tablegen::render_table(&table);
    match out_path {
        Some(path) => {
            if let Err(err) = std::fs::write(&path, text) {
                eprintln!("error: cannot write {path}: {err}");
                return ExitCode::from(4);
            }
            eprintln!(
                "wrote {} entries (complexity <= {}) to {}",
                table.entries.len(),
                m_max,
                path
            );
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(4);
            }
        }
    }
    ExitCode::SUCCESS
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("usage: wpsys-tablegen [--m-max N] [--out PATH]");
    ExitCode::from(2)
}
