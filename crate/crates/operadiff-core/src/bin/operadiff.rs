use std::io::Write;

fn main() {
    let (code, out) = operadiff::cli::run(std::env::args());
    let mut stdout = std::io::stdout();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    std::process::exit(code);
}
