use std::io::Write;

fn main() {
    let report = fgflip::cli::run(std::env::args_os());
    let out = report.render();
    let code = report.exit_code();
    if code == 2 {
        let _ = std::io::stderr().write_all(out.as_bytes());
    } else {
        let _ = std::io::stdout().write_all(out.as_bytes());
    }
    std::process::exit(code);
}
