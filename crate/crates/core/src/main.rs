use std::io::Write;

fn main() {
    let (text, status) = nathom::cli::run(std::env::args_os());
    if !text.is_empty() {
        // a closed pipe is not worth a panic
        let _ = if status == 3 {
            writeln!(std::io::stderr(), "{}", text.trim_end())
        } else {
            writeln!(std::io::stdout(), "{}", text.trim_end())
        };
    }
    std::process::exit(status);
}
