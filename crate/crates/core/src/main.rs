use std::io::{self, IsTerminal};

fn main() {
    let stdin = io::stdin();
    let color = io::stdout().is_terminal();
    let code = sol2eb::cli::run(std::env::args_os(), &mut stdin.lock(), &mut io::stdout(), &mut io::stderr(), color);
    std::process::exit(code);
}
