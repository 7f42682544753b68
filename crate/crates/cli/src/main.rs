use std::io::{stderr, stdout};

fn main() {
    let code = treeval_cli::dispatch(std::env::args(), &mut stdout(), &mut stderr());
    std::process::exit(code);
}
