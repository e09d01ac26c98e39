use std::process::exit;

fn main() {
    exit(tflab::cli::run(std::env::args_os()));
}
