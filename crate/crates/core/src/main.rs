use std::process::exit;

fn main() {
    exit(diode_prox::cli::run(std::env::args()));
}
