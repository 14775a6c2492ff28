use std::process::exit;

fn main() {
    exit(pdmmis_cli::cli_main(std::env::args_os()))
}
