fn main() {
    std::process::exit(maxlab::experiment::run_cli(std::env::args_os()));
}
