fn main() {
    std::process::exit(toric_cli::dispatch(std::env::args_os()));
}
