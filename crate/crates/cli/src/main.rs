fn main() {
    std::process::exit(horizon_spin_cli::main_with_args(std::env::args_os()));
}
