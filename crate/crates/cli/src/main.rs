fn main() {
    std::process::exit(torus_wigner_cli::main_with_args(std::env::args_os()));
}
