fn main() {
    std::process::exit(levy_galerkin_cli::main_with_args(std::env::args_os()));
}
