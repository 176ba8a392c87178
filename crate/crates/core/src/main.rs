fn main() {
    std::process::exit(photon_core::cli::main_with_args(std::env::args_os()));
}
