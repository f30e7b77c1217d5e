fn main() {
    std::process::exit(ittm_core::cli::main());
}
