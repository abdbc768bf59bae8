fn main() {
    std::process::exit(camgt::cli::main());
}
