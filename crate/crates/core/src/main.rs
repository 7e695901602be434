fn main() {
    std::process::exit(matching_scheme::cli::main());
}
