fn main() {
    std::process::exit(baire::cli::main());
}
