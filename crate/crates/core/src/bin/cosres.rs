fn main() {
    std::process::exit(cosres::cli::main());
}
