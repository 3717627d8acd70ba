fn main() {
    std::process::exit(lpchar::cli::main());
}
