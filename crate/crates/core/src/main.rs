fn main() {
    std::process::exit(emoset::cli::main());
}
