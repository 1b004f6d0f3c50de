fn main() {
    std::process::exit(dutysim::cli::main_entry());
}
