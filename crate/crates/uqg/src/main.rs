fn main() {
    std::process::exit(uqg::cli::main_entry());
}
