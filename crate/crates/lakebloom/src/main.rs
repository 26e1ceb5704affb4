fn main() {
    std::process::exit(lakebloom::cli::main_entry());
}
