fn main() {
    std::process::exit(choreo::cli::main());
}
