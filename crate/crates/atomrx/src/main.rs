fn main() {
    std::process::exit(atomrx::cli::run(std::env::args().skip(1)));
}
