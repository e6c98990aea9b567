fn main() {
    std::process::exit(goodlattice::cli::run(std::env::args_os()));
}
